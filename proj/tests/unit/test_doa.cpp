// SPDX-License-Identifier: Apache-2.0
//
// rbloc - resonant beam multi-target localization simulator
// Copyright (C) 2026 The rbloc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "rbloc/doa.hpp"
#include "rbloc/resonance.hpp"

using namespace rbloc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    const RfConstants rf = RfConstants::from_frequency(30e9);

    // Independent steering vector: plane wave phase k <p_m - p_0, d> with d the full unit direction,
    // minus the out-of-plane part (zero for a planar array in z = 0).
    CVector reference_steering(double theta, double phi, const ArrayGeometry &a)
    {
        const Vec3 d(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
        CVector v(static_cast<Eigen::Index>(a.size()));
        for (std::size_t m = 0; m < a.size(); ++m)
        {
            const Vec3 p = a.position(m) - a.position(0);
            v(Eigen::Index(m)) = std::polar(1.0, rf.wavenumber * p.dot(d));
        }
        return v;
    }

    CMatrix exact_covariance(const std::vector<std::pair<double, double>> &dirs, const std::vector<double> &powers,
                             const ArrayGeometry &bs, double eps)
    {
        const auto M = static_cast<Eigen::Index>(bs.size());
        CMatrix R = eps * CMatrix::Identity(M, M);
        for (std::size_t i = 0; i < dirs.size(); ++i)
        {
            const CVector a = steering_vector(deg2rad(dirs[i].first), deg2rad(dirs[i].second), bs, rf);
            R += powers[i] * a * a.adjoint();
        }
        return R;
    }

    GridSpec grid(double step, double th_hi = 60.0, double ph_hi = 90.0)
    {
        GridSpec g;
        g.theta_hi = th_hi;
        g.phi_hi = ph_hi;
        g.step = step;
        return g;
    }
}

TEST_CASE("steering_vector - boresight, half-wave pair and unit modulus")
{
    const ArrayGeometry bs = build_upa(6, 5, 0.005);
    for (double phi : {0.0, 0.7, 2.0})
    {
        const CVector a = steering_vector(0.0, phi, bs, rf);
        CHECK((a - CVector::Ones(a.size())).norm() == 0.0);
    }

    const ArrayGeometry pair = build_upa(1, 2, rf.wavelength / 2.0);
    const CVector a = steering_vector(pi / 2.0, 0.0, pair, rf);
    CHECK_THAT(std::arg(a(0)), WithinAbs(0.0, 1e-15));
    CHECK_THAT(std::abs(std::arg(a(1))), WithinAbs(pi, 1e-12));

    RngStream rng(1);
    for (int t = 0; t < 100; ++t)
    {
        const double th = rng.uniform(-pi / 2.0, pi / 2.0), ph = rng.uniform(0.0, 2.0 * pi);
        const CVector s = steering_vector(th, ph, bs, rf);
        CHECK_THAT(s.squaredNorm(), WithinRel(double(bs.size()), 1e-13));
        CHECK((s - reference_steering(th, ph, bs)).norm() <= 1e-10);
    }
    CHECK_THROWS_AS(steering_vector(pi / 2.0 + 1e-6, 0.0, bs, rf), std::invalid_argument);
}

TEST_CASE("generate_snapshots - noiseless single source is rank one")
{
    const ArrayGeometry bs = build_upa(4, 4, 0.005);
    RngStream rng(2);
    const SnapshotSet s = generate_snapshots({{deg2rad(20.0), deg2rad(40.0), 1e-6}}, bs, rf, 30, 0.0, rng);
    const CVector a = steering_vector(deg2rad(20.0), deg2rad(40.0), bs, rf);
    for (Eigen::Index t = 0; t < s.X.cols(); ++t)
    {
        const CVector x = s.X.col(t);
        const cplx c = a.dot(x) / a.squaredNorm();
        CHECK((x - c * a).norm() <= 1e-14 * x.norm());
        CHECK_THAT(x.squaredNorm(), WithinRel(1e-6, 1e-12));
    }
}

TEST_CASE("generate_snapshots - signal and noise powers match the SNR definition")
{
    const ArrayGeometry bs = build_upa(4, 4, 0.005);
    const std::size_t T = 10000;
    RngStream rng(3);
    const SnapshotSet sig = generate_snapshots({{0.3, 0.2, 2e-5}, {0.6, 1.1, 1e-5}}, bs, rf, T, 0.0, rng);
    const SnapshotSet noi = generate_snapshots({{0.3, 0.2, 0.0}}, bs, rf, T, 3e-5, rng);
    const double ps = sig.X.squaredNorm() / double(T);
    const double pn = noi.X.squaredNorm() / double(T);
    // Two incoherent sources: cross terms average out at rate 1/sqrt(T).
    CHECK_THAT(ps, WithinRel(3e-5, 0.03));
    // |n|^2 per snapshot is Gamma(M, noise/M): relative std 1/sqrt(M T).
    CHECK_THAT(pn, WithinRel(3e-5, 4.0 / std::sqrt(16.0 * T)));
    CHECK_THAT(10.0 * std::log10(ps / pn), WithinAbs(0.0, 0.2));
}

TEST_CASE("generate_snapshots - deterministic for a seed")
{
    const ArrayGeometry bs = build_upa(3, 3, 0.005);
    RngStream a(4), b(4);
    const std::vector<SourceSignal> src{{0.2, 0.3, 1e-6}};
    CHECK(generate_snapshots(src, bs, rf, 20, 1e-7, a).X == generate_snapshots(src, bs, rf, 20, 1e-7, b).X);
}

TEST_CASE("sample_covariance - Hermitian, zero and noise-only limits")
{
    const ArrayGeometry bs = build_upa(4, 4, 0.005);
    SnapshotSet zero;
    zero.X = CMatrix::Zero(16, 5);
    CHECK(sample_covariance(zero).isZero(0.0));

    RngStream rng(5);
    const SnapshotSet s = generate_snapshots({{0.1, 0.1, 0.0}}, bs, rf, 100000, 1.6e-4, rng);
    const CMatrix R = sample_covariance(s);
    CHECK((R - R.adjoint()).norm() <= 1e-12 * R.norm());
    for (Eigen::Index i = 0; i < 16; ++i)
        CHECK_THAT(R(i, i).real(), WithinRel(1e-5, 0.05));

    const Eigen::SelfAdjointEigenSolver<CMatrix> eig(R);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-18);
}

TEST_CASE("SignalSubspace - noise projection vanishes at the true directions")
{
    const ArrayGeometry bs = build_upa(8, 8, 0.005);
    const std::vector<std::pair<double, double>> dirs{{30.0, 15.0}, {10.0, 70.0}};
    const CMatrix R = exact_covariance(dirs, {1.0, 0.5}, bs, 1e-3);
    const SignalSubspace sub = SignalSubspace::from_covariance(R, 2);
    for (const auto &[t, p] : dirs)
    {
        const CVector a = steering_vector(deg2rad(t), deg2rad(p), bs, rf);
        CHECK(sub.noise_projection(a) < 1e-10);

        // Independent form: the explicit noise-subspace projector.
        const Eigen::SelfAdjointEigenSolver<CMatrix> eig(R);
        const CMatrix Qn = eig.eigenvectors().leftCols(R.rows() - 2);
        CHECK((Qn.adjoint() * a).squaredNorm() < 1e-10);
    }
    CHECK(sub.noise_projection(steering_vector(deg2rad(45.0), deg2rad(45.0), bs, rf)) > 1.0);
}

TEST_CASE("SignalSubspace - argument checks")
{
    CHECK_THROWS_AS(SignalSubspace::from_covariance(CMatrix::Identity(4, 4), 4), std::invalid_argument);
    CMatrix bad = CMatrix::Identity(4, 4);
    bad(0, 1) = 1.0;
    CHECK_THROWS_AS(SignalSubspace::from_covariance(bad, 1), std::invalid_argument);
}

TEST_CASE("SignalSubspace - Gram route matches the dense covariance route")
{
    const ArrayGeometry bs = build_upa(8, 8, 0.005);
    RngStream rng(6);
    const SnapshotSet s = generate_snapshots({{0.5, 0.5, 1e-6}, {0.7, 0.9, 5e-7}, {0.3, 1.2, 2e-7}}, bs, rf, 20, 1e-7, rng);
    const SignalSubspace gram = SignalSubspace::from_snapshots(s.X, 3);
    const SignalSubspace dense = SignalSubspace::from_covariance(sample_covariance(s), 3);
    for (int t = 0; t < 50; ++t)
    {
        const CVector a = steering_vector(rng.uniform(0.0, 1.2), rng.uniform(0.0, 6.0), bs, rf);
        CHECK_THAT(gram.noise_projection(a), WithinRel(dense.noise_projection(a), 1e-8));
    }
    CHECK((gram.eigenvalues() - dense.eigenvalues()).norm() <= 1e-10 * dense.eigenvalues().norm());
}

TEST_CASE("music_spectrum - exact single-source covariance peaks at the truth")
{
    const ArrayGeometry bs = build_upa(8, 8, 0.005);
    const CMatrix R = exact_covariance({{30.0, 15.0}}, {1.0}, bs, 1e-4);
    const MusicResult r = music_spectrum(R, 1, grid(0.5), bs, rf);
    REQUIRE(r.estimates.size() == 1);
    CHECK_THAT(r.estimates[0].theta_deg, WithinAbs(30.0, 0.5));
    CHECK_THAT(r.estimates[0].phi_deg, WithinAbs(15.0, 0.5));

    // Scaling R moves no peak.
    const MusicResult scaled = music_spectrum(7.5 * R, 1, grid(0.5), bs, rf);
    CHECK_THAT(scaled.estimates[0].theta_deg, WithinAbs(r.estimates[0].theta_deg, 1e-9));
    CHECK_THAT(scaled.estimates[0].phi_deg, WithinAbs(r.estimates[0].phi_deg, 1e-9));

    for (Eigen::Index i = 0; i < r.spectrum.values.size(); ++i)
    {
        const double v = r.spectrum.values.data()[i];
        CHECK((std::isfinite(v) && v > 0.0));
    }
}

TEST_CASE("music_spectrum - noiseless well-separated sources are recovered to the grid step")
{
    const ArrayGeometry bs = build_upa(10, 10, 0.005);
    const std::vector<std::pair<double, double>> dirs{{15.0, 20.0}, {30.0, 50.0}, {45.0, 30.0}};
    RngStream rng(7);
    std::vector<SourceSignal> src;
    for (const auto &[t, p] : dirs)
        src.push_back({deg2rad(t), deg2rad(p), 1e-6});
    const SnapshotSet s = generate_snapshots(src, bs, rf, 12, 0.0, rng);
    const MusicResult r = music_spectrum(sample_covariance(s), 3, grid(0.5), bs, rf);
    REQUIRE(r.estimates.size() == 3);
    for (const auto &[t, p] : dirs)
    {
        const bool hit = std::any_of(r.estimates.begin(), r.estimates.end(), [&](const Estimate &e) {
            return std::abs(e.theta_deg - t) <= 0.5 && std::abs(e.phi_deg - p) <= 0.5;
        });
        CHECK(hit);
    }
    for (std::size_t i = 1; i < r.estimates.size(); ++i)
        CHECK(r.estimates[i - 1].peak >= r.estimates[i].peak);
}

TEST_CASE("music_spectrum - relabeling the sources leaves the estimate set unchanged")
{
    const ArrayGeometry bs = build_upa(8, 8, 0.005);
    const CMatrix R1 = exact_covariance({{20.0, 30.0}, {40.0, 60.0}}, {1.0, 0.4}, bs, 1e-3);
    const CMatrix R2 = exact_covariance({{40.0, 60.0}, {20.0, 30.0}}, {0.4, 1.0}, bs, 1e-3);
    const MusicResult a = music_spectrum(R1, 2, grid(1.0), bs, rf);
    const MusicResult b = music_spectrum(R2, 2, grid(1.0), bs, rf);
    REQUIRE(a.estimates.size() == b.estimates.size());
    for (std::size_t i = 0; i < a.estimates.size(); ++i)
    {
        CHECK_THAT(a.estimates[i].theta_deg, WithinAbs(b.estimates[i].theta_deg, 1e-6));
        CHECK_THAT(a.estimates[i].phi_deg, WithinAbs(b.estimates[i].phi_deg, 1e-6));
    }
}

TEST_CASE("find_peaks - analytic grids")
{
    SpectrumGrid g;
    for (int i = 0; i <= 20; ++i)
        g.thetas.push_back(i);
    for (int j = 0; j <= 20; ++j)
        g.phis.push_back(j);
    g.values.resize(21, 21);

    SECTION("single quadratic peak is refined to the vertex")
    {
        // dB spectrum exactly quadratic: parabolic refinement is exact.
        for (int i = 0; i <= 20; ++i)
            for (int j = 0; j <= 20; ++j)
                g.values(i, j) = std::pow(10.0, -(std::pow(i - 7.3, 2) + std::pow(j - 12.6, 2)) / 10.0);
        const auto e = find_peaks(g, 1, 2.0);
        REQUIRE(e.size() == 1);
        CHECK_THAT(e[0].theta_deg, WithinAbs(7.3, 1e-9));
        CHECK_THAT(e[0].phi_deg, WithinAbs(12.6, 1e-9));
    }

    SECTION("two equal peaks at the minimum separation come back by lower theta first")
    {
        g.values.setConstant(1.0);
        g.values(12, 5) = 10.0;
        g.values(10, 8) = 10.0;
        const auto e = find_peaks(g, 2, 2.0);
        REQUIRE(e.size() == 2);
        CHECK_THAT(e[0].theta_deg, WithinAbs(10.0, 1e-12));
        CHECK_THAT(e[1].theta_deg, WithinAbs(12.0, 1e-12));
    }

    SECTION("peaks closer than the minimum separation count once")
    {
        g.values.setConstant(1.0);
        g.values(10, 10) = 10.0;
        g.values(11, 12) = 9.0;
        CHECK_THROWS_AS(find_peaks(g, 2, 3.0), UnresolvedSourcesError);
    }

    SECTION("flat grid is unresolved")
    {
        g.values.setConstant(2.0);
        try
        {
            find_peaks(g, 1, 2.0);
            FAIL("expected UnresolvedSourcesError");
        }
        catch (const UnresolvedSourcesError &e)
        {
            CHECK(e.found().empty());
        }
    }
}

TEST_CASE("music_estimate - coarse-to-fine agrees with a fine grid")
{
    const ArrayGeometry bs = build_upa(10, 10, 0.005);
    const CMatrix R = exact_covariance({{25.0, 40.0}, {37.0, 12.0}}, {1.0, 0.6}, bs, 1e-3);
    const SignalSubspace sub = SignalSubspace::from_covariance(R, 2);
    DoaSettings fine, c2f;
    fine.grid = grid(0.25);
    c2f.grid = grid(0.25);
    c2f.coarse_to_fine = true;
    const MusicResult a = music_estimate(sub, 2, fine, bs, rf);
    const MusicResult b = music_estimate(sub, 2, c2f, bs, rf);
    REQUIRE(a.estimates.size() == 2);
    REQUIRE(b.estimates.size() == 2);
    for (std::size_t i = 0; i < 2; ++i)
    {
        CHECK_THAT(a.estimates[i].theta_deg, WithinAbs(b.estimates[i].theta_deg, 0.25));
        CHECK_THAT(a.estimates[i].phi_deg, WithinAbs(b.estimates[i].phi_deg, 0.25));
    }
}

TEST_CASE("bfls_baseline - single element MT gives the Friis power")
{
    const ArrayGeometry bs = build_upa(4, 4, 0.005);
    MtPlacement m;
    m.range = 2.0;
    m.elevation = deg2rad(20.0);
    m.rows = m.cols = 1;
    const ArrayGeometry mt = place_mt(m, 0.005);
    RngStream rng(8);
    const BflsState st = bfls_baseline({mt}, {LinkOperator::build(bs, mt, rf)}, rf, 1e-3, PhaseNoiseModel::from_variance(0.0), rng);

    // Friis per BS element. The MT faces -z and the BS +z, so both see cos = |dz| / l.
    double expected = 0.0;
    for (std::size_t n = 0; n < bs.size(); ++n)
    {
        const Vec3 d = bs.position(n) - mt.position(0);
        const double l = d.norm();
        const double g = rf.max_gain * std::abs(d.z()) / l;
        expected += 1e-3 * g * g * std::pow(rf.wavelength / (4.0 * pi * l), 2);
    }
    CHECK_THAT(st.bs_received_power[0], WithinRel(expected, 1e-12));
}

TEST_CASE("bfls_baseline - boresight beam direction matches the noiseless resonance mode")
{
    // Both received vectors are matched against plane waves sum_m alpha_m r_m over a 1 degree grid.
    const ArrayGeometry bs = build_upa(8, 8, 0.005);
    MtPlacement m;
    m.range = 1.0;
    m.elevation = deg2rad(12.0);
    m.azimuth = deg2rad(40.0);
    m.rows = m.cols = 4;
    const ArrayGeometry mt = place_mt(m, 0.005);
    const LinkOperator op = LinkOperator::build(bs, mt, rf);
    RngStream rng(9);
    const BflsState st = bfls_baseline({mt}, {op}, rf, 1e-3, PhaseNoiseModel::from_variance(0.0), rng);
    const CVector r_bfls = op.apply_transpose(st.mt_weights[0]);

    const CMatrix H = op.dense().entries;
    const Eigen::SelfAdjointEigenSolver<CMatrix> eig(H.adjoint() * H);
    const CVector r_mrls = eig.eigenvectors().col(eig.eigenvalues().size() - 1).conjugate();

    auto beam = [&](const CVector &r) {
        double best = -1.0;
        std::pair<int, int> at{0, 0};
        for (int t = 0; t <= 40; ++t)
            for (int p = 0; p < 360; p += 1)
            {
                const double v = std::norm((steering_vector(deg2rad(t), deg2rad(p), bs, rf).array() * r.array()).sum());
                if (v > best)
                    best = v, at = {t, p};
            }
        return at;
    };
    const auto a = beam(r_bfls), b = beam(r_mrls);
    CHECK(a == b);
    const auto [th, ph] = direction_angles(mt.center - bs.center);
    CHECK(std::abs(a.first - rad2deg(th)) <= 2.0);
    CHECK(std::abs(a.second - rad2deg(ph)) <= 5.0);
}

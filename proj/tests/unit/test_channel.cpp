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

#include <cmath>
#include <limits>
#include <random>

#include "rbloc/channel.hpp"

using namespace rbloc;
using Catch::Approx;

namespace
{
    RfConstants rf_for_wavelength(double lambda)
    {
        return RfConstants::from_frequency(speed_of_light / lambda);
    }

    // Independent Friis oracle: transmit density times receive aperture, angles via acos.
    double friis_power_gain(const Vec3 &from, const Vec3 &n_from, const Vec3 &to, const Vec3 &n_to, double gmax, double lambda)
    {
        const Vec3 d = to - from;
        const double l = d.norm();
        const double a_from = std::acos(std::clamp(n_from.dot(d) / l, -1.0, 1.0));
        const double a_to = std::acos(std::clamp(n_to.dot(-d) / l, -1.0, 1.0));
        const double g_from = a_from < pi / 2 ? gmax * std::cos(a_from) : 0.0;
        const double g_to = a_to < pi / 2 ? gmax * std::cos(a_to) : 0.0;
        const double density = g_from / (4.0 * pi * l * l);  // per watt transmitted
        const double aperture = lambda * lambda * g_to / (4.0 * pi);
        return density * aperture;
    }
}

TEST_CASE("RfConstants - wavelength and wavenumber follow the carrier")
{
    const RfConstants rf = RfConstants::from_frequency(30e9);
    CHECK(rf.wavelength == Approx(speed_of_light / 30e9).epsilon(1e-12));
    CHECK(rf.wavenumber * rf.wavelength == Approx(2.0 * pi).epsilon(1e-12));
    CHECK(rf.max_gain == Approx(3.1405).epsilon(1e-4));
    CHECK_THROWS_AS(RfConstants::from_frequency(0.0), std::invalid_argument);
}

TEST_CASE("element_gain - cosine pattern without back radiation")
{
    const RfConstants rf = RfConstants::from_frequency(30e9);
    CHECK(element_gain(0.0, rf) == Approx(3.1405).epsilon(1e-4));
    CHECK(element_gain(pi / 2, rf) == 0.0);
    CHECK(element_gain(deg2rad(60.0), rf) == Approx(1.5703).epsilon(1e-4));
    CHECK(element_gain(deg2rad(120.0), rf) == 0.0);
    CHECK(element_gain(deg2rad(-60.0), rf) == Approx(element_gain(deg2rad(60.0), rf)));
}

TEST_CASE("transfer_matrix - single pair at 1 m on boresight")
{
    RfConstants rf = rf_for_wavelength(0.01);
    const ArrayGeometry bs = build_upa(1, 1, 0.005);
    const ArrayGeometry mt = build_upa(1, 1, 0.005, Vec3(0, 0, 1), -Vec3::UnitZ());
    const ChannelMatrix H = transfer_matrix(bs, mt, rf);
    REQUIRE(H.rows() == 1);
    REQUIRE(H.cols() == 1);
    const double g = rf.max_gain;
    CHECK(std::norm(H.entries(0, 0)) == Approx(g * g * 1e-4 / (16 * pi * pi)).epsilon(1e-12));
    CHECK(std::remainder(std::arg(H.entries(0, 0)) - rf.wavenumber, 2 * pi) == Approx(0.0).margin(1e-9));

    rf.max_gain = pi;
    CHECK(std::norm(transfer_matrix(bs, mt, rf).entries(0, 0)) == Approx(6.25e-6).epsilon(1e-12));
}

TEST_CASE("transfer_matrix - doubling the distance quarters the power")
{
    const RfConstants rf = rf_for_wavelength(0.01);
    const ArrayGeometry bs = build_upa(1, 1, 0.005);
    const ArrayGeometry mt1 = build_upa(1, 1, 0.005, Vec3(0, 0, 1), -Vec3::UnitZ());
    const ArrayGeometry mt2 = build_upa(1, 1, 0.005, Vec3(0, 0, 2), -Vec3::UnitZ());
    const double p1 = std::norm(transfer_matrix(bs, mt1, rf).entries(0, 0));
    const double p2 = std::norm(transfer_matrix(bs, mt2, rf).entries(0, 0));
    CHECK(p2 / p1 == Approx(0.25).epsilon(1e-14));
}

TEST_CASE("transfer_matrix - far-field guard")
{
    const RfConstants rf = rf_for_wavelength(0.01);
    const ArrayGeometry bs = build_upa(1, 1, 0.005);
    const ArrayGeometry near = build_upa(1, 1, 0.005, Vec3(0, 0, 0.09), -Vec3::UnitZ());
    CHECK_THROWS_AS(transfer_matrix(bs, near, rf), GeometryError);
    const ArrayGeometry ok = build_upa(1, 1, 0.005, Vec3(0, 0, 0.11), -Vec3::UnitZ());
    CHECK_NOTHROW(transfer_matrix(bs, ok, rf));
}

TEST_CASE("transfer_matrix - back hemisphere receives nothing")
{
    const RfConstants rf = rf_for_wavelength(0.01);
    const ArrayGeometry bs = build_upa(1, 1, 0.005);
    const ArrayGeometry behind = build_upa(1, 1, 0.005, Vec3(0, 0, -1), Vec3::UnitZ());
    CHECK(std::abs(transfer_matrix(bs, behind, rf).entries(0, 0)) == 0.0);
}

TEST_CASE("Property - Friis consistency, reciprocity and distance scaling on random geometries")
{
    const RfConstants rf = RfConstants::from_frequency(30e9);
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> th(0.0, deg2rad(70.0)), ph(-pi, pi), rr(0.5, 5.0);
    std::uniform_int_distribution<int> sz(1, 4);
    for (int trial = 0; trial < 100; ++trial)
    {
        const ArrayGeometry bs = build_upa(std::size_t(sz(gen)), std::size_t(sz(gen)), 0.005);
        MtPlacement p;
        p.range = rr(gen);
        p.elevation = th(gen);
        p.azimuth = ph(gen);
        p.rows = std::size_t(sz(gen));
        p.cols = std::size_t(sz(gen));
        const ArrayGeometry mt = place_mt(p, 0.005);
        const ChannelMatrix H = transfer_matrix(bs, mt, rf);
        const ChannelMatrix Hr = transfer_matrix(mt, bs, rf);

        REQUIRE(Hr.entries.rows() == H.entries.cols());
        CHECK((Hr.entries.array() == H.entries.transpose().array()).all());

        for (Eigen::Index m = 0; m < H.cols(); ++m)
            for (Eigen::Index n = 0; n < H.rows(); ++n)
            {
                const double want = friis_power_gain(bs.position(std::size_t(m)), bs.boresight, mt.position(std::size_t(n)),
                                                     mt.boresight, rf.max_gain, rf.wavelength);
                CHECK(std::abs(std::norm(H.entries(n, m)) - want) <= 1e-10 * want);
            }

        // scaling the MT position (same element offsets) with fixed angles
        MtPlacement q = p;
        q.rows = q.cols = 1;
        MtPlacement q2 = q;
        q2.range = 2.5 * q.range;
        const ArrayGeometry b1 = build_upa(1, 1, 0.005);
        const double p1 = std::norm(transfer_matrix(b1, place_mt(q, 0.005), rf).entries(0, 0));
        const double p2 = std::norm(transfer_matrix(b1, place_mt(q2, 0.005), rf).entries(0, 0));
        CHECK(p2 / p1 == Approx(1.0 / (2.5 * 2.5)).epsilon(1e-12));
    }
}

TEST_CASE("psd_to_variance - closed forms")
{
    CHECK(psd_to_variance(-60.0, 1e3, 1e5) == Approx(0.198).epsilon(1e-12));
    CHECK(psd_to_variance(-std::numeric_limits<double>::infinity(), 1e3, 1e5) == 0.0);
    const std::vector<PsdSegment> two{{1e3, 1e4, -60.0}, {1e4, 1e5, -80.0}};
    CHECK(psd_to_variance(two) == Approx(0.0198).epsilon(1e-12));
    CHECK(PhaseNoiseModel::from_psd(two).variance == Approx(0.0198).epsilon(1e-12));
}

TEST_CASE("psd_to_variance - invalid bands")
{
    CHECK_THROWS_AS(psd_to_variance(std::vector<PsdSegment>{}), std::invalid_argument);
    CHECK_THROWS_AS(psd_to_variance(-60.0, 1e3, 1e3), std::invalid_argument);
    CHECK_THROWS_AS(psd_to_variance(-60.0, 0.0, 1e3), std::invalid_argument);
    CHECK_THROWS_AS(psd_to_variance(std::vector<PsdSegment>{{1e3, 1e4, -60.0}, {5e3, 2e4, -60.0}}), std::invalid_argument);
}

TEST_CASE("sample_phase_noise - zero variance, moments, determinism")
{
    RngStream r0(1);
    CHECK(sample_phase_noise(PhaseNoiseModel::from_variance(0.0), 100, r0).isZero(0.0));

    const PhaseNoiseModel m = PhaseNoiseModel::from_variance(0.3162);
    RngStream r1(42);
    const Eigen::VectorXd x = sample_phase_noise(m, 1000000, r1);
    const double mean = x.mean();
    const double var = (x.array() - mean).square().sum() / double(x.size() - 1);
    CHECK(var >= 0.30);
    CHECK(var <= 0.33);
    CHECK(std::abs(mean) < 3.0 * std::sqrt(0.3162 / 1e6));
    CHECK(std::abs(var - 0.3162) < 3.0 * std::sqrt(2.0 / 1e6) * 0.3162);

    RngStream a(9), b(9);
    CHECK((sample_phase_noise(m, 1000, a).array() == sample_phase_noise(m, 1000, b).array()).all());
    CHECK_THROWS_AS(PhaseNoiseModel::from_variance(-1.0), std::invalid_argument);
}

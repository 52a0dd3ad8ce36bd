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
#include "rbloc/doa.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rbloc/parallel.hpp"

namespace rbloc
{
    namespace
    {
        std::vector<double> axis_nodes(double lo, double hi, double step)
        {
            const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
            std::vector<double> v(n);
            for (std::size_t i = 0; i < n; ++i)
                v[i] = lo + double(i) * step;
            return v;
        }

        // Unit-modulus lattice phases exp(j i w) for i in [0, n).
        void lattice_phases(std::size_t n, double w, std::vector<cplx> &out)
        {
            out.resize(n);
            for (std::size_t i = 0; i < n; ++i)
                out[i] = std::polar(1.0, double(i) * w);
        }

        void fill_steering(double theta, double phi, const ArrayGeometry &bs, const RfConstants &rf, CVector &alpha,
                           std::vector<cplx> &ex, std::vector<cplx> &ey)
        {
            const Vec3 d = direction_vector(theta, phi);
            lattice_phases(bs.cols, rf.wavenumber * bs.spacing * bs.x_axis.dot(d), ex);
            lattice_phases(bs.rows, rf.wavenumber * bs.spacing * bs.y_axis.dot(d), ey);
            alpha.resize(static_cast<Eigen::Index>(bs.size()));
            for (std::size_t iy = 0; iy < bs.rows; ++iy)
                for (std::size_t ix = 0; ix < bs.cols; ++ix)
                    alpha(static_cast<Eigen::Index>(iy * bs.cols + ix)) = ey[iy] * ex[ix];
        }

        double to_db(double v) { return 10.0 * std::log10(v); }

        // Vertex offset of the parabola through (-1, a), (0, b), (1, c), limited to half a cell.
        double parabolic_offset(double a, double b, double c)
        {
            const double den = a - 2.0 * b + c;
            if (!(den < 0.0))
                return 0.0;
            return std::clamp(0.5 * (a - c) / den, -0.5, 0.5);
        }

        std::string describe(const std::vector<Estimate> &found)
        {
            std::ostringstream os;
            os << "found " << found.size() << ":";
            for (const Estimate &e : found)
                os << " (" << e.theta_deg << ", " << e.phi_deg << ")";
            return os.str();
        }
    }

    void GridSpec::validate() const
    {
        if (!(step > 0.0))
            throw std::invalid_argument("grid: step_deg must be positive");
        if (!(theta_hi >= theta_lo) || !(phi_hi >= phi_lo))
            throw std::invalid_argument("grid: ranges must be ordered [lo, hi]");
        if (!(std::abs(theta_lo) <= 90.0 && std::abs(theta_hi) <= 90.0))
            throw std::invalid_argument("grid: theta_range must stay within [-90, 90] deg");
    }

    std::vector<double> GridSpec::thetas() const { return axis_nodes(theta_lo, theta_hi, step); }
    std::vector<double> GridSpec::phis() const { return axis_nodes(phi_lo, phi_hi, step); }

    void DoaSettings::validate() const
    {
        grid.validate();
        if (snapshots < 1)
            throw std::invalid_argument("doa: snapshots must be at least 1");
        if (!(noise_power >= 0.0) || !std::isfinite(noise_power))
            throw std::invalid_argument("doa: noise_power_w must be finite and nonnegative");
        if (!(coarse_step > 0.0 && refine_step > 0.0 && refine_halfwidth >= 0.0))
            throw std::invalid_argument("doa: coarse/refine steps must be positive");
        if (!(min_separation >= 0.0))
            throw std::invalid_argument("doa: min_separation_deg must be nonnegative");
    }

    CVector steering_vector(double theta, double phi, const ArrayGeometry &bs, const RfConstants &rf)
    {
        if (!(std::abs(theta) <= pi / 2.0))
            throw std::invalid_argument("steering_vector: |theta| must not exceed 90 deg");
        CVector alpha;
        std::vector<cplx> ex, ey;
        fill_steering(theta, phi, bs, rf, alpha, ex, ey);
        return alpha;
    }

    SnapshotSet generate_snapshots(const std::vector<SourceSignal> &sources, const ArrayGeometry &bs, const RfConstants &rf,
                                   std::size_t T, double noise_power, RngStream &rng)
    {
        if (T < 1)
            throw std::invalid_argument("generate_snapshots: T must be at least 1");
        if (!(noise_power >= 0.0))
            throw std::invalid_argument("generate_snapshots: noise power must be nonnegative");

        const auto M = static_cast<Eigen::Index>(bs.size());
        const auto I = static_cast<Eigen::Index>(sources.size());
        const auto Tn = static_cast<Eigen::Index>(T);

        CMatrix A(M, I);
        for (Eigen::Index i = 0; i < I; ++i)
            A.col(i) = steering_vector(sources[std::size_t(i)].theta, sources[std::size_t(i)].phi, bs, rf);

        CMatrix S(I, Tn);
        for (Eigen::Index t = 0; t < Tn; ++t)
            for (Eigen::Index i = 0; i < I; ++i)
            {
                const double amp = std::sqrt(sources[std::size_t(i)].power / double(M));
                S(i, t) = std::polar(amp, rng.uniform(0.0, 2.0 * pi));
            }

        SnapshotSet out;
        out.X = A * S;
        out.noise_power = noise_power;
        out.source_count = sources.size();
        if (noise_power > 0.0)
        {
            const double sd = std::sqrt(noise_power / (2.0 * double(M)));
            for (Eigen::Index t = 0; t < Tn; ++t)
                for (Eigen::Index m = 0; m < M; ++m)
                {
                    const double re = rng.normal();
                    const double im = rng.normal();
                    out.X(m, t) += cplx(sd * re, sd * im);
                }
        }
        return out;
    }

    CMatrix sample_covariance(const SnapshotSet &s)
    {
        if (s.X.cols() < 1)
            throw std::invalid_argument("sample_covariance: no snapshots");
        CMatrix R = s.X * s.X.adjoint() / double(s.X.cols());
        // exact Hermitian symmetry
        R = (0.5 * (R + R.adjoint())).eval();
        return R;
    }

    SignalSubspace SignalSubspace::from_covariance(const CMatrix &R, std::size_t I)
    {
        if (R.rows() != R.cols())
            throw std::invalid_argument("MUSIC: covariance must be square");
        const Eigen::Index M = R.rows();
        if (I < 1 || static_cast<Eigen::Index>(I) >= M)
            throw std::invalid_argument("MUSIC: source count must satisfy 1 <= I < M");
        const double scale = R.norm();
        if ((R - R.adjoint()).norm() > 1e-10 * std::max(scale, 1e-300))
            throw std::invalid_argument("MUSIC: covariance is not Hermitian");

        Eigen::SelfAdjointEigenSolver<CMatrix> es(R);
        if (es.info() != Eigen::Success)
            throw std::runtime_error("MUSIC: eigendecomposition failed");

        SignalSubspace s;
        s.M_ = M;
        const auto n = static_cast<Eigen::Index>(I);
        s.Qs_ = es.eigenvectors().rightCols(n).rowwise().reverse();
        s.eig_ = es.eigenvalues().tail(n).reverse();
        return s;
    }

    SignalSubspace SignalSubspace::from_snapshots(const CMatrix &X, std::size_t I)
    {
        const Eigen::Index M = X.rows();
        const Eigen::Index T = X.cols();
        if (T < 1)
            throw std::invalid_argument("MUSIC: no snapshots");
        if (I < 1 || static_cast<Eigen::Index>(I) >= M)
            throw std::invalid_argument("MUSIC: source count must satisfy 1 <= I < M");
        if (T >= M || static_cast<Eigen::Index>(I) > T)
        {
            SnapshotSet s;
            s.X = X;
            return from_covariance(sample_covariance(s), I);
        }

        // R = X X^H / T shares its nonzero spectrum with G = X^H X / T, and maps G's
        // eigenvectors v to R's eigenvectors X v.
        CMatrix G = X.adjoint() * X / double(T);
        G = (0.5 * (G + G.adjoint())).eval();
        Eigen::SelfAdjointEigenSolver<CMatrix> es(G);
        if (es.info() != Eigen::Success)
            throw std::runtime_error("MUSIC: eigendecomposition failed");

        const auto n = static_cast<Eigen::Index>(I);
        const CMatrix V = es.eigenvectors().rightCols(n).rowwise().reverse();
        const CMatrix U = X * V;
        Eigen::HouseholderQR<CMatrix> qr(U);

        SignalSubspace s;
        s.M_ = M;
        s.Qs_ = qr.householderQ() * CMatrix::Identity(M, n);
        s.eig_ = es.eigenvalues().tail(n).reverse();
        return s;
    }

    double SignalSubspace::noise_projection(const CVector &alpha) const
    {
        const double a2 = alpha.squaredNorm();
        const double p = a2 - (Qs_.adjoint() * alpha).squaredNorm();
        return std::max(p, floor_rel * a2);
    }

    SpectrumGrid music_grid(const SignalSubspace &sub, const GridSpec &grid, const ArrayGeometry &bs, const RfConstants &rf)
    {
        grid.validate();
        if (static_cast<Eigen::Index>(bs.size()) != sub.array_size())
            throw std::invalid_argument("MUSIC: subspace does not match the array");

        SpectrumGrid out;
        out.thetas = grid.thetas();
        out.phis = grid.phis();
        out.values.resize(static_cast<Eigen::Index>(out.thetas.size()), static_cast<Eigen::Index>(out.phis.size()));

        parallel_for(out.thetas.size(), [&](std::size_t i) {
            CVector alpha;
            std::vector<cplx> ex, ey;
            const double th = deg2rad(out.thetas[i]);
            for (std::size_t j = 0; j < out.phis.size(); ++j)
            {
                fill_steering(th, deg2rad(out.phis[j]), bs, rf, alpha, ex, ey);
                out.values(Eigen::Index(i), Eigen::Index(j)) = 1.0 / sub.noise_projection(alpha);
            }
        });
        return out;
    }

    std::vector<Estimate> find_peaks(const SpectrumGrid &sp, std::size_t I, double min_separation_deg)
    {
        if (I < 1)
            throw std::invalid_argument("find_peaks: source count must be at least 1");
        const Eigen::Index nt = sp.values.rows();
        const Eigen::Index np = sp.values.cols();
        if (nt == 0 || np == 0)
            throw std::invalid_argument("find_peaks: empty spectrum");

        struct Node
        {
            Eigen::Index i, j;
            double v;
        };
        std::vector<Node> cand;
        bool pole_taken = false;
        for (Eigen::Index i = 0; i < nt; ++i)
        {
            const bool pole = sp.thetas[std::size_t(i)] == 0.0;
            for (Eigen::Index j = 0; j < np; ++j)
            {
                const double v = sp.values(i, j);
                bool ge_all = true, gt_any = false, any = false;
                for (Eigen::Index di = -1; di <= 1 && ge_all; ++di)
                    for (Eigen::Index dj = -1; dj <= 1; ++dj)
                    {
                        if (di == 0 && dj == 0)
                            continue;
                        const Eigen::Index a = i + di, b = j + dj;
                        if (a < 0 || a >= nt || b < 0 || b >= np)
                            continue;
                        any = true;
                        const double w = sp.values(a, b);
                        if (v < w)
                        {
                            ge_all = false;
                            break;
                        }
                        if (v > w)
                            gt_any = true;
                    }
                if (!ge_all || (any && !gt_any))
                    continue;
                if (pole)
                {
                    if (pole_taken)
                        continue;
                    pole_taken = true;
                }
                cand.push_back({i, j, v});
            }
        }

        std::stable_sort(cand.begin(), cand.end(), [&](const Node &a, const Node &b) {
            if (a.v != b.v)
                return a.v > b.v;
            if (a.i != b.i)
                return sp.thetas[std::size_t(a.i)] < sp.thetas[std::size_t(b.i)];
            return sp.phis[std::size_t(a.j)] < sp.phis[std::size_t(b.j)];
        });

        std::vector<Estimate> picked;
        std::vector<Node> nodes;
        for (const Node &c : cand)
        {
            if (picked.size() == I)
                break;
            const double th = sp.thetas[std::size_t(c.i)], ph = sp.phis[std::size_t(c.j)];
            bool separated = true;
            for (const Node &o : nodes)
            {
                const double d = std::max(std::abs(th - sp.thetas[std::size_t(o.i)]), std::abs(ph - sp.phis[std::size_t(o.j)]));
                if (d < min_separation_deg - 1e-9)
                {
                    separated = false;
                    break;
                }
            }
            if (!separated)
                continue;
            nodes.push_back(c);

            Estimate e{th, ph, c.v};
            if (c.i > 0 && c.i + 1 < nt && th != 0.0)
            {
                const double dth = sp.thetas[std::size_t(c.i + 1)] - th;
                e.theta_deg += dth * parabolic_offset(to_db(sp.values(c.i - 1, c.j)), to_db(c.v), to_db(sp.values(c.i + 1, c.j)));
            }
            if (c.j > 0 && c.j + 1 < np && th != 0.0)
            {
                const double dph = sp.phis[std::size_t(c.j + 1)] - ph;
                e.phi_deg += dph * parabolic_offset(to_db(sp.values(c.i, c.j - 1)), to_db(c.v), to_db(sp.values(c.i, c.j + 1)));
            }
            picked.push_back(e);
        }

        if (picked.size() < I)
            throw UnresolvedSourcesError("unresolved sources: wanted " + std::to_string(I) + ", " + describe(picked), picked);
        return picked;
    }

    MusicResult music_spectrum(const CMatrix &R, std::size_t I, const GridSpec &grid, const ArrayGeometry &bs,
                               const RfConstants &rf, double min_separation_deg)
    {
        const SignalSubspace sub = SignalSubspace::from_covariance(R, I);
        MusicResult res;
        res.grid = grid;
        res.spectrum = music_grid(sub, grid, bs, rf);
        res.estimates = find_peaks(res.spectrum, I, min_separation_deg);
        return res;
    }

    MusicResult music_estimate(const SignalSubspace &sub, std::size_t I, const DoaSettings &settings,
                               const ArrayGeometry &bs, const RfConstants &rf)
    {
        settings.validate();
        MusicResult res;
        res.grid = settings.grid;
        if (!settings.coarse_to_fine)
        {
            res.spectrum = music_grid(sub, res.grid, bs, rf);
            res.estimates = find_peaks(res.spectrum, I, settings.min_separation);
            return res;
        }

        res.grid.step = settings.coarse_step;
        res.spectrum = music_grid(sub, res.grid, bs, rf);
        const std::vector<Estimate> coarse = find_peaks(res.spectrum, I, settings.min_separation);

        const double rs = settings.refine_step;
        const double hw = settings.refine_halfwidth;
        for (const Estimate &c : coarse)
        {
            GridSpec fine;
            fine.step = rs;
            fine.theta_lo = std::max(settings.grid.theta_lo, std::round((c.theta_deg - hw) / rs) * rs);
            fine.theta_hi = std::min(settings.grid.theta_hi, std::round((c.theta_deg + hw) / rs) * rs);
            fine.phi_lo = std::max(settings.grid.phi_lo, std::round((c.phi_deg - hw) / rs) * rs);
            fine.phi_hi = std::min(settings.grid.phi_hi, std::round((c.phi_deg + hw) / rs) * rs);
            if (fine.theta_hi < fine.theta_lo || fine.phi_hi < fine.phi_lo)
            {
                res.estimates.push_back(c);
                continue;
            }
            const SpectrumGrid sp = music_grid(sub, fine, bs, rf);
            try
            {
                res.estimates.push_back(find_peaks(sp, 1, 0.0).front());
            }
            catch (const UnresolvedSourcesError &)
            {
                res.estimates.push_back(c);
            }
        }
        std::stable_sort(res.estimates.begin(), res.estimates.end(),
                         [](const Estimate &a, const Estimate &b) { return a.peak > b.peak; });
        return res;
    }

    BflsState bfls_baseline(const std::vector<ArrayGeometry> &mts, const std::vector<LinkOperator> &links,
                            const RfConstants &rf, double transmit_power, const PhaseNoiseModel &noise, RngStream &rng)
    {
        if (mts.empty() || mts.size() != links.size())
            throw std::invalid_argument("bfls_baseline: need one link per MT and at least one MT");
        if (!(transmit_power >= 0.0))
            throw std::invalid_argument("bfls_baseline: transmit power must be nonnegative");

        BflsState st;
        for (std::size_t i = 0; i < mts.size(); ++i)
        {
            const ArrayGeometry &mt = mts[i];
            const Vec3 u = mt.center.normalized();
            const auto N = static_cast<Eigen::Index>(mt.size());
            const double amp = std::sqrt(transmit_power / double(N));
            CVector w(N);
            for (Eigen::Index n = 0; n < N; ++n)
                w(n) = std::polar(amp, -rf.wavenumber * (mt.position(std::size_t(n)) - mt.center).dot(u));
            if (!noise.silent())
            {
                const Eigen::VectorXd ph = sample_phase_noise(noise, std::size_t(N), rng);
                for (Eigen::Index n = 0; n < N; ++n)
                    w(n) *= std::polar(1.0, ph(n));
            }
            st.bs_received_power.push_back(total_power(links[i].apply_transpose(w)));
            st.mt_weights.push_back(std::move(w));
        }
        return st;
    }
}

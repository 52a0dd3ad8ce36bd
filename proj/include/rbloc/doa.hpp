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
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "rbloc/channel.hpp"
#include "rbloc/geometry.hpp"
#include "rbloc/link.hpp"
#include "rbloc/rng.hpp"
#include "rbloc/types.hpp"

namespace rbloc
{
    // Search grid in degrees. Nodes are lo, lo + step, ... up to hi inclusive.
    struct GridSpec
    {
        double theta_lo = 0.0, theta_hi = 60.0;
        double phi_lo = 0.0, phi_hi = 90.0;
        double step = 0.25;

        void validate() const;
        std::vector<double> thetas() const;
        std::vector<double> phis() const;
    };

    struct DoaSettings
    {
        std::size_t snapshots = 200;      // T
        double noise_power = 3e-5;        // W, total over the array per snapshot
        GridSpec grid;
        bool coarse_to_fine = false;
        double coarse_step = 1.0;         // deg
        double refine_halfwidth = 1.0;    // deg
        double refine_step = 0.05;        // deg
        double min_separation = 2.0;      // deg, Chebyshev on (theta, phi)

        void validate() const;
    };

    // One incoherent source seen by the BS: direction and received power.
    struct SourceSignal
    {
        double theta = 0.0; // rad
        double phi = 0.0;   // rad
        double power = 0.0; // W at the BS, summed over elements
    };

    struct SnapshotSet
    {
        CMatrix X;                // M x T
        double noise_power = 0.0; // W per snapshot, summed over elements
        std::size_t source_count = 0;
    };

    struct Estimate
    {
        double theta_deg = 0.0;
        double phi_deg = 0.0;
        double peak = 0.0; // spectrum value at the selected node
    };

    // Fewer than the requested number of separated local maxima.
    class UnresolvedSourcesError : public std::runtime_error
    {
    public:
        UnresolvedSourcesError(const std::string &what, std::vector<Estimate> found)
            : std::runtime_error(what), found_(std::move(found)) {}
        const std::vector<Estimate> &found() const { return found_; }

    private:
        std::vector<Estimate> found_;
    };

    // values(i, j) belongs to (thetas[i], phis[j]).
    struct SpectrumGrid
    {
        std::vector<double> thetas; // deg
        std::vector<double> phis;   // deg
        RMatrix values;
    };

    struct MusicResult
    {
        SpectrumGrid spectrum;
        GridSpec grid;
        std::vector<Estimate> estimates; // descending peak value
    };

    // alpha_m = exp(j k <p_m - p_0, d(theta, phi)>) restricted to the array plane.
    // Requires |theta| <= pi/2.
    CVector steering_vector(double theta, double phi, const ArrayGeometry &bs, const RfConstants &rf);

    // x_t = sum_i alpha_i s_i(t) + n(t), s_i(t) = sqrt(P_i / M) exp(j psi_it), psi uniform,
    // n circular Gaussian with variance noise_power / M per element.
    SnapshotSet generate_snapshots(const std::vector<SourceSignal> &sources, const ArrayGeometry &bs, const RfConstants &rf,
                                   std::size_t T, double noise_power, RngStream &rng);

    // R = X X^H / T.
    CMatrix sample_covariance(const SnapshotSet &s);

    // Orthonormal basis of the I-dimensional signal subspace. The noise-subspace projection of a
    // steering vector is |alpha|^2 - |Q_S^H alpha|^2, which equals alpha^H Q_N Q_N^H alpha exactly
    // in exact arithmetic.
    class SignalSubspace
    {
    public:
        // Dense eigendecomposition of a Hermitian covariance. Throws std::invalid_argument for
        // I >= M or a non-Hermitian input.
        static SignalSubspace from_covariance(const CMatrix &R, std::size_t I);

        // Same subspace from the M x T snapshot matrix. For T < M it decomposes the T x T Gram
        // matrix X^H X / T and maps the leading eigenvectors back through X.
        static SignalSubspace from_snapshots(const CMatrix &X, std::size_t I);

        const CMatrix &basis() const { return Qs_; }
        const Eigen::VectorXd &eigenvalues() const { return eig_; } // leading I, descending
        Eigen::Index array_size() const { return M_; }

        // alpha^H Q_N Q_N^H alpha, clamped below at floor_rel * |alpha|^2.
        double noise_projection(const CVector &alpha) const;

        static constexpr double floor_rel = 1e-14;

    private:
        CMatrix Qs_;
        Eigen::VectorXd eig_;
        Eigen::Index M_ = 0;
    };

    // Spectrum 1 / (alpha^H Q_N Q_N^H alpha) over `grid`.
    SpectrumGrid music_grid(const SignalSubspace &sub, const GridSpec &grid, const ArrayGeometry &bs, const RfConstants &rf);

    // The I strongest separated local maxima, each refined by one parabolic step per axis on the
    // dB spectrum. A node is a local maximum if it is >= all of its 8 neighbours and > at least one.
    // Nodes on a theta = 0 row are one direction, so at most one candidate is taken from that row.
    std::vector<Estimate> find_peaks(const SpectrumGrid &spectrum, std::size_t I, double min_separation_deg);

    // Full MUSIC over a covariance: subspace, grid, peaks.
    MusicResult music_spectrum(const CMatrix &R, std::size_t I, const GridSpec &grid, const ArrayGeometry &bs,
                               const RfConstants &rf, double min_separation_deg = 2.0);

    // MUSIC on a prepared subspace following `settings` (single grid or coarse-to-fine).
    MusicResult music_estimate(const SignalSubspace &sub, std::size_t I, const DoaSettings &settings,
                               const ArrayGeometry &bs, const RfConstants &rf);

    // Active baseline: MT i transmits once, weights sqrt(P_t / N) exp(-j k <q_n - c_i, c_i/|c_i|>)
    // times per-element phase noise, received through H_i^T.
    struct BflsState
    {
        std::vector<double> bs_received_power; // W per MT
        std::vector<CVector> mt_weights;
    };

    BflsState bfls_baseline(const std::vector<ArrayGeometry> &mts, const std::vector<LinkOperator> &links,
                            const RfConstants &rf, double transmit_power, const PhaseNoiseModel &noise, RngStream &rng);
}

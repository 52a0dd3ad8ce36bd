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
#include <iosfwd>
#include <string>
#include <vector>

#include "rbloc/channel.hpp"
#include "rbloc/link.hpp"
#include "rbloc/rng.hpp"
#include "rbloc/types.hpp"

namespace rbloc
{
    // BS power amplifier: linear power gain with an output ceiling.
    struct PaModel
    {
        double max_gain = 251.18864315095797; // linear power gain (24 dB)
        double max_output_power = 1.0;        // W

        static PaModel from_db(double gain_db, double max_output_w);
        void validate() const;

        // Output power for a given input power.
        double output_power(double input_power) const;
    };

    struct ResonanceSettings
    {
        std::size_t max_iterations = 500;
        double convergence_rel = 1e-5;
        bool oracle_mode = false;        // renormalize the BS transmit power every iteration
        double initial_power = 1e-3;     // W, BS broadcast power at iteration 0
        double collapse_floor_rel = 1e-20; // received power below this fraction of initial_power ends the run

        void validate() const;
    };

    // One BS <-> MT path. `H` maps BS excitation to MT received amplitudes (N x M).
    struct MtLink
    {
        LinkOperator H;
        double reflection_ratio = 0.0;
    };

    struct IterationRecord
    {
        double bs_received_power = 0.0;             // W, total over all MT returns
        double bs_transmit_power = 0.0;             // W
        std::vector<double> mt_received_power;      // W, per MT
        std::vector<double> bs_received_power_from; // W, per MT: |H_i^T c_i|^2
    };

    struct ResonanceTrace
    {
        std::vector<IterationRecord> per_iteration;
        bool converged = false;
        bool collapsed = false;
        std::string diagnostic; // "resonance-collapse" when the loop dies out, else empty
        CVector final_bs_excitation;              // transmit vector of the last recorded iteration
        std::vector<CVector> final_mt_excitations; // reflected vectors of the last recorded iteration

        std::size_t iterations() const { return per_iteration.size(); }
        const IterationRecord &last() const { return per_iteration.back(); }
    };

    // sqrt(beta) * conj(received) * exp(j phi_noise), one noise draw per element.
    CVector mt_reflect(const CVector &received, double reflection_ratio, const PhaseNoiseModel &noise, RngStream &rng);

    // Conjugate, scale to pa.output_power(|received|^2), add per-element phase noise.
    // Zero input gives the zero vector and consumes no random draws.
    CVector bs_process(const CVector &received, const PaModel &pa, const PhaseNoiseModel &noise, RngStream &rng);

    // Uniform amplitude, i.i.d. uniform(0, 2 pi) phases, total power `power`.
    CVector initial_excitation(std::size_t elements, double power, RngStream &rng);

    // Runs the power cycle from `a0`. Iteration k records the transmit vector a_k, the MT
    // receptions H_i a_k and the total BS return; the run stops once two consecutive BS received
    // powers agree to settings.convergence_rel, or on collapse, or at max_iterations.
    ResonanceTrace iterate_resonance(const std::vector<MtLink> &links, const CVector &a0, const PaModel &pa,
                                     const PhaseNoiseModel &noise, const ResonanceSettings &settings, RngStream &rng);

    // eta = sum_i P_MT,i^r / P_BS^t at the last recorded iteration.
    // Throws UndefinedEfficiencyError if that transmit power is zero.
    double transmission_efficiency(const ResonanceTrace &trace);

    // Columns: iter, p_bs_rx_w, p_bs_tx_w, p_mt1_rx_w, ... (no header comment line).
    void write_trace_csv(std::ostream &os, const ResonanceTrace &trace);
}

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

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "rbloc/doa.hpp"
#include "rbloc/scenario.hpp"

namespace rbloc
{
    enum class System
    {
        mrls,
        bfls
    };

    const char *to_string(System s);
    System system_from_string(const std::string &s);

    // 10 log10(sum(powers) / noise_power); -inf for zero signal. Throws for noise_power <= 0.
    double snr_db(const std::vector<double> &powers, double noise_power);

    struct MtOutcome
    {
        double true_theta_deg = 0.0, true_phi_deg = 0.0;
        double est_theta_deg = 0.0, est_phi_deg = 0.0;
        double err_theta_deg = 0.0, err_phi_deg = 0.0; // absolute, phi wrapped to [0, 180]; NaN if unresolved
    };

    struct TrialRecord
    {
        std::string scenario_id;
        std::size_t value_index = 0;
        std::size_t trial_index = 0;
        std::uint64_t seed = 0;
        System system = System::mrls;
        double snr_db = 0.0;
        double efficiency = 0.0; // NaN when undefined (BFLS, dead loop)
        std::size_t iterations = 0;
        bool converged = false;
        std::string failure; // empty on success, else "resonance-collapse" or "unresolved-sources"
        std::vector<MtOutcome> per_mt;

        bool failed() const { return !failure.empty(); }
    };

    // sqrt(mean(dtheta^2) + mean(dphi^2)) over successful records for one MT, degrees.
    // Throws std::invalid_argument when no successful record is given.
    double rmse(const std::vector<TrialRecord> &records, std::size_t mt_index);

    // Same, pooling the errors of every MT; NaN when no record succeeded.
    double rmse_pooled(const std::vector<TrialRecord> &records);

    // Assigns estimates to truths with the permutation of least total squared angular error.
    std::vector<MtOutcome> match_estimates(const std::vector<std::pair<double, double>> &truth_deg,
                                           const std::vector<Estimate> &estimates);

    // Extra products of one trial, for callers that write spectra.
    struct TrialDetail
    {
        ResonanceTrace trace;        // MRLS only
        BflsState bfls;              // BFLS only
        MusicResult music;           // empty when DOA was skipped
        bool music_ran = false;
    };

    // Resonance or BFLS, snapshots, MUSIC, matching. Failures are recorded, not thrown.
    TrialRecord run_trial(const PreparedScenario &p, System system, std::uint64_t seed, TrialDetail *detail = nullptr);

    enum class SweepVariable
    {
        elevation,
        distance,
        noise_power,
        reference_grid
    };

    struct SweepSpec
    {
        SweepVariable variable = SweepVariable::elevation;
        std::vector<double> values;                          // deg, m or W
        std::vector<std::pair<double, double>> grid_points;  // (theta, phi) deg, reference_grid only
        std::size_t trials = 1;
        std::vector<System> systems{System::mrls};
        int mt = -1; // MT the variable applies to; -1 = every MT

        std::size_t count() const { return variable == SweepVariable::reference_grid ? grid_points.size() : values.size(); }
        std::string label(std::size_t value_index) const;
        void validate(std::size_t mt_count) const;
    };

    struct AggregateRow
    {
        std::string value;
        double mean_snr_db = 0.0;
        double mean_eta = 0.0;
        double rmse_deg = 0.0;
        double failure_rate = 0.0;
    };

    struct SweepResult
    {
        std::vector<System> systems;
        std::vector<std::vector<TrialRecord>> trials;       // [system][value * trials + trial]
        std::vector<std::vector<AggregateRow>> aggregates;  // [system][value]
    };

    // Scenario for one sweep value.
    Scenario apply_sweep_value(const Scenario &base, const SweepSpec &spec, std::size_t value_index);

    // Child seed of (value, trial) is split_seed(master_seed, value, trial); `threads` bounds the
    // trial workers (0 = default).
    SweepResult run_sweep(const SweepSpec &spec, const Scenario &base, std::uint64_t master_seed, unsigned threads = 0);

    AggregateRow aggregate(const std::string &value, const std::vector<TrialRecord> &records);

    void write_aggregate_csv(std::ostream &os, const std::vector<AggregateRow> &rows);
    void write_trials_csv(std::ostream &os, const std::vector<TrialRecord> &records);
}

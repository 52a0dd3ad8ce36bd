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
#include <vector>

#include "rbloc/channel.hpp"
#include "rbloc/doa.hpp"
#include "rbloc/geometry.hpp"
#include "rbloc/link.hpp"
#include "rbloc/resonance.hpp"

namespace rbloc
{
    struct BsConfig
    {
        std::size_t rows = 40;
        std::size_t cols = 40;
        double spacing = 0.005;    // m, shared by the MT arrays
        double initial_power = 1e-3; // W
    };

    // Everything needed to run one experiment. Angles are radians here.
    struct Scenario
    {
        RfConstants rf = RfConstants::from_frequency(30e9, 4.97);
        BsConfig bs;
        std::vector<MtPlacement> mts;
        PaModel pa;
        PhaseNoiseModel phase_noise = PhaseNoiseModel::from_variance(0.3162);
        ResonanceSettings resonance;  // initial_power is taken from bs
        DoaSettings doa;
        double bfls_transmit_power = -1.0; // W per MT; negative means bs.initial_power
        std::uint64_t seed = 1;

        void validate() const;
        double bfls_power() const { return bfls_transmit_power < 0.0 ? bs.initial_power : bfls_transmit_power; }
    };

    // Built arrays and channels of a scenario; reusable across trials with different seeds.
    struct PreparedScenario
    {
        Scenario scenario;
        ArrayGeometry bs;
        std::vector<ArrayGeometry> mts;
        std::vector<MtLink> links;

        std::vector<LinkOperator> operators() const;
    };

    // Validates, places every MT and builds all links. Throws GeometryError for overlapping MT
    // arrays or a violated far-field guard.
    PreparedScenario prepare(const Scenario &scenario);

    // Power cycle from the seeded random broadcast (stream Stream::resonance of `seed`).
    ResonanceTrace run_resonance(const PreparedScenario &p, std::uint64_t seed);

    // Runs the power cycle for at most `iterations` steps (field snapshots of early iterations).
    ResonanceTrace run_resonance_prefix(const PreparedScenario &p, std::uint64_t seed, std::size_t iterations);

    BflsState run_bfls(const PreparedScenario &p, std::uint64_t seed);
}

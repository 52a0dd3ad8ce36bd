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
#include <random>

namespace rbloc
{
    // Counter-based seed split. Mixes (master, a, b, c) through SplitMix64 so that a
    // child seed depends only on its coordinates, never on scheduling order.
    std::uint64_t split_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

    // Named sub-streams of one trial.
    enum class Stream : std::uint64_t
    {
        resonance = 1, // initial phases + phase noise of the power cycle
        snapshots = 2, // source phases + receiver noise
        bfls = 3       // phase noise of the active baseline
    };

    // A seeded random stream. Identical seeds give identical draw sequences.
    class RngStream
    {
    public:
        explicit RngStream(std::uint64_t seed) : engine_(seed) {}

        double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
        double normal() { return normal_(engine_); }

        // Stream derived from this one's seed; used to hand independent streams to sub-tasks.
        static RngStream child(std::uint64_t seed, Stream s) { return RngStream(split_seed(seed, static_cast<std::uint64_t>(s))); }

    private:
        std::mt19937_64 engine_;
        std::normal_distribution<double> normal_{0.0, 1.0};
    };
}

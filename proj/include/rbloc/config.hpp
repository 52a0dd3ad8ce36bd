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

#include <filesystem>
#include <stdexcept>
#include <string>

#include "rbloc/metrics.hpp"
#include "rbloc/scenario.hpp"

namespace rbloc
{
    // Invalid config text. The message starts with the offending key path, e.g. "mts[1].range_m".
    class ConfigError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    // JSON scenario with angles in degrees. Missing sections take the baseline defaults; unknown
    // keys, wrong types and out-of-range values throw ConfigError.
    Scenario parse_scenario(const std::string &json_text);
    Scenario load_scenario(const std::filesystem::path &path);

    // Complete, key-sorted JSON of a scenario (degrees). Parsing it gives back the same scenario.
    std::string scenario_json(const Scenario &s);

    // hex64(fnv1a(scenario_json(s))).
    std::string config_hash(const Scenario &s);

    // {"variable", "values" | "points", "trials", "system", "mt"}.
    SweepSpec parse_sweep(const std::string &json_text);
    SweepSpec load_sweep(const std::filesystem::path &path);
    std::string sweep_json(const SweepSpec &spec);
}

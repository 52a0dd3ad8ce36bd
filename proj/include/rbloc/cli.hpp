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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rbloc/metrics.hpp"

namespace rbloc::cli
{
    struct CommonOptions
    {
        std::filesystem::path config;
        std::filesystem::path out;
        std::optional<std::uint64_t> seed; // overrides the config seed
        unsigned threads = 0;              // 0 = machine parallelism
    };

    struct FieldmapOptions
    {
        std::vector<std::string> planes; // PlaneSpec::parse syntax
        std::size_t iteration = 0;       // 0 = full run, k = state after k iterations
        System system = System::mrls;
        bool joint = true;               // MRLS: BS and MT arrays radiate together
    };

    // Each command returns the process exit status. Config problems give 2, other errors 1;
    // resonance collapse and unresolved sources are reported in the outputs with status 0.
    int cmd_resonate(const CommonOptions &opt, std::ostream &log);
    int cmd_fieldmap(const CommonOptions &opt, const FieldmapOptions &fm, std::ostream &log);
    int cmd_doa(const CommonOptions &opt, System system, std::ostream &log);
    int cmd_sweep(const CommonOptions &opt, const std::filesystem::path &sweep_path, std::ostream &log);

    // Full command line: rbloc <resonate|fieldmap|doa|sweep> --config F --out D [options].
    int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);
}

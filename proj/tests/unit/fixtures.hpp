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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rbloc/scenario.hpp"

namespace rbloc::test
{
    // 8x8 BS with two 4x4 MTs at 1 m. The loop needs about 70 dB of PA gain at this size.
    inline Scenario small_scenario()
    {
        Scenario s;
        s.bs.rows = s.bs.cols = 8;
        MtPlacement a, b;
        a.range = b.range = 1.0;
        a.rows = a.cols = b.rows = b.cols = 4;
        a.elevation = deg2rad(15.0), a.azimuth = deg2rad(20.0);
        b.elevation = deg2rad(35.0), b.azimuth = deg2rad(60.0);
        s.mts = {a, b};
        s.pa = PaModel::from_db(80.0, 1.0);
        s.resonance.max_iterations = 60;
        s.doa.snapshots = 40;
        s.doa.noise_power = 1e-9;
        s.doa.grid.step = 1.0;
        return s;
    }

    inline std::string slurp(const std::filesystem::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    // Fresh directory under the system temp dir.
    inline std::filesystem::path scratch_dir(const std::string &name)
    {
        const auto d = std::filesystem::temp_directory_path() / ("rbloc_test_" + name);
        std::filesystem::remove_all(d);
        std::filesystem::create_directories(d);
        return d;
    }
}

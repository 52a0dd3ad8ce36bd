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
#include <string>
#include <string_view>

namespace rbloc
{
    inline constexpr const char *version = "0.1.0";

    // Shortest round-trip decimal form; "inf", "-inf" and "nan" for non-finite values.
    std::string fmt(double v);

    // 64-bit FNV-1a over the bytes of `data`.
    std::uint64_t fnv1a(std::string_view data);

    // 16 lowercase hex digits.
    std::string hex64(std::uint64_t v);

    // "# rbloc <version> config_hash=<hex>" followed by a newline.
    std::string csv_header_line(const std::string &config_hash);

    // Writes `content` to `path`, creating parent directories. Throws std::runtime_error on failure.
    void write_text_file(const std::filesystem::path &path, const std::string &content);
}

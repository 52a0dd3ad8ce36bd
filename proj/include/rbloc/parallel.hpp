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
#include <functional>

namespace rbloc
{
    // Worker count used when a call passes threads = 0. Starts at the hardware concurrency.
    void set_default_threads(unsigned n);
    unsigned default_threads();

    // Calls body(i) for i in [0, n) on up to `threads` workers (0 = default_threads()).
    // Indices are handed out dynamically; callers write to per-index slots, so the result does not
    // depend on scheduling. The first exception thrown by a body is rethrown after all workers stop.
    void parallel_for(std::size_t n, const std::function<void(std::size_t)> &body, unsigned threads = 0);
}

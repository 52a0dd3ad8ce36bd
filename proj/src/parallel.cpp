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
#include "rbloc/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rbloc
{
    namespace
    {
        std::atomic<unsigned> g_threads{std::max(1u, std::thread::hardware_concurrency())};
        thread_local bool t_inside = false; // nested loops run inline on the calling worker
    }

    void set_default_threads(unsigned n) { g_threads = std::max(1u, n); }
    unsigned default_threads() { return g_threads; }

    void parallel_for(std::size_t n, const std::function<void(std::size_t)> &body, unsigned threads)
    {
        const unsigned want = threads == 0 ? default_threads() : threads;
        const std::size_t workers = std::min<std::size_t>(want, n);
        if (workers <= 1 || t_inside)
        {
            for (std::size_t i = 0; i < n; ++i)
                body(i);
            return;
        }

        std::atomic<std::size_t> next{0};
        std::atomic<bool> failed{false};
        std::exception_ptr error;
        std::mutex error_mutex;

        auto work = [&] {
            const bool outer = t_inside;
            t_inside = true;
            struct Restore
            {
                bool v;
                ~Restore() { t_inside = v; }
            } restore{outer};
            for (;;)
            {
                const std::size_t i = next.fetch_add(1);
                if (i >= n || failed)
                    return;
                try
                {
                    body(i);
                }
                catch (...)
                {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                    failed = true;
                }
            }
        };

        std::vector<std::thread> pool;
        pool.reserve(workers - 1);
        for (std::size_t w = 1; w < workers; ++w)
            pool.emplace_back(work);
        work();
        for (auto &t : pool)
            t.join();
        if (error)
            std::rethrow_exception(error);
    }
}

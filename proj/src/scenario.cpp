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
#include "rbloc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rbloc
{
    void Scenario::validate() const
    {
        if (bs.rows < 1 || bs.cols < 1)
            throw std::invalid_argument("bs: rows and cols must be at least 1");
        if (!(bs.spacing > 0.0))
            throw std::invalid_argument("bs: spacing_m must be positive");
        if (!(bs.initial_power > 0.0))
            throw std::invalid_argument("bs: initial_power_w must be positive");
        if (mts.empty())
            throw std::invalid_argument("mts: at least one MT is required");
        for (std::size_t i = 0; i < mts.size(); ++i)
        {
            try
            {
                mts[i].validate();
            }
            catch (const std::invalid_argument &e)
            {
                throw std::invalid_argument("mts[" + std::to_string(i) + "]: " + e.what());
            }
        }
        pa.validate();
        ResonanceSettings r = resonance;
        r.initial_power = bs.initial_power;
        r.validate();
        doa.validate();
        if (static_cast<std::size_t>(bs.rows * bs.cols) <= mts.size())
            throw std::invalid_argument("bs: the array needs more elements than there are MTs");
    }

    std::vector<LinkOperator> PreparedScenario::operators() const
    {
        std::vector<LinkOperator> ops;
        for (const MtLink &l : links)
            ops.push_back(l.H);
        return ops;
    }

    PreparedScenario prepare(const Scenario &scenario)
    {
        scenario.validate();
        PreparedScenario p;
        p.scenario = scenario;
        p.scenario.resonance.initial_power = scenario.bs.initial_power;
        p.bs = build_upa(scenario.bs.rows, scenario.bs.cols, scenario.bs.spacing);

        for (const MtPlacement &m : scenario.mts)
            p.mts.push_back(place_mt(m, scenario.bs.spacing));

        // MT arrays must not intersect each other.
        for (std::size_t i = 0; i < p.mts.size(); ++i)
            for (std::size_t j = i + 1; j < p.mts.size(); ++j)
            {
                const ArrayGeometry &a = p.mts[i], &b = p.mts[j];
                const double reach = 0.5 * scenario.bs.spacing * (std::hypot(double(a.rows), double(a.cols)) +
                                                                  std::hypot(double(b.rows), double(b.cols)));
                if ((a.center - b.center).norm() > reach)
                    continue;
                for (std::size_t n = 0; n < a.size(); ++n)
                    for (std::size_t m = 0; m < b.size(); ++m)
                        if ((a.position(n) - b.position(m)).norm() < 0.5 * scenario.bs.spacing)
                            throw GeometryError("MT " + std::to_string(i + 1) + " and MT " + std::to_string(j + 1) + " overlap");
            }

        for (std::size_t i = 0; i < p.mts.size(); ++i)
            p.links.push_back({LinkOperator::build(p.bs, p.mts[i], scenario.rf), scenario.mts[i].reflection_ratio});
        return p;
    }

    ResonanceTrace run_resonance_prefix(const PreparedScenario &p, std::uint64_t seed, std::size_t iterations)
    {
        RngStream rng = RngStream::child(seed, Stream::resonance);
        const ResonanceSettings &rs = p.scenario.resonance;
        ResonanceSettings settings = rs;
        settings.max_iterations = std::min(rs.max_iterations, iterations);
        const CVector a0 = initial_excitation(p.bs.size(), rs.initial_power, rng);
        return iterate_resonance(p.links, a0, p.scenario.pa, p.scenario.phase_noise, settings, rng);
    }

    ResonanceTrace run_resonance(const PreparedScenario &p, std::uint64_t seed)
    {
        return run_resonance_prefix(p, seed, p.scenario.resonance.max_iterations);
    }

    BflsState run_bfls(const PreparedScenario &p, std::uint64_t seed)
    {
        RngStream rng = RngStream::child(seed, Stream::bfls);
        return bfls_baseline(p.mts, p.operators(), p.scenario.rf, p.scenario.bfls_power(), p.scenario.phase_noise, rng);
    }
}

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
#include "rbloc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "rbloc/io.hpp"
#include "rbloc/parallel.hpp"
#include "rbloc/rng.hpp"

namespace rbloc
{
    namespace
    {
        constexpr double nan = std::numeric_limits<double>::quiet_NaN();

        double wrap_deg(double d)
        {
            d = std::fmod(d, 360.0);
            if (d > 180.0)
                d -= 360.0;
            if (d < -180.0)
                d += 360.0;
            return d;
        }

        MtOutcome outcome(double th, double ph, double eth, double eph)
        {
            MtOutcome o;
            o.true_theta_deg = th;
            o.true_phi_deg = ph;
            o.est_theta_deg = eth;
            o.est_phi_deg = eph;
            o.err_theta_deg = std::abs(th - eth);
            o.err_phi_deg = std::abs(wrap_deg(ph - eph));
            return o;
        }

        std::vector<std::pair<double, double>> truth_of(const Scenario &s)
        {
            std::vector<std::pair<double, double>> t;
            for (const MtPlacement &m : s.mts)
                t.emplace_back(rad2deg(m.elevation), rad2deg(m.azimuth));
            return t;
        }
    }

    const char *to_string(System s) { return s == System::mrls ? "mrls" : "bfls"; }

    System system_from_string(const std::string &s)
    {
        if (s == "mrls")
            return System::mrls;
        if (s == "bfls")
            return System::bfls;
        throw std::invalid_argument("unknown system '" + s + "' (expected mrls or bfls)");
    }

    double snr_db(const std::vector<double> &powers, double noise_power)
    {
        if (!(noise_power > 0.0))
            throw std::invalid_argument("snr_db: noise power must be positive");
        const double s = std::accumulate(powers.begin(), powers.end(), 0.0);
        if (s == 0.0)
            return -std::numeric_limits<double>::infinity();
        return 10.0 * std::log10(s / noise_power);
    }

    double rmse(const std::vector<TrialRecord> &records, std::size_t mt_index)
    {
        double st = 0.0, sp = 0.0;
        std::size_t n = 0;
        for (const TrialRecord &r : records)
        {
            if (r.failed())
                continue;
            if (mt_index >= r.per_mt.size())
                throw std::invalid_argument("rmse: MT index out of range");
            st += r.per_mt[mt_index].err_theta_deg * r.per_mt[mt_index].err_theta_deg;
            sp += r.per_mt[mt_index].err_phi_deg * r.per_mt[mt_index].err_phi_deg;
            ++n;
        }
        if (n == 0)
            throw std::invalid_argument("rmse: no successful records");
        return std::sqrt(st / double(n) + sp / double(n));
    }

    double rmse_pooled(const std::vector<TrialRecord> &records)
    {
        double st = 0.0, sp = 0.0;
        std::size_t n = 0;
        for (const TrialRecord &r : records)
        {
            if (r.failed())
                continue;
            for (const MtOutcome &o : r.per_mt)
            {
                st += o.err_theta_deg * o.err_theta_deg;
                sp += o.err_phi_deg * o.err_phi_deg;
                ++n;
            }
        }
        if (n == 0)
            return nan;
        return std::sqrt(st / double(n) + sp / double(n));
    }

    std::vector<MtOutcome> match_estimates(const std::vector<std::pair<double, double>> &truth,
                                           const std::vector<Estimate> &est)
    {
        if (truth.size() != est.size())
            throw std::invalid_argument("match_estimates: count mismatch");
        std::vector<std::size_t> perm(est.size()), best;
        std::iota(perm.begin(), perm.end(), 0);
        double best_cost = std::numeric_limits<double>::infinity();
        do
        {
            double cost = 0.0;
            for (std::size_t i = 0; i < truth.size(); ++i)
            {
                const double dt = truth[i].first - est[perm[i]].theta_deg;
                const double dp = wrap_deg(truth[i].second - est[perm[i]].phi_deg);
                cost += dt * dt + dp * dp;
            }
            if (cost < best_cost)
            {
                best_cost = cost;
                best = perm;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));

        std::vector<MtOutcome> out;
        for (std::size_t i = 0; i < truth.size(); ++i)
            out.push_back(outcome(truth[i].first, truth[i].second, est[best[i]].theta_deg, est[best[i]].phi_deg));
        return out;
    }

    TrialRecord run_trial(const PreparedScenario &p, System system, std::uint64_t seed, TrialDetail *detail)
    {
        const Scenario &sc = p.scenario;
        TrialRecord rec;
        rec.seed = seed;
        rec.system = system;
        rec.efficiency = nan;

        std::vector<double> powers;
        if (system == System::mrls)
        {
            ResonanceTrace trace = run_resonance(p, seed);
            rec.iterations = trace.iterations();
            rec.converged = trace.converged;
            try
            {
                rec.efficiency = transmission_efficiency(trace);
            }
            catch (const UndefinedEfficiencyError &)
            {
            }
            powers = trace.last().bs_received_power_from;
            if (trace.collapsed)
                rec.failure = trace.diagnostic;
            if (detail)
                detail->trace = std::move(trace);
        }
        else
        {
            BflsState st = run_bfls(p, seed);
            powers = st.bs_received_power;
            rec.iterations = 1;
            rec.converged = true;
            if (detail)
                detail->bfls = std::move(st);
        }

        const double noise = sc.doa.noise_power;
        if (rec.failed())
            rec.snr_db = -std::numeric_limits<double>::infinity();
        else if (noise > 0.0)
            rec.snr_db = snr_db(powers, noise);
        else
            rec.snr_db = std::numeric_limits<double>::infinity();

        const auto truth = truth_of(sc);
        auto mark_unresolved = [&] {
            rec.per_mt.clear();
            for (const auto &[th, ph] : truth)
                rec.per_mt.push_back({th, ph, nan, nan, nan, nan});
        };
        if (rec.failed())
        {
            mark_unresolved();
            return rec;
        }

        std::vector<SourceSignal> sources;
        for (std::size_t i = 0; i < sc.mts.size(); ++i)
            sources.push_back({sc.mts[i].elevation, sc.mts[i].azimuth, powers[i]});

        RngStream rng = RngStream::child(seed, Stream::snapshots);
        const SnapshotSet snaps = generate_snapshots(sources, p.bs, sc.rf, sc.doa.snapshots, noise, rng);
        const SignalSubspace sub = SignalSubspace::from_snapshots(snaps.X, sources.size());
        try
        {
            MusicResult music = music_estimate(sub, sources.size(), sc.doa, p.bs, sc.rf);
            rec.per_mt = match_estimates(truth, music.estimates);
            if (detail)
            {
                detail->music = std::move(music);
                detail->music_ran = true;
            }
        }
        catch (const UnresolvedSourcesError &)
        {
            rec.failure = "unresolved-sources";
            mark_unresolved();
            if (detail)
            {
                // keep the searched spectrum for inspection
                detail->music.grid = sc.doa.grid;
                if (sc.doa.coarse_to_fine)
                    detail->music.grid.step = sc.doa.coarse_step;
                detail->music.spectrum = music_grid(sub, detail->music.grid, p.bs, sc.rf);
                detail->music_ran = true;
            }
        }
        return rec;
    }

    std::string SweepSpec::label(std::size_t k) const
    {
        if (variable == SweepVariable::reference_grid)
            return fmt(grid_points[k].first) + ":" + fmt(grid_points[k].second);
        return fmt(values[k]);
    }

    void SweepSpec::validate(std::size_t mt_count) const
    {
        if (count() == 0)
            throw std::invalid_argument("sweep: values must not be empty");
        if (trials < 1)
            throw std::invalid_argument("sweep: trials must be at least 1");
        if (systems.empty())
            throw std::invalid_argument("sweep: system list must not be empty");
        if (mt >= static_cast<int>(mt_count) || mt < -1)
            throw std::invalid_argument("sweep: mt index out of range");
    }

    Scenario apply_sweep_value(const Scenario &base, const SweepSpec &spec, std::size_t k)
    {
        Scenario s = base;
        auto each_mt = [&](auto fn) {
            for (std::size_t i = 0; i < s.mts.size(); ++i)
                if (spec.mt < 0 || static_cast<std::size_t>(spec.mt) == i)
                    fn(s.mts[i]);
        };
        switch (spec.variable)
        {
        case SweepVariable::elevation:
            each_mt([&](MtPlacement &m) { m.elevation = deg2rad(spec.values[k]); });
            break;
        case SweepVariable::distance:
            each_mt([&](MtPlacement &m) { m.range = spec.values[k]; });
            break;
        case SweepVariable::noise_power:
            s.doa.noise_power = spec.values[k];
            break;
        case SweepVariable::reference_grid:
            each_mt([&](MtPlacement &m) {
                m.elevation = deg2rad(spec.grid_points[k].first);
                m.azimuth = deg2rad(spec.grid_points[k].second);
            });
            break;
        }
        return s;
    }

    AggregateRow aggregate(const std::string &value, const std::vector<TrialRecord> &records)
    {
        AggregateRow row;
        row.value = value;
        double snr = 0.0, eta = 0.0;
        std::size_t n_eta = 0, n_fail = 0;
        for (const TrialRecord &r : records)
        {
            snr += r.snr_db;
            if (std::isfinite(r.efficiency))
            {
                eta += r.efficiency;
                ++n_eta;
            }
            n_fail += r.failed() ? 1 : 0;
        }
        row.mean_snr_db = records.empty() ? nan : snr / double(records.size());
        row.mean_eta = n_eta ? eta / double(n_eta) : nan;
        row.rmse_deg = rmse_pooled(records);
        row.failure_rate = records.empty() ? nan : double(n_fail) / double(records.size());
        return row;
    }

    SweepResult run_sweep(const SweepSpec &spec, const Scenario &base, std::uint64_t master_seed, unsigned threads)
    {
        spec.validate(base.mts.size());
        const std::size_t V = spec.count(), T = spec.trials, S = spec.systems.size();

        SweepResult res;
        res.systems = spec.systems;
        res.trials.assign(S, std::vector<TrialRecord>(V * T));
        res.aggregates.assign(S, {});

        for (std::size_t v = 0; v < V; ++v)
        {
            const PreparedScenario p = prepare(apply_sweep_value(base, spec, v));
            const std::string id = spec.label(v);
            parallel_for(T * S, [&](std::size_t job) {
                const std::size_t t = job / S, s = job % S;
                TrialRecord r = run_trial(p, spec.systems[s], split_seed(master_seed, v, t));
                r.scenario_id = id;
                r.value_index = v;
                r.trial_index = t;
                res.trials[s][v * T + t] = std::move(r);
            }, threads);
            for (std::size_t s = 0; s < S; ++s)
            {
                const std::vector<TrialRecord> slice(res.trials[s].begin() + std::ptrdiff_t(v * T),
                                                     res.trials[s].begin() + std::ptrdiff_t((v + 1) * T));
                res.aggregates[s].push_back(aggregate(id, slice));
            }
        }
        return res;
    }

    void write_aggregate_csv(std::ostream &os, const std::vector<AggregateRow> &rows)
    {
        os << "value,mean_snr_db,mean_eta,rmse_deg,failure_rate\n";
        for (const AggregateRow &r : rows)
            os << r.value << ',' << fmt(r.mean_snr_db) << ',' << fmt(r.mean_eta) << ',' << fmt(r.rmse_deg) << ','
               << fmt(r.failure_rate) << '\n';
    }

    void write_trials_csv(std::ostream &os, const std::vector<TrialRecord> &records)
    {
        os << "value,trial,seed,system,snr_db,eta,iterations,converged,failure,mt,"
              "true_theta_deg,true_phi_deg,est_theta_deg,est_phi_deg,err_theta_deg,err_phi_deg\n";
        for (const TrialRecord &r : records)
        {
            const std::string head = r.scenario_id + ',' + std::to_string(r.trial_index) + ',' + std::to_string(r.seed) + ',' +
                                     to_string(r.system) + ',' + fmt(r.snr_db) + ',' + fmt(r.efficiency) + ',' +
                                     std::to_string(r.iterations) + ',' + (r.converged ? "1" : "0") + ',' + r.failure;
            for (std::size_t i = 0; i < r.per_mt.size(); ++i)
            {
                const MtOutcome &o = r.per_mt[i];
                os << head << ',' << (i + 1) << ',' << fmt(o.true_theta_deg) << ',' << fmt(o.true_phi_deg) << ','
                   << fmt(o.est_theta_deg) << ',' << fmt(o.est_phi_deg) << ',' << fmt(o.err_theta_deg) << ','
                   << fmt(o.err_phi_deg) << '\n';
            }
        }
    }
}

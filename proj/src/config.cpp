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
#include "rbloc/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rbloc/io.hpp"

namespace rbloc
{
    using nlohmann::json;

    namespace
    {
        // A JSON object being consumed, with the key path used in error messages.
        class Node
        {
        public:
            Node(const json &j, std::string path) : j_(j), path_(std::move(path))
            {
                if (!j_.is_object())
                    fail("", "expected an object");
            }

            [[noreturn]] void fail(const std::string &key, const std::string &what) const
            {
                throw ConfigError(at(key) + ": " + what);
            }

            std::string at(const std::string &key) const
            {
                if (key.empty())
                    return path_.empty() ? "<root>" : path_;
                return path_.empty() ? key : path_ + "." + key;
            }

            void allow(std::initializer_list<const char *> keys) const
            {
                const std::set<std::string> ok(keys.begin(), keys.end());
                for (auto it = j_.begin(); it != j_.end(); ++it)
                    if (!ok.count(it.key()))
                        throw ConfigError(at(it.key()) + ": unknown key");
            }

            bool has(const std::string &key) const { return j_.contains(key); }
            const json &raw(const std::string &key) const { return j_.at(key); }

            double number(const std::string &key, double fallback) const
            {
                if (!has(key))
                    return fallback;
                const json &v = j_.at(key);
                if (!v.is_number())
                    fail(key, "expected a number");
                const double d = v.get<double>();
                if (!std::isfinite(d))
                    fail(key, "expected a finite number");
                return d;
            }

            double positive(const std::string &key, double fallback) const
            {
                const double d = number(key, fallback);
                if (!(d > 0.0))
                    fail(key, "must be positive");
                return d;
            }

            double nonnegative(const std::string &key, double fallback) const
            {
                const double d = number(key, fallback);
                if (!(d >= 0.0))
                    fail(key, "must be nonnegative");
                return d;
            }

            std::size_t count(const std::string &key, std::size_t fallback) const
            {
                if (!has(key))
                    return fallback;
                const json &v = j_.at(key);
                if (!v.is_number_integer() || v.get<long long>() < 1)
                    fail(key, "expected a positive integer");
                return v.get<std::size_t>();
            }

            bool flag(const std::string &key, bool fallback) const
            {
                if (!has(key))
                    return fallback;
                if (!j_.at(key).is_boolean())
                    fail(key, "expected true or false");
                return j_.at(key).get<bool>();
            }

            std::string text(const std::string &key, const std::string &fallback) const
            {
                if (!has(key))
                    return fallback;
                if (!j_.at(key).is_string())
                    fail(key, "expected a string");
                return j_.at(key).get<std::string>();
            }

            std::pair<double, double> range(const std::string &key, std::pair<double, double> fallback) const
            {
                if (!has(key))
                    return fallback;
                const json &v = j_.at(key);
                if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
                    fail(key, "expected [lo, hi]");
                const double lo = v[0].get<double>(), hi = v[1].get<double>();
                if (!(hi >= lo))
                    fail(key, "expected lo <= hi");
                return {lo, hi};
            }

            Node child(const std::string &key) const
            {
                return Node(j_.at(key), at(key));
            }

        private:
            const json &j_;
            std::string path_;
        };

        json parse_text(const std::string &text)
        {
            try
            {
                return json::parse(text);
            }
            catch (const json::parse_error &e)
            {
                throw ConfigError(std::string("<root>: malformed JSON: ") + e.what());
            }
        }

        std::string read_file(const std::filesystem::path &path)
        {
            std::ifstream in(path, std::ios::binary);
            if (!in)
                throw ConfigError(path.string() + ": cannot open file");
            std::ostringstream ss;
            ss << in.rdbuf();
            return ss.str();
        }

        // Wraps a module validator so its message carries the section name.
        template <class F>
        void check(const std::string &section, F &&fn)
        {
            try
            {
                fn();
            }
            catch (const std::invalid_argument &e)
            {
                throw ConfigError(section + ": " + e.what());
            }
        }

        MtPlacement parse_mt(const Node &n)
        {
            n.allow({"range_m", "elevation_deg", "azimuth_deg", "rows", "cols", "reflection_ratio"});
            MtPlacement m;
            m.range = n.positive("range_m", m.range);
            const double el = n.number("elevation_deg", 0.0);
            if (!(std::abs(el) < 90.0))
                n.fail("elevation_deg", "must satisfy |elevation| < 90");
            m.elevation = deg2rad(el);
            m.azimuth = deg2rad(n.number("azimuth_deg", 0.0));
            m.rows = n.count("rows", m.rows);
            m.cols = n.count("cols", m.cols);
            m.reflection_ratio = n.number("reflection_ratio", m.reflection_ratio);
            if (!(m.reflection_ratio >= 0.0 && m.reflection_ratio <= 1.0))
                n.fail("reflection_ratio", "must lie in [0, 1]");
            return m;
        }

        PhaseNoiseModel parse_phase_noise(const Node &n)
        {
            n.allow({"variance_rad2", "psd"});
            if (n.has("variance_rad2") == n.has("psd"))
                n.fail("", "give exactly one of variance_rad2 or psd");
            if (n.has("variance_rad2"))
                return PhaseNoiseModel::from_variance(n.nonnegative("variance_rad2", 0.0));

            const json &arr = n.raw("psd");
            if (!arr.is_array() || arr.empty())
                n.fail("psd", "expected a nonempty list of segments");
            std::vector<PsdSegment> segs;
            for (std::size_t i = 0; i < arr.size(); ++i)
            {
                const Node s(arr[i], n.at("psd") + "[" + std::to_string(i) + "]");
                s.allow({"f_lo_hz", "f_hi_hz", "level_dbc_hz"});
                for (const char *k : {"f_lo_hz", "f_hi_hz", "level_dbc_hz"})
                    if (!s.has(k))
                        s.fail(k, "missing");
                segs.push_back({s.nonnegative("f_lo_hz", 0.0), s.nonnegative("f_hi_hz", 0.0), s.number("level_dbc_hz", 0.0)});
            }
            try
            {
                return PhaseNoiseModel::from_psd(std::move(segs));
            }
            catch (const std::invalid_argument &e)
            {
                n.fail("psd", e.what());
            }
        }

        Scenario parse_scenario_json(const json &root)
        {
            const Node n(root, "");
            n.allow({"rf", "bs", "mts", "pa", "phase_noise", "resonance", "doa", "bfls", "seed"});
            Scenario s;

            if (n.has("rf"))
            {
                const Node r = n.child("rf");
                r.allow({"frequency_hz", "max_gain_dbi", "pattern"});
                const std::string pat = r.text("pattern", "cosine");
                if (pat != "cosine" && pat != "isotropic")
                    r.fail("pattern", "expected \"cosine\" or \"isotropic\"");
                s.rf = RfConstants::from_frequency(r.positive("frequency_hz", 30e9), r.number("max_gain_dbi", 4.97),
                                                   pat == "cosine" ? ElementPattern::cosine : ElementPattern::isotropic);
            }

            if (n.has("bs"))
            {
                const Node b = n.child("bs");
                b.allow({"rows", "cols", "spacing_m", "initial_power_w"});
                s.bs.rows = b.count("rows", s.bs.rows);
                s.bs.cols = b.count("cols", s.bs.cols);
                s.bs.spacing = b.positive("spacing_m", s.bs.spacing);
                s.bs.initial_power = b.positive("initial_power_w", s.bs.initial_power);
            }

            if (!n.has("mts"))
                n.fail("mts", "missing (at least one MT is required)");
            const json &mts = n.raw("mts");
            if (!mts.is_array() || mts.empty())
                n.fail("mts", "expected a nonempty list");
            for (std::size_t i = 0; i < mts.size(); ++i)
                s.mts.push_back(parse_mt(Node(mts[i], "mts[" + std::to_string(i) + "]")));

            if (n.has("pa"))
            {
                const Node p = n.child("pa");
                p.allow({"max_gain_db", "max_output_w"});
                const double g = p.number("max_gain_db", 24.0);
                if (!(g >= 0.0))
                    p.fail("max_gain_db", "must be >= 0");
                s.pa = PaModel::from_db(g, p.positive("max_output_w", s.pa.max_output_power));
            }

            if (n.has("phase_noise"))
                s.phase_noise = parse_phase_noise(n.child("phase_noise"));

            if (n.has("resonance"))
            {
                const Node r = n.child("resonance");
                r.allow({"max_iterations", "convergence_rel", "oracle_mode", "collapse_floor_rel"});
                s.resonance.max_iterations = r.count("max_iterations", s.resonance.max_iterations);
                s.resonance.convergence_rel = r.positive("convergence_rel", s.resonance.convergence_rel);
                s.resonance.oracle_mode = r.flag("oracle_mode", s.resonance.oracle_mode);
                s.resonance.collapse_floor_rel = r.nonnegative("collapse_floor_rel", s.resonance.collapse_floor_rel);
            }

            if (n.has("doa"))
            {
                const Node d = n.child("doa");
                d.allow({"snapshots", "noise_power_w", "grid", "coarse_to_fine", "coarse_step_deg", "refine_halfwidth_deg",
                         "refine_step_deg", "min_separation_deg"});
                DoaSettings &o = s.doa;
                o.snapshots = d.count("snapshots", o.snapshots);
                o.noise_power = d.nonnegative("noise_power_w", o.noise_power);
                o.coarse_to_fine = d.flag("coarse_to_fine", o.coarse_to_fine);
                o.coarse_step = d.positive("coarse_step_deg", o.coarse_step);
                o.refine_halfwidth = d.nonnegative("refine_halfwidth_deg", o.refine_halfwidth);
                o.refine_step = d.positive("refine_step_deg", o.refine_step);
                o.min_separation = d.nonnegative("min_separation_deg", o.min_separation);
                if (d.has("grid"))
                {
                    const Node g = d.child("grid");
                    g.allow({"theta_range", "phi_range", "step_deg"});
                    std::tie(o.grid.theta_lo, o.grid.theta_hi) = g.range("theta_range", {o.grid.theta_lo, o.grid.theta_hi});
                    std::tie(o.grid.phi_lo, o.grid.phi_hi) = g.range("phi_range", {o.grid.phi_lo, o.grid.phi_hi});
                    o.grid.step = g.positive("step_deg", o.grid.step);
                }
            }

            if (n.has("bfls"))
            {
                const Node b = n.child("bfls");
                b.allow({"transmit_power_w"});
                if (b.has("transmit_power_w"))
                    s.bfls_transmit_power = b.positive("transmit_power_w", 0.0);
            }

            if (n.has("seed"))
            {
                const json &v = n.raw("seed");
                if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
                    n.fail("seed", "expected a nonnegative integer");
                s.seed = v.get<std::uint64_t>();
            }

            check("scenario", [&] { s.validate(); });
            return s;
        }

        json scenario_to_json(const Scenario &s)
        {
            json j;
            j["rf"] = {{"frequency_hz", s.rf.frequency},
                       {"max_gain_dbi", 10.0 * std::log10(s.rf.max_gain)},
                       {"pattern", s.rf.pattern == ElementPattern::cosine ? "cosine" : "isotropic"}};
            j["bs"] = {{"rows", s.bs.rows}, {"cols", s.bs.cols}, {"spacing_m", s.bs.spacing}, {"initial_power_w", s.bs.initial_power}};
            j["mts"] = json::array();
            for (const MtPlacement &m : s.mts)
                j["mts"].push_back({{"range_m", m.range},
                                    {"elevation_deg", rad2deg(m.elevation)},
                                    {"azimuth_deg", rad2deg(m.azimuth)},
                                    {"rows", m.rows},
                                    {"cols", m.cols},
                                    {"reflection_ratio", m.reflection_ratio}});
            j["pa"] = {{"max_gain_db", 10.0 * std::log10(s.pa.max_gain)}, {"max_output_w", s.pa.max_output_power}};
            if (s.phase_noise.psd)
            {
                json segs = json::array();
                for (const PsdSegment &p : *s.phase_noise.psd)
                    segs.push_back({{"f_lo_hz", p.f_lo}, {"f_hi_hz", p.f_hi}, {"level_dbc_hz", p.level_dbc}});
                j["phase_noise"] = {{"psd", segs}};
            }
            else
                j["phase_noise"] = {{"variance_rad2", s.phase_noise.variance}};
            j["resonance"] = {{"max_iterations", s.resonance.max_iterations},
                              {"convergence_rel", s.resonance.convergence_rel},
                              {"oracle_mode", s.resonance.oracle_mode},
                              {"collapse_floor_rel", s.resonance.collapse_floor_rel}};
            const DoaSettings &d = s.doa;
            j["doa"] = {{"snapshots", d.snapshots},
                        {"noise_power_w", d.noise_power},
                        {"grid",
                         {{"theta_range", {d.grid.theta_lo, d.grid.theta_hi}},
                          {"phi_range", {d.grid.phi_lo, d.grid.phi_hi}},
                          {"step_deg", d.grid.step}}},
                        {"coarse_to_fine", d.coarse_to_fine},
                        {"coarse_step_deg", d.coarse_step},
                        {"refine_halfwidth_deg", d.refine_halfwidth},
                        {"refine_step_deg", d.refine_step},
                        {"min_separation_deg", d.min_separation}};
            j["bfls"] = json::object();
            if (s.bfls_transmit_power >= 0.0)
                j["bfls"]["transmit_power_w"] = s.bfls_transmit_power;
            j["seed"] = s.seed;
            return j;
        }

        SweepVariable variable_from(const Node &n)
        {
            const std::string v = n.text("variable", "");
            if (v == "elevation")
                return SweepVariable::elevation;
            if (v == "distance")
                return SweepVariable::distance;
            if (v == "noise_power")
                return SweepVariable::noise_power;
            if (v == "reference_grid")
                return SweepVariable::reference_grid;
            n.fail("variable", "expected elevation, distance, noise_power or reference_grid");
        }

        const char *variable_name(SweepVariable v)
        {
            switch (v)
            {
            case SweepVariable::elevation: return "elevation";
            case SweepVariable::distance: return "distance";
            case SweepVariable::noise_power: return "noise_power";
            case SweepVariable::reference_grid: return "reference_grid";
            }
            return "";
        }
    }

    Scenario parse_scenario(const std::string &json_text) { return parse_scenario_json(parse_text(json_text)); }

    Scenario load_scenario(const std::filesystem::path &path) { return parse_scenario(read_file(path)); }

    std::string scenario_json(const Scenario &s) { return scenario_to_json(s).dump(2) + "\n"; }

    std::string config_hash(const Scenario &s) { return hex64(fnv1a(scenario_to_json(s).dump())); }

    SweepSpec parse_sweep(const std::string &json_text)
    {
        const json root = parse_text(json_text);
        const Node n(root, "");
        n.allow({"variable", "values", "points", "trials", "system", "mt"});
        SweepSpec spec;
        spec.variable = variable_from(n);

        if (spec.variable == SweepVariable::reference_grid)
        {
            if (n.has("values"))
                n.fail("values", "not used by reference_grid (give points)");
            if (!n.has("points") || !n.raw("points").is_array() || n.raw("points").empty())
                n.fail("points", "expected a nonempty list of [theta_deg, phi_deg]");
            const json &pts = n.raw("points");
            for (std::size_t i = 0; i < pts.size(); ++i)
            {
                const json &p = pts[i];
                if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
                    n.fail("points[" + std::to_string(i) + "]", "expected [theta_deg, phi_deg]");
                const double th = p[0].get<double>();
                if (!(std::abs(th) < 90.0))
                    n.fail("points[" + std::to_string(i) + "]", "theta must satisfy |theta| < 90");
                spec.grid_points.emplace_back(th, p[1].get<double>());
            }
        }
        else
        {
            if (n.has("points"))
                n.fail("points", "only used by reference_grid");
            if (!n.has("values") || !n.raw("values").is_array() || n.raw("values").empty())
                n.fail("values", "expected a nonempty list of numbers");
            const json &vals = n.raw("values");
            for (std::size_t i = 0; i < vals.size(); ++i)
            {
                if (!vals[i].is_number() || !std::isfinite(vals[i].get<double>()))
                    n.fail("values[" + std::to_string(i) + "]", "expected a finite number");
                const double v = vals[i].get<double>();
                if (spec.variable == SweepVariable::elevation && !(std::abs(v) < 90.0))
                    n.fail("values[" + std::to_string(i) + "]", "elevation must satisfy |theta| < 90");
                if (spec.variable == SweepVariable::distance && !(v > 0.0))
                    n.fail("values[" + std::to_string(i) + "]", "distance must be positive");
                if (spec.variable == SweepVariable::noise_power && !(v > 0.0))
                    n.fail("values[" + std::to_string(i) + "]", "noise power must be positive");
                spec.values.push_back(v);
            }
        }

        spec.trials = n.count("trials", 1);
        const std::string sys = n.text("system", "mrls");
        if (sys == "both")
            spec.systems = {System::mrls, System::bfls};
        else
        {
            try
            {
                spec.systems = {system_from_string(sys)};
            }
            catch (const std::invalid_argument &)
            {
                n.fail("system", "expected mrls, bfls or both");
            }
        }
        if (n.has("mt"))
        {
            const json &v = n.raw("mt");
            if (!v.is_number_integer() || v.get<long long>() < 0)
                n.fail("mt", "expected a nonnegative MT index");
            spec.mt = v.get<int>();
        }
        return spec;
    }

    SweepSpec load_sweep(const std::filesystem::path &path) { return parse_sweep(read_file(path)); }

    std::string sweep_json(const SweepSpec &spec)
    {
        json j;
        j["variable"] = variable_name(spec.variable);
        if (spec.variable == SweepVariable::reference_grid)
        {
            j["points"] = json::array();
            for (const auto &[t, p] : spec.grid_points)
                j["points"].push_back({t, p});
        }
        else
            j["values"] = spec.values;
        j["trials"] = spec.trials;
        j["system"] = spec.systems.size() == 2 ? "both" : to_string(spec.systems.front());
        if (spec.mt >= 0)
            j["mt"] = spec.mt;
        return j.dump(2) + "\n";
    }
}

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
#include "rbloc/cli.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rbloc/config.hpp"
#include "rbloc/fieldmap.hpp"
#include "rbloc/io.hpp"
#include "rbloc/parallel.hpp"

namespace rbloc::cli
{
    using nlohmann::json;
    namespace fs = std::filesystem;

    namespace
    {
        // Loaded scenario plus the hash stamped on every output.
        struct Run
        {
            Scenario scenario;
            std::string hash;
        };

        Run load(const CommonOptions &opt)
        {
            Run r;
            r.scenario = load_scenario(opt.config);
            if (opt.seed)
                r.scenario.seed = *opt.seed;
            r.hash = config_hash(r.scenario);
            if (opt.threads > 0)
                set_default_threads(opt.threads);
            return r;
        }

        // JSON has no infinities; non-finite numbers become null.
        json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

        json meta(const Run &r, const std::string &command)
        {
            return {{"tool", "rbloc"}, {"version", version}, {"config_hash", r.hash}, {"command", command}};
        }

        void write_json(const fs::path &path, const json &j) { write_text_file(path, j.dump(2) + "\n"); }

        template <class F>
        void write_csv(const fs::path &path, const Run &r, F &&body)
        {
            std::ostringstream os;
            os << csv_header_line(r.hash);
            body(os);
            write_text_file(path, os.str());
        }

        template <class F>
        int guarded(std::ostream &log, F &&fn)
        {
            try
            {
                return fn();
            }
            catch (const ConfigError &e)
            {
                log << "error: " << e.what() << "\n";
                return 2;
            }
            catch (const std::invalid_argument &e)
            {
                log << "error: " << e.what() << "\n";
                return 2;
            }
            catch (const std::exception &e)
            {
                log << "error: " << e.what() << "\n";
                return 1;
            }
        }

        double snr_of(const std::vector<double> &powers, double noise)
        {
            if (noise > 0.0)
                return snr_db(powers, noise);
            return std::numeric_limits<double>::infinity();
        }

        json mt_outcomes(const std::vector<MtOutcome> &per_mt)
        {
            json arr = json::array();
            for (std::size_t i = 0; i < per_mt.size(); ++i)
            {
                const MtOutcome &o = per_mt[i];
                arr.push_back({{"mt", i + 1},
                               {"true_theta_deg", number(o.true_theta_deg)},
                               {"true_phi_deg", number(o.true_phi_deg)},
                               {"est_theta_deg", number(o.est_theta_deg)},
                               {"est_phi_deg", number(o.est_phi_deg)},
                               {"err_theta_deg", number(o.err_theta_deg)},
                               {"err_phi_deg", number(o.err_phi_deg)}});
            }
            return arr;
        }

        void write_spectrum_csv(std::ostream &os, const SpectrumGrid &g)
        {
            os << "theta_deg,phi_deg,p_music\n";
            for (std::size_t i = 0; i < g.thetas.size(); ++i)
                for (std::size_t j = 0; j < g.phis.size(); ++j)
                    os << fmt(g.thetas[i]) << ',' << fmt(g.phis[j]) << ','
                       << fmt(g.values(Eigen::Index(i), Eigen::Index(j))) << '\n';
        }
    }

    int cmd_resonate(const CommonOptions &opt, std::ostream &log)
    {
        return guarded(log, [&] {
            const Run r = load(opt);
            const PreparedScenario p = prepare(r.scenario);
            const ResonanceTrace trace = run_resonance(p, r.scenario.seed);

            write_csv(opt.out / "trace.csv", r, [&](std::ostream &os) { write_trace_csv(os, trace); });

            const IterationRecord &last = trace.last();
            double eta = std::numeric_limits<double>::quiet_NaN();
            try
            {
                eta = transmission_efficiency(trace);
            }
            catch (const UndefinedEfficiencyError &)
            {
            }
            const double snr = trace.collapsed ? -std::numeric_limits<double>::infinity()
                                               : snr_of(last.bs_received_power_from, r.scenario.doa.noise_power);
            json s = {{"_meta", meta(r, "resonate")},
                      {"seed", r.scenario.seed},
                      {"iterations", trace.iterations()},
                      {"converged", trace.converged},
                      {"collapsed", trace.collapsed},
                      {"diagnostic", trace.diagnostic},
                      {"final",
                       {{"bs_received_w", last.bs_received_power},
                        {"bs_transmit_w", last.bs_transmit_power},
                        {"mt_received_w", last.mt_received_power},
                        {"bs_received_from_mt_w", last.bs_received_power_from}}},
                      {"eta", number(eta)},
                      {"snr_db", number(snr)}};
            write_json(opt.out / "summary.json", s);

            log << "resonate: " << trace.iterations() << " iterations, converged=" << (trace.converged ? "true" : "false");
            if (trace.collapsed)
                log << ", " << trace.diagnostic;
            log << "\n";
            return 0;
        });
    }

    int cmd_fieldmap(const CommonOptions &opt, const FieldmapOptions &fm, std::ostream &log)
    {
        return guarded(log, [&] {
            if (fm.planes.empty())
                throw std::invalid_argument("fieldmap: at least one --plane is required");
            std::vector<PlaneSpec> planes;
            for (const std::string &text : fm.planes)
                planes.push_back(PlaneSpec::parse(text));

            const Run r = load(opt);
            const PreparedScenario p = prepare(r.scenario);

            std::vector<Radiator> radiators;
            if (fm.system == System::mrls)
            {
                const ResonanceTrace trace = fm.iteration == 0 ? run_resonance(p, r.scenario.seed)
                                                               : run_resonance_prefix(p, r.scenario.seed, fm.iteration);
                radiators.push_back({p.bs, trace.final_bs_excitation});
                if (fm.joint)
                    for (std::size_t i = 0; i < p.mts.size(); ++i)
                        radiators.push_back({p.mts[i], trace.final_mt_excitations[i]});
                if (trace.collapsed)
                    log << "fieldmap: " << trace.diagnostic << " after " << trace.iterations() << " iterations\n";
            }
            else
            {
                const BflsState st = run_bfls(p, r.scenario.seed);
                for (std::size_t i = 0; i < p.mts.size(); ++i)
                    radiators.push_back({p.mts[i], st.mt_weights[i]});
            }

            for (const PlaneSpec &plane : planes)
            {
                const FieldGrid g = radiate(radiators, plane, r.scenario.rf);
                write_csv(opt.out / ("fieldmap_" + plane.tag() + ".csv"), r,
                          [&](std::ostream &os) { write_fieldmap_csv(os, g); });
                log << "fieldmap: " << plane.tag() << " peak " << fmt(g.values.maxCoeff()) << " W/m^2\n";
            }
            return 0;
        });
    }

    int cmd_doa(const CommonOptions &opt, System system, std::ostream &log)
    {
        return guarded(log, [&] {
            const Run r = load(opt);
            const PreparedScenario p = prepare(r.scenario);
            TrialDetail detail;
            const TrialRecord rec = run_trial(p, system, r.scenario.seed, &detail);
            const fs::path dir = opt.out / to_string(system);

            write_csv(dir / "spectrum.csv", r, [&](std::ostream &os) {
                if (detail.music_ran)
                    write_spectrum_csv(os, detail.music.spectrum);
                else
                    os << "theta_deg,phi_deg,p_music\n";
            });

            json est = json::array();
            for (const Estimate &e : detail.music.estimates)
                est.push_back({{"theta_deg", e.theta_deg}, {"phi_deg", e.phi_deg}, {"peak", number(e.peak)}});
            write_json(dir / "estimates.json",
                       {{"_meta", meta(r, "doa")}, {"system", to_string(system)}, {"estimates", est}, {"per_mt", mt_outcomes(rec.per_mt)}});

            write_json(dir / "summary.json", {{"_meta", meta(r, "doa")},
                                              {"system", to_string(system)},
                                              {"seed", r.scenario.seed},
                                              {"snr_db", number(rec.snr_db)},
                                              {"eta", number(rec.efficiency)},
                                              {"iterations", rec.iterations},
                                              {"converged", rec.converged},
                                              {"failure", rec.failure},
                                              {"resolved", !rec.failed()},
                                              {"estimate_count", detail.music.estimates.size()}});

            log << "doa(" << to_string(system) << "): " << (rec.failed() ? rec.failure : "resolved") << "\n";
            return 0;
        });
    }

    int cmd_sweep(const CommonOptions &opt, const fs::path &sweep_path, std::ostream &log)
    {
        return guarded(log, [&] {
            const Run r = load(opt);
            const SweepSpec spec = load_sweep(sweep_path);
            try
            {
                spec.validate(r.scenario.mts.size());
            }
            catch (const std::invalid_argument &e)
            {
                throw ConfigError(e.what());
            }
            // Check every swept scenario before running any trial.
            for (std::size_t v = 0; v < spec.count(); ++v)
                apply_sweep_value(r.scenario, spec, v).validate();

            const std::uint64_t master = r.scenario.seed;
            const SweepResult res = run_sweep(spec, r.scenario, master, opt.threads);

            json systems = json::array();
            for (std::size_t s = 0; s < res.systems.size(); ++s)
            {
                const fs::path dir = opt.out / to_string(res.systems[s]);
                write_csv(dir / "aggregate.csv", r, [&](std::ostream &os) { write_aggregate_csv(os, res.aggregates[s]); });
                write_csv(dir / "trials.csv", r, [&](std::ostream &os) { write_trials_csv(os, res.trials[s]); });
                systems.push_back(to_string(res.systems[s]));
            }
            json s = {{"_meta", meta(r, "sweep")},
                      {"master_seed", master},
                      {"sweep", json::parse(sweep_json(spec))},
                      {"systems", systems},
                      {"values", spec.count()},
                      {"trials", spec.trials}};
            write_json(opt.out / "summary.json", s);
            log << "sweep: " << spec.count() << " values x " << spec.trials << " trials x " << res.systems.size()
                << " systems\n";
            return 0;
        });
    }

    int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
    {
        CLI::App app{"Multi-target resonant-beam localization simulator", "rbloc"};
        app.set_version_flag("--version", std::string(version));
        app.require_subcommand(1);

        CommonOptions common;
        std::uint64_t seed = 0;
        auto add_common = [&](CLI::App *sub) {
            sub->add_option("--config", common.config, "Scenario JSON")->required()->check(CLI::ExistingFile);
            sub->add_option("--out", common.out, "Output directory")->required();
            sub->add_option("--seed", seed, "Seed (overrides the config)");
            sub->add_option("--threads", common.threads, "Worker threads (default: all cores)")->check(CLI::NonNegativeNumber);
        };

        CLI::App *resonate = app.add_subcommand("resonate", "Run the power cycle; writes trace.csv and summary.json");
        add_common(resonate);

        FieldmapOptions fm;
        std::string fm_system = "mrls";
        CLI::App *fieldmap = app.add_subcommand("fieldmap", "Power-density maps; writes fieldmap_<plane>.csv");
        add_common(fieldmap);
        fieldmap->add_option("--plane", fm.planes, "yoz|xoy:z=H|xz[,key=value...]")->required();
        fieldmap->add_option("--iteration", fm.iteration, "State after k iterations (0 = full run)");
        fieldmap->add_option("--system", fm_system, "mrls|bfls")->check(CLI::IsMember({"mrls", "bfls"}));
        bool bs_only = false;
        fieldmap->add_flag("--bs-only", bs_only, "MRLS: radiate the BS array alone");

        std::string doa_system = "mrls";
        CLI::App *doa = app.add_subcommand("doa", "MUSIC estimates; writes <system>/spectrum.csv, estimates.json, summary.json");
        add_common(doa);
        doa->add_option("--system", doa_system, "mrls|bfls")->check(CLI::IsMember({"mrls", "bfls"}));

        std::string sweep_path;
        CLI::App *sweep = app.add_subcommand("sweep", "Monte Carlo sweep; writes <system>/aggregate.csv, trials.csv");
        add_common(sweep);
        sweep->add_option("--sweep", sweep_path, "Sweep spec JSON")->required()->check(CLI::ExistingFile);

        try
        {
            app.parse(argc, argv);
        }
        catch (const CLI::ParseError &e)
        {
            const int code = app.exit(e, out, err);
            return code == 0 ? 0 : 2;
        }

        for (CLI::App *sub : {resonate, fieldmap, doa, sweep})
            if (sub->parsed() && sub->count("--seed") > 0)
                common.seed = seed;

        if (resonate->parsed())
            return cmd_resonate(common, err);
        if (fieldmap->parsed())
        {
            fm.system = system_from_string(fm_system);
            fm.joint = !bs_only;
            return cmd_fieldmap(common, fm, err);
        }
        if (doa->parsed())
            return cmd_doa(common, system_from_string(doa_system), err);
        return cmd_sweep(common, sweep_path, err);
    }
}

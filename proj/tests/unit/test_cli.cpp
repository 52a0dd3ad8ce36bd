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
#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "fixtures.hpp"
#include "rbloc/cli.hpp"
#include "rbloc/config.hpp"

using namespace rbloc;
namespace fs = std::filesystem;
using nlohmann::json;

namespace
{
    // Small sustained scenario written to disk; the CLI only reads files.
    fs::path write_config(const fs::path &dir, const Scenario &s)
    {
        const fs::path p = dir / "config.json";
        std::ofstream(p) << scenario_json(s);
        return p;
    }

    struct Invocation
    {
        int status;
        std::string out, err;
    };

    Invocation rbloc_cli(std::vector<std::string> args)
    {
        args.insert(args.begin(), "rbloc");
        std::vector<const char *> argv;
        for (const std::string &a : args)
            argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int status = cli::run(int(argv.size()), argv.data(), out, err);
        return {status, out.str(), err.str()};
    }

    json read_json(const fs::path &p) { return json::parse(test::slurp(p)); }

    std::string first_line(const fs::path &p)
    {
        std::ifstream in(p);
        std::string line;
        std::getline(in, line);
        return line;
    }
}

TEST_CASE("cli resonate - outputs, provenance header and summary")
{
    const fs::path dir = test::scratch_dir("resonate");
    const Scenario s = test::small_scenario();
    const fs::path cfg = write_config(dir, s);
    const Invocation r = rbloc_cli({"resonate", "--config", cfg.string(), "--out", (dir / "out").string(), "--threads", "1"});
    INFO(r.err);
    REQUIRE(r.status == 0);

    const std::string header = "# rbloc 0.1.0 config_hash=" + config_hash(s);
    CHECK(first_line(dir / "out" / "trace.csv") == header);
    const json j = read_json(dir / "out" / "summary.json");
    CHECK(j["_meta"]["config_hash"] == config_hash(s));
    CHECK(j["_meta"]["command"] == "resonate");
    CHECK(j["collapsed"] == false);
    CHECK(j["seed"] == 1);
    CHECK(j["final"]["bs_transmit_w"].get<double>() > 0.0);
    CHECK(j["eta"].get<double>() > 0.0);
}

TEST_CASE("cli resonate - collapse exits 0 and is reported")
{
    const fs::path dir = test::scratch_dir("collapse");
    Scenario s = test::small_scenario();
    for (MtPlacement &m : s.mts)
        m.reflection_ratio = 0.0;
    const Invocation r = rbloc_cli({"resonate", "--config", write_config(dir, s).string(), "--out", (dir / "out").string()});
    CHECK(r.status == 0);
    const json j = read_json(dir / "out" / "summary.json");
    CHECK(j["collapsed"] == true);
    CHECK(j["eta"].is_null());
}

TEST_CASE("cli - configuration and usage errors exit 2")
{
    const fs::path dir = test::scratch_dir("errors");
    std::ofstream(dir / "bad.json") << R"({"mts": [{"range_m": 0, "elevation_deg": 0, "azimuth_deg": 0, "rows": 4, "cols": 4}]})";
    const Invocation bad = rbloc_cli({"resonate", "--config", (dir / "bad.json").string(), "--out", (dir / "o").string()});
    CHECK(bad.status == 2);
    CHECK(bad.err.find("mts[0].range_m") != std::string::npos);

    std::ofstream(dir / "broken.json") << "{ not json";
    CHECK(rbloc_cli({"doa", "--config", (dir / "broken.json").string(), "--out", (dir / "o").string()}).status == 2);
    CHECK(rbloc_cli({"resonate", "--out", (dir / "o").string()}).status == 2);
    CHECK(rbloc_cli({"teleport"}).status == 2);

    const fs::path cfg = write_config(dir, test::small_scenario());
    CHECK(rbloc_cli({"fieldmap", "--config", cfg.string(), "--out", (dir / "o").string(), "--plane", "nope"}).status == 2);
}

TEST_CASE("cli doa - per-system output trees")
{
    const fs::path dir = test::scratch_dir("doa");
    const fs::path cfg = write_config(dir, test::small_scenario());
    for (const char *sys : {"mrls", "bfls"})
    {
        const Invocation r = rbloc_cli({"doa", "--config", cfg.string(), "--out", (dir / "out").string(), "--system", sys});
        INFO(r.err);
        REQUIRE(r.status == 0);
        const fs::path sub = dir / "out" / sys;
        CHECK(fs::exists(sub / "spectrum.csv"));
        std::ifstream in(sub / "spectrum.csv");
        std::string line;
        std::getline(in, line);
        std::getline(in, line);
        CHECK(line == "theta_deg,phi_deg,p_music");

        const json est = read_json(sub / "estimates.json");
        CHECK(est["system"] == sys);
        CHECK(est["estimates"].size() == 2);
        CHECK(est["per_mt"].size() == 2);
        const json sum = read_json(sub / "summary.json");
        CHECK(sum["resolved"] == true);
        CHECK(sum["estimate_count"] == 2);
    }
}

TEST_CASE("cli fieldmap - file per plane")
{
    const fs::path dir = test::scratch_dir("fieldmap");
    const fs::path cfg = write_config(dir, test::small_scenario());
    const Invocation r = rbloc_cli({"fieldmap", "--config", cfg.string(), "--out", (dir / "out").string(), "--plane",
                                    "xoy:z=0.5,extent=1,samples=11", "--plane", "yoz:samples=9,mask=1", "--iteration", "5"});
    INFO(r.err);
    REQUIRE(r.status == 0);
    CHECK(fs::exists(dir / "out" / "fieldmap_xoy_z0.5.csv"));
    CHECK(fs::exists(dir / "out" / "fieldmap_yoz.csv"));
    std::ifstream in(dir / "out" / "fieldmap_xoy_z0.5.csv");
    std::size_t lines = 0;
    for (std::string l; std::getline(in, l);)
        ++lines;
    CHECK(lines == 3 + 121);
}

TEST_CASE("cli sweep - summary and aggregates; reruns are byte-identical")
{
    const fs::path dir = test::scratch_dir("sweep");
    const fs::path cfg = write_config(dir, test::small_scenario());
    std::ofstream(dir / "sweep.json") << R"({"variable": "elevation", "values": [10, 20], "trials": 2, "system": "both", "mt": 0})";

    auto run_into = [&](const std::string &name, const std::string &threads) {
        const Invocation r = rbloc_cli({"sweep", "--config", cfg.string(), "--out", (dir / name).string(), "--sweep",
                                        (dir / "sweep.json").string(), "--seed", "77", "--threads", threads});
        INFO(r.err);
        REQUIRE(r.status == 0);
    };
    run_into("a", "1");
    run_into("b", "2");

    const json j = read_json(dir / "a" / "summary.json");
    CHECK(j["master_seed"] == 77);
    CHECK(j["systems"] == json::array({"mrls", "bfls"}));
    CHECK(j["values"] == 2);
    for (const char *sys : {"mrls", "bfls"})
        for (const char *file : {"aggregate.csv", "trials.csv"})
        {
            INFO(sys << "/" << file);
            CHECK(test::slurp(dir / "a" / sys / file) == test::slurp(dir / "b" / sys / file));
        }
    CHECK(test::slurp(dir / "a" / "summary.json") == test::slurp(dir / "b" / "summary.json"));
}

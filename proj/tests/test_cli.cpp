// Copyright 2026 The qdap Authors.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kBinary = QDAP_CLI_PATH;
const fs::path kData = fs::path(QDAP_SOURCE_DIR) / "data";

fs::path scratch(const std::string &name) {
    const fs::path dir = fs::temp_directory_path() / ("qdap_test_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

json small_config() {
    json j = json::parse(R"({
      "schema_version": 1,
      "models": [
        {"name": "crra_g10", "kind": "crra", "gamma": 10, "beta": 0.99},
        {"name": "ies1_g2", "kind": "recursive_ies1", "gamma": 2, "beta": 0.99},
        {"name": "rare_disaster", "kind": "rare_disaster",
         "rd": {"delta": 0.0657, "gamma": 4, "g_d": 0.025, "p": 0.0363, "B": 0.66,
                "phi_h": 0.13, "n_states": "matched"}}
      ],
      "discretization": {"n_abscissa": 4},
      "hhl": {"clock_qubits": 4, "mode": ["classical", "ideal", "circuit"]},
      "scan": {"benchmark": "crra_g10", "targets": ["ies1_g2"], "reference_p": [0.5],
               "delta_ranges": [null, [1.1780972450961724, 1.9634954084936207]],
               "grid_points": 201},
      "ensemble": {"count": 60, "seed": 11},
      "diagnose": {"n_abscissa": [4, 8]},
      "measure": {"rows": ["crra_g10", "ies1_g2", "rare_disaster"],
                  "sv_columns": [{"pi_g": 0.8, "gamma_g": 0.3}]}
    })");
    j["data"] = {{"dividends", (kData / "dividend_growth.csv").string()},
                 {"riskfree", (kData / "riskfree_log.csv").string()},
                 {"price_dividend", (kData / "price_dividend.csv").string()}};
    return j;
}

fs::path write_config(const fs::path &dir, const json &j) {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << j.dump(2);
    return p;
}

int run(const std::string &args) {
    const std::string cmd = "\"" + kBinary.string() + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string read(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace

TEST_CASE("successful commands exit 0 and write their artifacts") {
    const fs::path dir = scratch("ok");
    const fs::path cfg = write_config(dir, small_config());
    const std::string base = "--config " + cfg.string() + " --out " + (dir / "out").string();
    CHECK(run(base + " discretize") == 0);
    CHECK(run(base + " solve") == 0);
    CHECK(run(base + " diagnose") == 0);
    CHECK(run(base + " measure") == 0);
    CHECK(fs::exists(dir / "out" / "chain_base.json"));
    CHECK(fs::exists(dir / "out" / "fidelity.csv"));
    CHECK(fs::exists(dir / "out" / "diagnose.csv"));
    CHECK(fs::exists(dir / "out" / "tail_table.csv"));
    CHECK(fs::exists(dir / "out" / "run_metadata.json"));
    CHECK(run("--version") == 0);
}

TEST_CASE("configuration problems exit 2") {
    const fs::path dir = scratch("config");
    const fs::path cfg = write_config(dir, small_config());
    CHECK(run("solve") == 2);
    CHECK(run("--config " + cfg.string()) == 2);
    CHECK(run("--config " + cfg.string() + " launch") == 2);
    CHECK(run("--config " + cfg.string() + " --jobs 0 solve") == 2);
    CHECK(run("--config " + (dir / "missing.json").string() + " solve") == 2);

    json bad = small_config();
    bad["discretization"]["n_abscissa"] = 1;
    CHECK(run("--config " + write_config(dir, bad).string() + " solve") == 2);
    bad = small_config();
    bad["models"].push_back({{"name", "flat"}, {"kind", "gordon"}, {"kappa", 1.0}});
    CHECK(run("--config " + write_config(dir, bad).string() + " solve") == 2);
    std::ofstream(dir / "config.json") << "{ \"schema_version\": ";
    CHECK(run("--config " + (dir / "config.json").string() + " solve") == 2);
}

TEST_CASE("malformed data exits 3") {
    const fs::path dir = scratch("data");
    std::string text = read(kData / "dividend_growth.csv");
    const auto pos = text.find('\n', text.find('\n') + 1);
    text.insert(pos + 1, "1964-03-01,nan\n");
    std::ofstream(dir / "dividends.csv") << text;
    json j = small_config();
    j["data"]["dividends"] = (dir / "dividends.csv").string();
    j["parameters"] = {{"source", "estimate"}};
    CHECK(run("--config " + write_config(dir, j).string() + " --out " +
              (dir / "out").string() + " estimate") == 3);
}

TEST_CASE("numerical failures exit 4") {
    const fs::path dir = scratch("numerical");
    json j = small_config();
    j["models"][2]["rd"]["delta"] = 0.02;
    CHECK(run("--config " + write_config(dir, j).string() + " --out " +
              (dir / "out").string() + " solve") == 4);
}

TEST_CASE("artifacts are identical across thread counts") {
    const fs::path dir = scratch("jobs");
    const fs::path cfg = write_config(dir, small_config());
    for (const char *jobs : {"1", "8"}) {
        const std::string base = "--config " + cfg.string() + " --jobs " + jobs + " --out " +
                                 (dir / (std::string("out") + jobs)).string();
        REQUIRE(run(base + " solve") == 0);
        REQUIRE(run(base + " scan") == 0);
        REQUIRE(run(base + " ensemble") == 0);
    }
    int compared = 0;
    for (const auto &e : fs::directory_iterator(dir / "out1")) {
        const std::string name = e.path().filename().string();
        if (name == "run_metadata.json") {
            continue;
        }
        INFO(name);
        CHECK(read(e.path()) == read(dir / "out8" / name));
        ++compared;
    }
    CHECK(compared >= 6);
}

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
#include "test_util.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>

#include "qdap/app.hpp"
#include "qdap/io.hpp"

using namespace qdap;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string &name) {
    const fs::path dir = fs::temp_directory_path() / ("qdap_test_io_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write(const fs::path &p, const std::string &text) {
    std::ofstream out(p);
    out << text;
}

std::string series_text(int rows) {
    std::string s = "date,value\n";
    for (int i = 0; i < rows; ++i) {
        s += "2000-01-" + std::to_string(10 + i % 18) + "," + std::to_string(0.01 * (i % 5)) +
             "\n";
    }
    return s;
}

nlohmann::json minimal_config() {
    return nlohmann::json::parse(R"({
      "schema_version": 1,
      "data": {"dividends": "d.csv", "riskfree": "r.csv", "price_dividend": "p.csv"},
      "models": [
        {"name": "crra_g10", "kind": "crra", "gamma": 10, "beta": 0.99},
        {"name": "ies1_g2", "kind": "recursive_ies1", "gamma": 2, "beta": 0.99},
        {"name": "flat", "kind": "gordon", "kappa": 0.8}
      ],
      "discretization": {"n_abscissa": 4},
      "scan": {"benchmark": "crra_g10", "targets": ["ies1_g2"], "grid_points": 101}
    })");
}

fs::path config_dir() {
    const fs::path dir = scratch("cfg");
    write(dir / "d.csv", series_text(40));
    write(dir / "r.csv", series_text(40));
    write(dir / "p.csv", series_text(40));
    return dir;
}

} // namespace

TEST_CASE("series CSV parses dates and values") {
    const fs::path dir = scratch("ok");
    write(dir / "s.csv", "date,value\n2001-01-01, 0.5\n\n2001-04-01,-1.25e-3\n");
    const Series s = read_series_csv(dir / "s.csv");
    REQUIRE(s.values.size() == 2);
    CHECK(s.dates[1] == "2001-04-01");
    CHECK(s.values[0] == 0.5);
    CHECK(s.values[1] == -1.25e-3);
}

TEST_CASE("series CSV errors name the offending line") {
    const fs::path dir = scratch("bad");
    write(dir / "empty.csv", "");
    CHECK_ERRC(read_series_csv(dir / "empty.csv"), Errc::parse);

    std::string text = series_text(10);
    text += "2001-01-01,nan\n";
    write(dir / "nan.csv", text);
    try {
        (void)read_series_csv(dir / "nan.csv");
        FAIL("expected a parse error");
    } catch (const Error &e) {
        CHECK(e.code() == Errc::parse);
        CHECK(std::string(e.what()).find(":12:") != std::string::npos);
    }

    write(dir / "fields.csv", "date,value\n2001-01-01,1,2\n");
    CHECK_ERRC(read_series_csv(dir / "fields.csv"), Errc::parse);
    write(dir / "header.csv", "when,what\n2001-01-01,1\n");
    CHECK_ERRC(read_series_csv(dir / "header.csv"), Errc::parse);
    write(dir / "text.csv", "date,value\n2001-01-01,abc\n");
    CHECK_ERRC(read_series_csv(dir / "text.csv"), Errc::parse);
    CHECK_ERRC(read_series_csv(dir / "missing.csv"), Errc::io);
}

TEST_CASE("format_double round-trips") {
    for (int i = 0; i < 500; ++i) {
        const double v = std::ldexp(testing::uniform(-1.0, 1.0), static_cast<int>(testing::uniform(-60, 60)));
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(std::stod(format_double(0.1)) == 0.1);
    CHECK(std::strtod(format_double(std::numeric_limits<double>::denorm_min()).c_str(), nullptr) ==
          std::numeric_limits<double>::denorm_min());
}

TEST_CASE("chain and state JSON round-trip") {
    const Ar1Params p{0.01037, 0.64079, 0.01520, 0.03630};
    const auto base = discretize_ar1(p, 5);
    const Vec shocks = (Vec(2) << 1.0, -1.0).finished();
    const Vec probs = (Vec(2) << 0.5, 0.5).finished();
    const auto chain = kron_extend(base, shocks, probs);
    const auto back = chain_from_json(nlohmann::json::parse(to_json(chain).dump()));
    CHECK(back.abscissa == chain.abscissa);
    CHECK(back.transition == chain.transition);
    CHECK(back.weights == chain.weights);
    CHECK(back.shock_values == chain.shock_values);

    CVec amp(3);
    amp << std::complex<double>(0.3, -0.1), 0.5, std::complex<double>(0.0, 0.7);
    const auto s = prepare_state(amp);
    const auto t = state_from_json(nlohmann::json::parse(to_json(s).dump()));
    CHECK(t.n_qubits == s.n_qubits);
    CHECK(t.logical_dim == s.logical_dim);
    CHECK(t.amplitudes == s.amplitudes);

    CHECK_ERRC(chain_from_json(nlohmann::json{{"abscissa", 1}}), Errc::parse);
    auto broken = to_json(s);
    broken["re"].erase(0);
    CHECK_ERRC(state_from_json(broken), Errc::parse);
}

TEST_CASE("atomic writes replace the target") {
    const fs::path dir = scratch("atomic");
    write_file_atomic(dir / "nested" / "x.txt", "first");
    write_file_atomic(dir / "nested" / "x.txt", "second");
    std::ifstream in(dir / "nested" / "x.txt");
    std::string text((std::istreambuf_iterator<char>(in)), {});
    CHECK(text == "second");
    CHECK(fs::directory_iterator(dir / "nested") != fs::directory_iterator());
    int files = 0;
    for ([[maybe_unused]] const auto &e : fs::directory_iterator(dir / "nested")) {
        ++files;
    }
    CHECK(files == 1);
}

TEST_CASE("config parses and resolves paths") {
    const fs::path dir = config_dir();
    const RunConfig cfg = parse_config(minimal_config(), dir);
    CHECK(cfg.models.size() == 3);
    CHECK(cfg.dividends == dir / "d.csv");
    CHECK(cfg.n_abscissa == 4);
    CHECK(cfg.grid_points == 101);
    CHECK(cfg.model("flat").kind == ModelKind::gordon);
    CHECK_ERRC(cfg.model("nope"), Errc::config);

    RunConfig over = cfg;
    apply_overrides(over, RunOverrides{7, 3, dir / "elsewhere"});
    CHECK(over.seed == 7);
    CHECK(over.jobs == 3);
    CHECK(over.output_dir == dir / "elsewhere");
}

TEST_CASE("config errors are classified as config") {
    const fs::path dir = config_dir();
    auto mutate = [&](auto &&edit) {
        nlohmann::json j = minimal_config();
        edit(j);
        return parse_config(j, dir);
    };
    CHECK_ERRC(mutate([](auto &j) { j["schema_version"] = 99; }), Errc::config);
    CHECK_ERRC(mutate([](auto &j) { j["discretization"]["n_abscissa"] = 1; }), Errc::config);
    CHECK_ERRC(mutate([](auto &j) { j["scan"]["grid_points"] = 2; }), Errc::config);
    CHECK_ERRC(mutate([](auto &j) { j["models"][1]["name"] = "crra_g10"; }), Errc::config);
    CHECK_ERRC(mutate([](auto &j) { j["models"][0]["kind"] = "habit"; }), Errc::config);
    CHECK_ERRC(mutate([](auto &j) { j["data"]["dividends"] = "absent.csv"; }), Errc::config);
    CHECK_ERRC(mutate([](auto &j) { j["hhl"] = {{"mode", "quantum"}}; }), Errc::config);
    CHECK_ERRC(load_config(dir / "no_such.json"), Errc::config);
    write(dir / "garbled.json", "{ not json");
    CHECK_ERRC(load_config(dir / "garbled.json"), Errc::config);
    CHECK(exit_code_for(Errc::config) == 2);
    CHECK(exit_code_for(Errc::parse) == 3);
    CHECK(exit_code_for(Errc::singular) == 4);
}

TEST_CASE("constant-growth model solves to the geometric sum") {
    const fs::path dir = config_dir();
    const RunConfig cfg = parse_config(minimal_config(), dir);
    const auto sol = solve_model(cfg, cfg.model("flat"), 4);
    REQUIRE(sol.nu.size() == 8);
    for (Eigen::Index i = 0; i < sol.nu.size(); ++i) {
        CHECK(sol.nu(i) == doctest::Approx(0.8 / 0.2).epsilon(1e-12));
    }
}

TEST_CASE("parallel_for covers every index and rethrows the lowest failure") {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), 8, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) {
        CHECK(h == 1);
    }
    try {
        parallel_for(64, 8, [](std::size_t i) {
            if (i % 10 == 3) {
                fail(Errc::data, "index " + std::to_string(i));
            }
        });
        FAIL("expected an error");
    } catch (const Error &e) {
        CHECK(std::string(e.what()) == "index 3");
    }
}

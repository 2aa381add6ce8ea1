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
#include "qdap/app.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>
#include <string_view>

#include "qdap/error.hpp"
#include "qdap/io.hpp"
#include "qdap/qsolver.hpp"

namespace qdap {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string &msg) { fail(Errc::config, msg); }

template <typename T> T get_or(const json &j, const char *key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) {
        return fallback;
    }
    return j.at(key).get<T>();
}

fs::path resolve_path(const fs::path &base, const std::string &p) {
    const fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

UtilityKind utility_kind(const std::string &s) {
    if (s == "crra") {
        return UtilityKind::crra;
    }
    if (s == "recursive_ies1") {
        return UtilityKind::recursive_ies1;
    }
    config_error("unknown utility '" + s + "'");
}

ModelConfig parse_model(const json &m) {
    ModelConfig mc;
    mc.name = m.at("name").get<std::string>();
    if (mc.name.empty() || mc.name.find_first_of("/\\,") != std::string::npos) {
        config_error("model name '" + mc.name + "' is not a valid identifier");
    }
    const auto kind = m.at("kind").get<std::string>();
    if (kind == "rare_disaster") {
        mc.kind = ModelKind::rare_disaster;
        RareDisasterSpec rd;
        const json r = m.value("rd", json::object());
        rd.delta = get_or(r, "delta", rd.delta);
        rd.gamma = get_or(r, "gamma", rd.gamma);
        rd.g_d = get_or(r, "g_d", rd.g_d);
        rd.p_dis = get_or(r, "p", rd.p_dis);
        rd.recovery = get_or(r, "B", rd.recovery);
        rd.phi_h = get_or(r, "phi_h", rd.phi_h);
        rd.sigma_h = get_or(r, "sigma_h", 0.0);
        if (r.contains("n_states") && r.at("n_states").is_number_integer()) {
            rd.n_states = r.at("n_states").get<int>();
            mc.rd_matched = false;
        } else if (r.contains("n_states") && r.at("n_states") != "matched") {
            config_error("rd.n_states must be an integer or \"matched\"");
        }
        rd.finalize();
        mc.rd = rd;
        return mc;
    }
    if (kind == "gordon") {
        mc.kind = ModelKind::gordon;
        mc.kappa = m.at("kappa").get<double>();
        if (!(mc.kappa > 0.0 && mc.kappa < 1.0)) {
            config_error("gordon kappa must lie in (0, 1)");
        }
        return mc;
    }
    mc.kind = ModelKind::consumption;
    std::string utility = kind;
    if (kind == "sv") {
        utility = m.value("utility", std::string("recursive_ies1"));
    }
    mc.utility.kind = utility_kind(utility);
    mc.utility.gamma = m.at("gamma").get<double>();
    mc.utility.beta = m.value("beta", mc.utility.beta);
    if (m.contains("sv") && !m.at("sv").is_null()) {
        const auto &s = m.at("sv");
        mc.sv = std::make_pair(s.at("pi_g").get<double>(), s.at("gamma_g").get<double>());
    } else if (kind == "sv") {
        config_error("model '" + mc.name + "' has kind sv but no sv block");
    }
    return mc;
}

WeightRule weight_rule(const std::string &s) {
    if (s == "kl") {
        return WeightRule::kl;
    }
    if (s == "inverse_kl") {
        return WeightRule::inverse_kl;
    }
    if (s == "uniform") {
        return WeightRule::uniform;
    }
    config_error("unknown weight_rule '" + s + "'");
}

const char *weight_rule_name(WeightRule r) {
    switch (r) {
    case WeightRule::kl:
        return "kl";
    case WeightRule::inverse_kl:
        return "inverse_kl";
    case WeightRule::uniform:
        return "uniform";
    }
    return "kl";
}

void validate_config(const RunConfig &cfg) {
    if (cfg.n_abscissa < 2) {
        config_error("n_abscissa must be at least 2");
    }
    if (cfg.grid_points < 3) {
        config_error("grid_points must be at least 3");
    }
    if (cfg.clock_qubits < 1 || cfg.clock_qubits > 12) {
        config_error("clock_qubits must lie in [1, 12]");
    }
    for (int m : cfg.clock_sweep) {
        if (m < 1 || m > 12) {
            config_error("clock_sweep entries must lie in [1, 12]");
        }
    }
    for (const auto &mode : cfg.modes) {
        if (mode != "classical" && mode != "ideal" && mode != "circuit") {
            config_error("unknown hhl mode '" + mode + "'");
        }
    }
    if (cfg.ensemble_count < 1) {
        config_error("ensemble count must be positive");
    }
    if (cfg.jobs < 1) {
        config_error("jobs must be positive");
    }
    for (double p : cfg.reference_p) {
        if (!(p >= 0.0 && p <= 1.0)) {
            config_error("reference_p entries must lie in [0, 1]");
        }
    }
    for (const auto &r : cfg.delta_ranges) {
        if (r && !(r->first <= r->second && std::isfinite(r->first) && std::isfinite(r->second))) {
            config_error("delta range must satisfy lo <= hi");
        }
    }
    for (int n : cfg.diagnose_abscissa) {
        if (n < 2) {
            config_error("diagnose n_abscissa entries must be at least 2");
        }
    }
    for (std::size_t i = 0; i < cfg.models.size(); ++i) {
        for (std::size_t k = i + 1; k < cfg.models.size(); ++k) {
            if (cfg.models[i].name == cfg.models[k].name) {
                config_error("duplicate model name '" + cfg.models[i].name + "'");
            }
        }
        const auto &m = cfg.models[i];
        try {
            if (m.kind == ModelKind::consumption) {
                m.utility.validate();
                if (m.sv) {
                    SvSpec::make(m.sv->first, m.sv->second, cfg.ar1, m.utility);
                }
            } else if (m.kind == ModelKind::rare_disaster) {
                m.rd.validate();
            }
        } catch (const Error &e) {
            config_error("model '" + m.name + "': " + e.what());
        }
    }
    for (const auto *path : {&cfg.dividends, &cfg.riskfree, &cfg.price_dividend}) {
        if (!path->empty() && !fs::exists(*path)) {
            config_error("referenced file does not exist: " + path->string());
        }
    }
}

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string opt_cell(const std::optional<double> &v) { return v ? format_double(*v) : ""; }

json opt_json(const std::optional<double> &v) { return v ? json(*v) : json(nullptr); }

void write_json(const fs::path &path, json j) {
    j["schema_version"] = kSchemaVersion;
    write_file_atomic(path, j.dump(2) + "\n");
}

/// Re-raises a module error with the model name attached.
template <typename F> auto with_model(const std::string &name, F &&fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const Error &e) {
        const std::string prefix = "model '" + name + "': ";
        if (std::string_view(e.what()).starts_with(prefix)) {
            throw;
        }
        throw Error(e.code(), prefix + e.what());
    }
}

/// Parameter point and SDF loadings resolved for a run.
struct Resolved {
    RunConfig cfg;
    EstimationResult est;
};

Resolved resolve(const RunConfig &cfg) {
    Resolved r{cfg, parameter_estimate(cfg)};
    r.cfg.ar1 = r.est.theta_hat;
    if (cfg.estimate_parameters && !cfg.riskfree.empty()) {
        const Series div = read_series_csv(cfg.dividends);
        const Series rf = read_series_csv(cfg.riskfree);
        const auto filt = kalman_filter(r.est.theta_hat, div.values, cfg.filter_init);
        const std::size_t n = std::min(rf.values.size(), div.values.size());
        const std::vector<double> x(filt.filtered.data(), filt.filtered.data() + n);
        const std::vector<double> y(rf.values.begin(), rf.values.begin() + static_cast<long>(n));
        const auto sdf = calibrate_sdf(x, y);
        r.cfg.alpha0 = sdf.alpha0;
        r.cfg.alpha1 = sdf.alpha1;
    }
    return r;
}

std::string model_kind_name(const ModelConfig &m) {
    switch (m.kind) {
    case ModelKind::rare_disaster:
        return "rare_disaster";
    case ModelKind::gordon:
        return "gordon";
    case ModelKind::consumption:
        break;
    }
    if (m.sv) {
        return "sv";
    }
    return m.utility.kind == UtilityKind::crra ? "crra" : "recursive_ies1";
}

std::string p_label(double p) { return format_double(p); }

// ---------------------------------------------------------------- commands

void cmd_estimate(const RunConfig &cfg) {
    if (cfg.dividends.empty()) {
        config_error("estimate needs data.dividends");
    }
    const Series div = read_series_csv(cfg.dividends);
    const EstimationResult est = mle_fit(div.values, cfg.filter_init);
    const auto filt = kalman_filter(est.theta_hat, div.values, cfg.filter_init);

    const Vec theta = to_vector(est.theta_hat);
    const char *names[] = {"a", "b", "c", "rho"};
    json j;
    j["n_obs"] = div.values.size();
    j["loglik"] = est.loglik;
    for (int i = 0; i < 4; ++i) {
        j["theta_hat"][names[i]] = theta(i);
        j["standard_errors"][names[i]] = est.standard_errors(i);
    }
    j["parameter_order"] = {"a", "b", "c", "rho"};
    j["covariance"] = to_json(est.covariance);
    j["boundary"] = est.boundary;
    j["covariance_projected"] = est.covariance_projected;
    j["starts_converged"] = est.starts_converged;
    j["filter_init"] = cfg.filter_init == FilterInit::zero ? "zero" : "stationary";
    if (!cfg.riskfree.empty()) {
        const Series rf = read_series_csv(cfg.riskfree);
        const std::size_t n = std::min(rf.values.size(), div.values.size());
        const std::vector<double> x(filt.filtered.data(), filt.filtered.data() + n);
        const std::vector<double> y(rf.values.begin(), rf.values.begin() + static_cast<long>(n));
        const auto sdf = calibrate_sdf(x, y);
        j["sdf"] = {{"alpha0", sdf.alpha0}, {"alpha1", sdf.alpha1}};
    }
    write_json(cfg.output_dir / "estimate.json", j);

    std::ostringstream csv;
    csv << "date,x_hat\n";
    for (std::size_t t = 0; t < div.values.size(); ++t) {
        csv << div.dates[t] << ',' << format_double(filt.filtered(static_cast<Eigen::Index>(t)))
            << '\n';
    }
    write_file_atomic(cfg.output_dir / "filtered_states.csv", csv.str());
}

void cmd_discretize(const RunConfig &base) {
    const auto r = resolve(base);
    const RunConfig &cfg = r.cfg;
    json jb = to_json(discretize_ar1(cfg.ar1, cfg.n_abscissa));
    write_json(cfg.output_dir / "chain_base.json", jb);
    parallel_for(cfg.models.size(), cfg.jobs, [&](std::size_t i) {
        const auto &m = cfg.models[i];
        const auto sol = solve_model(cfg, m, cfg.n_abscissa);
        json j = to_json(sol.chain);
        j["model"] = m.name;
        write_json(cfg.output_dir / ("chain_" + m.name + ".json"), j);
    });
}

struct SolveOutput {
    FidelityRow row;
    std::vector<std::pair<int, double>> sweep; ///< (clock qubits, fidelity vs ideal)
};

SolveOutput solve_one(const RunConfig &cfg, const ModelConfig &m) {
    const auto has = [&](const char *mode) {
        return std::find(cfg.modes.begin(), cfg.modes.end(), mode) != cfg.modes.end();
    };
    const auto sol = solve_model(cfg, m, cfg.n_abscissa);
    SolveOutput out;
    out.row.model = m.name;
    out.row.n_states = sol.nu.size();

    json j;
    j["model"] = m.name;
    j["kind"] = model_kind_name(m);
    j["n_states"] = sol.nu.size();
    j["abscissa"] = to_json(sol.chain.abscissa);
    const QuantumState classical = prepare_state(embedded_solution(sol.nu));
    if (has("classical")) {
        j["classical"] = {{"nu", to_json(sol.nu)}, {"state", to_json(prepare_state(sol.nu))}};
    }
    std::optional<QuantumState> ideal;
    const bool need_embed = has("ideal") || has("circuit") || !cfg.clock_sweep.empty();
    if (need_embed) {
        const auto sys = hermitian_embed(sol.A, sol.b);
        const QuantumState id = ideal_hhl(sys);
        ideal = id;
        if (has("ideal")) {
            j["ideal"] = {{"state", to_json(id)}};
            out.row.ideal_vs_classical = fidelity(id, classical);
        }
        if (has("circuit")) {
            HhlConfig hc;
            hc.clock_qubits = cfg.clock_qubits;
            hc.shots = cfg.shots;
            hc.seed = cfg.seed;
            const auto res = circuit_hhl(sys, hc);
            out.row.circuit_vs_classical = fidelity(res.solution, classical);
            out.row.circuit_vs_ideal = fidelity(res.solution, id);
            out.row.success_probability = res.success_probability;
            json c = {{"state", to_json(res.solution)},
                      {"clock_qubits", cfg.clock_qubits},
                      {"success_probability", res.success_probability},
                      {"evolution_time", res.evolution_time},
                      {"rotation_constant", res.rotation_constant}};
            if (res.sampled_success) {
                c["sampled_success"] = *res.sampled_success;
            }
            j["circuit"] = c;
        }
        for (int mq : cfg.clock_sweep) {
            HhlConfig hc;
            hc.clock_qubits = mq;
            const auto res = circuit_hhl(sys, hc);
            out.sweep.emplace_back(mq, fidelity(res.solution, id));
        }
    }
    j["fidelity"] = {{"ideal_vs_classical", opt_json(out.row.ideal_vs_classical)},
                     {"circuit_vs_classical", opt_json(out.row.circuit_vs_classical)},
                     {"circuit_vs_ideal", opt_json(out.row.circuit_vs_ideal)}};
    write_json(cfg.output_dir / ("solution_" + m.name + ".json"), j);
    return out;
}

void cmd_solve(const RunConfig &base) {
    const auto r = resolve(base);
    const RunConfig &cfg = r.cfg;
    std::vector<SolveOutput> outs(cfg.models.size());
    parallel_for(cfg.models.size(), cfg.jobs, [&](std::size_t i) {
        outs[i] = with_model(cfg.models[i].name, [&] { return solve_one(cfg, cfg.models[i]); });
    });
    std::ostringstream csv;
    csv << "model,n_states,ideal_vs_classical,circuit_vs_classical,circuit_vs_ideal,"
           "success_probability\n";
    for (const auto &o : outs) {
        const auto &f = o.row;
        csv << f.model << ',' << f.n_states << ',' << opt_cell(f.ideal_vs_classical) << ','
            << opt_cell(f.circuit_vs_classical) << ',' << opt_cell(f.circuit_vs_ideal) << ','
            << opt_cell(f.success_probability) << '\n';
    }
    write_file_atomic(cfg.output_dir / "fidelity.csv", csv.str());
    if (!cfg.clock_sweep.empty()) {
        std::ostringstream sw;
        sw << "model,clock_qubits,circuit_vs_ideal\n";
        for (const auto &o : outs) {
            for (const auto &[mq, f] : o.sweep) {
                sw << o.row.model << ',' << mq << ',' << format_double(f) << '\n';
            }
        }
        write_file_atomic(cfg.output_dir / "clock_sweep.csv", sw.str());
    }
}

void cmd_diagnose(const RunConfig &base) {
    const auto rows = diagnose(base);
    std::ostringstream csv;
    csv << "model,N,sparsity,condition\n";
    for (const auto &r : rows) {
        csv << r.model << ',' << r.n_abscissa << ',' << r.sparsity << ','
            << format_double(r.condition) << '\n';
    }
    write_file_atomic(base.output_dir / "diagnose.csv", csv.str());
}

void cmd_measure(const RunConfig &base) {
    const auto rows = tail_table(base);
    std::ostringstream csv;
    csv << "model,without_sv";
    json cols = json::array();
    cols.push_back("without_sv");
    for (const auto &c : base.tail_sv_columns) {
        const std::string name =
            "sv_pi" + format_double(c.pi_g) + "_gamma" + format_double(c.gamma_g);
        csv << ',' << name;
        cols.push_back(name);
    }
    csv << '\n';
    json jrows = json::array();
    for (const auto &r : rows) {
        csv << r.model;
        json vals = json::array();
        for (const auto &v : r.values) {
            csv << ',' << opt_cell(v);
            vals.push_back(opt_json(v));
        }
        csv << '\n';
        jrows.push_back({{"model", r.model}, {"values", vals}});
    }
    write_file_atomic(base.output_dir / "tail_table.csv", csv.str());
    json idx = json::array();
    for (auto i : base.tail_indices) {
        idx.push_back(i);
    }
    write_json(base.output_dir / "tail_table.json",
               {{"columns", cols}, {"rows", jrows}, {"bad_indices", idx},
                {"source", base.tail_ensemble ? "ensemble" : "point"}});
}

std::string scan_file_name(const ScanRecord &r, std::size_t delta_index) {
    std::string name = "scan_" + r.target + "_ref" + p_label(r.reference_p);
    if (r.delta_range) {
        name += "_delta" + std::to_string(delta_index);
    } else {
        name += "_full";
    }
    return name + ".csv";
}

void cmd_scan(const RunConfig &base) {
    const auto recs = run_scans(base);
    const std::size_t per_target = base.reference_p.size() * base.delta_ranges.size();
    std::ostringstream sum;
    sum << "benchmark,target,reference_p,delta_lo,delta_hi,p_L,p_C,p_U,r_d,r_b,phase_gap,"
           "file,flags\n";
    json scans = json::array();
    for (std::size_t i = 0; i < recs.size(); ++i) {
        const auto &r = recs[i];
        const auto &s = r.scan;
        const std::string file = scan_file_name(r, per_target ? i % base.delta_ranges.size() : 0);
        std::ostringstream csv;
        csv << "p,classical,envelope_low,envelope_high,reference\n";
        for (Eigen::Index k = 0; k < s.p_grid.size(); ++k) {
            csv << format_double(s.p_grid(k)) << ',' << format_double(s.classical_loss(k)) << ','
                << format_double(s.envelope_low(k)) << ',' << format_double(s.envelope_high(k))
                << ',' << format_double(s.reference_level) << '\n';
        }
        write_file_atomic(base.output_dir / file, csv.str());

        std::vector<std::string> flags;
        if (!s.p_C_found) {
            flags.emplace_back("p_C_not_found");
        }
        if (s.p_L_clamped) {
            flags.emplace_back("p_L_clamped");
        }
        if (s.p_U_clamped) {
            flags.emplace_back("p_U_clamped");
        }
        if (s.degenerate) {
            flags.emplace_back("degenerate");
        }
        if (s.multiple_crossings) {
            flags.emplace_back("multiple_crossings");
        }
        std::string flag_cell;
        for (std::size_t k = 0; k < flags.size(); ++k) {
            flag_cell += (k ? ";" : "") + flags[k];
        }
        const std::string lo = r.delta_range ? format_double(r.delta_range->first) : "";
        const std::string hi = r.delta_range ? format_double(r.delta_range->second) : "";
        sum << base.scan_benchmark << ',' << r.target << ',' << format_double(r.reference_p) << ','
            << lo << ',' << hi << ',' << format_double(s.p_L) << ','
            << (s.p_C_found ? format_double(s.p_C) : "") << ',' << format_double(s.p_U) << ','
            << format_double(s.r_d) << ',' << format_double(s.r_b) << ','
            << format_double(s.phase_gap) << ',' << file << ',' << flag_cell << '\n';
        scans.push_back({{"target", r.target},
                         {"reference_p", r.reference_p},
                         {"delta_range", r.delta_range ? json::array({r.delta_range->first,
                                                                      r.delta_range->second})
                                                       : json(nullptr)},
                         {"p_L", s.p_L},
                         {"p_C", s.p_C_found ? json(s.p_C) : json(nullptr)},
                         {"p_U", s.p_U},
                         {"r_d", s.r_d},
                         {"r_b", s.r_b},
                         {"phase_gap", s.phase_gap},
                         {"flags", flags},
                         {"file", file}});
    }
    write_file_atomic(base.output_dir / "scan_summary.csv", sum.str());
    write_json(base.output_dir / "scan_summary.json",
               {{"benchmark", base.scan_benchmark},
                {"benchmark_source", base.ensemble_benchmark ? "ensemble" : "point"},
                {"scans", scans}});
}

void cmd_ensemble(const RunConfig &base) {
    const auto r = resolve(base);
    const RunConfig &cfg = r.cfg;
    const auto ens = draw_ensemble(r.est, cfg.ensemble_count, cfg.seed, cfg.weight_rule, cfg.jobs);
    std::ostringstream csv;
    csv << "index,a,b,c,rho,kl,weight\n";
    for (std::size_t i = 0; i < ens.draws.size(); ++i) {
        const auto &d = ens.draws[i];
        const auto k = static_cast<Eigen::Index>(i);
        csv << i << ',' << format_double(d.mean_level) << ',' << format_double(d.obs_sd) << ','
            << format_double(d.innov_sd) << ',' << format_double(d.rho) << ','
            << format_double(ens.kl_divergences(k)) << ',' << format_double(ens.weights(k))
            << '\n';
    }
    write_file_atomic(cfg.output_dir / "ensemble.csv", csv.str());
    std::vector<double> kl(ens.kl_divergences.data(),
                           ens.kl_divergences.data() + ens.kl_divergences.size());
    std::sort(kl.begin(), kl.end());
    const double median = kl.empty() ? 0.0 : kl[kl.size() / 2];
    write_json(cfg.output_dir / "ensemble.json",
               {{"count", ens.draws.size()},
                {"seed", cfg.seed},
                {"weight_rule", weight_rule_name(cfg.weight_rule)},
                {"attempts", ens.attempts},
                {"kl_mean", ens.kl_divergences.mean()},
                {"kl_median", median}});
}

} // namespace

// ------------------------------------------------------------------ config

const ModelConfig &RunConfig::model(const std::string &name) const {
    for (const auto &m : models) {
        if (m.name == name) {
            return m;
        }
    }
    config_error("unknown model '" + name + "'");
}

RunConfig parse_config(const json &j, const fs::path &base_dir) {
    RunConfig cfg;
    cfg.base_dir = base_dir;
    try {
        if (!j.is_object()) {
            config_error("top level must be an object");
        }
        const int version = j.value("schema_version", kSchemaVersion);
        if (version != kSchemaVersion) {
            config_error("unsupported schema_version " + std::to_string(version));
        }
        if (j.contains("data")) {
            const auto &d = j.at("data");
            if (d.contains("dividends")) {
                cfg.dividends = resolve_path(base_dir, d.at("dividends").get<std::string>());
            }
            if (d.contains("riskfree")) {
                cfg.riskfree = resolve_path(base_dir, d.at("riskfree").get<std::string>());
            }
            if (d.contains("price_dividend")) {
                cfg.price_dividend =
                    resolve_path(base_dir, d.at("price_dividend").get<std::string>());
            }
        }
        if (j.contains("parameters")) {
            const auto &p = j.at("parameters");
            const auto source = p.value("source", std::string("table"));
            if (source != "table" && source != "estimate") {
                config_error("parameters.source must be table or estimate");
            }
            cfg.estimate_parameters = source == "estimate";
            cfg.ar1.mean_level = p.value("a", cfg.ar1.mean_level);
            cfg.ar1.obs_sd = p.value("b", cfg.ar1.obs_sd);
            cfg.ar1.innov_sd = p.value("c", cfg.ar1.innov_sd);
            cfg.ar1.rho = p.value("rho", cfg.ar1.rho);
            if (p.contains("se")) {
                const auto se = p.at("se").get<std::vector<double>>();
                if (se.size() != 4) {
                    config_error("parameters.se needs four entries (a, b, c, rho)");
                }
                for (int i = 0; i < 4; ++i) {
                    cfg.ar1_se(i) = se[static_cast<std::size_t>(i)];
                }
            }
            cfg.alpha0 = p.value("alpha0", cfg.alpha0);
            cfg.alpha1 = p.value("alpha1", cfg.alpha1);
            const auto init = p.value("filter_init", std::string("zero"));
            if (init != "zero" && init != "stationary") {
                config_error("filter_init must be zero or stationary");
            }
            cfg.filter_init = init == "zero" ? FilterInit::zero : FilterInit::stationary;
        }
        try {
            cfg.ar1.validate();
        } catch (const Error &e) {
            config_error(std::string("parameters: ") + e.what());
        }
        if ((cfg.ar1_se.array() < 0.0).any() || !cfg.ar1_se.allFinite()) {
            config_error("standard errors must be finite and non-negative");
        }
        if (cfg.estimate_parameters && cfg.dividends.empty()) {
            config_error("parameters.source=estimate needs data.dividends");
        }
        if (j.contains("models")) {
            for (const auto &m : j.at("models")) {
                cfg.models.push_back(parse_model(m));
            }
        }
        if (j.contains("discretization")) {
            const auto &d = j.at("discretization");
            cfg.n_abscissa = d.value("n_abscissa", cfg.n_abscissa);
            const auto scheme = d.value("shock_scheme", std::string("symmetric"));
            if (scheme != "symmetric") {
                config_error("shock_scheme must be symmetric");
            }
        }
        if (j.contains("hhl")) {
            const auto &h = j.at("hhl");
            cfg.clock_qubits = h.value("clock_qubits", cfg.clock_qubits);
            if (h.contains("mode")) {
                const auto &m = h.at("mode");
                cfg.modes = m.is_array() ? m.get<std::vector<std::string>>()
                                         : std::vector<std::string>{m.get<std::string>()};
            }
            cfg.clock_sweep = h.value("clock_sweep", cfg.clock_sweep);
            if (h.contains("shots") && !h.at("shots").is_null()) {
                cfg.shots = h.at("shots").get<int>();
                if (*cfg.shots < 1) {
                    config_error("shots must be positive");
                }
            }
        }
        if (j.contains("scan")) {
            const auto &s = j.at("scan");
            cfg.scan_benchmark = s.value("benchmark", cfg.scan_benchmark);
            cfg.scan_targets = s.value("targets", cfg.scan_targets);
            if (s.contains("reference_p")) {
                const auto &r = s.at("reference_p");
                cfg.reference_p = r.is_array() ? r.get<std::vector<double>>()
                                               : std::vector<double>{r.get<double>()};
            }
            if (s.contains("delta_ranges")) {
                cfg.delta_ranges.clear();
                for (const auto &r : s.at("delta_ranges")) {
                    if (r.is_null()) {
                        cfg.delta_ranges.emplace_back(std::nullopt);
                    } else {
                        const auto v = r.get<std::vector<double>>();
                        if (v.size() != 2) {
                            config_error("delta range needs [lo, hi]");
                        }
                        cfg.delta_ranges.emplace_back(std::make_pair(v[0], v[1]));
                    }
                }
            } else if (s.contains("delta_lo") || s.contains("delta_hi")) {
                cfg.delta_ranges = {std::make_pair(s.at("delta_lo").get<double>(),
                                                   s.at("delta_hi").get<double>())};
            }
            cfg.grid_points = s.value("grid_points", cfg.grid_points);
            const auto src = s.value("benchmark_source", std::string("ensemble"));
            if (src != "ensemble" && src != "point") {
                config_error("scan.benchmark_source must be ensemble or point");
            }
            cfg.ensemble_benchmark = src == "ensemble";
        }
        if (j.contains("ensemble")) {
            const auto &e = j.at("ensemble");
            cfg.ensemble_count = e.value("count", cfg.ensemble_count);
            cfg.seed = e.value("seed", cfg.seed);
            cfg.weight_rule = weight_rule(e.value("weight_rule", std::string("kl")));
        }
        if (j.contains("diagnose")) {
            const auto &d = j.at("diagnose");
            cfg.diagnose_abscissa = d.value("n_abscissa", cfg.diagnose_abscissa);
            cfg.sparsity_threshold = d.value("threshold", cfg.sparsity_threshold);
        }
        if (j.contains("measure")) {
            const auto &m = j.at("measure");
            cfg.tail_rows = m.value("rows", cfg.tail_rows);
            if (m.contains("sv_columns")) {
                cfg.tail_sv_columns.clear();
                for (const auto &c : m.at("sv_columns")) {
                    cfg.tail_sv_columns.push_back(
                        {c.at("pi_g").get<double>(), c.at("gamma_g").get<double>()});
                }
            }
            if (m.contains("bad_indices")) {
                cfg.tail_indices = m.at("bad_indices").get<std::vector<Eigen::Index>>();
            }
            const auto src = m.value("source", std::string("point"));
            if (src != "ensemble" && src != "point") {
                config_error("measure.source must be ensemble or point");
            }
            cfg.tail_ensemble = src == "ensemble";
        }
        if (j.contains("output")) {
            cfg.output_dir = resolve_path(base_dir, j.at("output").get<std::string>());
        } else {
            cfg.output_dir = base_dir / "out";
        }
        cfg.jobs = j.value("jobs", cfg.jobs);
    } catch (const json::exception &e) {
        config_error(e.what());
    }
    validate_config(cfg);
    return cfg;
}

RunConfig load_config(const fs::path &path) {
    std::ifstream in(path);
    if (!in) {
        config_error("cannot open " + path.string());
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception &e) {
        config_error(path.string() + ": " + e.what());
    }
    const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
    return parse_config(j, base);
}

void apply_overrides(RunConfig &cfg, const RunOverrides &o) {
    if (o.seed) {
        cfg.seed = *o.seed;
    }
    if (o.jobs) {
        if (*o.jobs < 1) {
            config_error("--jobs must be positive");
        }
        cfg.jobs = *o.jobs;
    }
    if (o.out) {
        cfg.output_dir = *o.out;
    }
}

// ----------------------------------------------------------------- models

ModelSolution solve_model(const RunConfig &cfg, const ModelConfig &model, int n_abscissa,
                          const Ar1Params &ar1) {
    return with_model(model.name, [&] {
        ModelSolution sol;
        sol.name = model.name;
        sol.kind = model.kind;
        if (model.kind == ModelKind::rare_disaster) {
            RareDisasterSpec spec = model.rd;
            if (model.rd_matched) {
                spec.n_states = 2 * n_abscissa;
            }
            const auto rd = solve_rare_disaster(spec);
            sol.chain = rd.chain;
            sol.A = rd.A;
            sol.b = Vec::Ones(rd.nu.size());
            sol.nu = rd.nu;
            return sol;
        }
        const auto base = discretize_ar1(ar1, n_abscissa);
        const Vec shocks = (Vec(2) << 1.0, -1.0).finished();
        if (model.kind == ModelKind::gordon) {
            sol.chain = kron_extend(base, shocks, Vec::Constant(2, 0.5));
            const Eigen::Index n = sol.chain.size();
            const auto sys = assemble_system(Mat::Ones(n, n), Mat::Constant(n, n, model.kappa),
                                             Mat::Constant(n, n, 1.0 / static_cast<double>(n)));
            sol.A = sys.A;
            sol.b = sys.b;
            sol.nu = solve_classical(sys);
            return sol;
        }
        std::optional<SvSpec> sv;
        Vec probs = Vec::Constant(2, 0.5);
        if (model.sv) {
            sv = SvSpec::make(model.sv->first, model.sv->second, ar1, model.utility);
            probs << model.sv->first, 1.0 - model.sv->first;
        }
        sol.chain = kron_extend(base, shocks, probs);
        const SdfSpec sdf{cfg.alpha0, cfg.alpha1, xi_from_utility(model.utility, ar1)};
        const auto sys = build_system(sol.chain, ar1, sdf, sv);
        sol.A = sys.A;
        sol.b = sys.b;
        sol.nu = solve_classical(sys);
        return sol;
    });
}

ModelSolution solve_model(const RunConfig &cfg, const ModelConfig &model, int n_abscissa) {
    return solve_model(cfg, model, n_abscissa, cfg.ar1);
}

EstimationResult parameter_estimate(const RunConfig &cfg) {
    if (cfg.estimate_parameters) {
        const Series div = read_series_csv(cfg.dividends);
        return mle_fit(div.values, cfg.filter_init);
    }
    EstimationResult est;
    est.theta_hat = cfg.ar1;
    est.standard_errors = cfg.ar1_se;
    est.covariance = cfg.ar1_se.array().square().matrix().asDiagonal();
    est.loglik = std::nan("");
    return est;
}

QuantumState ensemble_error_state(const RunConfig &cfg, const ModelConfig &model,
                                  const DataState &d, const ModelEnsemble &ens) {
    require(model.kind == ModelKind::consumption, Errc::invalid_parameter,
            "ensembles apply to consumption models only");
    std::vector<QuantumState> states(ens.draws.size());
    parallel_for(ens.draws.size(), cfg.jobs, [&](std::size_t i) {
        const auto sol = solve_model(cfg, model, cfg.n_abscissa, ens.draws[i]);
        states[i] = pricing_error_state(d, sol.nu).state;
    });
    const std::vector<double> w(ens.weights.data(), ens.weights.data() + ens.weights.size());
    return *mixed_state(states, w, MixMode::superposed).superposed;
}

DataState load_data_state(const RunConfig &cfg, int n_points) {
    if (cfg.price_dividend.empty()) {
        config_error("this command needs data.price_dividend");
    }
    return data_state(read_series_csv(cfg.price_dividend).values, n_points);
}

std::vector<ScanRecord> run_scans(const RunConfig &base) {
    const auto r = resolve(base);
    const RunConfig &cfg = r.cfg;
    const int n_states = 2 * cfg.n_abscissa;
    const DataState d = load_data_state(cfg, n_states);
    const ModelConfig &bm = cfg.model(cfg.scan_benchmark);

    QuantumState bench;
    if (cfg.ensemble_benchmark && bm.kind == ModelKind::consumption) {
        const auto ens =
            draw_ensemble(r.est, cfg.ensemble_count, cfg.seed, cfg.weight_rule, cfg.jobs);
        bench = ensemble_error_state(cfg, bm, d, ens);
    } else {
        bench = pricing_error_state(d, solve_model(cfg, bm, cfg.n_abscissa).nu).state;
    }

    std::vector<ScanRecord> out;
    std::vector<PricingErrorState> targets;
    for (const auto &name : cfg.scan_targets) {
        const auto &m = cfg.model(name);
        targets.push_back(with_model(name, [&] {
            return pricing_error_state(d, solve_model(cfg, m, cfg.n_abscissa).nu);
        }));
        for (double p : cfg.reference_p) {
            for (const auto &dr : cfg.delta_ranges) {
                ScanRecord rec;
                rec.target = name;
                rec.reference_p = p;
                rec.delta_range = dr;
                out.push_back(rec);
            }
        }
    }
    const std::size_t per_target = cfg.reference_p.size() * cfg.delta_ranges.size();
    parallel_for(out.size(), cfg.jobs, [&](std::size_t i) {
        ScanOptions opt;
        opt.reference_p = out[i].reference_p;
        opt.grid_points = cfg.grid_points;
        opt.delta_range = out[i].delta_range;
        out[i].scan = ambiguity_scan(targets[i / per_target], d, bench, opt);
    });
    return out;
}

std::vector<TailRow> tail_table(const RunConfig &base) {
    const auto r = resolve(base);
    const RunConfig &cfg = r.cfg;
    const int n_states = 2 * cfg.n_abscissa;
    const DataState d = load_data_state(cfg, n_states);
    for (auto i : cfg.tail_indices) {
        require(i >= 0 && i < n_states, Errc::config, "bad index out of range");
    }
    const auto op = tail_operator(d, cfg.tail_indices, TailWeights::unit);
    std::optional<ModelEnsemble> ens;
    if (cfg.tail_ensemble) {
        ens = draw_ensemble(r.est, cfg.ensemble_count, cfg.seed, cfg.weight_rule, cfg.jobs);
    }
    const auto value = [&](const ModelConfig &m) {
        QuantumState e;
        if (ens && m.kind == ModelKind::consumption) {
            RunConfig serial = cfg;
            serial.jobs = 1;
            e = ensemble_error_state(serial, m, d, *ens);
        } else {
            e = pricing_error_state(d, solve_model(cfg, m, cfg.n_abscissa).nu).state;
        }
        return expectation(op, e).real();
    };

    std::vector<TailRow> rows(cfg.tail_rows.size());
    parallel_for(rows.size(), cfg.jobs, [&](std::size_t i) {
        const ModelConfig &m = cfg.model(cfg.tail_rows[i]);
        TailRow row;
        row.model = m.name;
        ModelConfig plain = m;
        plain.sv.reset();
        row.values.emplace_back(with_model(m.name, [&] { return value(plain); }));
        for (const auto &c : cfg.tail_sv_columns) {
            if (m.kind != ModelKind::consumption) {
                row.values.emplace_back(std::nullopt);
                continue;
            }
            ModelConfig with_sv = m;
            with_sv.sv = std::make_pair(c.pi_g, c.gamma_g);
            row.values.emplace_back(with_model(m.name, [&] { return value(with_sv); }));
        }
        rows[i] = row;
    });
    return rows;
}

std::vector<DiagnoseRow> diagnose(const RunConfig &base) {
    const auto r = resolve(base);
    const RunConfig &cfg = r.cfg;
    std::vector<DiagnoseRow> rows;
    for (int n : cfg.diagnose_abscissa) {
        for (const auto &m : cfg.models) {
            DiagnoseRow row;
            row.model = m.name;
            row.n_abscissa = n;
            rows.push_back(row);
        }
    }
    parallel_for(rows.size(), cfg.jobs, [&](std::size_t i) {
        const auto &m = cfg.model(rows[i].model);
        with_model(m.name, [&] {
            const auto sol = solve_model(cfg, m, rows[i].n_abscissa);
            const auto sys = hermitian_embed(sol.A, sol.b);
            rows[i].sparsity = sparsity(sys.matrix, cfg.sparsity_threshold);
            rows[i].condition = condition_number(sys.matrix);
        });
    });
    return rows;
}

void run_command(const std::string &command, const RunConfig &cfg) {
    if (command == "estimate") {
        cmd_estimate(cfg);
    } else if (command == "discretize") {
        cmd_discretize(cfg);
    } else if (command == "solve") {
        cmd_solve(cfg);
    } else if (command == "diagnose") {
        cmd_diagnose(cfg);
    } else if (command == "measure") {
        cmd_measure(cfg);
    } else if (command == "scan") {
        cmd_scan(cfg);
    } else if (command == "ensemble") {
        cmd_ensemble(cfg);
    } else {
        config_error("unknown command '" + command + "'");
    }
    json meta = {{"command", command},
                 {"timestamp", iso_timestamp()},
                 {"seed", cfg.seed},
                 {"jobs", cfg.jobs},
                 {"output_dir", cfg.output_dir.string()}};
    write_json(cfg.output_dir / "run_metadata.json", meta);
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)> &fn) {
    const std::size_t workers =
        std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::size_t first_failed = n;
    std::exception_ptr failure;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(mu);
                    if (i < first_failed) {
                        first_failed = i;
                        failure = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto &t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

} // namespace qdap

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
#include "qdap/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qdap/error.hpp"

namespace qdap {

namespace {

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

Series read_series_csv(const std::filesystem::path &path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), Errc::io, "cannot open " + path.string());
    Series s;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) {
            continue;
        }
        if (!header) {
            require(t == "date,value", Errc::parse,
                    path.string() + ":" + std::to_string(lineno) + ": expected header date,value");
            header = true;
            continue;
        }
        const auto comma = t.find(',');
        require(comma != std::string::npos && t.find(',', comma + 1) == std::string::npos,
                Errc::parse,
                path.string() + ":" + std::to_string(lineno) + ": expected two fields");
        const std::string value = trim(t.substr(comma + 1));
        double v = 0.0;
        const auto *first = value.data();
        const auto *last = value.data() + value.size();
        const auto [ptr, ec] = std::from_chars(first, last, v);
        require(ec == std::errc() && ptr == last && !value.empty(), Errc::parse,
                path.string() + ":" + std::to_string(lineno) + ": malformed value '" + value +
                    "'");
        require(std::isfinite(v), Errc::parse,
                path.string() + ":" + std::to_string(lineno) + ": non-finite value");
        s.dates.push_back(trim(t.substr(0, comma)));
        s.values.push_back(v);
    }
    require(header, Errc::parse, path.string() + ": empty file");
    require(!s.values.empty(), Errc::parse, path.string() + ": no data rows");
    return s;
}

std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    require(ec == std::errc(), Errc::internal, "number formatting failed");
    return {buf, ptr};
}

void write_file_atomic(const std::filesystem::path &path, const std::string &content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        require(!ec, Errc::io, "cannot create directory " + path.parent_path().string());
    }
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        require(static_cast<bool>(out), Errc::io, "cannot write " + tmp);
        out << content;
        require(static_cast<bool>(out), Errc::io, "write failed for " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    require(!ec, Errc::io, "cannot move " + tmp + " into place");
}

nlohmann::json to_json(const Vec &v) {
    nlohmann::json j = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        j.push_back(v(i));
    }
    return j;
}

nlohmann::json to_json(const Mat &m) {
    nlohmann::json j = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        j.push_back(to_json(Vec(m.row(r).transpose())));
    }
    return j;
}

nlohmann::json to_json(const DiscreteMarkovChain &chain) {
    nlohmann::json j;
    j["abscissa"] = to_json(chain.abscissa);
    j["transition"] = to_json(chain.transition);
    j["weights"] = to_json(chain.weights);
    if (chain.shock_values.size() > 0) {
        j["shock_values"] = to_json(chain.shock_values);
        j["shock_probs"] = to_json(chain.shock_probs);
    }
    return j;
}

namespace {

Vec vec_from(const nlohmann::json &j) {
    require(j.is_array(), Errc::parse, "expected an array");
    Vec v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    return v;
}

} // namespace

DiscreteMarkovChain chain_from_json(const nlohmann::json &j) {
    try {
        DiscreteMarkovChain c;
        c.abscissa = vec_from(j.at("abscissa"));
        c.weights = vec_from(j.at("weights"));
        const auto &t = j.at("transition");
        const auto n = static_cast<Eigen::Index>(t.size());
        c.transition.resize(n, n);
        for (Eigen::Index r = 0; r < n; ++r) {
            const Vec row = vec_from(t[static_cast<std::size_t>(r)]);
            require(row.size() == n, Errc::parse, "transition is not square");
            c.transition.row(r) = row.transpose();
        }
        if (j.contains("shock_values")) {
            c.shock_values = vec_from(j.at("shock_values"));
            c.shock_probs = vec_from(j.at("shock_probs"));
        }
        c.validate();
        return c;
    } catch (const nlohmann::json::exception &e) {
        fail(Errc::parse, std::string("chain JSON: ") + e.what());
    }
}

nlohmann::json to_json(const QuantumState &state) {
    nlohmann::json j;
    j["n_qubits"] = state.n_qubits;
    j["logical_dim"] = state.logical_dim;
    j["re"] = to_json(Vec(state.amplitudes.real()));
    j["im"] = to_json(Vec(state.amplitudes.imag()));
    return j;
}

QuantumState state_from_json(const nlohmann::json &j) {
    try {
        QuantumState s;
        s.n_qubits = j.at("n_qubits").get<int>();
        s.logical_dim = j.at("logical_dim").get<Eigen::Index>();
        const Vec re = vec_from(j.at("re"));
        const Vec im = vec_from(j.at("im"));
        require(re.size() == im.size() && re.size() == (Eigen::Index{1} << s.n_qubits),
                Errc::parse, "state amplitude arrays do not match n_qubits");
        s.amplitudes.resize(re.size());
        s.amplitudes.real() = re;
        s.amplitudes.imag() = im;
        return s;
    } catch (const nlohmann::json::exception &e) {
        fail(Errc::parse, std::string("state JSON: ") + e.what());
    }
}

} // namespace qdap

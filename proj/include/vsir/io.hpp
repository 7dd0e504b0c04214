/*
 * Copyright (C) 2026 The vsir Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vsir/equilibria.hpp"
#include "vsir/error.hpp"
#include "vsir/heteroclinic.hpp"
#include "vsir/model.hpp"
#include "vsir/ode.hpp"
#include "vsir/recovered.hpp"

namespace vsir {

inline constexpr const char* version = "1.0.0";

using json = nlohmann::json;

/// Shortest text that reads back to the same double.
inline std::string fmt(double v)
{
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

namespace detail {

inline const std::vector<std::string>& param_keys()
{
    static const std::vector<std::string> keys{"A", "beta", "m", "mu", "d", "g", "p"};
    return keys;
}

inline ModelParams params_from_map(const std::map<std::string, double>& kv, const std::string& where)
{
    for (const auto& [k, v] : kv) {
        bool known = false;
        for (const auto& key : param_keys()) known = known || key == k;
        if (!known) throw validation_error(where + ": unknown key '" + k + "'");
    }
    for (const auto& key : param_keys()) {
        if (!kv.count(key)) throw validation_error(where + ": missing key '" + key + "'");
    }
    ModelParams P;
    P.A = kv.at("A");
    P.beta = kv.at("beta");
    P.m = kv.at("m");
    P.mu = kv.at("mu");
    P.d = kv.at("d");
    P.g = kv.at("g");
    P.p = kv.at("p");
    P.validate();
    return P;
}

inline std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& text, const std::string& where)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw validation_error(where + ": not a number '" + text + "'");
    }
    if (used != text.size()) throw validation_error(where + ": not a number '" + text + "'");
    return v;
}

} // namespace detail

/// Flat "key = value" text, one per line; '#' starts a comment.
inline ModelParams parse_params_kv(const std::string& text)
{
    std::map<std::string, double> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = "params line " + std::to_string(lineno);
        if (eq == std::string::npos) throw validation_error(where + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        if (kv.count(key)) throw validation_error(where + ": duplicate key '" + key + "'");
        kv[key] = detail::parse_double(detail::trim(line.substr(eq + 1)), where);
    }
    return detail::params_from_map(kv, "params");
}

inline ModelParams params_from_json(const json& j)
{
    if (!j.is_object()) throw validation_error("params json: expected an object");
    std::map<std::string, double> kv;
    for (const auto& [k, v] : j.items()) {
        if (!v.is_number()) throw validation_error("params json: '" + k + "' is not a number");
        kv[k] = v.get<double>();
    }
    return detail::params_from_map(kv, "params json");
}

/// Accepts either format; JSON is recognised by a leading '{'.
inline ModelParams parse_params(const std::string& text)
{
    const std::string t = detail::trim(text);
    if (!t.empty() && t.front() == '{') {
        json j;
        try {
            j = json::parse(t);
        } catch (const json::parse_error& e) {
            throw validation_error(std::string("params json: ") + e.what());
        }
        return params_from_json(j);
    }
    return parse_params_kv(text);
}

inline std::string read_file(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw validation_error("cannot open '" + path + "'");
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

inline void write_file(const std::string& path, const std::string& content)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f << content;
}

inline json to_json(const ModelParams& P)
{
    return {{"A", P.A}, {"beta", P.beta}, {"m", P.m}, {"mu", P.mu}, {"d", P.d}, {"g", P.g}, {"p", P.p}};
}

inline std::string to_kv(const ModelParams& P)
{
    std::ostringstream os;
    const json j = to_json(P);
    for (const auto& key : detail::param_keys()) os << key << " = " << fmt(j.at(key).get<double>()) << '\n';
    return os.str();
}

inline json to_json(const Base& b)
{
    return {{"A", b.A}, {"m", b.m}, {"mu", b.mu}, {"d", b.d}, {"g", b.g}, {"beta", b.beta},
            {"carrier", to_string(b.carrier)}};
}

/// "# key: value" preamble lines for CSV outputs.
inline std::string csv_preamble(const json& meta)
{
    std::ostringstream os;
    os << "# vsir " << version << '\n';
    os << "# config: " << meta.dump() << '\n';
    return os.str();
}

/// Trajectory as CSV with header t,S,I (and R when a recovered series is given).
inline std::string trajectory_csv(const Trajectory& tr, const std::vector<RecoveredSample>* R = nullptr)
{
    if (R && R->size() != tr.samples.size()) throw validation_error("trajectory_csv: R series length mismatch");
    std::ostringstream os;
    os << (R ? "t,S,I,R\n" : "t,S,I\n");
    for (std::size_t i = 0; i < tr.samples.size(); ++i) {
        const auto& s = tr.samples[i];
        os << fmt(s.t) << ',' << fmt(s.x.S) << ',' << fmt(s.x.I);
        if (R) os << ',' << fmt((*R)[i].R);
        os << '\n';
    }
    return os.str();
}

inline json to_json(const Crossing& c)
{
    return {{"t", c.t}, {"S", c.x.S}, {"I", c.x.I}, {"direction", c.direction}, {"value", c.value}};
}

inline json to_json(const Trajectory& tr, bool with_samples = true)
{
    json j;
    json term{{"kind", to_string(tr.terminal.kind)}};
    if (tr.terminal.equilibrium) term["equilibrium"] = to_string(*tr.terminal.equilibrium);
    if (tr.terminal.crossing) term["crossing"] = to_json(*tr.terminal.crossing);
    if (!tr.terminal.detail.empty()) term["detail"] = tr.terminal.detail;
    j["terminal"] = term;
    j["stats"] = {{"accepted", tr.stats.accepted},
                  {"rejected", tr.stats.rejected},
                  {"rhs_evals", tr.stats.rhs_evals},
                  {"max_error", tr.stats.max_error}};
    if (tr.stats.axis_time) j["stats"]["axis_time"] = *tr.stats.axis_time;
    j["tol"] = tr.tol;
    j["reversed"] = tr.reversed;
    if (with_samples) {
        json t = json::array(), S = json::array(), I = json::array();
        for (const auto& s : tr.samples) {
            t.push_back(s.t);
            S.push_back(s.x.S);
            I.push_back(s.x.I);
        }
        j["t"] = t;
        j["S"] = S;
        j["I"] = I;
    }
    json cr = json::array();
    for (const auto& c : tr.crossings) cr.push_back(to_json(c));
    j["crossings"] = cr;
    return j;
}

inline const char* het_table_header = "r0,p_het,splitting_residual";

inline std::string het_table_csv(const std::vector<HetRow>& rows)
{
    std::ostringstream os;
    os << het_table_header << '\n';
    for (const auto& r : rows) {
        if (r.ok) os << fmt(r.r0) << ',' << fmt(r.p_het) << ',' << fmt(r.residual) << '\n';
        else os << fmt(r.r0) << ",nan,nan\n";
    }
    return os.str();
}

/// Reads r0,p_het[,splitting_residual] rows; '#' lines and rows with non-finite p are skipped.
inline std::vector<TablePoint> parse_het_table_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    std::vector<TablePoint> out;
    bool header = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = detail::trim(line);
        if (line.empty() || line.front() == '#') continue;
        if (!header) {
            if (line.rfind("r0,p_het", 0) != 0) throw validation_error("het table: header must start with r0,p_het");
            header = true;
            continue;
        }
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(detail::trim(cell));
        const std::string where = "het table line " + std::to_string(lineno);
        if (cells.size() < 2 || cells.size() > 3) throw validation_error(where + ": expected 2 or 3 columns");
        if (cells[1] == "nan") continue;
        out.push_back({detail::parse_double(cells[0], where), detail::parse_double(cells[1], where)});
    }
    if (!header) throw validation_error("het table: missing header");
    return out;
}

} // namespace vsir

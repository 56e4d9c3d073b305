// SPDX-License-Identifier: Apache-2.0
//
// Front-end plumbing shared by the qaction tool and its tests: run a solver
// from a configuration, write the result document and the node table.
//
// Exit codes: 0 success, 1 malformed configuration, 2 solver did not converge
// (the result document is still written and carries "converged": false).

#pragma once

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "qaction/config.hpp"

namespace qaction::cli {

enum ExitCode : int { exit_ok = 0, exit_bad_config = 1, exit_not_converged = 2 };

inline constexpr int kSchemaVersion = 1;

#ifdef QACTION_VERSION
inline constexpr const char* kVersion = QACTION_VERSION;
#else
inline constexpr const char* kVersion = "unknown";
#endif

/// Command-line overrides applied on top of the configuration document.
struct Overrides {
    std::optional<std::string> method;
    std::optional<int> grid_n;
    std::optional<std::uint64_t> seed;
};

inline std::string format_double(double x)
{
    if (!std::isfinite(x)) return "null";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace detail {

inline void write_json(std::string& out, const Json& v, int indent, int depth)
{
    const auto newline = [&](int d) {
        if (indent < 0) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (v.type()) {
    case Json::value_t::object: {
        if (v.empty()) {
            out += "{}";
            return;
        }
        out += '{';
        bool first = true;
        for (const auto& item : v.items()) {
            if (!first) out += ',';
            first = false;
            newline(depth + 1);
            out += Json(item.key()).dump();
            out += indent < 0 ? ":" : ": ";
            write_json(out, item.value(), indent, depth + 1);
        }
        newline(depth);
        out += '}';
        return;
    }
    case Json::value_t::array: {
        if (v.empty()) {
            out += "[]";
            return;
        }
        // Arrays of scalars stay on one line; that keeps node tables compact.
        const bool flat = std::none_of(v.begin(), v.end(), [](const Json& e) {
            return e.is_structured();
        });
        out += '[';
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i > 0) out += flat ? ", " : ",";
            if (!flat) newline(depth + 1);
            write_json(out, v[i], indent, depth + 1);
        }
        if (!flat) newline(depth);
        out += ']';
        return;
    }
    case Json::value_t::number_float:
        out += format_double(v.get<double>());
        return;
    default:
        out += v.dump();
        return;
    }
}

} // namespace detail

/// Serialize with every floating-point number written to 17 significant digits.
inline std::string dump(const Json& v, int indent = 2)
{
    std::string out;
    detail::write_json(out, v, indent, 0);
    out += '\n';
    return out;
}

/// Apply command-line overrides to a configuration document.
inline void apply_overrides(Json& doc, const Overrides& o)
{
    if (o.method) set_parameter(doc, "solver.method", *o.method);
    if (o.grid_n) set_parameter(doc, "solver.grid_n", *o.grid_n);
    if (o.seed) set_parameter(doc, "solver.seed", *o.seed);
}

inline SolveResult solve(const ActionProblem& problem, const SolverConfig& s)
{
    if (s.method == SolveMethod::shooting) {
        ShootingOptions opt;
        opt.intervals = s.grid_n;
        opt.restarts = s.restarts;
        opt.seed = s.seed;
        if (s.max_iter) opt.max_newton = *s.max_iter;
        return solve_shooting(problem, opt);
    }
    TranscriptionOptions opt;
    opt.intervals = s.grid_n;
    if (s.max_iter) opt.max_iterations = *s.max_iter;
    return solve_transcription(problem, opt);
}

/// Node table columns: s, lambda_0..lambda_{m-1}, E, F, Q, L.
inline std::vector<std::string> node_columns(std::size_t num_params)
{
    std::vector<std::string> cols{"s"};
    for (std::size_t mu = 0; mu < num_params; ++mu) cols.push_back("lambda_" + std::to_string(mu));
    for (const char* c : {"E", "F", "Q", "L"}) cols.emplace_back(c);
    return cols;
}

inline RealMatrix node_table(const ActionProblem& problem, const Path& path)
{
    const auto m = path.num_params();
    const RealMatrix resources = resource_profile(problem, path);
    const Eigen::VectorXd lagr = node_lagrangians(problem, path);
    RealMatrix table(path.intervals() + 1, m + 5);
    for (int k = 0; k <= path.intervals(); ++k) {
        table(k, 0) = path.s(k);
        table.row(k).segment(1, m) = path.node(k).transpose();
        table.row(k).segment(m + 1, 3) = resources.row(k);
        table(k, m + 4) = lagr(k);
    }
    return table;
}

inline void write_csv(std::ostream& out, const std::vector<std::string>& columns,
                      const RealMatrix& table)
{
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
    out << '\n';
    for (Eigen::Index r = 0; r < table.rows(); ++r) {
        for (Eigen::Index c = 0; c < table.cols(); ++c) {
            out << (c ? "," : "") << format_double(table(r, c));
        }
        out << '\n';
    }
}

inline Json result_document(const ProblemConfig& cfg, const ActionProblem& problem,
                            const SolveResult& result, const RealMatrix& table)
{
    Json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["generator"] = std::string("qaction ") + kVersion;
    doc["config"] = to_json(cfg);
    doc["method"] = std::string(to_string(result.method));
    doc["init"] = result.init;
    doc["converged"] = result.converged;
    doc["message"] = result.message;
    doc["iterations"] = result.iterations;
    doc["action"] = result.action;
    doc["el_residual_max"] = result.el_residual_max;
    doc["accumulated"] = {{"E", result.accumulated.entanglement},
                          {"F", result.accumulated.antiflatness},
                          {"Q", result.accumulated.coherence}};
    if (result.method == SolveMethod::shooting) {
        Json branches = Json::array();
        for (const auto& b : result.branches) {
            Json v = Json::array();
            for (Eigen::Index i = 0; i < b.initial_velocity.size(); ++i) v.push_back(b.initial_velocity(i));
            branches.push_back({{"initial_velocity", std::move(v)},
                                {"action", b.action},
                                {"restart", b.restart}});
        }
        doc["branches"] = std::move(branches);
    }
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < table.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < table.cols(); ++c) row.push_back(table(r, c));
        rows.push_back(std::move(row));
    }
    doc["nodes"] = {{"columns", node_columns(problem.num_params())}, {"rows", std::move(rows)}};
    return doc;
}

/// Document for a solve that aborted with a SolverError.
inline Json failure_document(const ProblemConfig& cfg, const std::string& message)
{
    Json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["generator"] = std::string("qaction ") + kVersion;
    doc["config"] = to_json(cfg);
    doc["method"] = std::string(to_string(cfg.solver.method));
    doc["converged"] = false;
    doc["message"] = message;
    return doc;
}

struct RunOutput {
    int exit_code = exit_ok;
    Json document;
    /// Node table; empty when the solver aborted.
    RealMatrix table;
    std::vector<std::string> columns;
};

/// Parse, solve and assemble the result for an already loaded document.
/// Configuration errors propagate as ConfigError.
inline RunOutput run_document(const Json& config_doc, std::ostream& log)
{
    const ProblemConfig cfg = parse_config(config_doc);
    ActionProblem problem = [&] {
        try {
            return build_problem(cfg);
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError("<problem>", e.what());
        }
    }();

    RunOutput out;
    out.columns = node_columns(problem.num_params());
    log << "qaction: " << to_string(cfg.solver.method) << ", " << to_string(cfg.kinetic) << " + "
        << to_string(cfg.potential) << ", N = " << cfg.solver.grid_n << '\n';
    std::optional<SolveResult> solved;
    try {
        solved.emplace(solve(problem, cfg.solver));
    } catch (const SolverError& e) {
        log << "qaction: solver failed: " << e.what() << '\n';
        out.exit_code = exit_not_converged;
        out.document = failure_document(cfg, e.what());
        return out;
    }
    const SolveResult& result = *solved;
    out.table = node_table(problem, result.path);
    out.document = result_document(cfg, problem, result, out.table);
    if (!result.converged) {
        log << "qaction: warning: " << result.message << '\n';
        out.exit_code = exit_not_converged;
    }
    log << "qaction: action = " << format_double(result.action)
        << ", E = " << format_double(result.accumulated.entanglement)
        << ", F = " << format_double(result.accumulated.antiflatness)
        << ", Q = " << format_double(result.accumulated.coherence) << '\n';
    return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
    if (!f) throw std::runtime_error("error while writing " + path.string());
}

/// `solve` subcommand. Without an output path the document goes to `out`.
inline int run(const std::filesystem::path& config_path,
               const std::optional<std::filesystem::path>& output_path,
               const std::optional<std::filesystem::path>& csv_path, const Overrides& overrides,
               std::ostream& out = std::cout, std::ostream& log = std::cerr)
{
    RunOutput result;
    try {
        Json doc = load_config_document(config_path);
        apply_overrides(doc, overrides);
        result = run_document(doc, log);
    } catch (const ConfigError& e) {
        log << "qaction: invalid configuration: " << e.what() << '\n';
        return exit_bad_config;
    }
    const std::string text = dump(result.document);
    if (output_path) write_text(*output_path, text);
    else out << text;
    if (csv_path && result.table.size() > 0) {
        std::ofstream f(*csv_path);
        if (!f) throw std::runtime_error("cannot write " + csv_path->string());
        write_csv(f, result.columns, result.table);
    }
    return result.exit_code;
}

/// Interpret a sweep value: JSON literals (numbers, true/false, quoted
/// strings) are taken as such, anything else as a plain string.
inline Json parse_sweep_value(const std::string& text)
{
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error&) {
        return text;
    }
}

inline std::vector<std::string> split_values(const std::string& list)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : list) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    for (auto& v : out) {
        const auto b = v.find_first_not_of(" \t");
        const auto e = v.find_last_not_of(" \t");
        v = b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
    }
    return out;
}

/// `sweep` subcommand: one result document per value (run_000.json, ...)
/// plus summary.csv with columns value, action, E, F, Q, converged, document.
inline int sweep(const std::filesystem::path& config_path, const std::string& parameter,
                 const std::vector<std::string>& values, const std::filesystem::path& output_dir,
                 std::ostream& log = std::cerr)
{
    Json base;
    std::vector<Json> docs;
    try {
        base = load_config_document(config_path);
        if (values.empty()) throw ConfigError("--values", "no values given");
        for (const auto& v : values) {
            Json doc = base;
            set_parameter(doc, parameter, parse_sweep_value(v));
            (void)parse_config(doc); // validate every point before solving any
            docs.push_back(std::move(doc));
        }
    } catch (const ConfigError& e) {
        log << "qaction: invalid configuration: " << e.what() << '\n';
        return exit_bad_config;
    }

    std::filesystem::create_directories(output_dir);
    std::ofstream summary(output_dir / "summary.csv");
    if (!summary) throw std::runtime_error("cannot write summary.csv in " + output_dir.string());
    summary << "value,action,E,F,Q,converged,document\n";
    int code = exit_ok;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "run_%03zu.json", i);
        RunOutput r;
        try {
            r = run_document(docs[i], log);
        } catch (const ConfigError& e) {
            log << "qaction: invalid configuration: " << e.what() << '\n';
            return exit_bad_config;
        }
        write_text(output_dir / name, dump(r.document));
        if (r.exit_code != exit_ok) code = r.exit_code;
        std::string value = values[i];
        if (value.find_first_of(",\"") != std::string::npos) {
            std::string quoted = "\"";
            for (char c : value) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
            value = quoted + "\"";
        }
        const Json& d = r.document;
        const auto num = [&](const Json& v) {
            return v.is_number() ? format_double(v.get<double>()) : std::string();
        };
        summary << value << ',';
        if (d.contains("action")) {
            summary << num(d["action"]) << ',' << num(d["accumulated"]["E"]) << ','
                    << num(d["accumulated"]["F"]) << ',' << num(d["accumulated"]["Q"]);
        } else {
            summary << ",,,";
        }
        summary << ',' << (d["converged"].get<bool>() ? "true" : "false") << ',' << name << '\n';
    }
    return code;
}

} // namespace qaction::cli

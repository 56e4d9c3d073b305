// SPDX-License-Identifier: Apache-2.0
//
// Problem configuration documents (JSON). Parsing is strict: unknown keys and
// malformed values raise ConfigError naming the offending field, e.g.
// "boundary.lambda_B[1]". Requires nlohmann/json on the include path.

#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qaction/qaction.hpp"

namespace qaction {

using Json = nlohmann::ordered_json;

/// Evaluate an arithmetic expression over numbers and the constant `pi`,
/// e.g. "pi/4", "2*pi", "-(pi - 0.5)". Throws ConfigError(field, ...) on
/// malformed input.
inline double evaluate_angle(std::string_view text, const std::string& field = "expression")
{
    struct Parser {
        std::string_view s;
        const std::string& field;
        std::size_t pos = 0;

        [[noreturn]] void fail(const std::string& what) const
        {
            std::ostringstream msg;
            msg << what << " at offset " << pos << " in \"" << s << "\"";
            throw ConfigError(field, msg.str());
        }
        void skip()
        {
            while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        }
        bool eat(char c)
        {
            skip();
            if (pos < s.size() && s[pos] == c) {
                ++pos;
                return true;
            }
            return false;
        }
        double expr()
        {
            double v = term();
            for (;;) {
                if (eat('+')) v += term();
                else if (eat('-')) v -= term();
                else return v;
            }
        }
        double term()
        {
            double v = unary();
            for (;;) {
                if (eat('*')) v *= unary();
                else if (eat('/')) {
                    const double d = unary();
                    if (d == 0.0) fail("division by zero");
                    v /= d;
                } else return v;
            }
        }
        double unary()
        {
            if (eat('-')) return -unary();
            if (eat('+')) return unary();
            return primary();
        }
        double primary()
        {
            skip();
            if (eat('(')) {
                const double v = expr();
                if (!eat(')')) fail("expected ')'");
                return v;
            }
            if (s.substr(pos, 2) == "pi") {
                pos += 2;
                return std::numbers::pi;
            }
            double v = 0.0;
            const auto [end, ec] = std::from_chars(s.data() + pos, s.data() + s.size(), v);
            if (ec != std::errc() || end == s.data() + pos) fail("expected a number or 'pi'");
            pos = static_cast<std::size_t>(end - s.data());
            return v;
        }
    };

    Parser p{text, field};
    const double v = p.expr();
    p.skip();
    if (p.pos != text.size()) p.fail("unexpected trailing input");
    if (!std::isfinite(v)) p.fail("expression is not finite");
    return v;
}

/// One Hamiltonian generator: a Pauli string or an explicit dense matrix.
struct GeneratorSpec {
    std::string pauli;
    std::optional<ComplexMatrix> dense;
};

/// A boundary component as written in the document (number or expression)
/// together with its value.
struct AngleValue {
    Json source;
    double value = 0.0;
};

struct SolverConfig {
    SolveMethod method = SolveMethod::transcription;
    int grid_n = 400;
    /// Transcription: Newton iterations. Shooting: Newton iterations per restart.
    std::optional<int> max_iter;
    int restarts = 16;
    std::uint64_t seed = 0;
};

struct ProblemConfig {
    std::vector<std::size_t> dimension;
    std::vector<GeneratorSpec> generators;
    /// Named preset ("plus01") or empty when `amplitudes` is used.
    std::string reference_preset;
    std::vector<Complex> amplitudes;
    KineticTerm kinetic = KineticTerm::K2;
    PotentialKind potential = PotentialKind::none;
    std::optional<std::vector<std::size_t>> bipartition;
    /// Projectors of the dephasing basis; empty means the computational basis.
    std::vector<ComplexMatrix> dephasing_projectors;
    std::vector<AngleValue> lambda_a;
    std::vector<AngleValue> lambda_b;
    SolverConfig solver;
};

namespace detail {

inline void reject_unknown_keys(const Json& obj, const std::string& where,
                                std::initializer_list<std::string_view> allowed)
{
    for (const auto& item : obj.items()) {
        bool known = false;
        for (auto a : allowed) known = known || item.key() == a;
        if (!known) {
            throw ConfigError(where.empty() ? item.key() : where + "." + item.key(),
                              "unknown key");
        }
    }
}

inline const Json& require_key(const Json& obj, const std::string& key)
{
    if (!obj.contains(key)) throw ConfigError(key, "missing required key");
    return obj.at(key);
}

inline std::string index_field(const std::string& field, std::size_t i)
{
    return field + "[" + std::to_string(i) + "]";
}

inline const Json& require_array(const Json& v, const std::string& field)
{
    if (!v.is_array()) throw ConfigError(field, "expected a list");
    return v;
}

inline std::string require_string(const Json& v, const std::string& field)
{
    if (!v.is_string()) throw ConfigError(field, "expected a string");
    return v.get<std::string>();
}

inline std::int64_t require_integer(const Json& v, const std::string& field, std::int64_t lo,
                                    std::int64_t hi)
{
    if (!v.is_number_integer()) throw ConfigError(field, "expected an integer");
    if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(hi)) {
        throw ConfigError(field, "value out of range");
    }
    const auto x = v.get<std::int64_t>();
    if (x < lo || x > hi) {
        std::ostringstream msg;
        msg << "value " << x << " outside [" << lo << ", " << hi << "]";
        throw ConfigError(field, msg.str());
    }
    return x;
}

/// A complex entry: a number or a [re, im] pair.
inline Complex parse_complex(const Json& v, const std::string& field)
{
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        return {v[0].get<double>(), v[1].get<double>()};
    }
    throw ConfigError(field, "expected a number or a [re, im] pair");
}

inline Json complex_to_json(Complex z)
{
    if (z.imag() == 0.0) return z.real();
    return Json::array({z.real(), z.imag()});
}

/// Row-major list of rows.
inline ComplexMatrix parse_matrix(const Json& v, const std::string& field)
{
    require_array(v, field);
    const auto rows = static_cast<Eigen::Index>(v.size());
    if (rows == 0) throw ConfigError(field, "matrix is empty");
    ComplexMatrix out(rows, rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const std::string row_field = index_field(field, static_cast<std::size_t>(i));
        const Json& row = require_array(v[static_cast<std::size_t>(i)], row_field);
        if (static_cast<Eigen::Index>(row.size()) != rows) {
            throw ConfigError(row_field, "matrix must be square");
        }
        for (Eigen::Index j = 0; j < rows; ++j) {
            out(i, j) = parse_complex(row[static_cast<std::size_t>(j)],
                                      index_field(row_field, static_cast<std::size_t>(j)));
        }
    }
    return out;
}

inline Json matrix_to_json(const ComplexMatrix& m)
{
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::vector<std::size_t> parse_index_list(const Json& v, const std::string& field,
                                                 std::int64_t lo, std::int64_t hi)
{
    require_array(v, field);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(static_cast<std::size_t>(require_integer(v[i], index_field(field, i), lo, hi)));
    }
    return out;
}

inline std::vector<AngleValue> parse_endpoint(const Json& v, const std::string& field)
{
    require_array(v, field);
    std::vector<AngleValue> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string f = index_field(field, i);
        if (v[i].is_number()) {
            out.push_back({v[i], v[i].get<double>()});
        } else if (v[i].is_string()) {
            out.push_back({v[i], evaluate_angle(v[i].get<std::string>(), f)});
        } else {
            throw ConfigError(f, "expected a number or an expression string");
        }
    }
    return out;
}

} // namespace detail

inline ProblemConfig parse_config(const Json& doc)
{
    using namespace detail;
    if (!doc.is_object()) throw ConfigError("<document>", "expected an object at top level");
    reject_unknown_keys(doc, "",
                        {"dimension", "generators", "reference_state", "kinetic", "potential",
                         "bipartition", "dephasing_basis", "boundary", "solver"});
    ProblemConfig cfg;

    cfg.dimension = parse_index_list(require_key(doc, "dimension"), "dimension", 1, 4096);
    if (cfg.dimension.empty()) throw ConfigError("dimension", "needs at least one factor");
    std::size_t total = 1;
    for (auto d : cfg.dimension) {
        total *= d;
        if (total > kDefaultMaxDim) {
            std::ostringstream msg;
            msg << "total dimension exceeds " << kDefaultMaxDim;
            throw ConfigError("dimension", msg.str());
        }
    }

    const Json& gens = require_array(require_key(doc, "generators"), "generators");
    if (gens.empty()) throw ConfigError("generators", "needs at least one generator");
    for (std::size_t mu = 0; mu < gens.size(); ++mu) {
        const std::string f = index_field("generators", mu);
        const Json& g = gens[mu];
        if (!g.is_object() || g.size() != 1) {
            throw ConfigError(f, "expected {\"pauli\": ...} or {\"dense\": ...}");
        }
        reject_unknown_keys(g, f, {"pauli", "dense"});
        GeneratorSpec spec;
        if (g.contains("pauli")) {
            spec.pauli = require_string(g["pauli"], f + ".pauli");
            if (spec.pauli.size() != cfg.dimension.size()) {
                throw ConfigError(f + ".pauli",
                                  "length must equal the number of factors in 'dimension'");
            }
            for (char c : spec.pauli) {
                if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') {
                    throw ConfigError(f + ".pauli", std::string("invalid character '") + c +
                                                        "' (allowed: I, X, Y, Z)");
                }
            }
            for (auto d : cfg.dimension) {
                if (d != 2) throw ConfigError(f + ".pauli", "Pauli strings need qubit factors");
            }
        } else {
            spec.dense = parse_matrix(g["dense"], f + ".dense");
            if (static_cast<std::size_t>(spec.dense->rows()) != total) {
                throw ConfigError(f + ".dense", "size differs from the total dimension");
            }
            if (hermiticity_defect(*spec.dense) > tolerance::hermitian_hard) {
                throw ConfigError(f + ".dense", "matrix is not Hermitian");
            }
        }
        cfg.generators.push_back(std::move(spec));
    }

    const Json& ref = require_key(doc, "reference_state");
    if (ref.is_string()) {
        cfg.reference_preset = ref.get<std::string>();
        if (cfg.reference_preset != "plus01") {
            throw ConfigError("reference_state", "unknown preset '" + cfg.reference_preset +
                                                     "' (known: plus01; otherwise give amplitudes)");
        }
        if (cfg.dimension != std::vector<std::size_t>{2, 2}) {
            throw ConfigError("reference_state", "preset plus01 needs dimension [2, 2]");
        }
    } else {
        require_array(ref, "reference_state");
        if (ref.size() != total) {
            throw ConfigError("reference_state", "amplitude count differs from the total dimension");
        }
        double norm2 = 0.0;
        for (std::size_t i = 0; i < ref.size(); ++i) {
            cfg.amplitudes.push_back(parse_complex(ref[i], index_field("reference_state", i)));
            norm2 += std::norm(cfg.amplitudes.back());
        }
        if (std::abs(std::sqrt(norm2) - 1.0) > 1e-8) {
            std::ostringstream msg;
            msg << "amplitudes must be normalized within 1e-8 (norm = " << std::sqrt(norm2) << ")";
            throw ConfigError("reference_state", msg.str());
        }
    }

    const auto kinetic = parse_kinetic_term(require_string(require_key(doc, "kinetic"), "kinetic"));
    if (!kinetic) throw ConfigError("kinetic", "expected \"K1\" or \"K2\"");
    cfg.kinetic = *kinetic;

    const auto potential =
        parse_potential_kind(require_string(require_key(doc, "potential"), "potential"));
    if (!potential) {
        throw ConfigError("potential",
                          "expected one of entanglement, antiflatness, coherence, none");
    }
    cfg.potential = *potential;

    if (doc.contains("bipartition")) {
        cfg.bipartition = parse_index_list(doc["bipartition"], "bipartition", 0,
                                           static_cast<std::int64_t>(cfg.dimension.size()) - 1);
        std::set<std::size_t> unique(cfg.bipartition->begin(), cfg.bipartition->end());
        if (unique.size() != cfg.bipartition->size()) {
            throw ConfigError("bipartition", "duplicate factor index");
        }
        if (cfg.bipartition->empty() || unique.size() == cfg.dimension.size()) {
            throw ConfigError("bipartition", "must keep a proper, non-empty subset of factors");
        }
    } else if ((cfg.potential == PotentialKind::entanglement ||
                cfg.potential == PotentialKind::antiflatness) &&
               cfg.dimension.size() < 2) {
        throw ConfigError("bipartition", "this potential needs at least two factors");
    }

    if (doc.contains("dephasing_basis")) {
        const Json& b = doc["dephasing_basis"];
        if (b.is_string()) {
            if (b.get<std::string>() != "computational") {
                throw ConfigError("dephasing_basis",
                                  "expected \"computational\" or a list of projectors");
            }
        } else {
            require_array(b, "dephasing_basis");
            for (std::size_t i = 0; i < b.size(); ++i) {
                cfg.dephasing_projectors.push_back(
                    parse_matrix(b[i], index_field("dephasing_basis", i)));
            }
            try {
                (void)ProjectorBasis::from_projectors(cfg.dephasing_projectors);
            } catch (const Error& e) {
                throw ConfigError("dephasing_basis", e.what());
            }
            if (cfg.dephasing_projectors.front().rows() != static_cast<Eigen::Index>(total)) {
                throw ConfigError("dephasing_basis", "projector size differs from the total dimension");
            }
        }
    }

    const Json& boundary = require_key(doc, "boundary");
    if (!boundary.is_object()) throw ConfigError("boundary", "expected an object");
    reject_unknown_keys(boundary, "boundary", {"lambda_A", "lambda_B"});
    if (!boundary.contains("lambda_A")) throw ConfigError("boundary.lambda_A", "missing required key");
    if (!boundary.contains("lambda_B")) throw ConfigError("boundary.lambda_B", "missing required key");
    cfg.lambda_a = parse_endpoint(boundary["lambda_A"], "boundary.lambda_A");
    cfg.lambda_b = parse_endpoint(boundary["lambda_B"], "boundary.lambda_B");
    for (const auto* name : {"lambda_A", "lambda_B"}) {
        const auto& ep = std::string(name) == "lambda_A" ? cfg.lambda_a : cfg.lambda_b;
        if (ep.size() != cfg.generators.size()) {
            throw ConfigError(std::string("boundary.") + name,
                              "length must equal the number of generators");
        }
    }

    if (doc.contains("solver")) {
        const Json& s = doc["solver"];
        if (!s.is_object()) throw ConfigError("solver", "expected an object");
        reject_unknown_keys(s, "solver", {"method", "grid_n", "max_iter", "restarts", "seed"});
        if (s.contains("method")) {
            const auto m = parse_solve_method(require_string(s["method"], "solver.method"));
            if (!m) throw ConfigError("solver.method", "expected \"transcription\" or \"shooting\"");
            cfg.solver.method = *m;
        }
        if (s.contains("grid_n")) {
            cfg.solver.grid_n = static_cast<int>(require_integer(s["grid_n"], "solver.grid_n", 32, 1 << 20));
        }
        if (s.contains("max_iter")) {
            cfg.solver.max_iter =
                static_cast<int>(require_integer(s["max_iter"], "solver.max_iter", 1, 1 << 30));
        }
        if (s.contains("restarts")) {
            cfg.solver.restarts =
                static_cast<int>(require_integer(s["restarts"], "solver.restarts", 1, 1 << 20));
        }
        if (s.contains("seed")) {
            const Json& seed = s["seed"];
            if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0)) {
                throw ConfigError("solver.seed", "expected a non-negative integer");
            }
            cfg.solver.seed = seed.get<std::uint64_t>();
        }
    }
    if (cfg.solver.method == SolveMethod::shooting && cfg.kinetic == KineticTerm::K1) {
        throw ConfigError("solver.method", "shooting supports K2 only; use transcription for K1");
    }
    return cfg;
}

inline ProblemConfig parse_config_text(std::string_view text)
{
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("<document>", e.what());
    }
    return parse_config(doc);
}

inline Json load_config_document(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("<document>", "cannot read " + path.string());
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("<document>", e.what());
    }
}

/// Canonical document for a configuration; parse_config(to_json(c)) is
/// equivalent to c.
inline Json to_json(const ProblemConfig& cfg)
{
    Json doc;
    doc["dimension"] = cfg.dimension;
    Json gens = Json::array();
    for (const auto& g : cfg.generators) {
        if (g.dense) gens.push_back({{"dense", detail::matrix_to_json(*g.dense)}});
        else gens.push_back({{"pauli", g.pauli}});
    }
    doc["generators"] = std::move(gens);
    if (!cfg.reference_preset.empty()) {
        doc["reference_state"] = cfg.reference_preset;
    } else {
        Json amps = Json::array();
        for (auto z : cfg.amplitudes) amps.push_back(detail::complex_to_json(z));
        doc["reference_state"] = std::move(amps);
    }
    doc["kinetic"] = std::string(to_string(cfg.kinetic));
    doc["potential"] = std::string(to_string(cfg.potential));
    if (cfg.bipartition) doc["bipartition"] = *cfg.bipartition;
    if (cfg.dephasing_projectors.empty()) {
        doc["dephasing_basis"] = "computational";
    } else {
        Json projectors = Json::array();
        for (const auto& p : cfg.dephasing_projectors) projectors.push_back(detail::matrix_to_json(p));
        doc["dephasing_basis"] = std::move(projectors);
    }
    Json a = Json::array(), b = Json::array();
    for (const auto& v : cfg.lambda_a) a.push_back(v.source);
    for (const auto& v : cfg.lambda_b) b.push_back(v.source);
    doc["boundary"] = {{"lambda_A", std::move(a)}, {"lambda_B", std::move(b)}};
    Json solver;
    solver["method"] = std::string(to_string(cfg.solver.method));
    solver["grid_n"] = cfg.solver.grid_n;
    if (cfg.solver.max_iter) solver["max_iter"] = *cfg.solver.max_iter;
    solver["restarts"] = cfg.solver.restarts;
    solver["seed"] = cfg.solver.seed;
    doc["solver"] = std::move(solver);
    return doc;
}

/// Build the solver-facing problem. When no bipartition is given, factor 0
/// is kept; when no dephasing basis is given, the computational basis is used.
inline ActionProblem build_problem(const ProblemConfig& cfg)
{
    const HilbertFactorization fact(cfg.dimension);
    const auto d = static_cast<Eigen::Index>(fact.total_dim());

    std::vector<ComplexMatrix> generators;
    for (const auto& g : cfg.generators) {
        generators.push_back(g.dense ? *g.dense : pauli_string(g.pauli));
    }

    StateVector omega(d);
    if (cfg.reference_preset == "plus01") {
        omega.setZero();
        omega(0) = omega(1) = 1.0 / std::sqrt(2.0);
    } else {
        for (Eigen::Index i = 0; i < d; ++i) omega(i) = cfg.amplitudes[static_cast<std::size_t>(i)];
        omega.normalize();
    }

    PotentialSpec potential;
    potential.kind = cfg.potential;
    if (cfg.dimension.size() > 1) {
        potential.bipartition.emplace(fact, cfg.bipartition.value_or(std::vector<std::size_t>{0}));
    }
    potential.dephasing_basis = cfg.dephasing_projectors.empty()
                                    ? ProjectorBasis::computational(static_cast<std::size_t>(d))
                                    : ProjectorBasis::from_projectors(cfg.dephasing_projectors);

    ParamVector a(static_cast<Eigen::Index>(cfg.lambda_a.size()));
    ParamVector b(static_cast<Eigen::Index>(cfg.lambda_b.size()));
    for (std::size_t i = 0; i < cfg.lambda_a.size(); ++i) a(static_cast<Eigen::Index>(i)) = cfg.lambda_a[i].value;
    for (std::size_t i = 0; i < cfg.lambda_b.size(); ++i) b(static_cast<Eigen::Index>(i)) = cfg.lambda_b[i].value;

    ActionProblem problem{HamiltonianFamily(std::move(generators), omega, fact), cfg.kinetic,
                          std::move(potential), a, b};
    problem.validate();
    return problem;
}

/// Set a scalar field of a configuration document by name. Accepted names are
/// dotted paths with optional indices ("boundary.lambda_B[1]",
/// "solver.grid_n") and the bare solver keys ("grid_n", "seed", ...).
inline void set_parameter(Json& doc, std::string_view name, const Json& value)
{
    const std::string field(name);
    std::string path(name);
    static const std::set<std::string, std::less<>> solver_keys{"method", "grid_n", "max_iter",
                                                                 "restarts", "seed"};
    if (solver_keys.count(path) != 0) path = "solver." + path;

    Json* node = &doc;
    std::size_t pos = 0;
    while (pos < path.size()) {
        if (path[pos] == '.') {
            ++pos;
            continue;
        }
        if (path[pos] == '[') {
            const auto close = path.find(']', pos);
            if (close == std::string::npos) throw ConfigError(field, "unterminated index");
            std::size_t idx = 0;
            const auto [end, ec] = std::from_chars(path.data() + pos + 1, path.data() + close, idx);
            if (ec != std::errc() || end != path.data() + close) {
                throw ConfigError(field, "index is not a non-negative integer");
            }
            if (!node->is_array() || idx >= node->size()) {
                throw ConfigError(field, "index out of range");
            }
            node = &(*node)[idx];
            pos = close + 1;
            continue;
        }
        const auto stop = path.find_first_of(".[", pos);
        const std::string key = path.substr(pos, stop == std::string::npos ? std::string::npos : stop - pos);
        if (!node->is_object()) throw ConfigError(field, "'" + key + "' is not inside an object");
        node = &(*node)[key];
        pos = stop == std::string::npos ? path.size() : stop;
    }
    if (node->is_object() || node->is_array()) {
        throw ConfigError(field, "names a structured field, not a scalar");
    }
    *node = value;
}

} // namespace qaction

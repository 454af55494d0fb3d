#include "mixlab/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "mixlab/errors.hpp"

namespace mixlab::io {

namespace {

using nlohmann::json;

const json& field(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError(where + " is missing the field '" + key + "'");
    return *it;
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where + " must be a number");
    return v.get<double>();
}

std::string text(const json& v, const std::string& where) {
    if (!v.is_string()) throw ConfigError(where + " must be a string");
    return v.get<std::string>();
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

LearningProblem parse_problem(std::string_view json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed problem JSON: ") + e.what());
    }

    const json& atoms_json = field(root, "atoms", "problem");
    if (!atoms_json.is_array() || atoms_json.empty()) throw ConfigError("'atoms' must be a non-empty array");
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < atoms_json.size(); ++i) {
        const std::string where = "atoms[" + std::to_string(i) + "]";
        const json& a = atoms_json[i];
        atoms.push_back({text(field(a, "x", where), where + ".x"), number(field(a, "y", where), where + ".y"),
                         number(field(a, "p", where), where + ".p")});
    }

    const json& loss_json = field(root, "loss", "problem");
    Loss loss;
    loss.kind = parse_loss_kind(text(field(loss_json, "kind", "loss"), "loss.kind"));
    if (auto it = loss_json.find("exponent"); it != loss_json.end()) loss.exponent = number(*it, "loss.exponent");

    const json& hyps_json = field(root, "hypotheses", "problem");
    if (!hyps_json.is_array() || hyps_json.empty()) throw ConfigError("'hypotheses' must be a non-empty array");
    std::vector<Hypothesis> hypotheses;
    for (std::size_t i = 0; i < hyps_json.size(); ++i) {
        const std::string where = "hypotheses[" + std::to_string(i) + "]";
        Hypothesis h;
        h.name = text(field(hyps_json[i], "name", where), where + ".name");
        const json& values = field(hyps_json[i], "values", where);
        if (!values.is_object()) throw ConfigError(where + ".values must be an object");
        for (const auto& [label, v] : values.items()) {
            h.values.emplace(label, number(v, where + ".values." + label));
        }
        hypotheses.push_back(std::move(h));
    }

    const double V = number(field(root, "loss_bound", "problem"), "loss_bound");
    return LearningProblem(std::move(atoms), loss, std::move(hypotheses), V);
}

LearningProblem load_problem(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open problem file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_problem(buf.str());
}

std::string problem_to_json(const LearningProblem& problem) {
    json root;
    root["atoms"] = json::array();
    for (const auto& a : problem.atoms()) root["atoms"].push_back({{"x", a.x}, {"y", a.y}, {"p", a.p}});
    root["loss"] = {{"kind", std::string(to_string(problem.loss().kind))}};
    if (problem.loss().kind == LossKind::p_loss) root["loss"]["exponent"] = problem.loss().exponent;
    root["hypotheses"] = json::array();
    for (const auto& h : problem.hypotheses()) {
        json values = json::object();
        for (const auto& [label, v] : h.values) values[label] = v;
        root["hypotheses"].push_back({{"name", h.name}, {"values", values}});
    }
    root["loss_bound"] = problem.loss_bound();
    return root.dump(2);
}

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::logic_error("table row does not match the column count");
    rows.push_back(std::move(row));
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

std::string format_cell(const Cell& cell) {
    struct Visitor {
        std::string operator()(double v) const { return format_double(v); }
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(const std::string& v) const { return v; }
        std::string operator()(bool v) const { return v ? "true" : "false"; }
    };
    return std::visit(Visitor{}, cell);
}

void write_csv(std::ostream& os, const Table& table) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) os << (c ? "," : "") << csv_escape(table.columns[c]);
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << csv_escape(format_cell(row[c]));
        os << '\n';
    }
}

void write_json(std::ostream& os, const Table& table) {
    using ordered = nlohmann::ordered_json;
    ordered out = ordered::array();
    for (const auto& row : table.rows) {
        ordered obj = ordered::object();
        for (std::size_t c = 0; c < row.size(); ++c) {
            const auto& cell = row[c];
            if (const auto* d = std::get_if<double>(&cell)) {
                obj[table.columns[c]] = std::isfinite(*d) ? ordered(*d) : ordered(format_double(*d));
            } else if (const auto* i = std::get_if<std::int64_t>(&cell)) {
                obj[table.columns[c]] = *i;
            } else if (const auto* s = std::get_if<std::string>(&cell)) {
                obj[table.columns[c]] = *s;
            } else {
                obj[table.columns[c]] = std::get<bool>(cell);
            }
        }
        out.push_back(std::move(obj));
    }
    os << out.dump(2) << '\n';
}

}  // namespace mixlab::io

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "mixlab/problem.hpp"

namespace mixlab::io {

/// Problem JSON: {"atoms":[{"x","y","p"}...], "loss":{"kind","exponent"?},
/// "hypotheses":[{"name","values":{label: prediction}}...], "loss_bound": V}.
/// Throws ConfigError naming the offending field.
LearningProblem parse_problem(std::string_view json_text);
LearningProblem load_problem(const std::filesystem::path& path);
std::string problem_to_json(const LearningProblem& problem);

using Cell = std::variant<double, std::int64_t, std::string, bool>;

/// Column-ordered report table shared by the CSV and JSON writers.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row);
};

/// Shortest decimal text that round-trips the double ("inf", "-inf", "nan" otherwise).
std::string format_double(double v);
std::string format_cell(const Cell& cell);

void write_csv(std::ostream& os, const Table& table);
/// Array of row objects; non-finite doubles are written as strings.
void write_json(std::ostream& os, const Table& table);

}  // namespace mixlab::io

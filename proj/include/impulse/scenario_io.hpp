#pragma once

// Scenario files: "key = value" lines, '#' comments, optional [section]
// headers that prefix the keys below them ("[curves.q]" + "kind = ..." is
// "curves.q.kind = ..."). Lists are comma separated.
//
//   drift.kind = logistic | linear | polynomial
//   drift.r, drift.k            logistic
//   drift.rate                  linear
//   drift.coefficients          polynomial c_1, ..., c_m
//   curves.{q,s}.kind = constant | closure | table
//   curves.{q,s}.level          constant level, or closure asymptote S
//   curves.{q,s}.gamma, .t_scale   closure
//   curves.{q,s}.times, .values    table
//   sigma, s_cap                required
//   t_max, max_pulses, seed     optional (100, 10, 1)
//   dt, paths                   optional simulation defaults

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "impulse/model.hpp"

namespace impulse {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& origin, std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct ScenarioFile {
  Scenario scenario;
  std::optional<double> dt;
  std::optional<std::size_t> paths;
};

/// Throws ParseError (syntax, unknown or missing keys, bad numbers, malformed
/// curves) or HypothesisError (drift incompatible with s_cap).
ScenarioFile parse_scenario(std::string_view text, const std::string& origin = "<input>");

/// Throws ParseError with line 0 if the file cannot be read.
ScenarioFile load_scenario(const std::filesystem::path& path);

std::string format_scenario(const ScenarioFile& file);

}  // namespace impulse

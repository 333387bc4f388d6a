#include "impulse/scenario_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include <fmt/core.h>
#include <fmt/format.h>

#include "impulse/errors.hpp"

namespace impulse {

ParseError::ParseError(const std::string& origin, std::size_t line, const std::string& what)
    : std::runtime_error(line > 0 ? fmt::format("{}:{}: {}", origin, line, what) : fmt::format("{}: {}", origin, what)),
      line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  std::size_t line;
};

class KeyTable {
 public:
  KeyTable(std::string origin, std::map<std::string, Entry> entries)
      : origin_(std::move(origin)), entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  std::size_t line_of(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

  const Entry& require(const std::string& key) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ParseError(origin_, 0, fmt::format("missing required key '{}'", key));
    used_.insert(key);
    return it->second;
  }

  double number(const std::string& key) {
    const Entry& e = require(key);
    return to_double(e.value, key, e.line);
  }

  std::optional<double> optional_number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return number(key);
  }

  std::uint64_t integer(const std::string& key) {
    const Entry& e = require(key);
    std::uint64_t v = 0;
    const auto* end = e.value.data() + e.value.size();
    const auto [ptr, ec] = std::from_chars(e.value.data(), end, v);
    if (ec != std::errc{} || ptr != end)
      throw ParseError(origin_, e.line, fmt::format("'{}' expects a non-negative integer, got '{}'", key, e.value));
    return v;
  }

  std::vector<double> list(const std::string& key) {
    const Entry& e = require(key);
    std::vector<double> out;
    std::string_view rest = e.value;
    while (true) {
      const auto comma = rest.find(',');
      out.push_back(to_double(trim(rest.substr(0, comma)), key, e.line));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    return out;
  }

  std::string text(const std::string& key) { return require(key).value; }

  void reject_unused() const {
    for (const auto& [key, entry] : entries_)
      if (!used_.count(key)) throw ParseError(origin_, entry.line, fmt::format("unknown or unused key '{}'", key));
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ParseError(origin_, line_of(key), what);
  }

 private:
  double to_double(std::string_view text, const std::string& key, std::size_t line) const {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc{} || ptr != end)
      throw ParseError(origin_, line, fmt::format("'{}' expects a number, got '{}'", key, text));
    return v;
  }

  std::string origin_;
  std::map<std::string, Entry> entries_;
  std::set<std::string> used_;
};

DriftSpec read_drift(KeyTable& kv) {
  const std::string kind = kv.text("drift.kind");
  if (kind == "linear") return LinearDrift{kv.number("drift.rate")};
  if (kind == "logistic") return LogisticDrift{kv.number("drift.r"), kv.number("drift.k")};
  if (kind == "polynomial") return PolynomialDrift{kv.list("drift.coefficients")};
  kv.fail("drift.kind", fmt::format("unknown drift kind '{}'", kind));
}

CurveSpec read_curve(KeyTable& kv, const std::string& prefix) {
  const std::string kind = kv.text(prefix + ".kind");
  if (kind == "constant") return ConstantCurve{kv.number(prefix + ".level")};
  if (kind == "closure") {
    ClosureCurve c{kv.number(prefix + ".level"), kv.number(prefix + ".gamma"), kv.number(prefix + ".t_scale")};
    if (!(c.gamma > 0.0 && c.gamma < 1.0)) kv.fail(prefix + ".gamma", "closure gamma must lie in ]0, 1[");
    if (!(c.t_scale > 0.0)) kv.fail(prefix + ".t_scale", "closure t_scale must be positive");
    return c;
  }
  if (kind == "table") {
    auto times = kv.list(prefix + ".times");
    auto values = kv.list(prefix + ".values");
    try {
      return TableCurve(std::move(times), std::move(values));
    } catch (const ParameterError& e) {
      kv.fail(prefix + ".values", e.what());
    }
  }
  kv.fail(prefix + ".kind", fmt::format("unknown curve kind '{}'", kind));
}

std::string join(const std::vector<double>& v) { return fmt::format("{}", fmt::join(v, ", ")); }

void format_curve(std::ostringstream& os, const std::string& name, const CurveSpec& curve) {
  os << fmt::format("\n[curves.{}]\nkind = {}\n", name, curve_kind(curve));
  if (const auto* c = std::get_if<ConstantCurve>(&curve)) {
    os << fmt::format("level = {}\n", c->level);
  } else if (const auto* c = std::get_if<ClosureCurve>(&curve)) {
    os << fmt::format("level = {}\ngamma = {}\nt_scale = {}\n", c->level, c->gamma, c->t_scale);
  } else if (const auto* c = std::get_if<TableCurve>(&curve)) {
    os << fmt::format("times = {}\nvalues = {}\n", join(c->times()), join(c->values()));
  }
}

}  // namespace

ScenarioFile parse_scenario(std::string_view text, const std::string& origin) {
  std::map<std::string, Entry> entries;
  std::string section;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(origin, line_no, "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(origin, line_no, "expected 'key = value'");
    const auto key_part = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key_part.empty()) throw ParseError(origin, line_no, "empty key");
    if (value.empty()) throw ParseError(origin, line_no, fmt::format("empty value for '{}'", key_part));
    const std::string key = section.empty() ? std::string(key_part) : section + "." + std::string(key_part);
    if (!entries.emplace(key, Entry{std::string(value), line_no}).second)
      throw ParseError(origin, line_no, fmt::format("duplicate key '{}'", key));
  }

  KeyTable kv(origin, std::move(entries));
  DriftSpec drift = read_drift(kv);
  ControlCurves curves{read_curve(kv, "curves.q"), read_curve(kv, "curves.s")};
  const double sigma = kv.number("sigma");
  const double s_cap = kv.number("s_cap");
  const double t_max = kv.optional_number("t_max").value_or(100.0);
  const std::size_t max_pulses = kv.has("max_pulses") ? kv.integer("max_pulses") : 10;
  const std::uint64_t seed = kv.has("seed") ? kv.integer("seed") : 1;

  ScenarioFile out;
  out.dt = kv.optional_number("dt");
  if (kv.has("paths")) out.paths = kv.integer("paths");
  kv.reject_unused();

  try {
    out.scenario = make_scenario(std::move(drift), std::move(curves), s_cap, sigma, t_max, max_pulses, seed);
  } catch (const ParameterError& e) {
    throw ParseError(origin, 0, e.what());
  } catch (const DomainError& e) {
    throw ParseError(origin, kv.line_of("s_cap"), e.what());
  }
  return out;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

std::string format_scenario(const ScenarioFile& file) {
  const Scenario& scn = file.scenario;
  std::ostringstream os;
  os << fmt::format("sigma = {}\ns_cap = {}\nt_max = {}\nmax_pulses = {}\nseed = {}\n", scn.sigma,
                    scn.sector.s_cap, scn.t_max, scn.max_pulses, scn.seed);
  if (file.dt) os << fmt::format("dt = {}\n", *file.dt);
  if (file.paths) os << fmt::format("paths = {}\n", *file.paths);
  os << fmt::format("\n[drift]\nkind = {}\n", drift_kind(scn.drift));
  if (const auto* d = std::get_if<LinearDrift>(&scn.drift)) {
    os << fmt::format("rate = {}\n", d->rate);
  } else if (const auto* d = std::get_if<LogisticDrift>(&scn.drift)) {
    os << fmt::format("r = {}\nk = {}\n", d->r, d->k);
  } else if (const auto* d = std::get_if<PolynomialDrift>(&scn.drift)) {
    os << fmt::format("coefficients = {}\n", join(d->coefficients));
  }
  format_curve(os, "q", scn.curves.q);
  format_curve(os, "s", scn.curves.s);
  return os.str();
}

}  // namespace impulse

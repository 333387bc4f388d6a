#include "impulse/report.hpp"

#include <fmt/core.h>

namespace impulse {

std::string format_number(double v) { return fmt::format("{}", v); }

void KeyValueWriter::put(std::string_view key, std::string_view value) {
  os_ << key << " = " << value << '\n';
}

void KeyValueWriter::put(std::string_view key, double value) { put(key, format_number(value)); }

void KeyValueWriter::put(std::string_view key, std::size_t value) { put(key, fmt::format("{}", value)); }

void KeyValueWriter::put(std::string_view key, bool value) { put(key, value ? "true" : "false"); }

void KeyValueWriter::put(std::string_view key, const MeanEstimate& est) {
  const std::string k(key);
  put(k + ".mean", est.mean);
  put(k + ".std_err", est.std_err);
  put(k + ".n", est.n);
  put(k + ".ci_low", est.ci_low);
  put(k + ".ci_high", est.ci_high);
}

void write_pulse_ledger(std::ostream& os, std::span<const PathOutcome> outcomes) {
  os << "path_id,k,tau_k,delta_tau_k,reset_value,censored\n";
  for (const auto& o : outcomes) {
    for (const auto& p : o.pulses)
      os << fmt::format("{},{},{},{},{},0\n", o.path_index, p.k, p.tau_k, p.delta_tau_k, p.reset_value);
    if (o.censor_time) {
      const double last = o.pulses.empty() ? 0.0 : o.pulses.back().tau_k;
      os << fmt::format("{},{},{},{},,1\n", o.path_index, o.pulses.size() + 1, *o.censor_time,
                        *o.censor_time - last);
    }
  }
}

void write_plot_data(std::ostream& os, const PulseExpectations& est, const std::optional<AsymptoticInterval>& interval) {
  os << "k,mean,ci_low,ci_high,a_beta,a_alpha\n";
  for (const auto& lv : est.levels) {
    os << fmt::format("{},{},{},{},", lv.k, lv.delta_tau.mean, lv.delta_tau.ci_low, lv.delta_tau.ci_high);
    if (interval)
      os << fmt::format("{},{}\n", interval->a_beta, interval->a_alpha);
    else
      os << ",\n";
  }
}

void write_path_dump(std::ostream& os, const PathOutcome& outcome, double dt) {
  os << "t,x,x_alpha,x_beta,segment\n";
  for (std::size_t j = 0; j < outcome.segments.size(); ++j) {
    const SegmentTrace& seg = outcome.segments[j];
    for (std::size_t i = 0; i < seg.x.size(); ++i) {
      const double t = dt * static_cast<double>(seg.first_node + i);
      os << fmt::format("{},{},", t, seg.x[i]);
      if (i < seg.x_alpha.size())
        os << fmt::format("{},{},", seg.x_alpha[i], seg.x_beta[i]);
      else
        os << ",,";
      os << j + 1 << '\n';
    }
  }
}

}  // namespace impulse

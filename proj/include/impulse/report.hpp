#pragma once

// Plain-text outputs: comma-delimited tables and "key = value" summaries.
// Numbers are written in shortest round-trip form so repeated runs are
// byte-identical.

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>

#include "impulse/estimator.hpp"

namespace impulse {

/// Ordered "key = value" writer.
class KeyValueWriter {
 public:
  explicit KeyValueWriter(std::ostream& os) : os_(os) {}

  void put(std::string_view key, std::string_view value);
  void put(std::string_view key, const char* value) { put(key, std::string_view(value)); }
  void put(std::string_view key, double value);
  void put(std::string_view key, std::size_t value);
  void put(std::string_view key, bool value);
  void put(std::string_view key, const MeanEstimate& est);

 private:
  std::ostream& os_;
};

std::string format_number(double v);

/// path_id,k,tau_k,delta_tau_k,reset_value,censored. A censored path adds one
/// row for the pulse it did not reach: tau_k is the censor time and reset_value is empty.
void write_pulse_ledger(std::ostream& os, std::span<const PathOutcome> outcomes);

/// k,mean,ci_low,ci_high,a_beta,a_alpha for the timeout means.
void write_plot_data(std::ostream& os, const PulseExpectations& est, const std::optional<AsymptoticInterval>& interval);

/// t,x,x_alpha,x_beta,segment per stored node (comparison columns empty when absent).
void write_path_dump(std::ostream& os, const PathOutcome& outcome, double dt);

}  // namespace impulse

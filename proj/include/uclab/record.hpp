#pragma once

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace uclab {

// One evaluation of a weighted inequality. Terms are stored as exp(log_term - log_scale)
// so that tau = 64 weights stay representable; ratio is scale free.
struct VerificationRecord {
  std::string inequality_id;
  double tau = 0;
  double p = 0, q = 0, eps = 0;
  std::vector<std::pair<std::string, double>> lhs_terms;
  double rhs = 0;
  double log_scale = 0;
  double ratio = 0;
  bool degenerate = false;
  bool below_threshold = false;
  std::string corpus_id;
  unsigned long long seed = 0;
  std::string resolution;
  std::vector<std::pair<std::string, double>> extras;

  double lhs_sum() const;
  double extra(const std::string& key) const;  // NaN if missing
  nlohmann::json to_json() const;
};

// Assemble from log-domain pieces: lhs_i = exp(log_lhs[i]), rhs = exp(log_rhs).
VerificationRecord make_record(std::string id, double tau, std::vector<std::string> names,
                               const std::vector<double>& log_lhs, double log_rhs);

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);
double linear_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace uclab

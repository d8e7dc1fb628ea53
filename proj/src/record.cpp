#include "uclab/record.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "uclab/errors.hpp"

namespace uclab {

double VerificationRecord::lhs_sum() const {
  double s = 0;
  for (auto& [name, v] : lhs_terms) s += v;
  return s;
}

double VerificationRecord::extra(const std::string& key) const {
  for (auto& [k, v] : extras)
    if (k == key) return v;
  return std::numeric_limits<double>::quiet_NaN();
}

nlohmann::json VerificationRecord::to_json() const {
  nlohmann::json terms = nlohmann::json::array();
  for (auto& [name, v] : lhs_terms) terms.push_back({{"name", name}, {"value", v}});
  nlohmann::json j = {{"inequality_id", inequality_id},
                      {"tau", tau},
                      {"p", p},
                      {"q", q},
                      {"eps", eps},
                      {"lhs_terms", terms},
                      {"rhs", rhs},
                      {"log_scale", log_scale},
                      {"ratio", degenerate ? nlohmann::json(nullptr) : nlohmann::json(ratio)},
                      {"degenerate", degenerate},
                      {"below_threshold", below_threshold},
                      {"corpus_id", corpus_id},
                      {"seed", seed},
                      {"resolution", resolution}};
  for (auto& [k, v] : extras) j["extras"][k] = v;
  return j;
}

VerificationRecord make_record(std::string id, double tau, std::vector<std::string> names,
                               const std::vector<double>& log_lhs, double log_rhs) {
  VerificationRecord rec;
  rec.inequality_id = std::move(id);
  rec.tau = tau;
  double top = log_rhs;
  for (double l : log_lhs) top = std::max(top, l);
  if (!std::isfinite(top)) top = 0;
  rec.log_scale = top;
  for (size_t i = 0; i < log_lhs.size(); ++i) rec.lhs_terms.emplace_back(names[i], std::exp(log_lhs[i] - top));
  rec.rhs = std::exp(log_rhs - top);
  if (rec.rhs == 0 || rec.lhs_sum() == 0) {
    rec.degenerate = true;
    rec.ratio = std::numeric_limits<double>::quiet_NaN();
  } else {
    rec.ratio = rec.lhs_sum() / rec.rhs;
  }
  return rec;
}

double linear_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw SizeError("slope fit needs at least two points");
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0) throw DegenerateError("slope fit with constant abscissa");
  return sxy / sxx;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) throw DegenerateError("log-log fit needs positive data");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return linear_slope(lx, ly);
}

}  // namespace uclab

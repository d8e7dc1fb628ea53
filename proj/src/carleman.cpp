#include "uclab/carleman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/tools/roots.hpp>

#include "uclab/conjugated.hpp"
#include "uclab/errors.hpp"
#include "uclab/weight.hpp"

namespace uclab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kD1[4] = {0, 3.0 / 4, -3.0 / 20, 1.0 / 60};
constexpr double kD2[4] = {-49.0 / 18, 3.0 / 2, -3.0 / 20, 1.0 / 90};

CylinderField scale_rows(const CylinderField& v, const std::function<cplx(double)>& f) {
  CylinderField out = v;
  for (int j = 0; j < v.grid.nt; ++j) {
    cplx c = f(v.grid.t(j));
    for (int m = 0; m < v.grid.ntheta; ++m) out(j, m) *= c;
  }
  return out;
}

CylinderField add(CylinderField a, const CylinderField& b) {
  for (size_t i = 0; i < a.values.size(); ++i) a.values[i] += b.values[i];
  return a;
}

// 2p/(2-p), infinite at p = 2
double dual_exponent(double p) { return p >= 2 ? kInf : 2 * p / (2 - p); }

}  // namespace

cplx PowerLaw::at(double r) const { return amplitude * std::pow(r, -exponent); }

double PowerLaw::norm(double s, double r2, double r1) const {
  if (!(r2 > r1 && r1 >= 0)) throw DomainError("power-law norm needs 0 <= r1 < r2");
  if (!(s >= 1)) throw DomainError("power-law norm needs s >= 1");
  const double A = std::abs(amplitude);
  if (A == 0) return 0;
  if (std::isinf(s)) {
    if (exponent > 0) return r1 > 0 ? A * std::pow(r1, -exponent) : kInf;
    return A * std::pow(r2, -exponent);
  }
  const double e = 2 - exponent * s;
  if (e <= 0 && r1 == 0) return kInf;
  double integral = e == 0 ? 2 * std::numbers::pi * std::log(r2 / r1)
                           : 2 * std::numbers::pi * (std::pow(r2, e) - std::pow(r1, e)) / e;
  return A * std::pow(integral, 1 / s);
}

double holder_sup(double alpha, double R) {
  if (!(alpha > 0)) throw DomainError("holder_sup needs a positive power of r");
  if (!(R > 0 && R < 1)) throw DomainError("holder_sup needs 0 < R < 1");
  double lr = -2 / alpha;
  if (lr <= std::log(R)) return 4 / (alpha * alpha) * std::exp(-2.0);
  double L = std::log(R);
  return L * L * std::pow(R, alpha);
}

double log_norm_u_L2(const CylinderField& v, double tau) { return log_weighted_norm(v, 2, {tau, -1, -2, 0, kR0}); }

double log_norm_u_Lq(const CylinderField& v, double tau, double q, double eps) {
  return log_weighted_norm(v, q, {tau, -1, -2 * (1 - eps), 0, kR0});
}

double log_norm_grad(const CylinderField& v, double tau) {
  CylinderField dt = d_dt(v), dth = d_dtheta(v);
  CylinderField g(v.grid);
  for (size_t i = 0; i < g.values.size(); ++i)
    g.values[i] = std::sqrt(std::norm(dt.values[i]) + std::norm(dth.values[i]));
  return log_weighted_norm(g, 2, {tau, -1, -2, 0, kR0});
}

double log_norm_rhs(const CylinderField& f, double tau, double p) { return log_weighted_norm(f, p, {tau, 1, -2, 0, kR0}); }

CylinderField cylinder_laplacian(const CylinderField& v) { return apply_L(apply_L(v, -1), +1); }

CylinderField gradient_term(const CylinderField& v, const PowerLaw& W) {
  // r^2 A r^{-a} d_r u = A e^{(1-a)t} d_t v
  return scale_rows(d_dt(v), [&](double t) { return W.amplitude * std::exp((1 - W.exponent) * t); });
}

CylinderField potential_term(const CylinderField& v, const PowerLaw& V) {
  return scale_rows(v, [&](double t) { return V.amplitude * std::exp((2 - V.exponent) * t); });
}

double log_rhs_disk_route(const TestFunctionSpec& spec, double tau, double p, int nr, int ntheta) {
  spec.validate();
  if (nr < 16) throw SizeError("disk route needs at least 16 radial nodes");
  const double h = (spec.r_outer - spec.r_inner) / (nr - 1);
  const int pad = 3;
  std::vector<double> r(nr + 2 * pad);
  for (int i = 0; i < int(r.size()); ++i) r[i] = spec.r_inner + (i - pad) * h;
  if (r.front() <= 0) throw GeometryError("disk route grid reaches the origin");
  std::vector<double> prof(r.size());
  for (size_t i = 0; i < r.size(); ++i) prof[i] = spec.profile(std::log(r[i]));
  std::vector<cplx> ang(ntheta), angtt(ntheta);
  for (int m = 0; m < ntheta; ++m) {
    double th = 2 * std::numbers::pi * m / ntheta;
    ang[m] = spec.angular(th);
    angtt[m] = spec.angular_tt(th);
  }
  DiskFunction lap;
  lap.ntheta = ntheta;
  for (int i = pad; i < int(r.size()) - pad; ++i) {
    double d1 = 0, d2 = kD2[0] * prof[i];
    for (int o = 1; o <= 3; ++o) {
      d1 += kD1[o] * (prof[i + o] - prof[i - o]);
      d2 += kD2[o] * (prof[i + o] + prof[i - o]);
    }
    d1 /= h;
    d2 /= h * h;
    lap.r.push_back(r[i]);
    // r^2 u_rr + r u_r + u_thth
    for (int m = 0; m < ntheta; ++m) lap.values.push_back((r[i] * r[i] * d2 + r[i] * d1) * ang[m] + prof[i] * angtt[m]);
  }
  return log_weighted_norm(lap, p, {tau, 1, -2, 0, kR0});
}

VerificationRecord evaluate_carleman_laplacian(const CylinderField& v, double tau, double p, double q, double eps,
                                               double beta0_shift) {
  if (!(tau >= 1)) throw DomainError("Carleman sweep needs tau >= 1");
  auto b = beta_exponents(p, q, eps);
  double lt = std::log(tau);
  double a = (1 + b.beta1) * lt + log_norm_u_L2(v, tau);
  double bq = (b.beta0 + beta0_shift) * lt + log_norm_u_Lq(v, tau, q, eps);
  double g = b.beta1 * lt + log_norm_grad(v, tau);
  double rhs = log_norm_rhs(cylinder_laplacian(v), tau, p);
  auto rec = make_record("carleman-laplacian", tau, {"tau^(1+b1) u L2", "tau^b0 u Lq", "tau^b1 r grad u L2"}, {a, bq, g}, rhs);
  rec.p = p;
  rec.q = q;
  rec.eps = eps;
  if (beta0_shift != 0) rec.extras.emplace_back("beta0_shift", beta0_shift);
  return rec;
}

namespace {

struct Absorption {
  double K_proof = 0, M_proof = 0;
  double K_measured = 0, M_measured = 0;
};

void attach(VerificationRecord& rec, const Absorption& a) {
  rec.extras.emplace_back("absorb_K", a.K_proof);
  rec.extras.emplace_back("absorb_M", a.M_proof);
  rec.extras.emplace_back("absorb_K_measured", a.K_measured);
  rec.extras.emplace_back("absorb_M_measured", a.M_measured);
  rec.below_threshold = a.K_proof > 0.5 || a.M_proof > 0.5;
}

double safe_exp(double x) { return std::isfinite(x) ? std::exp(x) : (x > 0 ? kInf : 0.0); }

// M-term of the absorption: Hölder against the L2 term, or against the Lq term.
struct MTerm {
  double norm_exponent;  // Lebesgue exponent of V
  double c;              // Holder sup constant
  double tau_power;      // power of tau on the absorbing LHS term
  bool use_lq;
};

MTerm m_term(double p, std::optional<double> q, double eps, bool lq) {
  if (!lq) return {dual_exponent(p), holder_sup(3 - 2 / p), 2 - 1 / p, false};
  return {p * *q / (*q - p), holder_sup(2 * (1 - 1 / p + (1 - eps) / *q)), beta_exponents(p, *q, eps).beta0, true};
}

double m_proof(const MTerm& mt, const PowerLaw& V, double C, double tau) {
  return C * mt.c * V.norm(mt.norm_exponent, kR0) / std::pow(tau, mt.tau_power);
}

double k_proof(double p, const PowerLaw& W, double C, double tau) {
  return C * holder_sup(2 - 2 / p) * W.norm(dual_exponent(p), kR0) / std::pow(tau, 1 - 1 / p);
}

double m_measured(const CylinderField& v, const PowerLaw& V, const MTerm& mt, double p, std::optional<double> q,
                  double eps, double C, double tau) {
  if (V.amplitude == cplx(0)) return 0;
  double top = log_norm_rhs(potential_term(v, V), tau, p);
  double bottom = mt.tau_power * std::log(tau) + (mt.use_lq ? log_norm_u_Lq(v, tau, *q, eps) : log_norm_u_L2(v, tau));
  return C * safe_exp(top - bottom);
}

double k_measured(const CylinderField& v, const PowerLaw& W, double p, double C, double tau) {
  if (W.amplitude == cplx(0)) return 0;
  double top = log_norm_rhs(gradient_term(v, W), tau, p);
  double bottom = (1 - 1 / p) * std::log(tau) + log_norm_grad(v, tau);
  return C * safe_exp(top - bottom);
}

}  // namespace

VerificationRecord evaluate_carleman_full(const CylinderField& v, const PowerLaw& W, const PowerLaw& V, double tau,
                                          const PotentialRegularity& reg, double C) {
  if (!(tau >= 1)) throw DomainError("Carleman sweep needs tau >= 1");
  auto ex = carleman_parameters(reg);
  const double p = ex.p;
  CylinderField op = add(add(cylinder_laplacian(v), gradient_term(v, W)), potential_term(v, V));
  double lhs = (2 - 1 / p) * std::log(tau) + log_norm_u_L2(v, tau);
  double rhs = log_norm_rhs(op, tau, p);
  auto rec = make_record("carleman-full", tau, {"tau^(2-1/p) u L2"}, {lhs}, rhs);
  rec.p = p;
  rec.q = ex.q.value_or(0);
  rec.eps = reg.eps;
  MTerm mt = m_term(p, ex.q, reg.eps, ex.case_id != Case::T_GE_S);
  Absorption a;
  a.K_proof = k_proof(p, W, C, tau);
  a.M_proof = m_proof(mt, V, C, tau);
  a.K_measured = k_measured(v, W, p, C, tau);
  a.M_measured = m_measured(v, V, mt, p, ex.q, reg.eps, C, tau);
  attach(rec, a);
  rec.extras.emplace_back("K", W.norm(reg.s, kR0));
  rec.extras.emplace_back("M", V.norm(reg.t, kR0));
  return rec;
}

VerificationRecord evaluate_carleman_pure(const CylinderField& v, const PowerLaw& V, double tau, double t, double eps,
                                          double C) {
  if (!(tau >= 1)) throw DomainError("Carleman sweep needs tau >= 1");
  auto ex = carleman_parameters_pure(t, eps);
  const double p = ex.p;
  CylinderField op = add(cylinder_laplacian(v), potential_term(v, V));
  double lhs = (2 - 1 / p) * std::log(tau) + log_norm_u_L2(v, tau);
  double rhs = log_norm_rhs(op, tau, p);
  auto rec = make_record("carleman-pure", tau, {"tau^(2-1/p) u L2"}, {lhs}, rhs);
  rec.p = p;
  rec.q = ex.q.value_or(0);
  rec.eps = eps;
  MTerm mt = m_term(p, ex.q, eps, ex.case_id == Case::PURE_LOW);
  Absorption a;
  a.M_proof = m_proof(mt, V, C, tau);
  a.M_measured = m_measured(v, V, mt, p, ex.q, eps, C, tau);
  attach(rec, a);
  rec.extras.emplace_back("M", V.norm(t, kR0));
  return rec;
}

HolderStep holder_gradient(const CylinderField& v, const PowerLaw& W, double tau, double p) {
  HolderStep h;
  h.log_lhs = log_norm_rhs(gradient_term(v, W), tau, p);
  h.log_rhs = std::log(W.norm(dual_exponent(p), kR0)) + std::log(holder_sup(2 - 2 / p)) + log_norm_grad(v, tau);
  return h;
}

HolderStep holder_potential_L2(const CylinderField& v, const PowerLaw& V, double tau, double p) {
  HolderStep h;
  h.log_lhs = log_norm_rhs(potential_term(v, V), tau, p);
  h.log_rhs = std::log(V.norm(dual_exponent(p), kR0)) + std::log(holder_sup(3 - 2 / p)) + log_norm_u_L2(v, tau);
  return h;
}

HolderStep holder_potential_Lq(const CylinderField& v, const PowerLaw& V, double tau, double p, double q, double eps) {
  HolderStep h;
  h.log_lhs = log_norm_rhs(potential_term(v, V), tau, p);
  h.log_rhs = std::log(V.norm(p * q / (q - p), kR0)) + std::log(holder_sup(2 * (1 - 1 / p + (1 - eps) / q))) +
              log_norm_u_Lq(v, tau, q, eps);
  return h;
}

const char* inequality_name(Inequality i) {
  switch (i) {
    case Inequality::LAPLACIAN: return "carleman-laplacian";
    case Inequality::CAR22: return "car22";
    case Inequality::CARLPP: return "carlpp";
    case Inequality::FULL: return "carleman-full";
    case Inequality::PURE: return "carleman-pure";
  }
  return "?";
}

Inequality parse_inequality(const std::string& name) {
  for (auto i : {Inequality::LAPLACIAN, Inequality::CAR22, Inequality::CARLPP, Inequality::FULL, Inequality::PURE})
    if (name == inequality_name(i)) return i;
  throw DomainError("unknown inequality '" + name + "'");
}

double empirical_constant(const std::vector<VerificationRecord>& records) {
  double c = 0;
  for (auto& r : records)
    if (!r.degenerate) c = std::max(c, r.ratio);
  return c;
}

SweepResult run_sweep(const std::vector<TestFunctionSpec>& corpus, const SweepConfig& cfg) {
  if (corpus.empty()) throw DomainError("sweep needs a nonempty corpus");
  if (cfg.taus.size() < 2) throw DomainError("sweep needs at least two tau values");
  const size_t nt = cfg.taus.size();
  SweepResult res;
  res.records.resize(corpus.size() * nt);
#pragma omp parallel for schedule(dynamic)
  for (long e = 0; e < long(corpus.size()); ++e) {
    const auto& spec = corpus[e];
    CylinderField v = make_test_field(spec, test_grid(spec, cfg.dt, cfg.ntheta));
    for (size_t i = 0; i < nt; ++i) {
      double tau = cfg.taus[i];
      VerificationRecord rec;
      switch (cfg.ineq) {
        case Inequality::LAPLACIAN: rec = evaluate_carleman_laplacian(v, tau, cfg.p, cfg.q, cfg.eps, cfg.beta0_shift); break;
        case Inequality::CAR22: rec = verify_car22(v, tau); break;
        case Inequality::CARLPP: rec = verify_carlpp(v, tau, cfg.p); break;
        case Inequality::FULL: rec = evaluate_carleman_full(v, cfg.W, cfg.V, tau, cfg.reg, cfg.C); break;
        case Inequality::PURE: rec = evaluate_carleman_pure(v, cfg.V, tau, cfg.reg.t, cfg.reg.eps, cfg.C); break;
      }
      rec.corpus_id = spec.id;
      rec.seed = spec.seed;
      rec.resolution = "dt=" + std::to_string(cfg.dt) + ",ntheta=" + std::to_string(cfg.ntheta);
      res.records[e * nt + i] = std::move(rec);
    }
  }
  res.envelope.assign(nt, 0);
  for (size_t e = 0; e < corpus.size(); ++e) {
    ElementSweep el;
    el.id = corpus[e].id;
    bool ok = true;
    for (size_t i = 0; i < nt; ++i) {
      const auto& r = res.records[e * nt + i];
      if (r.below_threshold) ++res.below_threshold;
      if (r.degenerate) ok = false;
      el.ratio.push_back(r.ratio);
      if (!r.degenerate) res.envelope[i] = std::max(res.envelope[i], r.ratio);
    }
    if (ok) {
      el.slope = loglog_slope(cfg.taus, el.ratio);
      auto [mn, mx] = std::minmax_element(el.ratio.begin(), el.ratio.end());
      el.spread = *mx / *mn;
      res.max_element_slope = std::max(res.max_element_slope, el.slope);
      res.max_element_spread = std::max(res.max_element_spread, el.spread);
    }
    res.elements.push_back(std::move(el));
  }
  res.envelope_slope = loglog_slope(cfg.taus, res.envelope);
  auto [mn, mx] = std::minmax_element(res.envelope.begin(), res.envelope.end());
  res.envelope_spread = *mx / *mn;
  res.empirical_C = empirical_constant(res.records);
  return res;
}

namespace {

// smallest tau in [1, 1e12] with ratio(tau) <= 1/2, for ratio decreasing in tau
double absorbing_tau(const std::function<double(double)>& ratio) {
  auto f = [&](double lt) { return ratio(std::exp(lt)) - 0.5; };
  if (f(0) <= 0) return 1;
  double hi = std::log(1e12);
  if (f(hi) > 0) return std::numeric_limits<double>::quiet_NaN();
  boost::math::tools::eps_tolerance<double> tol(40);
  auto [a, b] = boost::math::tools::bisect(f, 0.0, hi, tol);
  return std::exp(0.5 * (a + b));
}

// Fit over rungs whose threshold was found and exceeds 1 (tau* = 1 carries no scaling information).
double threshold_slope(const std::vector<double>& norms, const std::vector<double>& taus) {
  std::vector<double> x, y;
  for (size_t i = 0; i < taus.size(); ++i)
    if (std::isfinite(taus[i]) && taus[i] > 1) {
      x.push_back(norms[i]);
      y.push_back(taus[i]);
    }
  return x.size() >= 2 ? loglog_slope(x, y) : std::numeric_limits<double>::quiet_NaN();
}

ThresholdProbe finish_probe(ThresholdProbe pr) {
  pr.slope = threshold_slope(pr.norms, pr.tau_star);
  if (std::isnan(pr.slope)) throw NumericalError("threshold ladder left fewer than two absorbing rungs in [1, 1e12]");
  pr.measured_slope = threshold_slope(pr.norms, pr.tau_star_measured);
  return pr;
}

}  // namespace

double threshold_amplitude_V(double t, double eps, double v_exponent, double C, double tau_star) {
  auto ex = carleman_parameters_pure(t, eps);
  MTerm mt = m_term(ex.p, ex.q, eps, ex.case_id == Case::PURE_LOW);
  PowerLaw unit{1.0, v_exponent};
  if (!std::isfinite(unit.norm(t, kR0)) || !std::isfinite(unit.norm(mt.norm_exponent, kR0)))
    throw DomainError("V power law is not in the required Lebesgue class");
  return std::pow(tau_star, mt.tau_power) / (2 * m_proof(mt, unit, C, 1.0));
}

double threshold_amplitude_V(const PotentialRegularity& reg, double v_exponent, double C, double tau_star) {
  auto ex = carleman_parameters(reg);
  MTerm mt = m_term(ex.p, ex.q, reg.eps, ex.case_id != Case::T_GE_S);
  PowerLaw unit{1.0, v_exponent};
  if (!std::isfinite(unit.norm(reg.t, kR0)) || !std::isfinite(unit.norm(mt.norm_exponent, kR0)))
    throw DomainError("V power law is not in the required Lebesgue class");
  return std::pow(tau_star, mt.tau_power) / (2 * m_proof(mt, unit, C, 1.0));
}

double threshold_amplitude_W(const PotentialRegularity& reg, double w_exponent, double C, double tau_star) {
  auto ex = carleman_parameters(reg);
  PowerLaw unit{1.0, w_exponent};
  if (!std::isfinite(unit.norm(reg.s, kR0)) || !std::isfinite(unit.norm(dual_exponent(ex.p), kR0)))
    throw DomainError("W power law is not in the required Lebesgue class");
  return std::pow(tau_star, 1 - 1 / ex.p) / (2 * k_proof(ex.p, unit, C, 1.0));
}

ThresholdProbe threshold_probe_V(double t, double eps, double v_exponent, const std::vector<double>& multipliers,
                                 double C, const CylinderField& v) {
  auto ex = carleman_parameters_pure(t, eps);
  MTerm mt = m_term(ex.p, ex.q, eps, ex.case_id == Case::PURE_LOW);
  double base = threshold_amplitude_V(t, eps, v_exponent, C, 2.0);
  ThresholdProbe pr;
  pr.expected = ex.mu;
  for (double m : multipliers) {
    PowerLaw V{base * m, v_exponent};
    pr.norms.push_back(V.norm(t, kR0));
    pr.tau_star.push_back(absorbing_tau([&](double tau) { return m_proof(mt, V, C, tau); }));
    pr.tau_star_measured.push_back(
        absorbing_tau([&](double tau) { return m_measured(v, V, mt, ex.p, ex.q, eps, C, tau); }));
  }
  return finish_probe(pr);
}

ThresholdProbe threshold_probe_W(const PotentialRegularity& reg, double w_exponent,
                                 const std::vector<double>& multipliers, double C, const CylinderField& v) {
  auto ex = carleman_parameters(reg);
  double base = threshold_amplitude_W(reg, w_exponent, C, 2.0);
  ThresholdProbe pr;
  pr.expected = *ex.kappa;
  for (double m : multipliers) {
    PowerLaw W{base * m, w_exponent};
    pr.norms.push_back(W.norm(reg.s, kR0));
    pr.tau_star.push_back(absorbing_tau([&](double tau) { return k_proof(ex.p, W, C, tau); }));
    pr.tau_star_measured.push_back(absorbing_tau([&](double tau) { return k_measured(v, W, ex.p, C, tau); }));
  }
  return finish_probe(pr);
}

}  // namespace uclab

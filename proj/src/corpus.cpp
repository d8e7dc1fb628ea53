#include "uclab/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <boost/math/special_functions/binomial.hpp>

#include "uclab/errors.hpp"
#include "uclab/weight.hpp"

namespace uclab {

namespace {

constexpr int kMarginRows = 8;

// Smoothstep of order n on [0, 1]: C^n, S(0) = 0, S(1) = 1. Coefficients in x.
std::vector<double> smoothstep_coeffs(int n) {
  std::vector<double> c(2 * n + 2, 0.0);
  for (int k = 0; k <= n; ++k) {
    double b = boost::math::binomial_coefficient<double>(n + k, k) *
               boost::math::binomial_coefficient<double>(2 * n + 1, n - k);
    c[n + 1 + k] = (k % 2 ? -b : b);
  }
  return c;
}

double poly_eval(const std::vector<double>& c, double x, int order) {
  double s = 0;
  for (int m = int(c.size()) - 1; m >= order; --m) {
    double f = c[m];
    for (int d = 0; d < order; ++d) f *= (m - d);
    s = s * x + f;
  }
  return s;
}

// Evaluated from the nearer endpoint to limit cancellation: S(x) = 1 - S(1 - x).
double smoothstep(const std::vector<double>& c, double x, int order) {
  if (x <= 0) return 0;
  if (x >= 1) return order == 0 ? 1 : 0;
  if (x <= 0.5) return poly_eval(c, x, order);
  double v = poly_eval(c, 1 - x, order);
  if (order == 0) return 1 - v;
  return order == 1 ? v : -v;
}

const std::vector<double>& coeffs_for(int n) {
  static thread_local std::vector<std::vector<double>> cache;
  if (int(cache.size()) <= n) cache.resize(n + 1);
  if (cache[n].empty()) cache[n] = smoothstep_coeffs(n);
  return cache[n];
}

}  // namespace

void TestFunctionSpec::validate() const {
  if (!(r_inner > 0 && r_inner < r_outer && r_outer < kR0))
    throw SpecError("test function needs 0 < r_inner < r_outer < R0");
  if (bump_smoothness < 2) throw SpecError("bump smoothness must be at least 2");
  bool any = false;
  for (auto& [k, a] : modes) {
    if (k < 0) throw SpecError("mode degree must be nonnegative");
    any = any || a != cplx(0);
  }
  if (!any) throw SpecError("test function needs a nonzero amplitude");
}

double TestFunctionSpec::t_inner() const { return std::log(r_inner); }
double TestFunctionSpec::t_outer() const { return std::log(r_outer); }

double TestFunctionSpec::profile(double t, int order) const {
  const double a = t_inner(), d = t_outer();
  const double w = 0.35 * (d - a);
  const auto& c = coeffs_for(bump_smoothness);
  if (t <= a || t >= d) return 0;
  if (t < a + w) return smoothstep(c, (t - a) / w, order) / std::pow(w, order);
  if (t > d - w) return smoothstep(c, (d - t) / w, order) * (order == 1 ? -1 : 1) / std::pow(w, order);
  return order == 0 ? 1 : 0;
}

cplx TestFunctionSpec::angular(double theta) const {
  double s = 0;
  for (auto& [k, a] : modes) s += (a * std::polar(1.0, k * theta)).real();
  return s;
}

cplx TestFunctionSpec::angular_tt(double theta) const {
  double s = 0;
  for (auto& [k, a] : modes) s -= double(k) * k * (a * std::polar(1.0, k * theta)).real();
  return s;
}

CylinderGrid test_grid(const TestFunctionSpec& spec, double dt, int ntheta) {
  spec.validate();
  int kmax = 0;
  for (auto& [k, a] : spec.modes) kmax = std::max(kmax, k);
  if (2 * kmax >= ntheta) throw BandError("angular grid too coarse for the test function modes");
  double lo = spec.t_inner() - kMarginRows * dt, hi = spec.t_outer() + kMarginRows * dt;
  int nt = int(std::ceil((hi - lo) / dt)) + 1;
  return CylinderGrid{lo, dt, nt, ntheta};
}

CylinderField make_test_field(const TestFunctionSpec& spec, const CylinderGrid& grid) {
  spec.validate();
  CylinderField v(grid);
  std::vector<cplx> ang(grid.ntheta);
  for (int m = 0; m < grid.ntheta; ++m) ang[m] = spec.angular(grid.theta(m));
  for (int j = 0; j < grid.nt; ++j) {
    double c = spec.profile(grid.t(j));
    if (c == 0) continue;
    for (int m = 0; m < grid.ntheta; ++m) v(j, m) = c * ang[m];
  }
  return v;
}

CylinderField exact_laplacian(const TestFunctionSpec& spec, const CylinderGrid& grid) {
  spec.validate();
  CylinderField v(grid);
  std::vector<cplx> ang(grid.ntheta), angtt(grid.ntheta);
  for (int m = 0; m < grid.ntheta; ++m) {
    ang[m] = spec.angular(grid.theta(m));
    angtt[m] = spec.angular_tt(grid.theta(m));
  }
  for (int j = 0; j < grid.nt; ++j) {
    double t = grid.t(j);
    double c0 = spec.profile(t), c2 = spec.profile(t, 2);
    for (int m = 0; m < grid.ntheta; ++m) v(j, m) = c2 * ang[m] + c0 * angtt[m];
  }
  return v;
}

DiskFunction make_test_function(const TestFunctionSpec& spec, int nr, int ntheta) {
  spec.validate();
  if (nr < 2 * kMarginRows + 6) throw SizeError("too few radial nodes");
  double dt = (spec.t_outer() - spec.t_inner()) / (nr - 1 - 2 * kMarginRows);
  std::vector<double> r(nr);
  for (int i = 0; i < nr; ++i) r[i] = std::exp(spec.t_inner() + (i - kMarginRows) * dt);
  return DiskFunction::from(r, ntheta, [&](double rr, double th) { return spec.profile(std::log(rr)) * spec.angular(th); });
}

std::vector<TestFunctionSpec> generate_corpus(std::uint64_t seed, int n, const std::string& prefix) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0, 1);
  std::normal_distribution<double> G(0, 1);
  std::vector<TestFunctionSpec> out;
  for (int i = 0; i < n; ++i) {
    TestFunctionSpec s;
    s.id = prefix + std::to_string(i);
    s.seed = rng();
    std::mt19937_64 local(s.seed);
    double t_out = -3.1 - 1.4 * U(local);
    double aspect = std::exp(std::log(2.0) + (std::log(100.0) - std::log(2.0)) * U(local));
    s.r_outer = std::exp(t_out);
    s.r_inner = s.r_outer / aspect;
    int nm = 1 + int(3 * U(local));
    for (int m = 0; m < nm; ++m) {
      int k = std::min(12, int(13 * U(local)));
      s.modes.emplace_back(k, cplx(G(local), G(local)));
    }
    s.bump_smoothness = 8;
    out.push_back(std::move(s));
  }
  return out;
}

std::string manifest_text(const std::vector<TestFunctionSpec>& corpus) {
  std::ostringstream os;
  os << "# uclab corpus manifest v1\n# id seed r_inner r_outer smoothness modes(k:re:im;...)\n";
  char buf[64];
  auto num = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  for (auto& s : corpus) {
    os << s.id << ' ' << s.seed << ' ' << num(s.r_inner) << ' ' << num(s.r_outer) << ' ' << s.bump_smoothness << ' ';
    for (size_t i = 0; i < s.modes.size(); ++i) {
      if (i) os << ';';
      os << s.modes[i].first << ':' << num(s.modes[i].second.real()) << ':' << num(s.modes[i].second.imag());
    }
    os << '\n';
  }
  return os.str();
}

std::vector<TestFunctionSpec> parse_manifest(const std::string& text) {
  std::vector<TestFunctionSpec> out;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    TestFunctionSpec s;
    std::string modes;
    if (!(ls >> s.id >> s.seed >> s.r_inner >> s.r_outer >> s.bump_smoothness >> modes))
      throw SpecError("manifest line " + std::to_string(lineno) + " is malformed");
    std::istringstream ms(modes);
    std::string item;
    while (std::getline(ms, item, ';')) {
      int k;
      double re, im;
      if (std::sscanf(item.c_str(), "%d:%lf:%lf", &k, &re, &im) != 3)
        throw SpecError("manifest line " + std::to_string(lineno) + ": bad mode '" + item + "'");
      s.modes.emplace_back(k, cplx(re, im));
    }
    s.validate();
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<TestFunctionSpec> read_manifest(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw SpecError("cannot open corpus manifest " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_manifest(ss.str());
}

std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace uclab

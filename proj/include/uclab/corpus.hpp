#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "uclab/cylinder.hpp"

namespace uclab {

// u = chi(log r) * sum_k Re(a_k e^{ik theta}), chi a C^n plateau bump on [log r_inner, log r_outer].
struct TestFunctionSpec {
  std::string id;
  double r_inner = 0;
  double r_outer = 0;
  std::vector<std::pair<int, cplx>> modes;
  int bump_smoothness = 8;
  std::uint64_t seed = 0;

  void validate() const;
  // d^order chi / dt^order, order <= 2
  double profile(double t, int order = 0) const;
  double t_inner() const;
  double t_outer() const;
  // angular factor and its second theta-derivative
  cplx angular(double theta) const;
  cplx angular_tt(double theta) const;
};

// Cylinder grid covering the support with an 8-row zero margin on each side.
CylinderGrid test_grid(const TestFunctionSpec& spec, double dt, int ntheta = 64);
CylinderField make_test_field(const TestFunctionSpec& spec, const CylinderGrid& grid);
// e^{2t} Delta u in closed form
CylinderField exact_laplacian(const TestFunctionSpec& spec, const CylinderGrid& grid);
// Samples on geometric radii (uniform in log r) spanning the support plus margin.
DiskFunction make_test_function(const TestFunctionSpec& spec, int nr, int ntheta = 64);

std::vector<TestFunctionSpec> generate_corpus(std::uint64_t seed, int n, const std::string& prefix = "c");

std::string manifest_text(const std::vector<TestFunctionSpec>& corpus);
std::vector<TestFunctionSpec> parse_manifest(const std::string& text);
std::vector<TestFunctionSpec> read_manifest(const std::string& path);
std::uint64_t fnv1a(const std::string& data);
std::string hash_hex(std::uint64_t h);

// Seed and size of the frozen standard corpus.
inline constexpr std::uint64_t kCorpusSeed = 20170611;
inline constexpr int kCorpusSize = 20;

}  // namespace uclab

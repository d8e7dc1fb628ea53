#pragma once

#include <cmath>

namespace uclab_test {

// (1 - x^2)^m on |x| < 1, x = (t - c)/w, with exact derivatives up to order 2.
struct PolyBump {
  double c, w;
  int m = 10;
  double value(double t, int order = 0) const {
    double x = (t - c) / w;
    if (std::abs(x) >= 1) return 0;
    double y = 1 - x * x;
    if (order == 0) return std::pow(y, m);
    if (order == 1) return m * std::pow(y, m - 1) * (-2 * x) / w;
    return (m * (m - 1) * std::pow(y, m - 2) * 4 * x * x - 2.0 * m * std::pow(y, m - 1)) / (w * w);
  }
};

}  // namespace uclab_test

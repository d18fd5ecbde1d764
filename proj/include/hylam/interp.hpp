// Monotone cubic Hermite interpolation (Fritsch-Carlson slopes). Used to
// turn tabulated law samples into C1 functions; constant extrapolation
// outside the sample range.

#pragma once

#include <vector>

namespace hylam {

class MonotoneCubic {
 public:
  MonotoneCubic(std::vector<double> x, std::vector<double> y);

  double value(double x) const;
  double derivative(double x) const;

  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }

 private:
  int interval(double x) const;
  std::vector<double> x_, y_, d_;
};

}  // namespace hylam

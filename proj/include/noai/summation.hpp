#pragma once

#include <cmath>

namespace noai {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  constexpr CompensatedSum() = default;
  explicit constexpr CompensatedSum(double v) : sum_(v) {}

  constexpr void add(double v) {
    const double t = sum_ + v;
    if ((sum_ >= 0 ? sum_ : -sum_) >= (v >= 0 ? v : -v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }

  constexpr CompensatedSum& operator+=(double v) {
    add(v);
    return *this;
  }

  /// Folds another partial sum in (used when merging partitions).
  constexpr void merge(const CompensatedSum& other) {
    add(other.sum_);
    add(other.comp_);
  }

  constexpr double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace noai

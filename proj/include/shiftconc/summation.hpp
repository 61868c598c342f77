#pragma once

#include <cmath>
#include <complex>

namespace shiftconc {

// Neumaier's variant of Kahan summation. The compensation term absorbs the
// low-order bits lost when a large running sum meets a small addend.
class CompensatedSum {
 public:
  CompensatedSum& operator+=(double value) {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      carry_ += (sum_ - t) + value;
    } else {
      carry_ += (value - t) + sum_;
    }
    sum_ = t;
    return *this;
  }

  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

class CompensatedComplexSum {
 public:
  CompensatedComplexSum& operator+=(std::complex<double> value) {
    re_ += value.real();
    im_ += value.imag();
    return *this;
  }

  std::complex<double> value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum re_;
  CompensatedSum im_;
};

}  // namespace shiftconc

#ifndef ABE_SUMMATION_HPP_
#define ABE_SUMMATION_HPP_

#include <cmath>
#include <span>

namespace abe {

// Neumaier's variant of Kahan summation. Order of accumulation is the order of
// add() calls, so results are reproducible bit for bit.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const noexcept { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) noexcept {
  CompensatedSum acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

}  // namespace abe

#endif  // ABE_SUMMATION_HPP_

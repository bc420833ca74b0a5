#ifndef ABE_KERNEL_HPP_
#define ABE_KERNEL_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace abe {

/// Relaxation kernel K_theta(z) = exp(-z/theta)/theta for z > 0, zero otherwise.
double kernel_eval(double z, double theta);

/// Truncated rectangle-rule quadrature of the exponential kernel on a mesh of
/// size dx, together with the moment correctors that enter the scheme (f0, f1)
/// and the limit-profile viscosity (f2).
///
/// weight(m), m = 1..N, is the exact integral of K_theta over ((m-1)dx, m dx).
class KernelQuadrature {
 public:
  static KernelQuadrature Build(double dx, double theta, std::size_t n_terms);

  double dx() const noexcept { return dx_; }
  double theta() const noexcept { return theta_; }
  std::size_t n_terms() const noexcept { return weights_.size(); }

  /// weights()[m - 1] is omega_m.
  std::span<const double> weights() const noexcept { return weights_; }
  double weight(std::size_t m) const { return weights_.at(m - 1); }

  double f0() const noexcept { return f0_; }
  double f1() const noexcept { return f1_; }
  double f2() const noexcept { return f2_; }

  /// sum_{m=1..N} (m + 1) omega_m, the convolution part of the stability bound.
  double stability_sum() const noexcept { return stability_sum_; }

 private:
  KernelQuadrature() = default;

  double dx_ = 0.0;
  double theta_ = 0.0;
  std::vector<double> weights_;
  double f0_ = 0.0;
  double f1_ = 0.0;
  double f2_ = 0.0;
  double stability_sum_ = 0.0;
};

/// 1 - exp(-N dx/theta).
double closed_form_f0(double dx, double theta, std::size_t n_terms);

/// h exp(-N h) (exp((N+1) h) - (N+1) exp(h) + N) / (exp(h) - 1), h = dx/theta.
double closed_form_f1(double dx, double theta, std::size_t n_terms);

/// Smallest N with exp(-N dx/theta) <= tail_tol, so that 1 - f0 <= tail_tol.
std::size_t choose_n(double dx, double theta, double tail_tol);

}  // namespace abe

#endif  // ABE_KERNEL_HPP_

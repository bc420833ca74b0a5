#include "abe/kernel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "abe/summation.hpp"

namespace abe {

namespace {

void check_args(double dx, double theta) {
  if (!(dx > 0.0) || !std::isfinite(dx)) throw std::invalid_argument("kernel: dx must be > 0");
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw std::invalid_argument("kernel: theta must be > 0");
  }
}

}  // namespace

double kernel_eval(double z, double theta) {
  if (!(theta > 0.0)) throw std::invalid_argument("kernel_eval: theta must be > 0");
  if (z <= 0.0) return 0.0;
  return std::exp(-z / theta) / theta;
}

KernelQuadrature KernelQuadrature::Build(double dx, double theta, std::size_t n_terms) {
  check_args(dx, theta);
  if (n_terms < 1) throw std::invalid_argument("KernelQuadrature: n_terms must be >= 1");

  KernelQuadrature q;
  q.dx_ = dx;
  q.theta_ = theta;
  q.weights_.resize(n_terms);

  const double h = dx / theta;
  const double em1 = std::expm1(h);
  CompensatedSum s0, s1, s2, stab;
  for (std::size_t m = 1; m <= n_terms; ++m) {
    const double md = static_cast<double>(m);
    // Far-tail weights may underflow to zero; they are kept so N is unchanged.
    const double w = std::exp(-md * h) * em1;
    q.weights_[m - 1] = w;
    s0.add(w);
    s1.add(md * w);
    s2.add(md * (md - 1.0) * w);
    stab.add((md + 1.0) * w);
  }
  q.f0_ = s0.value();
  q.f1_ = h * s1.value();
  q.f2_ = 0.5 * h * h * s2.value();
  q.stability_sum_ = stab.value();
  return q;
}

double closed_form_f0(double dx, double theta, std::size_t n_terms) {
  check_args(dx, theta);
  return -std::expm1(-static_cast<double>(n_terms) * dx / theta);
}

double closed_form_f1(double dx, double theta, std::size_t n_terms) {
  check_args(dx, theta);
  const double h = dx / theta;
  const double n = static_cast<double>(n_terms);
  // exp(-N h) distributed into the bracket to avoid overflow of exp((N+1) h).
  const double tail = std::exp(-n * h);
  const double bracket = std::exp(h) * (1.0 - (n + 1.0) * tail) + n * tail;
  return h * bracket / std::expm1(h);
}

std::size_t choose_n(double dx, double theta, double tail_tol) {
  check_args(dx, theta);
  if (!(tail_tol > 0.0 && tail_tol < 1.0)) {
    throw std::invalid_argument("choose_n: tail_tol must lie in (0, 1)");
  }
  const double h = dx / theta;
  auto tail = [h](std::size_t n) { return std::exp(-static_cast<double>(n) * h); };
  auto n = static_cast<std::size_t>(std::ceil(std::log(1.0 / tail_tol) / h));
  if (n < 1) n = 1;
  // The ceiling can be off by one when log() rounds; settle on the predicate.
  while (n > 1 && tail(n - 1) <= tail_tol) --n;
  while (tail(n) > tail_tol) ++n;
  return n;
}

}  // namespace abe

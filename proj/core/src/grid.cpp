#include "abe/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "abe/summation.hpp"

namespace abe {

namespace {

constexpr int kSimpsonIntervals = 16;

// Composite Simpson on [a, b]; the endpoint samples are taken just inside the
// interval so a jump located exactly at a or b contributes its one-sided limit.
double simpson(const std::function<double(double)>& f, double a, double b, std::size_t cell) {
  const double h = (b - a) / kSimpsonIntervals;
  auto sample = [&](double x) {
    const double v = f(x);
    if (!std::isfinite(v)) {
      throw std::domain_error("project_initial: non-finite initial data at x = " +
                              std::to_string(x) + " in cell " + std::to_string(cell));
    }
    return v;
  };
  CompensatedSum acc;
  acc.add(sample(std::nextafter(a, b)));
  for (int i = 1; i < kSimpsonIntervals; ++i) {
    acc.add((i % 2 == 1 ? 4.0 : 2.0) * sample(a + i * h));
  }
  acc.add(sample(std::nextafter(b, a)));
  return acc.value() * h / 3.0;
}

}  // namespace

Grid Grid::Uniform(double x_left, double x_right, double dx) {
  if (!(dx > 0.0) || !std::isfinite(dx)) {
    throw std::invalid_argument("Grid: dx must be positive and finite");
  }
  if (!(x_right > x_left)) {
    throw std::invalid_argument("Grid: x_left must be smaller than x_right");
  }
  const double cells = (x_right - x_left) / dx;
  const double n = std::round(cells);
  if (std::abs(cells - n) > 1e-9 * std::max(1.0, cells)) {
    throw std::invalid_argument("Grid: domain length is not a multiple of dx");
  }
  return Grid(x_left, dx, static_cast<std::size_t>(n));
}

Grid::Grid(double x_left, double dx, std::size_t num_cells)
    : x_left_(x_left), dx_(dx), num_cells_(num_cells) {
  if (!(dx > 0.0) || !std::isfinite(dx) || !std::isfinite(x_left)) {
    throw std::invalid_argument("Grid: dx must be positive and finite");
  }
  if (num_cells < 2) {
    throw std::invalid_argument("Grid: need at least two cells");
  }
}

GridFunction::GridFunction(Grid grid) : grid_(grid), values_(grid.num_cells(), 0.0) {}

GridFunction::GridFunction(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.num_cells()) {
    throw std::invalid_argument("GridFunction: expected " + std::to_string(grid_.num_cells()) +
                                " values, got " + std::to_string(values_.size()));
  }
  for (std::size_t j = 0; j < values_.size(); ++j) {
    if (!std::isfinite(values_[j])) {
      throw std::domain_error("GridFunction: non-finite value in cell " + std::to_string(j));
    }
  }
}

NormKind NormKind::Infinity() { return NormKind(std::numeric_limits<double>::infinity()); }

NormKind NormKind::P(double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("NormKind: p must be >= 1");
  return NormKind(p);
}

bool NormKind::is_infinity() const noexcept { return std::isinf(p_); }

double NormKind::decay_exponent() const noexcept {
  return is_infinity() ? 0.5 : 0.5 * (1.0 - 1.0 / p_);
}

GridFunction project_initial(const std::function<double(double)>& f, const Grid& grid) {
  return project_initial(InitialProfile{f, {}}, grid);
}

GridFunction project_initial(const InitialProfile& data, const Grid& grid) {
  std::vector<double> breaks = data.breakpoints;
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> values(grid.num_cells());
  auto next_break = breaks.begin();
  for (std::size_t j = 0; j < grid.num_cells(); ++j) {
    const double a = grid.face_left(j);
    const double b = grid.face_right(j);
    while (next_break != breaks.end() && *next_break <= a) ++next_break;
    double integral = 0.0;
    double lo = a;
    for (auto it = next_break; it != breaks.end() && *it < b; ++it) {
      integral += simpson(data.f, lo, *it, j);
      lo = *it;
    }
    integral += simpson(data.f, lo, b, j);
    values[j] = integral / grid.dx();
  }
  return GridFunction(grid, std::move(values));
}

GridFunction d_plus(const GridFunction& w) {
  const auto u = w.values();
  const double dx = w.grid().dx();
  std::vector<double> out(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double next = j + 1 < u.size() ? u[j + 1] : 0.0;
    out[j] = (next - u[j]) / dx;
  }
  return GridFunction(w.grid(), std::move(out));
}

GridFunction d_minus(const GridFunction& w) {
  const auto u = w.values();
  const double dx = w.grid().dx();
  std::vector<double> out(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double prev = j > 0 ? u[j - 1] : 0.0;
    out[j] = (u[j] - prev) / dx;
  }
  return GridFunction(w.grid(), std::move(out));
}

GridFunction pad(const GridFunction& w, std::size_t left, std::size_t right) {
  const Grid& g = w.grid();
  Grid padded(g.x_left() - static_cast<double>(left) * g.dx(), g.dx(),
              g.num_cells() + left + right);
  std::vector<double> values(padded.num_cells(), 0.0);
  std::copy(w.values().begin(), w.values().end(),
            values.begin() + static_cast<std::ptrdiff_t>(left));
  return GridFunction(padded, std::move(values));
}

double max_abs(std::span<const double> values) noexcept {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

double norm(std::span<const double> values, double dx, NormKind kind) {
  if (kind.is_infinity()) return max_abs(values);
  const double p = kind.p();
  CompensatedSum acc;
  if (p == 1.0) {
    for (double v : values) acc.add(std::abs(v));
    return dx * acc.value();
  }
  if (p == 2.0) {
    for (double v : values) acc.add(v * v);
    return std::sqrt(dx * acc.value());
  }
  for (double v : values) acc.add(std::pow(std::abs(v), p));
  return std::pow(dx * acc.value(), 1.0 / p);
}

double norm(const GridFunction& w, NormKind kind) {
  return norm(w.values(), w.grid().dx(), kind);
}

double mass(const GridFunction& w) { return w.grid().dx() * compensated_sum(w.values()); }

}  // namespace abe

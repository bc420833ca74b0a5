#ifndef ABE_GRID_HPP_
#define ABE_GRID_HPP_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace abe {

/// Uniform one-dimensional mesh. Cell j covers [x_left + j dx, x_left + (j+1) dx].
class Grid {
 public:
  /// Builds the mesh covering [x_left, x_right] with spacing dx. The interval
  /// length must be an integer multiple of dx (up to rounding).
  static Grid Uniform(double x_left, double x_right, double dx);

  Grid(double x_left, double dx, std::size_t num_cells);

  double x_left() const noexcept { return x_left_; }
  double x_right() const noexcept { return x_left_ + static_cast<double>(num_cells_) * dx_; }
  double dx() const noexcept { return dx_; }
  std::size_t num_cells() const noexcept { return num_cells_; }

  double center(std::size_t j) const noexcept {
    return x_left_ + (static_cast<double>(j) + 0.5) * dx_;
  }
  double face_left(std::size_t j) const noexcept {
    return x_left_ + static_cast<double>(j) * dx_;
  }
  double face_right(std::size_t j) const noexcept { return face_left(j + 1); }

  bool operator==(const Grid&) const = default;

 private:
  double x_left_;
  double dx_;
  std::size_t num_cells_;
};

/// Piecewise-constant function on a Grid: one finite value per cell.
/// Values outside the grid are taken as zero by every operator below.
class GridFunction {
 public:
  /// Zero function.
  explicit GridFunction(Grid grid);
  GridFunction(Grid grid, std::vector<double> values);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t j) const noexcept { return values_[j]; }

  /// Releases the value buffer (the function is left empty-valued).
  std::vector<double> take_values() && { return std::move(values_); }

  bool operator==(const GridFunction&) const = default;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Exponent of an L^p norm; p = infinity is the max norm.
class NormKind {
 public:
  static NormKind L1() { return NormKind(1.0); }
  static NormKind L2() { return NormKind(2.0); }
  static NormKind Infinity();
  static NormKind P(double p);

  double p() const noexcept { return p_; }
  bool is_infinity() const noexcept;
  /// Decay exponent (1/2)(1 - 1/p) of the L^1-L^p estimates.
  double decay_exponent() const noexcept;

 private:
  explicit NormKind(double p) : p_(p) {}
  double p_;
};

/// Initial datum with the abscissae where it is not smooth. Cells are split at
/// the breakpoints before integrating so jumps do not pollute cell averages.
struct InitialProfile {
  std::function<double(double)> f;
  std::vector<double> breakpoints;
};

/// Cell averages (1/dx) * integral of f over each cell, composite Simpson with
/// 16 subintervals per smooth piece of the cell.
GridFunction project_initial(const std::function<double(double)>& f, const Grid& grid);
GridFunction project_initial(const InitialProfile& data, const Grid& grid);

GridFunction d_plus(const GridFunction& w);
GridFunction d_minus(const GridFunction& w);

/// Extends w by zero cells on either side (same dx, shifted x_left).
GridFunction pad(const GridFunction& w, std::size_t left, std::size_t right);

double norm(const GridFunction& w, NormKind kind);
double norm(std::span<const double> values, double dx, NormKind kind);
double mass(const GridFunction& w);

double max_abs(std::span<const double> values) noexcept;

}  // namespace abe

#endif  // ABE_GRID_HPP_

#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfglab {

/// Point on the unit torus (only the first `d` components are meaningful).
using Point = std::array<double, 2>;

class MfgError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Uniform periodic space-time grid on [0,1)^d x [0,T].
///
/// Spatial sample points are x_i = i*h, i = 0..n-1, per axis; each point is
/// the center of the cell [x_i - h/2, x_i + h/2) wrapped periodically.
/// Quadrature is the (coinciding) trapezoid/midpoint rule h^d * sum.
struct GridSpec {
  int d = 1;       ///< spatial dimension, 1 or 2
  int n = 4;       ///< cells per dimension
  int nt = 1;      ///< time steps; nt+1 time levels
  double T = 1.0;  ///< horizon

  GridSpec() = default;
  GridSpec(int d_, int n_, int nt_, double T_);

  double h() const { return 1.0 / n; }
  double dt() const { return T / nt; }
  std::size_t cells() const;

  /// Physical coordinate of cell index along one axis.
  double coord(int i) const { return i * h(); }
  /// Time of level k.
  double time(int k) const { return k * dt(); }

  /// Flat index of the cell (i0) in 1-d or (i0, i1) row-major in 2-d.
  std::size_t index(int i0, int i1 = 0) const {
    return d == 1 ? static_cast<std::size_t>(i0)
                  : static_cast<std::size_t>(i0) * n + i1;
  }
  /// Periodic wrap of an axis index.
  int wrap(int i) const {
    int r = i % n;
    return r < 0 ? r + n : r;
  }
  /// Coordinates of a flat cell index.
  Point point(std::size_t flat) const {
    if (d == 1) return {coord(static_cast<int>(flat)), 0.0};
    return {coord(static_cast<int>(flat) / n), coord(static_cast<int>(flat) % n)};
  }
  /// Cell index containing a (wrapped) physical point: nearest sample point.
  std::size_t cell_of(const Point& x) const;

  bool operator==(const GridSpec& o) const {
    return d == o.d && n == o.n && nt == o.nt && T == o.T;
  }
};

/// One real value per cell of a GridSpec.
class ScalarField {
public:
  ScalarField() = default;
  explicit ScalarField(const GridSpec& g, double fill = 0.0);
  ScalarField(const GridSpec& g, std::vector<double> values);

  const GridSpec& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  double min() const;
  double max() const;
  bool all_finite() const;
  /// Throws MfgError if any value is non-finite.
  void require_finite(const std::string& what) const;

private:
  GridSpec grid_;
  std::vector<double> values_;
};

/// d-component vector field; component a holds d/dx_a data.
struct VectorField {
  GridSpec grid;
  std::array<std::vector<double>, 2> comp;

  VectorField() = default;
  explicit VectorField(const GridSpec& g);
  std::size_t size() const { return comp[0].size(); }
  /// Max over cells of the Euclidean norm.
  double max_norm2() const;
  /// Max over cells and components of the absolute value.
  double max_abs_component() const;
};

/// Forward and backward one-sided difference quotients per axis.
struct UpwindPair {
  VectorField forward;
  VectorField backward;
};

/// nt+1 ScalarFields on a shared grid.
class FieldTrajectory {
public:
  FieldTrajectory() = default;
  /// Constant-in-time trajectory made of copies of `frame`.
  FieldTrajectory(const GridSpec& g, const ScalarField& frame);
  FieldTrajectory(const GridSpec& g, std::vector<ScalarField> frames);

  const GridSpec& grid() const { return grid_; }
  int frame_count() const { return static_cast<int>(frames_.size()); }
  const ScalarField& frame(int k) const { return frames_.at(k); }
  ScalarField& frame(int k) { return frames_.at(k); }
  const std::vector<ScalarField>& frames() const { return frames_; }

private:
  GridSpec grid_;
  std::vector<ScalarField> frames_;
};

enum class GradientMode { central, upwind_pair };

/// Central (second-order) periodic difference gradient.
VectorField gradient_central(const ScalarField& f);
/// Forward/backward one-sided differences per axis, both O(h).
UpwindPair gradient_upwind_pair(const ScalarField& f);
/// Standard (2d+1)-point periodic Laplacian. Summation by parts is exact
/// against the forward-difference pairing:
///   integrate(f * laplacian(g)) == -integrate(forward_grad(f) . forward_grad(g))
/// up to roundoff, for every pair of fields on one grid.
ScalarField laplacian(const ScalarField& f);
/// Central divergence of a vector field.
ScalarField divergence_central(const VectorField& v);

/// h^d-weighted sum, the trapezoid(=midpoint) rule on the periodic grid.
double integrate(const ScalarField& f);
/// L^p norm via `integrate`; p = inf gives max |value|. Rejects p < 1.
double lp_norm(const ScalarField& f, double p);

/// Pointwise products and combinations used all over the harness.
ScalarField multiply(const ScalarField& a, const ScalarField& b);
ScalarField axpy(double alpha, const ScalarField& x, const ScalarField& y);
double sup_distance(const ScalarField& a, const ScalarField& b);
/// Pointwise dot product of two vector fields, as a scalar field.
ScalarField dot(const VectorField& a, const VectorField& b);

}  // namespace mfglab

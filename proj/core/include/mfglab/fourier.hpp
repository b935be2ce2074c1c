#pragma once

#include <array>
#include <string>
#include <vector>

#include "mfglab/torus_grid.hpp"

namespace mfglab {

/// Smooth periodic function given by a truncated Fourier series,
///   f(x) = c0 + sum_j amp_j * {cos|sin}(2*pi * k_j . x),
/// with analytic gradients. Used for the Hamiltonian coefficients a, V and
/// for the boundary data m0, uT.
class FourierFn {
public:
  struct Term {
    bool is_sin = false;
    std::array<int, 2> k{0, 0};
    double amp = 0.0;
  };

  FourierFn() = default;
  FourierFn(int d, double constant, std::vector<Term> terms = {});

  static FourierFn constant_fn(int d, double c) { return FourierFn(d, c); }

  int dim() const { return d_; }
  double constant() const { return c0_; }
  const std::vector<Term>& terms() const { return terms_; }

  FourierFn& add_cos(std::array<int, 2> k, double amp);
  FourierFn& add_sin(std::array<int, 2> k, double amp);

  double eval(const Point& x) const;
  std::array<double, 2> grad(const Point& x) const;

  ScalarField sample(const GridSpec& g) const;
  /// Min of f over a dense uniform sample grid (samples_per_dim per axis).
  double min_on_dense_grid(int samples_per_dim = 2048) const;
  double max_on_dense_grid(int samples_per_dim = 2048) const;

  bool all_finite() const;
  std::string describe() const;

private:
  int d_ = 1;
  double c0_ = 0.0;
  std::vector<Term> terms_;
};

}  // namespace mfglab

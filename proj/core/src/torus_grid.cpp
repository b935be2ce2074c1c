#include "mfglab/torus_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mfglab {

GridSpec::GridSpec(int d_, int n_, int nt_, double T_) : d(d_), n(n_), nt(nt_), T(T_) {
  if (d != 1 && d != 2) throw MfgError("GridSpec: d must be 1 or 2, got " + std::to_string(d));
  if (n < 4) throw MfgError("GridSpec: n must be >= 4, got " + std::to_string(n));
  if (nt < 1) throw MfgError("GridSpec: nt must be >= 1, got " + std::to_string(nt));
  if (!(T > 0.0) || !std::isfinite(T)) throw MfgError("GridSpec: T must be positive and finite");
  if ((1.0 / n) * n != 1.0)
    throw MfgError("GridSpec: h*n != 1 in double arithmetic for n = " + std::to_string(n) +
                   "; pick n (e.g. a power of two) with exactly representable spacing");
  if ((T / nt) * nt != T)
    throw MfgError("GridSpec: dt*nt != T in double arithmetic for T = " + std::to_string(T) +
                   ", nt = " + std::to_string(nt));
}

std::size_t GridSpec::cells() const {
  std::size_t c = static_cast<std::size_t>(n);
  return d == 1 ? c : c * c;
}

std::size_t GridSpec::cell_of(const Point& x) const {
  auto wrap_coord = [](double v) {
    double w = v - std::floor(v);
    return w >= 1.0 ? 0.0 : w;  // floor roundoff guard
  };
  int i0 = wrap(static_cast<int>(std::lround(wrap_coord(x[0]) * n)));
  if (d == 1) return index(i0);
  int i1 = wrap(static_cast<int>(std::lround(wrap_coord(x[1]) * n)));
  return index(i0, i1);
}

ScalarField::ScalarField(const GridSpec& g, double fill) : grid_(g), values_(g.cells(), fill) {}

ScalarField::ScalarField(const GridSpec& g, std::vector<double> values)
    : grid_(g), values_(std::move(values)) {
  if (values_.size() != g.cells())
    throw MfgError("ScalarField: value count " + std::to_string(values_.size()) +
                   " does not match grid cells " + std::to_string(g.cells()));
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

bool ScalarField::all_finite() const {
  for (double v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

void ScalarField::require_finite(const std::string& what) const {
  if (!all_finite()) throw MfgError(what + ": non-finite value in field");
}

VectorField::VectorField(const GridSpec& g) : grid(g) {
  for (int a = 0; a < g.d; ++a) comp[a].assign(g.cells(), 0.0);
}

double VectorField::max_norm2() const {
  double m = 0.0;
  for (std::size_t i = 0; i < comp[0].size(); ++i) {
    double s = comp[0][i] * comp[0][i];
    if (grid.d == 2) s += comp[1][i] * comp[1][i];
    m = std::max(m, s);
  }
  return std::sqrt(m);
}

double VectorField::max_abs_component() const {
  double m = 0.0;
  for (int a = 0; a < grid.d; ++a)
    for (double v : comp[a]) m = std::max(m, std::abs(v));
  return m;
}

FieldTrajectory::FieldTrajectory(const GridSpec& g, const ScalarField& frame) : grid_(g) {
  if (!(frame.grid() == g)) throw MfgError("FieldTrajectory: frame grid mismatch");
  frames_.assign(g.nt + 1, frame);
}

FieldTrajectory::FieldTrajectory(const GridSpec& g, std::vector<ScalarField> frames)
    : grid_(g), frames_(std::move(frames)) {
  if (static_cast<int>(frames_.size()) != g.nt + 1)
    throw MfgError("FieldTrajectory: expected " + std::to_string(g.nt + 1) + " frames, got " +
                   std::to_string(frames_.size()));
  for (const auto& f : frames_)
    if (!(f.grid() == g)) throw MfgError("FieldTrajectory: frame grid mismatch");
}

namespace {

// Applies a 1-d periodic stencil along each axis of a (possibly 2-d) field.
template <typename F>
void for_each_axis_neighbor(const GridSpec& g, F&& f) {
  const int n = g.n;
  if (g.d == 1) {
    for (int i = 0; i < n; ++i) {
      std::size_t c = g.index(i);
      f(0, c, g.index(g.wrap(i + 1)), g.index(g.wrap(i - 1)));
    }
    return;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      std::size_t c = g.index(i, j);
      f(0, c, g.index(g.wrap(i + 1), j), g.index(g.wrap(i - 1), j));
      f(1, c, g.index(i, g.wrap(j + 1)), g.index(i, g.wrap(j - 1)));
    }
  }
}

}  // namespace

VectorField gradient_central(const ScalarField& f) {
  const GridSpec& g = f.grid();
  VectorField out(g);
  const double inv2h = 0.5 * g.n;
  const auto& v = f.values();
  for_each_axis_neighbor(g, [&](int a, std::size_t c, std::size_t p, std::size_t m) {
    out.comp[a][c] = (v[p] - v[m]) * inv2h;
  });
  return out;
}

UpwindPair gradient_upwind_pair(const ScalarField& f) {
  const GridSpec& g = f.grid();
  UpwindPair out{VectorField(g), VectorField(g)};
  const double invh = g.n;
  const auto& v = f.values();
  for_each_axis_neighbor(g, [&](int a, std::size_t c, std::size_t p, std::size_t m) {
    out.forward.comp[a][c] = (v[p] - v[c]) * invh;
    out.backward.comp[a][c] = (v[c] - v[m]) * invh;
  });
  return out;
}

ScalarField laplacian(const ScalarField& f) {
  const GridSpec& g = f.grid();
  ScalarField out(g);
  const double invh2 = static_cast<double>(g.n) * g.n;
  const auto& v = f.values();
  for_each_axis_neighbor(g, [&](int, std::size_t c, std::size_t p, std::size_t m) {
    out[c] += (v[p] - 2.0 * v[c] + v[m]) * invh2;
  });
  return out;
}

ScalarField divergence_central(const VectorField& vf) {
  const GridSpec& g = vf.grid;
  ScalarField out(g);
  const double inv2h = 0.5 * g.n;
  for_each_axis_neighbor(g, [&](int a, std::size_t c, std::size_t p, std::size_t m) {
    out[c] += (vf.comp[a][p] - vf.comp[a][m]) * inv2h;
  });
  return out;
}

double integrate(const ScalarField& f) {
  const GridSpec& g = f.grid();
  double s = 0.0;
  for (double v : f.values()) s += v;
  double hd = g.h();
  if (g.d == 2) hd *= g.h();
  return s * hd;
}

double lp_norm(const ScalarField& f, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
  }
  if (!(p >= 1.0)) throw MfgError("lp_norm: p must be >= 1 or infinity");
  ScalarField absp(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) absp[i] = std::pow(std::abs(f[i]), p);
  return std::pow(integrate(absp), 1.0 / p);
}

ScalarField multiply(const ScalarField& a, const ScalarField& b) {
  if (!(a.grid() == b.grid())) throw MfgError("multiply: grid mismatch");
  ScalarField out(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

ScalarField axpy(double alpha, const ScalarField& x, const ScalarField& y) {
  if (!(x.grid() == y.grid())) throw MfgError("axpy: grid mismatch");
  ScalarField out(x.grid());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = alpha * x[i] + y[i];
  return out;
}

double sup_distance(const ScalarField& a, const ScalarField& b) {
  if (!(a.grid() == b.grid())) throw MfgError("sup_distance: grid mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

ScalarField dot(const VectorField& a, const VectorField& b) {
  if (!(a.grid == b.grid)) throw MfgError("dot: grid mismatch");
  ScalarField out(a.grid);
  for (std::size_t i = 0; i < a.size(); ++i) {
    double s = a.comp[0][i] * b.comp[0][i];
    if (a.grid.d == 2) s += a.comp[1][i] * b.comp[1][i];
    out[i] = s;
  }
  return out;
}

}  // namespace mfglab

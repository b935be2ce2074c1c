#include "mfglab/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace mfglab {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

FourierFn::FourierFn(int d, double constant, std::vector<Term> terms)
    : d_(d), c0_(constant), terms_(std::move(terms)) {
  if (d != 1 && d != 2) throw MfgError("FourierFn: d must be 1 or 2");
  for (auto& t : terms_)
    if (d == 1) t.k[1] = 0;
}

FourierFn& FourierFn::add_cos(std::array<int, 2> k, double amp) {
  terms_.push_back({false, d_ == 1 ? std::array<int, 2>{k[0], 0} : k, amp});
  return *this;
}

FourierFn& FourierFn::add_sin(std::array<int, 2> k, double amp) {
  terms_.push_back({true, d_ == 1 ? std::array<int, 2>{k[0], 0} : k, amp});
  return *this;
}

double FourierFn::eval(const Point& x) const {
  double s = c0_;
  for (const auto& t : terms_) {
    double phase = kTwoPi * (t.k[0] * x[0] + (d_ == 2 ? t.k[1] * x[1] : 0.0));
    s += t.amp * (t.is_sin ? std::sin(phase) : std::cos(phase));
  }
  return s;
}

std::array<double, 2> FourierFn::grad(const Point& x) const {
  std::array<double, 2> g{0.0, 0.0};
  for (const auto& t : terms_) {
    double phase = kTwoPi * (t.k[0] * x[0] + (d_ == 2 ? t.k[1] * x[1] : 0.0));
    double dphase = t.amp * kTwoPi * (t.is_sin ? std::cos(phase) : -std::sin(phase));
    g[0] += t.k[0] * dphase;
    if (d_ == 2) g[1] += t.k[1] * dphase;
  }
  return g;
}

ScalarField FourierFn::sample(const GridSpec& g) const {
  if (g.d != d_) throw MfgError("FourierFn::sample: dimension mismatch");
  ScalarField out(g);
  for (std::size_t c = 0; c < g.cells(); ++c) out[c] = eval(g.point(c));
  return out;
}

double FourierFn::min_on_dense_grid(int samples_per_dim) const {
  double m = std::numeric_limits<double>::infinity();
  if (d_ == 1) {
    for (int i = 0; i < samples_per_dim; ++i)
      m = std::min(m, eval({static_cast<double>(i) / samples_per_dim, 0.0}));
  } else {
    for (int i = 0; i < samples_per_dim; ++i)
      for (int j = 0; j < samples_per_dim; ++j)
        m = std::min(m, eval({static_cast<double>(i) / samples_per_dim,
                              static_cast<double>(j) / samples_per_dim}));
  }
  return m;
}

double FourierFn::max_on_dense_grid(int samples_per_dim) const {
  double m = -std::numeric_limits<double>::infinity();
  if (d_ == 1) {
    for (int i = 0; i < samples_per_dim; ++i)
      m = std::max(m, eval({static_cast<double>(i) / samples_per_dim, 0.0}));
  } else {
    for (int i = 0; i < samples_per_dim; ++i)
      for (int j = 0; j < samples_per_dim; ++j)
        m = std::max(m, eval({static_cast<double>(i) / samples_per_dim,
                              static_cast<double>(j) / samples_per_dim}));
  }
  return m;
}

bool FourierFn::all_finite() const {
  if (!std::isfinite(c0_)) return false;
  for (const auto& t : terms_)
    if (!std::isfinite(t.amp)) return false;
  return true;
}

std::string FourierFn::describe() const {
  std::ostringstream os;
  os << "const " << c0_;
  for (const auto& t : terms_) {
    os << (t.is_sin ? " sin " : " cos ") << t.k[0];
    if (d_ == 2) os << ' ' << t.k[1];
    os << ' ' << t.amp;
  }
  return os.str();
}

}  // namespace mfglab

#include "hflow/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>

namespace hflow {

PeriodicGrid::PeriodicGrid(std::size_t n_, double length_) : n(n_), length(length_) {
  if (n < 8 || (n & (n - 1)) != 0)
    throw std::invalid_argument("PeriodicGrid: n must be a power of two, n >= 8");
  if (!(length > 0.0)) throw std::invalid_argument("PeriodicGrid: length must be positive");
}

double PeriodicGrid::ring_distance(double a, double b) const {
  double d = std::fmod(std::fabs(a - b), length);
  return std::min(d, length - d);
}

namespace detail {

// One immutable FFTW plan pair per grid size. Plans are created against
// scratch buffers and executed through the new-array interface, so a single
// plan can serve many fields; FFTW's new-array execute is thread-safe.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n) : n_(n) {
    double* rbuf = fftw_alloc_real(n);
    fftw_complex* cbuf = fftw_alloc_complex(n / 2 + 1);
    r2c_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), rbuf, cbuf,
                                FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
    c2r_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), cbuf, rbuf,
                                FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
    fftw_free(rbuf);
    fftw_free(cbuf);
    if (!r2c_ || !c2r_) throw std::runtime_error("FftPlan: FFTW planning failed");
  }
  ~FftPlan() {
    fftw_destroy_plan(r2c_);
    fftw_destroy_plan(c2r_);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  std::size_t size() const { return n_; }

  void forward(const std::vector<double>& values,
               std::vector<std::complex<double>>& spectrum) const {
    // FFTW r2c with FFTW_PRESERVE_INPUT leaves values untouched.
    spectrum.resize(n_ / 2 + 1);
    double* in = fftw_alloc_real(n_);
    std::copy(values.begin(), values.end(), in);
    fftw_execute_dft_r2c(r2c_, in, reinterpret_cast<fftw_complex*>(spectrum.data()));
    fftw_free(in);
    const double scale = 1.0 / static_cast<double>(n_);
    for (auto& c : spectrum) c *= scale;
  }

  void inverse(const std::vector<std::complex<double>>& spectrum,
               std::vector<double>& values) const {
    values.resize(n_);
    fftw_complex* in = fftw_alloc_complex(n_ / 2 + 1);
    std::memcpy(in, spectrum.data(), sizeof(fftw_complex) * (n_ / 2 + 1));
    fftw_execute_dft_c2r(c2r_, in, values.data());
    fftw_free(in);
  }

 private:
  std::size_t n_;
  fftw_plan r2c_;
  fftw_plan c2r_;
};

std::shared_ptr<const FftPlan> plan_for(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::shared_ptr<const FftPlan>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto plan = std::make_shared<const FftPlan>(n);
  cache.emplace(n, plan);
  return plan;
}

}  // namespace detail

GridFunction GridFunction::zeros(const PeriodicGrid& grid) {
  return from_values(grid, std::vector<double>(grid.n, 0.0));
}

GridFunction GridFunction::from_values(const PeriodicGrid& grid, std::vector<double> values) {
  if (values.size() != grid.n)
    throw std::invalid_argument("GridFunction: value count does not match grid");
  GridFunction f;
  f.grid_ = grid;
  f.plan_ = detail::plan_for(grid.n);
  f.values_ = std::move(values);
  f.state_ = State::kValues;
  return f;
}

GridFunction GridFunction::from_spectrum(const PeriodicGrid& grid,
                                         std::vector<std::complex<double>> spectrum) {
  if (spectrum.size() != grid.num_modes())
    throw std::invalid_argument("GridFunction: spectrum size does not match grid");
  GridFunction f;
  f.grid_ = grid;
  f.plan_ = detail::plan_for(grid.n);
  // Enforce realness: mean and Nyquist coefficients must be real.
  spectrum.front() = spectrum.front().real();
  spectrum.back() = spectrum.back().real();
  f.spectrum_ = std::move(spectrum);
  f.state_ = State::kSpectrum;
  return f;
}

void GridFunction::ensure_values() const {
  if (state_ == State::kValues || state_ == State::kBoth) return;
  if (state_ == State::kEmpty) throw std::logic_error("GridFunction: empty");
  plan_->inverse(spectrum_, values_);
  state_ = State::kBoth;
}

void GridFunction::ensure_spectrum() const {
  if (state_ == State::kSpectrum || state_ == State::kBoth) return;
  if (state_ == State::kEmpty) throw std::logic_error("GridFunction: empty");
  plan_->forward(values_, spectrum_);
  state_ = State::kBoth;
}

const std::vector<double>& GridFunction::values() const {
  ensure_values();
  return values_;
}

const std::vector<std::complex<double>>& GridFunction::spectrum() const {
  ensure_spectrum();
  return spectrum_;
}

double GridFunction::sup_norm() const {
  double m = 0.0;
  for (double v : values()) m = std::max(m, std::fabs(v));
  return m;
}

double GridFunction::l2_norm() const {
  double s = 0.0;
  for (double v : values()) s += v * v;
  return std::sqrt(s * grid_.spacing());
}

double GridFunction::spectral_energy() const {
  const auto& c = spectrum();
  const std::size_t half = grid_.n / 2;
  double s = std::norm(c[0]) + std::norm(c[half]);
  for (std::size_t m = 1; m < half; ++m) s += 2.0 * std::norm(c[m]);
  return s * grid_.length;
}

std::size_t GridFunction::max_active_mode(double rel_tol) const {
  const auto& c = spectrum();
  double peak = 0.0;
  for (const auto& z : c) peak = std::max(peak, std::abs(z));
  if (peak == 0.0) return 0;
  for (std::size_t m = c.size(); m-- > 1;)
    if (std::abs(c[m]) > rel_tol * peak) return m;
  return 0;
}

double fourier_eval(const GridFunction& f, double x) {
  const auto& c = f.spectrum();
  const std::size_t half = f.grid().n / 2;
  const double k1 = kTwoPi / f.grid().length;
  // Rotation recurrence with periodic re-anchoring to bound drift.
  const std::complex<double> step = std::polar(1.0, k1 * x);
  std::complex<double> phase = step;
  double acc = c[0].real();
  for (std::size_t m = 1; m < half; ++m) {
    if ((m & 511u) == 0) phase = std::polar(1.0, k1 * x * static_cast<double>(m));
    acc += 2.0 * (c[m] * phase).real();
    phase *= step;
  }
  phase = std::polar(1.0, k1 * x * static_cast<double>(half));
  acc += (c[half] * phase).real();
  return acc;
}

namespace {
constexpr std::size_t kExactSampleLimit = 16384;
constexpr std::size_t kOversample = 4;
constexpr int kStencil = 12;  // points per local Lagrange fit
}  // namespace

double second_difference(const GridFunction& f, double x, double y) {
  if (f.grid().n > kExactSampleLimit)
    return 2.0 * f.sample(x) - f.sample(x + y) - f.sample(x - y);
  const auto& c = f.spectrum();
  const std::size_t half = f.grid().n / 2;
  const double k1 = kTwoPi / f.grid().length;
  const std::complex<double> sx = std::polar(1.0, k1 * x);
  std::complex<double> px = sx;
  // Half-angle recurrence so each mode uses sin^2(m y / 2), keeping the
  // contribution accurate relative to itself rather than to the field.
  const double ch = std::cos(0.5 * k1 * y);
  const double sh = std::sin(0.5 * k1 * y);
  double cm = ch, sm = sh;
  double acc = 0.0;
  for (std::size_t m = 1; m < half; ++m) {
    if ((m & 255u) == 0) {
      px = std::polar(1.0, k1 * x * static_cast<double>(m));
      const double a = 0.5 * k1 * y * static_cast<double>(m);
      cm = std::cos(a);
      sm = std::sin(a);
    }
    acc += (c[m] * px).real() * (sm * sm);
    px *= sx;
    const double nc = cm * ch - sm * sh;
    sm = sm * ch + cm * sh;
    cm = nc;
  }
  {
    const double a = 0.5 * k1 * y * static_cast<double>(half);
    const double s = std::sin(a);
    acc += 0.5 * c[half].real() * std::cos(k1 * x * static_cast<double>(half)) * s * s;
  }
  return 8.0 * acc;
}

void GridFunction::ensure_sample_table() const {
  if (sample_table_) return;
  const std::size_t big = grid_.n * kOversample;
  std::vector<std::complex<double>> padded(big / 2 + 1, 0.0);
  const auto& c = spectrum();
  for (std::size_t m = 0; m < c.size(); ++m) padded[m] = c[m];
  // The original Nyquist coefficient becomes an ordinary (doubled) mode
  // in the padded representation, so halve it to keep the same function.
  padded[grid_.n / 2] = std::complex<double>(0.5 * c[grid_.n / 2].real(), 0.0);
  auto plan = detail::plan_for(big);
  auto table = std::make_shared<std::vector<double>>();
  plan->inverse(padded, *table);
  sample_table_ = std::move(table);
}

double GridFunction::sample(double x) const {
  if (grid_.n <= kExactSampleLimit) return fourier_eval(*this, x);
  ensure_sample_table();
  const auto& t = *sample_table_;
  const std::size_t big = t.size();
  const double hb = grid_.length / static_cast<double>(big);
  double u = x / hb;
  double base = std::floor(u);
  const double frac = u - base;
  long i0 = static_cast<long>(base) - (kStencil / 2 - 1);
  // Barycentric Lagrange on a uniform stencil around x.
  static const auto weights = [] {
    std::array<double, kStencil> w{};
    for (int i = 0; i < kStencil; ++i) {
      double p = 1.0;
      for (int j = 0; j < kStencil; ++j)
        if (j != i) p *= static_cast<double>(i - j);
      w[i] = 1.0 / p;
    }
    return w;
  }();
  double num = 0.0, den = 0.0;
  const double s = frac + (kStencil / 2 - 1);
  for (int i = 0; i < kStencil; ++i) {
    const double d = s - i;
    const long idx = ((i0 + i) % static_cast<long>(big) + static_cast<long>(big)) %
                     static_cast<long>(big);
    if (std::fabs(d) < 1e-12) return t[static_cast<std::size_t>(idx)];
    const double q = weights[i] / d;
    num += q * t[static_cast<std::size_t>(idx)];
    den += q;
  }
  return num / den;
}

}  // namespace hflow

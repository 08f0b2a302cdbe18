#include "mfg/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace mfg {

struct FourierTransform::Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
  ~Plans() {
    if (r2c != nullptr) fftw_destroy_plan(r2c);
    if (c2r != nullptr) fftw_destroy_plan(c2r);
  }
};

namespace {

// The FFTW planner is not thread-safe; execution with new arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::shared_ptr<const FourierTransform::Plans> plans_for(int d, int n, std::size_t real_size,
                                                        std::size_t spec_size);

}  // namespace

FourierTransform::FourierTransform(const TorusGrid& grid) : grid_(grid) {
  const int d = grid.dim();
  const int n = grid.points_per_axis();
  spectrum_size_ = static_cast<std::size_t>(n / 2 + 1);
  for (int i = 0; i < d - 1; ++i) spectrum_size_ *= static_cast<std::size_t>(n);
  plans_ = plans_for(d, n, grid.size(), spectrum_size_);

  symbol_.resize(spectrum_size_);
  const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
  const std::size_t half = static_cast<std::size_t>(n / 2 + 1);
  std::vector<double> axis_symbol(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double s = std::sin(std::numbers::pi * k / n);
    axis_symbol[k] = 4.0 * s * s * inv_h2;
  }
  for (std::size_t idx = 0; idx < spectrum_size_; ++idx) {
    std::size_t rest = idx;
    double lam = axis_symbol[rest % half];
    rest /= half;
    for (int axis = 0; axis < d - 1; ++axis) {
      lam += axis_symbol[rest % static_cast<std::size_t>(n)];
      rest /= static_cast<std::size_t>(n);
    }
    symbol_[idx] = lam;
  }
}

void FourierTransform::forward(std::span<const double> in,
                               std::span<std::complex<double>> out) const {
  if (in.size() != grid_.size() || out.size() != spectrum_size_)
    throw std::invalid_argument("FourierTransform::forward: size mismatch");
  // r2c plans preserve their input by default.
  fftw_execute_dft_r2c(plans_->r2c, const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void FourierTransform::inverse(std::span<const std::complex<double>> in,
                               std::span<double> out) const {
  if (out.size() != grid_.size() || in.size() != spectrum_size_)
    throw std::invalid_argument("FourierTransform::inverse: size mismatch");
  std::vector<std::complex<double>> scratch(in.begin(), in.end());
  fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
  const double scale = 1.0 / static_cast<double>(grid_.size());
  for (double& v : out) v *= scale;
}

namespace {

std::shared_ptr<const FourierTransform::Plans> plans_for(int d, int n, std::size_t real_size,
                                                        std::size_t spec_size) {
  std::lock_guard lock(planner_mutex());
  static std::map<std::pair<int, int>, std::shared_ptr<const FourierTransform::Plans>> cache;
  auto it = cache.find({d, n});
  if (it != cache.end()) return it->second;

  auto plans = std::make_shared<FourierTransform::Plans>();
  std::vector<int> dims(static_cast<std::size_t>(d), n);
  double* real = fftw_alloc_real(real_size);
  fftw_complex* cplx = fftw_alloc_complex(spec_size);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plans->r2c = fftw_plan_dft_r2c(d, dims.data(), real, cplx, flags);
  plans->c2r = fftw_plan_dft_c2r(d, dims.data(), cplx, real, flags);
  fftw_free(real);
  fftw_free(cplx);
  if (plans->r2c == nullptr || plans->c2r == nullptr)
    throw std::runtime_error("FourierTransform: FFTW planning failed");
  cache.emplace(std::pair{d, n}, plans);
  return plans;
}

}  // namespace

ImplicitDiffusion::ImplicitDiffusion(const TorusGrid& grid, double dt) : fft_(grid) {
  if (!(dt > 0.0)) throw std::invalid_argument("ImplicitDiffusion: dt must be positive");
  const auto& sym = fft_.neg_laplacian_symbol();
  inv_symbol_.resize(sym.size());
  for (std::size_t i = 0; i < sym.size(); ++i) inv_symbol_[i] = 1.0 / (1.0 + dt * sym[i]);
}

void ImplicitDiffusion::solve(std::span<const double> rhs, std::span<double> out) const {
  std::vector<std::complex<double>> spec(fft_.spectrum_size());
  fft_.forward(rhs, spec);
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= inv_symbol_[i];
  fft_.inverse(spec, out);
}

void ImplicitDiffusion::solve(const ScalarField& rhs, ScalarField& out) const {
  solve(rhs.values(), out.values());
}

}  // namespace mfg

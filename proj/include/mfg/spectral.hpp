#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "mfg/grid.hpp"

namespace mfg {

/// Real-to-complex DFT on a torus grid (FFTW backed). Plans are shared
/// process-wide; execution is safe from concurrent threads.
class FourierTransform {
 public:
  explicit FourierTransform(const TorusGrid& grid);

  const TorusGrid& grid() const noexcept { return grid_; }
  /// Length of the half-spectrum (last axis truncated to n/2+1).
  std::size_t spectrum_size() const noexcept { return spectrum_size_; }

  void forward(std::span<const double> in, std::span<std::complex<double>> out) const;
  /// Normalized inverse: inverse(forward(f)) == f.
  void inverse(std::span<const std::complex<double>> in, std::span<double> out) const;

  /// Eigenvalue of -laplacian (the 2d+1 stencil) for each half-spectrum entry.
  const std::vector<double>& neg_laplacian_symbol() const noexcept { return symbol_; }

  struct Plans;  // opaque

 private:
  TorusGrid grid_;
  std::size_t spectrum_size_;
  std::shared_ptr<const Plans> plans_;
  std::vector<double> symbol_;
};

/// Solves (I - dt * laplacian) x = y exactly by diagonalization.
class ImplicitDiffusion {
 public:
  ImplicitDiffusion(const TorusGrid& grid, double dt);

  void solve(std::span<const double> rhs, std::span<double> out) const;
  void solve(const ScalarField& rhs, ScalarField& out) const;

 private:
  FourierTransform fft_;
  std::vector<double> inv_symbol_;
};

}  // namespace mfg

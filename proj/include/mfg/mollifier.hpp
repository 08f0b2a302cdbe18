#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "mfg/grid.hpp"
#include "mfg/spectral.hpp"

namespace mfg {

/// Periodized Gaussian of standard deviation epsilon, truncated at 6 epsilon
/// and renormalized to unit discrete mass. Immutable once built.
class Mollifier {
 public:
  Mollifier(const TorusGrid& grid, double epsilon);

  double epsilon() const noexcept { return epsilon_; }
  const TorusGrid& grid() const noexcept { return kernel_.grid(); }
  const ScalarField& kernel() const noexcept { return kernel_; }

  struct Offset {
    std::array<int, 3> shift;
    double weight;  // h^d * kernel value
  };
  /// Nonzero kernel entries, for direct summation.
  const std::vector<Offset>& support() const noexcept { return support_; }
  const std::vector<std::complex<double>>& spectrum() const noexcept { return spectrum_; }
  const FourierTransform& transform() const noexcept { return fft_; }

  static constexpr double truncation_widths = 6.0;

 private:
  double epsilon_;
  ScalarField kernel_;
  std::vector<Offset> support_;
  FourierTransform fft_;
  std::vector<std::complex<double>> spectrum_;
};

enum class ConvolutionPath { automatic, direct, spectral };

/// Direct summation is used automatically on grids of at most 64 points per
/// axis and at most 4096 nodes; larger grids use the transform.
bool uses_direct_path(const TorusGrid& grid);

/// Circular convolution eta * f with the discrete measure h^d.
ScalarField mollify(const ScalarField& f, const Mollifier& moll,
                    ConvolutionPath path = ConvolutionPath::automatic);

}  // namespace mfg

#include "mfg/mollifier.hpp"

#include <cmath>
#include <stdexcept>

#include "mfg/error.hpp"

namespace mfg {
namespace {

// Truncation is radial, so periodic images are enumerated jointly over all axes.
double periodized_weight(const Vec3& x, int d, double eps) {
  const double cutoff = Mollifier::truncation_widths * eps;
  const int reach = static_cast<int>(std::ceil(cutoff)) + 1;
  double acc = 0.0;
  std::array<int, 3> lo{0, 0, 0};
  std::array<int, 3> hi{0, 0, 0};
  for (int i = 0; i < d; ++i) {
    lo[i] = -reach;
    hi[i] = reach;
  }
  for (int a = lo[0]; a <= hi[0]; ++a) {
    for (int b = lo[1]; b <= hi[1]; ++b) {
      for (int c = lo[2]; c <= hi[2]; ++c) {
        const double dx = x[0] + a;
        const double dy = x[1] + b;
        const double dz = x[2] + c;
        const double r2 = dx * dx + dy * dy + dz * dz;
        if (r2 <= cutoff * cutoff) acc += std::exp(-r2 / (2.0 * eps * eps));
      }
    }
  }
  return acc;
}

}  // namespace

Mollifier::Mollifier(const TorusGrid& grid, double epsilon)
    : epsilon_(epsilon), kernel_(grid), fft_(grid) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw std::invalid_argument("Mollifier: epsilon must be positive");
  const int d = grid.dim();
  const int n = grid.points_per_axis();
  std::vector<double> values(grid.size());
  for (std::size_t node = 0; node < grid.size(); ++node) {
    // signed offset in (-1/2, 1/2] per axis
    Vec3 x{0.0, 0.0, 0.0};
    for (int i = 0; i < d; ++i) {
      int c = grid.coord(node, i);
      if (2 * c > n) c -= n;
      x[i] = c * grid.spacing();
    }
    values[node] = periodized_weight(x, d, epsilon);
  }
  double total = 0.0;
  for (double v : values) total += v;
  const double scale = 1.0 / (total * grid.cell_volume());
  for (double& v : values) v *= scale;
  // Enforce exact evenness of the stored kernel.
  for (std::size_t node = 0; node < grid.size(); ++node) {
    std::array<int, 3> mirror{0, 0, 0};
    for (int i = 0; i < d; ++i) mirror[i] = -grid.coord(node, i);
    const std::size_t m = grid.node_at(mirror);
    if (m > node) {
      const double avg = 0.5 * (values[node] + values[m]);
      values[node] = values[m] = avg;
    }
  }
  kernel_ = ScalarField(grid, std::move(values));

  for (std::size_t node = 0; node < grid.size(); ++node) {
    if (kernel_[node] == 0.0) continue;
    Offset off{{0, 0, 0}, kernel_[node] * grid.cell_volume()};
    for (int i = 0; i < d; ++i) off.shift[i] = grid.coord(node, i);
    support_.push_back(off);
  }
  spectrum_.resize(fft_.spectrum_size());
  fft_.forward(kernel_.values(), spectrum_);
}

bool uses_direct_path(const TorusGrid& grid) {
  return grid.points_per_axis() <= 64 && grid.size() <= 4096;
}

ScalarField mollify(const ScalarField& f, const Mollifier& moll, ConvolutionPath path) {
  const TorusGrid& grid = f.grid();
  if (!(grid == moll.grid())) throw GridMismatchError("mollify: field and kernel grids differ");
  if (path == ConvolutionPath::automatic)
    path = uses_direct_path(grid) ? ConvolutionPath::direct : ConvolutionPath::spectral;

  ScalarField out(grid);
  if (path == ConvolutionPath::direct) {
    const int d = grid.dim();
    for (std::size_t node = 0; node < grid.size(); ++node) {
      std::array<int, 3> base{0, 0, 0};
      for (int i = 0; i < d; ++i) base[i] = grid.coord(node, i);
      double acc = 0.0;
      for (const auto& off : moll.support()) {
        const std::array<int, 3> src{base[0] - off.shift[0], base[1] - off.shift[1],
                                     base[2] - off.shift[2]};
        acc += off.weight * f[grid.node_at(src)];
      }
      out[node] = acc;
    }
    return out;
  }

  const FourierTransform& fft = moll.transform();
  std::vector<std::complex<double>> spec(fft.spectrum_size());
  fft.forward(f.values(), spec);
  const double h_d = grid.cell_volume();
  const auto& k = moll.spectrum();
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= k[i] * h_d;
  fft.inverse(spec, out.values());
  return out;
}

}  // namespace mfg

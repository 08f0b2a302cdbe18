#include <doctest.h>

#include <cmath>

#include "mfg/error.hpp"
#include "mfg/mollifier.hpp"
#include "mfg/spectral.hpp"
#include "support.hpp"

using namespace mfg;
using testing::pi;

namespace {

// Independent O(N^2) periodic convolution h^d sum_j K(i - j) f(j).
ScalarField direct_convolution(const ScalarField& K, const ScalarField& f) {
  const TorusGrid& g = f.grid();
  const int d = g.dim();
  ScalarField out(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      std::array<int, 3> diff{0, 0, 0};
      for (int a = 0; a < d; ++a) diff[a] = g.coord(i, a) - g.coord(j, a);
      acc += K[g.node_at(diff)] * f[j];
    }
    out[i] = acc * g.cell_volume();
  }
  return out;
}

}  // namespace

TEST_CASE("forward then inverse transform is the identity") {
  std::mt19937_64 rng(5);
  for (int d = 1; d <= 3; ++d) {
    const TorusGrid g(d, 8);
    const FourierTransform fft(g);
    const ScalarField f = testing::random_field(g, rng);
    std::vector<std::complex<double>> spec(fft.spectrum_size());
    fft.forward(f.values(), spec);
    ScalarField back(g);
    fft.inverse(spec, back.values());
    CHECK(testing::max_diff(f, back) <= 1e-14);
  }
}

TEST_CASE("implicit diffusion solve inverts I - dt laplacian") {
  std::mt19937_64 rng(6);
  for (int d = 1; d <= 3; ++d) {
    const TorusGrid g(d, d == 3 ? 8 : 16);
    const double dt = 1e-3;
    const ScalarField x = testing::random_field(g, rng);
    const ScalarField lx = laplacian(x);
    ScalarField y(g);
    for (std::size_t i = 0; i < g.size(); ++i) y[i] = x[i] - dt * lx[i];
    ScalarField sol(g);
    ImplicitDiffusion(g, dt).solve(y, sol);
    CHECK(testing::max_diff(sol, x) <= 1e-12);
  }
}

TEST_CASE("mollifier kernel invariants") {
  for (int d = 1; d <= 3; ++d) {
    const TorusGrid g(d, d == 3 ? 16 : 64);
    for (double eps : {0.2, 0.05, 0.01}) {
      const Mollifier m(g, eps);
      const ScalarField& K = m.kernel();
      CHECK(min_value(K) >= 0.0);
      CHECK(std::abs(mass(K) - 1.0) <= 1e-12);
      for (std::size_t i = 0; i < g.size(); ++i) {
        std::array<int, 3> mirror{0, 0, 0};
        for (int a = 0; a < d; ++a) mirror[a] = -g.coord(i, a);
        CHECK(K[i] == K[g.node_at(mirror)]);
      }
    }
  }
  CHECK_THROWS_AS(Mollifier(TorusGrid(1, 8), 0.0), std::invalid_argument);
}

TEST_CASE("mollify of a constant is the constant") {
  const TorusGrid g(2, 32);
  const Mollifier m(g, 0.1);
  const ScalarField out = mollify(ScalarField(g, 1.0), m);
  CHECK(testing::max_diff(out, ScalarField(g, 1.0)) <= 1e-12);
}

TEST_CASE("mollify of a discrete delta is the kernel") {
  const TorusGrid g(1, 64);
  const Mollifier m(g, 0.05);
  ScalarField delta(g);
  delta[0] = 1.0 / g.cell_volume();
  for (auto path : {ConvolutionPath::direct, ConvolutionPath::spectral})
    CHECK(testing::max_diff(mollify(delta, m, path), m.kernel()) <= 1e-10);
}

TEST_CASE("mollified cosine mode is damped, checked against direct summation") {
  const TorusGrid g(1, 256);  // transform path
  CHECK_FALSE(uses_direct_path(g));
  const Mollifier m(g, 0.05);
  const ScalarField f =
      ScalarField::from_function(g, [](const Vec3& x) { return std::cos(2 * pi * x[0]); });
  const ScalarField fast = mollify(f, m);
  const ScalarField slow = direct_convolution(m.kernel(), f);
  CHECK(testing::max_diff(fast, slow) <= 1e-10);
  // a single-mode input stays a single mode: c = out(0)/f(0), same at every node
  const double c = slow[0];
  CHECK(c > 0.0);
  CHECK(c < 1.0);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(slow[i] - c * f[i]) <= 1e-12);
}

TEST_CASE("direct and transform paths agree to 1e-10") {
  std::mt19937_64 rng(7);
  for (int d = 1; d <= 3; ++d) {
    const TorusGrid g(d, d == 1 ? 64 : (d == 2 ? 32 : 8));
    const Mollifier m(g, 0.07);
    const ScalarField f = testing::random_field(g, rng, 0.0, 2.0);
    const ScalarField a = mollify(f, m, ConvolutionPath::direct);
    const ScalarField b = mollify(f, m, ConvolutionPath::spectral);
    CHECK(testing::max_diff(a, b) <= 1e-10);
  }
}

TEST_CASE("mollification preserves mass and is a max-norm contraction") {
  std::mt19937_64 rng(8);
  const TorusGrid g(2, 24);
  const Mollifier m(g, 0.08);
  const ScalarField f = testing::random_field(g, rng, -1.0, 3.0);
  const ScalarField out = mollify(f, m);
  CHECK(std::abs(mass(out) - mass(f)) <= 1e-12);
  CHECK(min_value(out) >= min_value(f) - 1e-14);
  CHECK(max_value(out) <= max_value(f) + 1e-14);
  CHECK(max_abs(out) <= max_abs(f) + 1e-14);
}

TEST_CASE("mollify rejects mismatched grids") {
  const Mollifier m(TorusGrid(1, 16), 0.1);
  CHECK_THROWS_AS(mollify(ScalarField(TorusGrid(1, 32)), m), GridMismatchError);
}

#include "rsl/rand_field.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace rsl {

namespace {

class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

  // Box-Muller on explicitly constructed uniforms; avoids unspecified
  // std::normal_distribution internals.
  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform_open();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  double uniform_open() {
    // in (0,1]: 53-bit mantissa, never zero so log() is safe
    return (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
  }

  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Enumerate one representative per {k, -k} pair: first nonzero entry positive.
std::vector<std::array<int, 3>> half_band(int dim, int kmax) {
  std::vector<std::array<int, 3>> ks;
  const int lo2 = dim > 2 ? -kmax : 0, hi2 = dim > 2 ? kmax : 0;
  for (int k2 = lo2; k2 <= hi2; ++k2)
    for (int k1 = -kmax; k1 <= kmax; ++k1)
      for (int k0 = -kmax; k0 <= kmax; ++k0) {
        if (k0 == 0 && k1 == 0 && k2 == 0) continue;
        int first = k0 != 0 ? k0 : (k1 != 0 ? k1 : k2);
        if (first < 0) continue;
        ks.push_back({k0, k1, k2});
      }
  return ks;
}

void synthesize(const GridSpec& g, std::uint64_t seed, int kmax,
                double amplitude, int ncomp, std::span<double> out) {
  if (!(amplitude >= 0.0))
    throw std::invalid_argument("perturbation amplitude must be >= 0");
  std::fill(out.begin(), out.end(), 0.0);
  if (amplitude == 0.0) return;
  if (kmax < 1) throw std::invalid_argument("max_wavenumber must be >= 1");

  GaussianStream gauss(seed);
  const auto ks = half_band(g.dim, kmax);
  const std::size_t nodes = g.node_count();

  // phase table per wavevector, reused across components
  std::vector<double> phase(nodes);
  for (const auto& k : ks) {
    for (std::size_t n = 0; n < nodes; ++n) {
      const auto c = g.node_coords(n);
      double p = 0.0;
      for (int a = 0; a < g.dim; ++a)
        p += 2.0 * M_PI * k[a] * c[a] / g.points_per_axis;
      phase[n] = p;
    }
    for (int comp = 0; comp < ncomp; ++comp) {
      const double ac = gauss.next();
      const double bc = gauss.next();
      for (std::size_t n = 0; n < nodes; ++n)
        out[n * ncomp + comp] += ac * std::cos(phase[n]) + bc * std::sin(phase[n]);
    }
  }

  double sup = 0.0;
  for (double x : out) sup = std::max(sup, std::abs(x));
  if (sup == 0.0) return;
  const double s = amplitude / sup;
  for (double& x : out) x *= s;
}

}  // namespace

SymTensorField band_limited_perturbation(const GridSpec& g, std::uint64_t seed,
                                         int max_wavenumber, double amplitude) {
  SymTensorField h(g);
  synthesize(g, seed, max_wavenumber, amplitude, g.sym_components(), h.data());
  return h;
}

VectorField band_limited_vector(const GridSpec& g, std::uint64_t seed,
                                int max_wavenumber, double amplitude) {
  VectorField x(g);
  synthesize(g, seed, max_wavenumber, amplitude, g.dim, x.data());
  return x;
}

ScalarField band_limited_scalar(const GridSpec& g, std::uint64_t seed,
                                int max_wavenumber, double amplitude) {
  ScalarField f(g);
  synthesize(g, seed, max_wavenumber, amplitude, 1, f.data());
  return f;
}

}  // namespace rsl

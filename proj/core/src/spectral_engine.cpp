#include "spectral_engine.hpp"

#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <stdexcept>

namespace rsl {

namespace {
std::mutex g_planner_mutex;  // FFTW planning is not thread-safe
}

SpectralEngine::SpectralEngine(int dim, int n) : dim_(dim), n_(n) {
  real_size_ = 1;
  for (int a = 0; a < dim; ++a) real_size_ *= static_cast<std::size_t>(n);
  complex_size_ = (real_size_ / n) * (n / 2 + 1);

  real_buf_ = fftw_alloc_real(real_size_);
  complex_buf_ = fftw_alloc_complex(complex_size_);
  if (!real_buf_ || !complex_buf_) throw std::bad_alloc();

  std::array<int, 3> dims{n, n, n};  // all axes share N
  std::lock_guard<std::mutex> lock(g_planner_mutex);
  fwd_ = fftw_plan_dft_r2c(dim, dims.data(), real_buf_, complex_buf_,
                           FFTW_ESTIMATE);
  bwd_ = fftw_plan_dft_c2r(dim, dims.data(), complex_buf_, real_buf_,
                           FFTW_ESTIMATE);
  if (!fwd_ || !bwd_) throw std::runtime_error("fftw plan creation failed");
}

SpectralEngine::~SpectralEngine() {
  fftw_destroy_plan(fwd_);
  fftw_destroy_plan(bwd_);
  fftw_free(real_buf_);
  fftw_free(complex_buf_);
}

void SpectralEngine::forward(std::span<const double> in) {
  std::memcpy(real_buf_, in.data(), real_size_ * sizeof(double));
  fftw_execute(fwd_);
}

void SpectralEngine::inverse(std::span<double> out) {
  fftw_execute(bwd_);
  const double scale = 1.0 / static_cast<double>(real_size_);
  for (std::size_t i = 0; i < real_size_; ++i) out[i] = real_buf_[i] * scale;
}

void SpectralEngine::derivative(std::span<const double> in,
                                std::span<double> out, int axis, int order,
                                const std::array<double, 3>& side_lengths) {
  std::lock_guard<std::mutex> lock(mutex_);
  forward(in);

  const int n = n_;
  const int ncut = n / 2 + 1;
  const double two_pi = 2.0 * M_PI;

  // complex index -> integer frequency per grid axis
  // layout (dim 3): idx = (i2 * n + i1) * ncut + i0, grid axis a=0 is cut
  const std::size_t total = complex_size_;
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::array<int, 3> f{0, 0, 0};
    std::size_t rem = idx;
    f[0] = static_cast<int>(rem % ncut);
    rem /= ncut;
    for (int a = 1; a < dim_; ++a) {
      f[a] = static_cast<int>(rem % n);
      rem /= n;
    }
    int k = f[axis];
    bool nyquist = false;
    if (axis == 0) {
      nyquist = (n % 2 == 0 && k == n / 2);
    } else {
      if (k > n / 2) k -= n;
      nyquist = (n % 2 == 0 && k == n / 2);
    }
    const double theta = two_pi * k / side_lengths[axis];
    double re = complex_buf_[idx][0];
    double im = complex_buf_[idx][1];
    if (order == 1) {
      if (nyquist) {
        re = im = 0.0;
      } else {
        const double nre = -theta * im;
        const double nim = theta * re;
        re = nre;
        im = nim;
      }
    } else {
      const double s = -theta * theta;
      re *= s;
      im *= s;
    }
    complex_buf_[idx][0] = re;
    complex_buf_[idx][1] = im;
  }

  inverse(out);
}

void SpectralEngine::apply_multiplier(
    std::span<const double> in, std::span<double> out,
    const std::function<double(const std::array<int, 3>&)>& m) {
  std::lock_guard<std::mutex> lock(mutex_);
  forward(in);

  const int n = n_;
  const int ncut = n / 2 + 1;
  for (std::size_t idx = 0; idx < complex_size_; ++idx) {
    std::array<int, 3> k{0, 0, 0};
    std::size_t rem = idx;
    k[0] = static_cast<int>(rem % ncut);
    rem /= ncut;
    for (int a = 1; a < dim_; ++a) {
      int ka = static_cast<int>(rem % n);
      rem /= n;
      if (ka > n / 2) ka -= n;
      k[a] = ka;
    }
    const double s = m(k);
    complex_buf_[idx][0] *= s;
    complex_buf_[idx][1] *= s;
  }

  inverse(out);
}

SpectralEngine& SpectralEngine::instance(const GridSpec& g) {
  static std::mutex registry_mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<SpectralEngine>> registry;
  std::lock_guard<std::mutex> lock(registry_mutex);
  auto key = std::make_pair(g.dim, g.points_per_axis);
  auto it = registry.find(key);
  if (it == registry.end()) {
    it = registry
             .emplace(key, std::make_unique<SpectralEngine>(g.dim,
                                                            g.points_per_axis))
             .first;
  }
  return *it->second;
}

}  // namespace rsl

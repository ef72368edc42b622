#pragma once

#include <array>
#include <functional>
#include <mutex>
#include <span>

#include <fftw3.h>

#include "rsl/grid.hpp"

namespace rsl {

/// FFTW-backed Fourier-multiplier calculus for one (dim, N) layout.
///
/// Plans are created with FFTW_ESTIMATE so the chosen algorithm, and hence
/// the bitwise result, does not depend on runtime timing.  Our node order is
/// axis-0 fastest, so FFTW dimension r corresponds to grid axis (dim-1-r) and
/// axis 0 is the halved r2c axis.
class SpectralEngine {
 public:
  SpectralEngine(int dim, int n);
  ~SpectralEngine();

  SpectralEngine(const SpectralEngine&) = delete;
  SpectralEngine& operator=(const SpectralEngine&) = delete;

  /// Single-component derivative; in/out are contiguous N^dim arrays.
  /// order 1 uses the symbol i*theta with the Nyquist coefficient zeroed;
  /// order 2 uses -theta^2 on every resolved mode.
  void derivative(std::span<const double> in, std::span<double> out, int axis,
                  int order, const std::array<double, 3>& side_lengths);

  /// out = IFFT( m(k) * FFT(in) ) with k the integer wavevector per axis
  /// (negative frequencies reported negative, Nyquist as +N/2).
  void apply_multiplier(std::span<const double> in, std::span<double> out,
                        const std::function<double(const std::array<int, 3>&)>& m);

  static SpectralEngine& instance(const GridSpec& g);

 private:
  void forward(std::span<const double> in);
  void inverse(std::span<double> out);

  int dim_;
  int n_;
  std::size_t real_size_;
  std::size_t complex_size_;
  double* real_buf_;
  fftw_complex* complex_buf_;
  fftw_plan fwd_;
  fftw_plan bwd_;
  std::mutex mutex_;
};

}  // namespace rsl

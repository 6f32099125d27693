/**
 * @file kernels.hpp
 * @brief Hot numeric kernels. Each has a serial reference and an OpenMP version.
 */
#ifndef REFOFDM_KERNELS_HPP
#define REFOFDM_KERNELS_HPP

#include "refofdm/types.hpp"

namespace refofdm {

enum class Exec { Serial, Parallel };

/// Inputs at or above this length use the overlap-save path in convolve().
constexpr std::size_t kOverlapSaveThreshold = 4096;

/// Full linear convolution, output length x.size() + h.size() - 1.
cvec convolve_direct(const cvec& x, const rvec& h, Exec exec = Exec::Parallel);
cvec convolve_direct(const cvec& x, const cvec& h, Exec exec = Exec::Parallel);
cvec convolve_overlap_save(const cvec& x, const rvec& h);
cvec convolve_overlap_save(const cvec& x, const cvec& h);
cvec convolve(const cvec& x, const rvec& h);
cvec convolve(const cvec& x, const cvec& h);

/// Σ_n h[n] e^{-jω n} at each ω (radians/sample).
cvec dtft(const rvec& h, const rvec& omegas, Exec exec = Exec::Parallel);
cvec dtft(const cvec& h, const rvec& omegas, Exec exec = Exec::Parallel);

/**
 * Time-varying tapped delay line: y[n] = Σ_l taps[l][n] · x[n - delays[l]].
 * Output has the input length; samples before the start are zero.
 */
cvec tdl_propagate(const cvec& x, const std::vector<cvec>& taps, const std::vector<int>& delays,
                   Exec exec = Exec::Parallel);

}  // namespace refofdm

#endif

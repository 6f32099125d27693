/**
 * @file ofdm.hpp
 * @brief 128-point OFDM symbol synthesis/analysis and the ×2 halfband resampler.
 */
#ifndef REFOFDM_OFDM_HPP
#define REFOFDM_OFDM_HPP

#include "refofdm/types.hpp"

namespace refofdm {

/// Grid index k carries frequency (k − 64)·Δf. Inverse DFT scaled 1/K.
ComplexSignal ofdm_modulate(const std::vector<cvec>& grid, int cp);
/// Forward DFT of 128 samples, returned in grid order.
cvec ofdm_demodulate_symbol(const cplx* samples);

/// Equiripple lowpass used for ×2 interpolation and decimation.
const rvec& halfband_taps();
/// Output length is exactly 2× input; sample 2m aligns with input m.
ComplexSignal interpolate2(const ComplexSignal& s);
/// Output length is ceil(n/2); sample m aligns with input 2m.
ComplexSignal decimate2(const ComplexSignal& s);

ComplexSignal frequency_shift(const ComplexSignal& s, double hz);

}  // namespace refofdm

#endif

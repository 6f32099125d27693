/**
 * @file fft.hpp
 * @brief Radix-2 complex FFT with an optional multiplication counter.
 */
#ifndef REFOFDM_FFT_HPP
#define REFOFDM_FFT_HPP

#include <cstdint>

#include "refofdm/types.hpp"

namespace refofdm {

/**
 * In-place iterative radix-2 FFT. Forward uses e^{-j2πkn/N}; inverse is
 * unscaled. If mults is non-null it is incremented by the number of complex
 * twiddle multiplications performed.
 */
void fft_inplace(cvec& x, bool inverse, std::uint64_t* mults = nullptr);

cvec fft(const cvec& x);
/// Inverse DFT scaled by 1/N.
cvec ifft(const cvec& x);

bool is_pow2(std::size_t n);
std::size_t next_pow2(std::size_t n);

}  // namespace refofdm

#endif

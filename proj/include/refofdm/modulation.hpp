/**
 * @file modulation.hpp
 * @brief Gray-mapped QPSK, 16-QAM and 64-QAM with unit average energy.
 */
#ifndef REFOFDM_MODULATION_HPP
#define REFOFDM_MODULATION_HPP

#include <string>

#include "refofdm/types.hpp"

namespace refofdm {

enum class Modulation { QPSK, QAM16, QAM64 };

int bits_per_symbol(Modulation m);
int constellation_order(Modulation m);
std::string to_string(Modulation m);
Modulation modulation_from_string(const std::string& s);

/**
 * Bits per axis: first bit selects the sign (0 positive), the rest Gray-code
 * the magnitude. The first half of a symbol's bits drive I, the second half Q.
 * QPSK 00 maps to (1+j)/√2.
 */
cvec modulate(const bits_t& bits, Modulation m);
bits_t demodulate(const cvec& symbols, Modulation m);
/// Same as demodulate, but symbols flagged in erased produce kErased bits.
bits_t demodulate(const cvec& symbols, Modulation m, const std::vector<bool>& erased);

}  // namespace refofdm

#endif

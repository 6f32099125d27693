/**
 * @file remez.hpp
 * @brief Parks-McClellan equiripple design of type-I linear-phase FIR filters.
 */
#ifndef REFOFDM_REMEZ_HPP
#define REFOFDM_REMEZ_HPP

#include "refofdm/types.hpp"

namespace refofdm {

struct RemezResult {
    rvec taps;          ///< symmetric, odd length
    double ripple = 0;  ///< weighted equiripple deviation |δ|
    int iterations = 0;
};

/**
 * Multi-band equiripple design.
 *
 * @param numtaps odd filter length
 * @param edges band edges as fractions of π, ascending pairs
 * @param desired one amplitude per band
 * @param weights one weight per band
 * @throws DesignFailure when the exchange does not converge within max_iter
 */
RemezResult remez(int numtaps, const rvec& edges, const rvec& desired, const rvec& weights,
                  int max_iter = 250, int grid_density = 16);

}  // namespace refofdm

#endif

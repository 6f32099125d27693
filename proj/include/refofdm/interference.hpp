/**
 * @file interference.hpp
 * @brief DME pulse pairs, pulse streams, gated Gaussian interference and the
 *        closed-form DME band power.
 */
#ifndef REFOFDM_INTERFERENCE_HPP
#define REFOFDM_INTERFERENCE_HPP

#include "refofdm/types.hpp"

namespace refofdm {

struct DmeSignalParams {
    double alpha = 4.5e11;         ///< s⁻²
    double delta_t = 12e-6;        ///< s
    double amplitude = 1.0;
    double center_offset_hz = 0.0;
    double pulse_pair_rate_pps = 3600.0;

    bool operator==(const DmeSignalParams&) const = default;
};

struct GgiParams {
    double on_fraction = 0.5;
    int gate_period_samples = 1024;
    double power = 1.0;

    bool operator==(const GgiParams&) const = default;
};

void validate(const DmeSignalParams& p);
void validate(const GgiParams& p);

/// e^{−αt²/2} + e^{−α(t−Δt)²/2}
double dme_pulse_pair(const DmeSignalParams& p, double t);
/// A·√(8π/α)·e^{−2π²f²/α}·e^{jπfΔt}·cos(πfΔt)
cplx dme_spectrum(const DmeSignalParams& p, double f);

/// ∫_{f1}^{f2} |S(f)|² df in closed form.
double dme_interference_power(const DmeSignalParams& p, double f1, double f2);

/// Faddeeva function w(z) = e^{−z²}erfc(−iz) for Im z ≥ 0.
cplx faddeeva(cplx z);

/// Adds A·S(t − t0)·e^{jφ}·e^{j2πf_c t} on the sample grid t = n/fs.
void add_dme_pair(cvec& out, const DmeSignalParams& p, double t0, double sample_rate_hz, double phase);

/// Poisson-timed pulse pairs with uniform random carrier phase per pair.
ComplexSignal generate_dme_stream(const DmeSignalParams& p, double duration_s, double sample_rate_hz,
                                  std::uint64_t seed, rvec* pair_times = nullptr);

ComplexSignal generate_ggi(const GgiParams& p, std::size_t n_samples, std::uint64_t seed,
                           double sample_rate_hz = kLinkRateHz);

}  // namespace refofdm

#endif

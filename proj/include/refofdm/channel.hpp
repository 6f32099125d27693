/**
 * @file channel.hpp
 * @brief APT/TMA/ENR tapped-delay-line fading channels and AWGN.
 */
#ifndef REFOFDM_CHANNEL_HPP
#define REFOFDM_CHANNEL_HPP

#include <string>

#include "refofdm/kernels.hpp"
#include "refofdm/types.hpp"

namespace refofdm {

enum class Scenario { APT, TMA, ENR };
enum class Fading { Rayleigh, Rician };
enum class DopplerSpectrum { Jakes, Gaussian };

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& s);

constexpr double kKtasToMps = 0.5144;
constexpr double kSpeedOfLight = 3e8;
constexpr double kDefaultCarrierHz = 1215e6;
/// LOS term kept for the Rayleigh (APT) profile.
constexpr double kRayleighLosDb = -100.0;

struct ChannelProfile {
    Scenario scenario = Scenario::APT;
    Fading fading = Fading::Rayleigh;
    double rician_k_db = kRayleighLosDb;
    double max_delay_us = 0.0;
    int tap_count = 1;
    std::vector<int> tap_delays_samples{0};
    rvec tap_powers{1.0};
    DopplerSpectrum doppler_spectrum = DopplerSpectrum::Jakes;
    double doppler_hz = 0.0;
    int harmonics = 8;
    double speed_ktas = 0.0;
    double acceleration = 0.0;  ///< metadata only
    double sample_rate_hz = kLinkRateHz;
};

double doppler_hz(double fc_hz, double speed_ktas);

ChannelProfile build_channel(Scenario s, double sample_rate_hz = kLinkRateHz, double fc_hz = kDefaultCarrierHz);

/// Exponential power-delay profile, −3 dB per tap, unit total.
rvec default_tap_powers(int taps);

/// Empty string when the delay spread fits the cyclic prefix.
std::string delay_spread_warning(const ChannelProfile& p);

struct FadingRealization {
    std::vector<cvec> taps;  ///< [tap][sample]
    std::vector<int> delays;
    std::uint64_t seed = 0;
};

FadingRealization realize_fading(const ChannelProfile& p, std::size_t n_samples, std::uint64_t seed,
                                 Exec exec = Exec::Parallel);

ComplexSignal propagate(const ComplexSignal& s, const FadingRealization& r, Exec exec = Exec::Parallel);

/// Noise at measured signal power / SNR; zero input falls back to unit reference power.
ComplexSignal add_awgn(const ComplexSignal& s, double snr_db, std::uint64_t seed);
ComplexSignal add_noise(const ComplexSignal& s, double variance, std::uint64_t seed);

/**
 * Link-rate noise variance giving the requested Eb/N0 per channel bit in
 * each 128-point DFT bin after ×2 decimation (bin noise = K·σ²/2).
 */
double noise_variance_for_ebn0(double symbol_scale, double ebn0_db, int bits_per_symbol);

}  // namespace refofdm

#endif

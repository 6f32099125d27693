/**
 * @file analysis.hpp
 * @brief PSD estimation, interference metric, Monte-Carlo and theoretical BER,
 *        SINR and multiplication-count complexity.
 */
#ifndef REFOFDM_ANALYSIS_HPP
#define REFOFDM_ANALYSIS_HPP

#include <optional>
#include <string>

#include "refofdm/channel.hpp"
#include "refofdm/interference.hpp"
#include "refofdm/phy.hpp"

namespace refofdm {

/// Reported in place of −∞ dB.
constexpr double kDbFloor = -400.0;

struct SpectrumGrid {
    rvec frequencies_hz;
    rvec psd_db_per_hz;
    double resolution_hz = 0.0;
};

constexpr int kPsdSegment = 1024;
constexpr double kPsdOverlap = 0.5;

/// Welch estimate, Hann window, two-sided, centered on DC.
SpectrumGrid estimate_psd(const ComplexSignal& s, int segment_length = kPsdSegment,
                          double overlap_fraction = kPsdOverlap);

/// Trapezoidal integral of the linear PSD over [f1, f2], in dB.
double interference_at(const SpectrumGrid& psd, double f1, double f2);

/// DME main-lobe half width, 1/(2Δt).
double dme_main_lobe_half_width(const DmeSignalParams& p = {});

struct WilsonInterval {
    double center = 0.0;
    double low = 0.0;
    double high = 0.0;
    double halfwidth = 0.0;
};
WilsonInterval wilson_interval(std::uint64_t errors, std::uint64_t trials, double z);

struct BerCurve {
    rvec snr_db_points;
    rvec ber;
    std::vector<std::uint64_t> bit_counts;
    std::vector<std::uint64_t> error_counts;
    rvec confidence_halfwidth;  ///< 3σ Wilson half width
    rvec ci_low, ci_high;
};

constexpr double kWilsonZ = 3.0;

/// Another user sharing the channel; transmits independent random frames.
struct Interferer {
    TxConfig tx;
    double mix_hz = 0.0;
};

struct LinkScenario {
    enum class Mode { Waveform, Subcarrier };
    Mode mode = Mode::Waveform;

    TxConfig tx;
    std::optional<ChannelProfile> channel;
    std::optional<DmeSignalParams> dme;
    std::optional<GgiParams> ggi;
    bool genie_timing = false;
    bool genie_csi = false;
    double blank_threshold = 5.0;
    int max_timing_offset = 64;  ///< link-rate samples of leading silence
    double cfo_hz = 0.0;
    double mix_hz = 0.0;  ///< center of the desired user at the link rate
    std::vector<Interferer> interferers;

    /// Subcarrier mode: y = F'²hx + F'h_d d + F'n with independent Rayleigh h, h_d per cell.
    rvec filter_response{1.0};
    double dme_power = 0.0;  ///< relative to signal power
};

BerCurve run_ber_monte_carlo(const LinkScenario& sc, const rvec& snr_grid_db, std::uint64_t target_errors,
                             std::uint64_t max_bits, std::uint64_t seed, Exec exec = Exec::Parallel);

/// One simulated frame through the time-domain chain.
struct FrameOutcome {
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
};
FrameOutcome simulate_frame(const LinkScenario& sc, double ebn0_db, std::uint64_t seed);

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

struct SinrInputs {
    double signal_power = 1.0;
    double noise_power = 1.0;
    double dme_power = 0.0;
    rvec filter_response;
    cvec channel_gain;
    cvec dme_channel_gain;
    double mean_fading_power = 1.0;
};

/// F'⁴|H|²P / (F'²P_N + F'²|H_d|²P_DME); zero denominators give +∞.
rvec sinr_per_subcarrier(const SinrInputs& in);

struct TheoryConfig {
    Modulation modulation = Modulation::QPSK;
    rvec filter_response{1.0};  ///< F'_k over the averaged subcarriers
    double lambda_bar = 1.0;
    double lambda_d_bar = 1.0;
    double dme_power = 0.0;  ///< P_DME / P
    int order = 64;
};

struct TheoryResult {
    rvec snr_db;
    rvec ber;
    bool converged = true;
    std::string warning;
};

/// Nodes and weights for ∫₀^∞ e^{−x} f(x) dx (Golub–Welsch).
std::pair<rvec, rvec> gauss_laguerre(int order);

/// Conditional M-QAM BER at a given per-bit SINR.
double mqam_ber(Modulation m, double sinr_per_bit);
/// Eb/N0 axis: P/P_N0 = Eb/N0 per channel bit.
TheoryResult theoretical_ber(const TheoryConfig& cfg, const rvec& snr_grid_db);

struct ComplexityRow {
    Waveform waveform = Waveform::OFDM;
    int subcarriers = 0;
    int bands = 1;
    std::uint64_t ifft = 0;
    std::uint64_t filtering = 0;
    std::uint64_t dft_bank = 0;
    std::uint64_t total() const { return ifft + filtering + dft_bank; }
};

/// Real multiplications of an instrumented K-point radix-2 IFFT.
std::uint64_t counted_ifft_mults(int n_subcarriers);
/// Real multiplications per transmitted OFDM symbol.
ComplexityRow complexity_report(Waveform w, int n_subcarriers, int bands, int filter_length, int cp = kCpLength);

}  // namespace refofdm

#endif

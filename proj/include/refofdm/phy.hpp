/**
 * @file phy.hpp
 * @brief Ref-OFDM transmit and receive chains.
 *
 * TX: randomize → RS → CC → interleave → modulate → map → IFFT+CP → filter
 * at the 1.249 MHz base rate → ×2 interpolation to the link rate.
 * RX: ×2 decimation → matched filter → sync → pulse blanking → DFT →
 * LS estimation / ZF equalization → demodulate → decode.
 */
#ifndef REFOFDM_PHY_HPP
#define REFOFDM_PHY_HPP

#include <limits>
#include <optional>

#include "refofdm/coding.hpp"
#include "refofdm/filterbank.hpp"
#include "refofdm/framing.hpp"
#include "refofdm/modulation.hpp"

namespace refofdm {

enum class Waveform { OFDM, FOFDM, RefOFDM };
std::string to_string(Waveform w);
Waveform waveform_from_string(const std::string& s);

/// One frame layout placed on the 128-point grid, shifted by `shift` subcarriers.
struct BandSlot {
    FrameSpec spec;
    int shift = 0;
};

struct TxConfig {
    std::vector<BandSlot> bands;
    Modulation modulation = Modulation::QPSK;
    std::optional<AnyFilter> filter;  ///< none gives plain OFDM
    int cp_length_samples = kCpLength;
    std::uint32_t randomizer_seed = 0x4A80;
    std::uint32_t pilot_seed = 0x1D2C;
    int upsample_factor = kUpsample;
    bool fec = true;  ///< false maps randomized payload bits directly

    const FrameSpec& frame_spec() const { return bands.front().spec; }
};

/// Branch count of the DFT bank used for multi-band users.
constexpr int kMultibandBranches = 32;

TxConfig make_tx_config(int bandwidth_khz, Modulation m, Waveform w);
/// Multi-band user: centers snap to the nearest DFT-bank branch.
TxConfig make_multiband_config(int bandwidth_khz, const std::vector<double>& centers_hz, Modulation m,
                               Waveform w);
void validate(const TxConfig& cfg);

int coded_bits(const TxConfig& cfg, std::size_t band);
int payload_bits(const TxConfig& cfg);
FecLayout band_fec_layout(const TxConfig& cfg, std::size_t band);

/// Composite transmit grid [symbol][subcarrier] and its cell kinds.
ResourceGrid build_tx_grid(const TxConfig& cfg, const bits_t& payload);
/// Reference (pilot and sync) values of every band on the composite grid.
std::vector<cvec> composite_reference(const TxConfig& cfg);
KindMap composite_kinds(const TxConfig& cfg);

/// Filtered base-rate signal before interpolation and power normalization.
ComplexSignal transmit_baseband(const TxConfig& cfg, const bits_t& payload);
/// Link-rate signal normalized to unit mean power; symbol_scale holds the gain.
ComplexSignal transmit(const TxConfig& cfg, const bits_t& payload);

/// Delay-compensated TX·RX filter response on the 128 subcarriers.
cvec known_response(const TxConfig& cfg);
/// Total TX+RX filter delay in base-rate samples.
int nominal_timing(const TxConfig& cfg);

/// Decimation to the base rate followed by the matched filter.
ComplexSignal receiver_front_end(const TxConfig& cfg, const ComplexSignal& rx);

struct SyncResult {
    int frame_start = 0;      ///< first CP sample of symbol 0, base-rate samples
    double cfo_hz = 0.0;
    double coarse_metric = 0.0;
    double fine_metric = 0.0;
};

constexpr double kCoarseSyncThreshold = 0.05;
constexpr double kFineSyncThreshold = 0.6;
/// Repetition-metric windows below this fraction of the strongest window are ignored.
constexpr double kSyncEnergyGate = 0.05;

/// Operates on the front-end output; throws SyncNotFound.
SyncResult synchronize(const ComplexSignal& base, const TxConfig& cfg);

struct BlankResult {
    ComplexSignal signal;
    std::vector<bool> mask;
    std::size_t blanked = 0;
};

constexpr int kBlankWindow = 129;
BlankResult pulse_blank(const ComplexSignal& s, double threshold_factor, int window = kBlankWindow);

constexpr double kZfGuard = 1e-6;
constexpr int kWindowBackoff = 11;

struct Equalized {
    std::vector<cvec> symbols;  ///< equalized grid [symbol][subcarrier]
    std::vector<cvec> channel;  ///< Ĥ_k per symbol, zero outside the band
    std::vector<std::vector<bool>> erased;
};

/// LS at pilots, linear frequency interpolation, ZF by F'² Ĥ.
Equalized estimate_and_equalize(const std::vector<cvec>& grid_rx, const BandSlot& band, std::uint32_t pilot_seed,
                                const cvec& response, const std::optional<cvec>& known_channel = std::nullopt);

/// Received DFT grid after CFO removal and window-backoff compensation.
std::vector<cvec> demodulate_frame(const ComplexSignal& base, int frame_start, int cp, int backoff = kWindowBackoff);

struct RxOptions {
    std::optional<int> known_timing;     ///< frame start in base-rate samples
    std::optional<double> known_cfo_hz;
    std::optional<cvec> known_channel;   ///< per grid index, excludes filters
    double blank_threshold = 5.0;        ///< infinity disables blanking
    int backoff = kWindowBackoff;
};

struct RxReport {
    bits_t decoded_bits;
    int timing_offset = 0;  ///< relative to the nominal filter delay
    double cfo_hz = 0.0;
    cvec channel_estimate;  ///< time-averaged Ĥ_k per used subcarrier
    std::size_t blanked_sample_count = 0;
    rvec per_subcarrier_evm;  ///< decision-directed, dB
    cvec equalized_data;
    std::size_t erased_cells = 0;
    int rs_block_failures = 0;
};

RxReport receive(const TxConfig& cfg, const ComplexSignal& signal, const RxOptions& opt = {});

/// Data symbols of one band, in mapping order.
cvec band_data(const std::vector<cvec>& grid, const BandSlot& band);

}  // namespace refofdm

#endif

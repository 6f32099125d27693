/**
 * @file filterbank.hpp
 * @brief Fixed prototype filter, coefficient decimation (CDM/MCDM) and the
 *        polyphase DFT filter bank.
 */
#ifndef REFOFDM_FILTERBANK_HPP
#define REFOFDM_FILTERBANK_HPP

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>

#include "refofdm/types.hpp"

namespace refofdm {

/// Frequencies are fractions of π at the filter's own sample rate.
struct DesignSpec {
    double stopband_attenuation_db = 70.0;
    double passband_ripple_db = 0.1;
    double transition_bw = 0.1;      ///< end-user transition width
    double passband_edge = 0.12;     ///< ω_c, center of the transition band
    double overdesign = 7.0;         ///< D_max tightening of the end-user spec
    int order = 0;                   ///< 0 selects an order estimate
    double design_transition = 0.0;  ///< 0 means transition_bw / overdesign
    double stopband_weight = 0.0;    ///< 0 means δp/δs of the tightened spec
};

/// Prototype used for every LDACS bandwidth.
DesignSpec ldacs_design_spec();

struct PrototypeFilter {
    rvec coefficients;
    int order = 0;
    double passband_edge = 0.0;
    double pass_edge = 0.0;  ///< edge of the designed passband
    double stop_edge = 0.0;  ///< edge of the designed stopband
    DesignSpec design_spec;
    double ripple = 0.0;     ///< weighted equiripple deviation
};

enum class DecimationMethod { CDM, MCDM };

struct DecimationConfig {
    int factor = 1;
    DecimationMethod method = DecimationMethod::CDM;
    int complement_delay = 0;  ///< MCDM only
};

struct TableRow {
    int bandwidth_khz;
    double omega_cd;
    int factor;
    DecimationMethod method;
};

/// Reconfigurable filter design table, ascending bandwidth.
const std::vector<TableRow>& filter_table();
const std::vector<int>& supported_bandwidths();
void check_bandwidth(int bandwidth_khz);

struct ReconfigFilter {
    std::shared_ptr<const PrototypeFilter> source;
    DecimationConfig config;
    int phase = 0;                 ///< first retained prototype index
    rvec realized_coefficients;    ///< ±h[phase + mD]
    rvec taps;                     ///< effective impulse response, unity passband gain
    std::optional<int> target_bandwidth_khz;

    int length() const { return int(taps.size()); }
    int group_delay() const { return (int(taps.size()) - 1) / 2; }
};

/// Design by equiripple exchange; throws DesignFailure carrying the last ripple.
PrototypeFilter design_prototype(const DesignSpec& spec);
std::shared_ptr<const PrototypeFilter> ldacs_prototype();

ReconfigFilter apply_cdm(std::shared_ptr<const PrototypeFilter> proto, int factor);
ReconfigFilter apply_mcdm(std::shared_ptr<const PrototypeFilter> proto, int factor);
DecimationConfig select_config(int bandwidth_khz);
/// Realized filter for one of the eight bandwidths.
ReconfigFilter make_ldacs_filter(int bandwidth_khz);

/// Zero-interleaved multiband sequence: h[n] on n ≡ 0 (mod D), sign (−1)^{n/D} when alternate.
rvec zero_interleave(const rvec& h, int factor, bool alternate);
/// Fourier-series coefficients B(i) of the period-D masking sequence.
cvec masking_coefficients(int factor);

struct MultibandFilterBank {
    ReconfigFilter base;
    int branches = 1;
    std::set<int> active_bands;
    std::vector<rvec> polyphase_components;
    cvec composite_taps;

    int length() const { return int(composite_taps.size()); }
    int group_delay() const { return base.group_delay(); }
    double branch_center(int k) const;
};

MultibandFilterBank build_dftfb(const ReconfigFilter& filter, int branches, const std::set<int>& active);
/// Nearest branch to a normalized center frequency in [−1, 1).
int nearest_branch(int branches, double center);

using AnyFilter = std::variant<ReconfigFilter, MultibandFilterBank>;

ComplexSignal filter_signal(const ReconfigFilter& f, const ComplexSignal& s);
ComplexSignal filter_signal(const MultibandFilterBank& f, const ComplexSignal& s);
ComplexSignal filter_signal(const AnyFilter& f, const ComplexSignal& s);

/// Response on ω = π(−1 + 2i/N), i = 0..N−1.
cvec frequency_response(const rvec& taps, int grid_points);
cvec frequency_response(const ReconfigFilter& f, int grid_points);
cvec frequency_response(const MultibandFilterBank& f, int grid_points);
/// Zero-phase amplitude of a symmetric filter at ω (radians/sample).
double zero_phase_amplitude(const rvec& taps, double omega);
/// Two-sided −3 dB bandwidth as a fraction of π.
double measured_bandwidth(const rvec& taps);
double measured_bandwidth_khz(const ReconfigFilter& f);
/// Peak stopband level in dB beyond the realized stopband edge.
double stopband_floor_db(const ReconfigFilter& f, int grid_points = 8192);
/// Realized passband and stopband edges, fractions of π.
std::pair<double, double> realized_edges(const ReconfigFilter& f);

/// Zero-phase amplitude F'_k at every index of a 128-point grid, DC at index 64.
rvec subcarrier_response(const rvec& taps);

void write_coefficients_csv(const std::string& path, const rvec& taps);
rvec read_coefficients_csv(const std::string& path);

std::string to_string(DecimationMethod m);

}  // namespace refofdm

#endif

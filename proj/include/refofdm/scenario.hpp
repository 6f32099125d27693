/**
 * @file scenario.hpp
 * @brief JSON scenario files: users, channel, interference, grids and seeds.
 */
#ifndef REFOFDM_SCENARIO_HPP
#define REFOFDM_SCENARIO_HPP

#include <optional>
#include <string>

#include "refofdm/channel.hpp"
#include "refofdm/interference.hpp"
#include "refofdm/phy.hpp"

namespace refofdm {

struct UserSpec {
    std::string name;
    int bandwidth_khz = 0;
    rvec center_offsets_hz{0.0};
    Modulation modulation = Modulation::QPSK;
    Waveform waveform = Waveform::RefOFDM;
    bool fec = true;

    bool operator==(const UserSpec&) const = default;
};

struct MonteCarloSpec {
    std::uint64_t target_errors = 100;
    std::uint64_t max_bits = 200000;

    bool operator==(const MonteCarloSpec&) const = default;
};

struct ScenarioSpec {
    std::string name;
    std::vector<UserSpec> users;
    std::optional<Scenario> channel_scenario;  ///< absent means AWGN only
    std::optional<std::vector<int>> tap_delays_samples;
    std::optional<rvec> tap_powers;
    std::optional<DmeSignalParams> dme;
    std::optional<GgiParams> ggi;
    rvec snr_grid_db;
    std::vector<std::uint64_t> seeds;
    std::string outputs = "out";
    MonteCarloSpec monte_carlo;
    double blank_threshold = 5.0;
    int psd_frames = 8;
    int complexity_bands = 0;  ///< 0 uses the largest band count of any user
    int max_timing_offset = 2000;  ///< link-rate samples, per user per frame

    bool operator==(const ScenarioSpec&) const = default;
};

/// Guard added on each side of a user band in the overlap check.
constexpr double kUserGuardHz = kSubcarrierSpacingHz;

/// Validation failure carrying every problem found.
class ScenarioError : public ValidationError {
public:
    explicit ScenarioError(std::vector<std::string> errors);
    const std::vector<std::string>& errors() const { return errors_; }

private:
    std::vector<std::string> errors_;
};

ScenarioSpec parse_scenario(const std::string& path);
ScenarioSpec parse_scenario_text(const std::string& text, const std::string& origin = "<string>");
std::string serialize_scenario(const ScenarioSpec& spec);
/// Every semantic problem, empty when valid.
std::vector<std::string> validate_scenario(const ScenarioSpec& spec);

/// Effective band centers of a user after multi-band snapping.
rvec user_band_centers(const UserSpec& u);
TxConfig user_tx_config(const UserSpec& u);
/// Mixing frequency applied at the link rate (zero for multi-band users).
double user_mix_hz(const UserSpec& u);
ChannelProfile scenario_channel(const ScenarioSpec& spec);

}  // namespace refofdm

#endif

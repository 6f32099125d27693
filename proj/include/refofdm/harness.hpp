/**
 * @file harness.hpp
 * @brief Scenario-driven experiments and report emission.
 */
#ifndef REFOFDM_HARNESS_HPP
#define REFOFDM_HARNESS_HPP

#include <string>

#include "refofdm/analysis.hpp"
#include "refofdm/scenario.hpp"

namespace refofdm {

extern const char* const kVersion;

struct UserResult {
    std::string name;
    BerCurve curve;
    std::string error;  ///< non-empty when this user failed
};

struct InterferenceRow {
    double offset_hz = 0.0;  ///< DME center relative to the first user's center
    double db = 0.0;
};

struct CompositeTx {
    ComplexSignal signal;
    std::vector<bits_t> payloads;  ///< first frame of each user
};

struct RunReport {
    ScenarioSpec spec;
    std::vector<UserResult> users;
    std::optional<SpectrumGrid> psd;
    std::vector<InterferenceRow> interference;
    std::vector<ComplexityRow> complexity;
    std::vector<TheoryResult> theory;
    std::optional<CompositeTx> composite;
};

/// Every user transmitting psd_frames back-to-back frames with independent timing offsets.
CompositeTx composite_transmission(const ScenarioSpec& spec, std::uint64_t seed);

/// DME offsets BW/2 + m·50 kHz, m = 0..4, above the first user's center.
std::vector<InterferenceRow> interference_table(const ScenarioSpec& spec, const SpectrumGrid& psd);

LinkScenario user_link(const ScenarioSpec& spec, std::size_t user);
/// Counts pooled over every seed of the scenario.
std::vector<UserResult> ber_curves(const ScenarioSpec& spec);
std::vector<ComplexityRow> complexity_table(const ScenarioSpec& spec);
/// Average DME power falling in a user's band relative to unit signal power.
double user_dme_power(const ScenarioSpec& spec, std::size_t user);
std::vector<TheoryResult> theory_curves(const ScenarioSpec& spec);

enum class RunParts : unsigned { Psd = 1, Ber = 2, Complexity = 4, Theory = 8, All = 15 };

RunReport run_experiment(const ScenarioSpec& spec, unsigned parts = unsigned(RunParts::All));

std::string provenance_json(const ScenarioSpec& spec, const std::string& command);

/// Writes the report files plus manifest.json; returns the emitted file names.
std::vector<std::string> emit_reports(const RunReport& report, const std::string& directory,
                                      const std::string& command = "run");

/// Filter designs, frame layouts and cell maps for all eight bandwidths.
std::vector<std::string> emit_filter_designs(const std::string& directory);

}  // namespace refofdm

#endif

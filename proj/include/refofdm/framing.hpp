/**
 * @file framing.hpp
 * @brief LDACS frame layout: subcarrier allocation, sync symbols, pilot
 *        patterns P1..P7 and data mapping.
 */
#ifndef REFOFDM_FRAMING_HPP
#define REFOFDM_FRAMING_HPP

#include <array>
#include <string>

#include "refofdm/types.hpp"

namespace refofdm {

enum class CellKind : std::uint8_t { Data, Pilot, Sync, Null, Dc };

/// Repeating pilot patterns use stride 5 in used-subcarrier order.
constexpr int kPilotStride = 5;

struct FrameSpec {
    int bandwidth_khz = 0;
    int fft_size = kFftSize;
    int used_subcarriers = 0;
    int used_left = 0;   ///< used subcarriers below DC
    int used_right = 0;  ///< used subcarriers above DC
    int guard_nulls_per_side = 0;
    int dc_null_index = kDcIndex;
    int symbols_per_frame = kSymbolsPerFrame;
    int sync_symbol_count = 2;
    std::vector<int> pilot_pattern_ids;  ///< 1, then the repeating set, then 7
    double subcarrier_spacing_hz = kSubcarrierSpacingHz;
    double symbol_duration_us = 120.0;

    int repeating_patterns() const { return int(pilot_pattern_ids.size()) - 2; }
    /// Grid indices of the used band, ascending.
    std::vector<int> used_indices() const;
    /// Pattern carried by symbol s, 0 for sync symbols.
    int pattern_of_symbol(int s) const;
    int data_capacity() const;

    bool operator==(const FrameSpec&) const = default;
};

FrameSpec build_frame_spec(int bandwidth_khz);

std::vector<int> pilot_positions(const FrameSpec& spec, int pattern_id);

/// Cell kinds, indexed [symbol][subcarrier].
using KindMap = std::vector<std::array<CellKind, kFftSize>>;
KindMap cell_kinds(const FrameSpec& spec);

struct ResourceGrid {
    std::vector<cvec> grid;  ///< [symbol][subcarrier]
    KindMap kinds;
    FrameSpec spec;
};

/// Unit-magnitude QPSK values for every pilot and sync cell, zero elsewhere.
std::vector<cvec> reference_symbols(const FrameSpec& spec, std::uint32_t pilot_seed);

ResourceGrid map_symbols(const FrameSpec& spec, const cvec& data, std::uint32_t pilot_seed);
cvec extract_symbols(const ResourceGrid& grid, const FrameSpec& spec);

std::string frame_spec_to_json(const FrameSpec& spec);
FrameSpec frame_spec_from_json(const std::string& text);
std::string cell_kinds_csv(const FrameSpec& spec);
char kind_letter(CellKind k);

}  // namespace refofdm

#endif

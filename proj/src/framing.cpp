#include "refofdm/framing.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "refofdm/coding.hpp"
#include "refofdm/filterbank.hpp"

namespace refofdm {

std::vector<int> FrameSpec::used_indices() const
{
    std::vector<int> idx;
    for (int k = dc_null_index - used_left; k < dc_null_index; ++k)
        idx.push_back(k);
    for (int k = dc_null_index + 1; k <= dc_null_index + used_right; ++k)
        idx.push_back(k);
    return idx;
}

int FrameSpec::pattern_of_symbol(int s) const
{
    if (s < sync_symbol_count)
        return 0;
    if (s == sync_symbol_count)
        return 1;
    if (s == symbols_per_frame - 1)
        return 7;
    const int p = repeating_patterns();
    return 2 + (s - sync_symbol_count - 1) % p;
}

int FrameSpec::data_capacity() const
{
    int cap = 0;
    for (const auto& row : cell_kinds(*this))
        for (CellKind k : row)
            cap += k == CellKind::Data;
    return cap;
}

FrameSpec build_frame_spec(int bandwidth_khz)
{
    check_bandwidth(bandwidth_khz);
    FrameSpec s;
    s.bandwidth_khz = bandwidth_khz;
    s.used_subcarriers = int(std::lround(double(bandwidth_khz) / 9.76));
    s.used_left = (s.used_subcarriers + 1) / 2;
    s.used_right = s.used_subcarriers / 2;
    s.guard_nulls_per_side = (kFftSize - 1 - s.used_subcarriers) / 2;
    const int repeating = bandwidth_khz == 186 ? 3 : bandwidth_khz == 264 ? 4 : 5;
    s.pilot_pattern_ids.push_back(1);
    for (int p = 0; p < repeating; ++p)
        s.pilot_pattern_ids.push_back(2 + p);
    s.pilot_pattern_ids.push_back(7);
    return s;
}

std::vector<int> pilot_positions(const FrameSpec& spec, int pattern_id)
{
    bool legal = false;
    for (int p : spec.pilot_pattern_ids)
        legal |= p == pattern_id;
    if (!legal)
        throw ValidationError("pilot pattern P" + std::to_string(pattern_id) + " not used at " +
                              std::to_string(spec.bandwidth_khz) + " kHz");
    const auto used = spec.used_indices();
    std::vector<int> out;
    for (std::size_t u = 0; u < used.size(); ++u) {
        const int off = used[u] - spec.dc_null_index;
        bool pilot = false;
        if (pattern_id == 1)
            pilot = off % 2 == 0;
        else if (pattern_id == 7)
            pilot = off % 4 == 0;
        else
            pilot = int(u) % kPilotStride == pattern_id - 2;
        if (pilot)
            out.push_back(used[u]);
    }
    return out;
}

KindMap cell_kinds(const FrameSpec& spec)
{
    KindMap map(static_cast<std::size_t>(spec.symbols_per_frame));
    const auto used = spec.used_indices();
    for (int s = 0; s < spec.symbols_per_frame; ++s) {
        auto& row = map[std::size_t(s)];
        row.fill(CellKind::Null);
        row[std::size_t(spec.dc_null_index)] = CellKind::Dc;
        if (s == 0) {
            for (int k : used)
                if ((k - spec.dc_null_index) % 4 == 0)
                    row[std::size_t(k)] = CellKind::Sync;
            continue;
        }
        if (s == 1) {
            for (int k : used)
                row[std::size_t(k)] = CellKind::Sync;
            continue;
        }
        const int p = spec.pattern_of_symbol(s);
        const bool pilots_only = p == 1 || p == 7;
        if (!pilots_only)
            for (int k : used)
                row[std::size_t(k)] = CellKind::Data;
        for (int k : pilot_positions(spec, p))
            row[std::size_t(k)] = CellKind::Pilot;
    }
    return map;
}

std::vector<cvec> reference_symbols(const FrameSpec& spec, std::uint32_t pilot_seed)
{
    const KindMap kinds = cell_kinds(spec);
    std::size_t count = 0;
    for (const auto& row : kinds)
        for (CellKind k : row)
            count += (k == CellKind::Pilot || k == CellKind::Sync);
    const bits_t stream = prbs_stream(2 * count, pilot_seed);
    const double a = 1.0 / std::sqrt(2.0);
    std::vector<cvec> ref(kinds.size(), cvec(kFftSize, cplx(0.0, 0.0)));
    std::size_t b = 0;
    for (std::size_t s = 0; s < kinds.size(); ++s) {
        for (int k = 0; k < kFftSize; ++k) {
            const CellKind kind = kinds[s][std::size_t(k)];
            if (kind != CellKind::Pilot && kind != CellKind::Sync)
                continue;
            ref[s][std::size_t(k)] = cplx(stream[b] ? -a : a, stream[b + 1] ? -a : a);
            b += 2;
        }
    }
    return ref;
}

ResourceGrid map_symbols(const FrameSpec& spec, const cvec& data, std::uint32_t pilot_seed)
{
    const int cap = spec.data_capacity();
    if (int(data.size()) != cap)
        throw ValidationError("capacity mismatch: expected " + std::to_string(cap) + " data symbols, got " +
                              std::to_string(data.size()));
    ResourceGrid g;
    g.spec = spec;
    g.kinds = cell_kinds(spec);
    g.grid = reference_symbols(spec, pilot_seed);
    std::size_t d = 0;
    for (std::size_t s = 0; s < g.kinds.size(); ++s)
        for (int k = 0; k < kFftSize; ++k)
            if (g.kinds[s][std::size_t(k)] == CellKind::Data)
                g.grid[s][std::size_t(k)] = data[d++];
    return g;
}

cvec extract_symbols(const ResourceGrid& grid, const FrameSpec& spec)
{
    const KindMap expect = cell_kinds(spec);
    if (grid.kinds != expect || grid.grid.size() != expect.size())
        throw ValidationError("resource grid corrupted: cell-kind map does not match the frame spec");
    cvec out;
    out.reserve(std::size_t(spec.data_capacity()));
    for (std::size_t s = 0; s < expect.size(); ++s) {
        if (grid.grid[s].size() != std::size_t(kFftSize))
            throw ValidationError("resource grid corrupted: symbol width");
        for (int k = 0; k < kFftSize; ++k)
            if (expect[s][std::size_t(k)] == CellKind::Data)
                out.push_back(grid.grid[s][std::size_t(k)]);
    }
    return out;
}

std::string frame_spec_to_json(const FrameSpec& s)
{
    nlohmann::ordered_json j;
    j["bandwidth_khz"] = s.bandwidth_khz;
    j["fft_size"] = s.fft_size;
    j["used_subcarriers"] = s.used_subcarriers;
    j["used_left"] = s.used_left;
    j["used_right"] = s.used_right;
    j["guard_nulls_per_side"] = s.guard_nulls_per_side;
    j["dc_null_index"] = s.dc_null_index;
    j["symbols_per_frame"] = s.symbols_per_frame;
    j["sync_symbol_count"] = s.sync_symbol_count;
    j["pilot_pattern_ids"] = s.pilot_pattern_ids;
    j["subcarrier_spacing_hz"] = s.subcarrier_spacing_hz;
    j["symbol_duration_us"] = s.symbol_duration_us;
    j["data_capacity"] = s.data_capacity();
    return j.dump(2);
}

FrameSpec frame_spec_from_json(const std::string& text)
{
    const auto j = nlohmann::json::parse(text);
    FrameSpec s;
    s.bandwidth_khz = j.at("bandwidth_khz");
    s.fft_size = j.at("fft_size");
    s.used_subcarriers = j.at("used_subcarriers");
    s.used_left = j.at("used_left");
    s.used_right = j.at("used_right");
    s.guard_nulls_per_side = j.at("guard_nulls_per_side");
    s.dc_null_index = j.at("dc_null_index");
    s.symbols_per_frame = j.at("symbols_per_frame");
    s.sync_symbol_count = j.at("sync_symbol_count");
    s.pilot_pattern_ids = j.at("pilot_pattern_ids").get<std::vector<int>>();
    s.subcarrier_spacing_hz = j.at("subcarrier_spacing_hz");
    s.symbol_duration_us = j.at("symbol_duration_us");
    return s;
}

char kind_letter(CellKind k)
{
    switch (k) {
    case CellKind::Data: return 'D';
    case CellKind::Pilot: return 'P';
    case CellKind::Sync: return 'S';
    case CellKind::Null: return 'N';
    case CellKind::Dc: return 'C';
    }
    return '?';
}

std::string cell_kinds_csv(const FrameSpec& spec)
{
    std::ostringstream os;
    os << "symbol";
    for (int k = 0; k < kFftSize; ++k)
        os << ",k" << k;
    os << '\n';
    const KindMap map = cell_kinds(spec);
    for (std::size_t s = 0; s < map.size(); ++s) {
        os << s;
        for (CellKind c : map[s])
            os << ',' << kind_letter(c);
        os << '\n';
    }
    return os.str();
}

}  // namespace refofdm

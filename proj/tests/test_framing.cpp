#include "doctest.h"

#include "refofdm/filterbank.hpp"
#include "refofdm/framing.hpp"
#include "test_util.hpp"

using namespace refofdm;

TEST_CASE("used subcarrier counts follow the bandwidth arithmetic")
{
    CHECK(build_frame_spec(732).used_subcarriers == 75);
    CHECK(75 * 9.76 == doctest::Approx(732.0));
    CHECK(build_frame_spec(186).used_subcarriers == 19);
    for (int bw : supported_bandwidths()) {
        const FrameSpec s = build_frame_spec(bw);
        CHECK(s.used_subcarriers == int(std::lround(bw / 9.76)));
        CHECK(s.used_subcarriers + 2 * s.guard_nulls_per_side + 1 == 128);
        CHECK(s.used_left + s.used_right == s.used_subcarriers);
        CHECK(s.symbols_per_frame == 64);
        CHECK(s.sync_symbol_count == 2);
        CHECK(s.fft_size == 128);
        CHECK(s.dc_null_index == 64);
    }
}

TEST_CASE("supported bandwidths are 78 kHz apart")
{
    const auto& bws = supported_bandwidths();
    REQUIRE(bws.size() == 8);
    for (std::size_t i = 1; i < bws.size(); ++i)
        CHECK(bws[i] - bws[i - 1] == 78);
}

TEST_CASE("repeating pilot sets per bandwidth")
{
    CHECK(build_frame_spec(186).pilot_pattern_ids == std::vector<int>{1, 2, 3, 4, 7});
    CHECK(build_frame_spec(264).pilot_pattern_ids == std::vector<int>{1, 2, 3, 4, 5, 7});
    for (int bw : {342, 420, 498, 576, 654, 732})
        CHECK(build_frame_spec(bw).pilot_pattern_ids == std::vector<int>{1, 2, 3, 4, 5, 6, 7});
}

TEST_CASE("repeating pattern count divides the middle of the frame")
{
    for (int bw : supported_bandwidths()) {
        const FrameSpec s = build_frame_spec(bw);
        CHECK((64 - 4) % s.repeating_patterns() == 0);
        CHECK(s.pattern_of_symbol(62) == 1 + s.repeating_patterns());
        CHECK(s.pattern_of_symbol(63) == 7);
        CHECK(s.pattern_of_symbol(2) == 1);
        CHECK(s.pattern_of_symbol(3) == 2);
    }
}

TEST_CASE("unsupported bandwidth uses the filter table error")
{
    CHECK_THROWS_AS(build_frame_spec(500), ValidationError);
    try {
        build_frame_spec(500);
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("732") != std::string::npos);
    }
}

TEST_CASE("P7 pilots are four subcarriers apart around DC")
{
    const FrameSpec s = build_frame_spec(498);
    const auto p7 = pilot_positions(s, 7);
    CHECK(std::find(p7.begin(), p7.end(), 60) != p7.end());
    CHECK(std::find(p7.begin(), p7.end(), 68) != p7.end());
    CHECK(std::find(p7.begin(), p7.end(), 64) == p7.end());
    for (std::size_t i = 1; i < p7.size(); ++i) {
        const int gap = p7[i] - p7[i - 1];
        CHECK((gap == 4 || (p7[i - 1] == 60 && p7[i] == 68)));
    }
    for (int k : p7)
        CHECK(std::abs(k - 64) % 4 == 0);
}

TEST_CASE("P1 occupies the third symbol")
{
    for (int bw : supported_bandwidths()) {
        const FrameSpec s = build_frame_spec(bw);
        const KindMap m = cell_kinds(s);
        int pilots = 0;
        for (CellKind k : m[2])
            pilots += k == CellKind::Pilot;
        CHECK(pilots == int(pilot_positions(s, 1).size()));
        CHECK(s.pattern_of_symbol(2) == 1);
    }
}

TEST_CASE("patterns outside the bandwidth's set are rejected")
{
    CHECK_THROWS_AS(pilot_positions(build_frame_spec(186), 6), ValidationError);
    CHECK_THROWS_AS(pilot_positions(build_frame_spec(264), 6), ValidationError);
    CHECK_NOTHROW(pilot_positions(build_frame_spec(342), 6));
}

TEST_CASE("repeating patterns stagger diagonally with stride five")
{
    const FrameSpec s = build_frame_spec(732);
    const auto used = s.used_indices();
    for (int p = 2; p <= 6; ++p) {
        const auto pos = pilot_positions(s, p);
        REQUIRE(!pos.empty());
        const auto first = std::find(used.begin(), used.end(), pos[0]) - used.begin();
        CHECK(first == p - 2);
        for (std::size_t i = 1; i < pos.size(); ++i) {
            const auto a = std::find(used.begin(), used.end(), pos[i - 1]) - used.begin();
            const auto b = std::find(used.begin(), used.end(), pos[i]) - used.begin();
            CHECK(b - a == kPilotStride);
        }
    }
}

TEST_CASE("pilots never land on DC or guards")
{
    for (int bw : supported_bandwidths()) {
        const FrameSpec s = build_frame_spec(bw);
        const auto used = s.used_indices();
        for (int p : s.pilot_pattern_ids)
            for (int k : pilot_positions(s, p)) {
                CHECK(k != 64);
                CHECK(std::find(used.begin(), used.end(), k) != used.end());
            }
    }
}

TEST_CASE("data capacity matches an independent census")
{
    const FrameSpec s = build_frame_spec(498);
    int interior_pilots = 0;
    for (int sym = 3; sym < 63; ++sym)
        interior_pilots += int(pilot_positions(s, s.pattern_of_symbol(sym)).size());
    CHECK(s.data_capacity() == s.used_subcarriers * (64 - 2 - 2) - interior_pilots);
}

TEST_CASE("layout is contained in the used band and monotone in bandwidth")
{
    int prev_used = 0, prev_guard = 1000;
    for (int bw : supported_bandwidths()) {
        const FrameSpec s = build_frame_spec(bw);
        const auto used = s.used_indices();
        const cvec data = testutil::random_cvec(std::size_t(s.data_capacity()), unsigned(bw));
        const ResourceGrid g = map_symbols(s, data, 0x1D2C);
        for (std::size_t sym = 0; sym < g.grid.size(); ++sym)
            for (int k = 0; k < 128; ++k)
                if (std::find(used.begin(), used.end(), k) == used.end())
                    CHECK(g.grid[sym][std::size_t(k)] == cplx(0.0, 0.0));
        CHECK(s.used_subcarriers > prev_used);
        CHECK(s.guard_nulls_per_side < prev_guard);
        prev_used = s.used_subcarriers;
        prev_guard = s.guard_nulls_per_side;
    }
}

TEST_CASE("grid cells satisfy their kind")
{
    const FrameSpec s = build_frame_spec(342);
    const cvec data = testutil::random_cvec(std::size_t(s.data_capacity()), 5);
    const ResourceGrid g = map_symbols(s, data, 77);
    int data_cells = 0;
    for (std::size_t sym = 0; sym < g.grid.size(); ++sym)
        for (int k = 0; k < 128; ++k) {
            const cplx v = g.grid[sym][std::size_t(k)];
            switch (g.kinds[sym][std::size_t(k)]) {
            case CellKind::Null:
            case CellKind::Dc: CHECK(v == cplx(0.0, 0.0)); break;
            case CellKind::Pilot:
            case CellKind::Sync: CHECK(std::abs(v) == doctest::Approx(1.0).epsilon(1e-15)); break;
            case CellKind::Data: ++data_cells; break;
            }
        }
    CHECK(data_cells == s.data_capacity());
}

TEST_CASE("first sync symbol is four-fold periodic in time")
{
    const FrameSpec s = build_frame_spec(654);
    const auto ref = reference_symbols(s, 3);
    for (int k = 0; k < 128; ++k)
        if (ref[0][std::size_t(k)] != cplx(0.0, 0.0))
            CHECK((k - 64) % 4 == 0);
}

TEST_CASE("map and extract are inverse")
{
    for (int bw : supported_bandwidths()) {
        const FrameSpec s = build_frame_spec(bw);
        const cvec data = testutil::random_cvec(std::size_t(s.data_capacity()), unsigned(bw) + 1);
        const ResourceGrid g = map_symbols(s, data, 0x1D2C);
        CHECK(extract_symbols(g, s) == data);
    }
}

TEST_CASE("extraction of an all-zero grid gives zeros of capacity length")
{
    const FrameSpec s = build_frame_spec(420);
    ResourceGrid g = map_symbols(s, cvec(std::size_t(s.data_capacity()), cplx(0.0, 0.0)), 1);
    for (auto& row : g.grid)
        std::fill(row.begin(), row.end(), cplx(0.0, 0.0));
    const cvec out = extract_symbols(g, s);
    CHECK(out.size() == std::size_t(s.data_capacity()));
    for (const cplx& v : out)
        CHECK(v == cplx(0.0, 0.0));
}

TEST_CASE("mapping errors")
{
    const FrameSpec s = build_frame_spec(186);
    try {
        map_symbols(s, cvec(3), 1);
        FAIL("expected capacity error");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find(std::to_string(s.data_capacity())) != std::string::npos);
        CHECK(msg.find("3") != std::string::npos);
    }
    ResourceGrid g = map_symbols(s, cvec(std::size_t(s.data_capacity())), 1);
    g.kinds[10][64] = CellKind::Data;
    CHECK_THROWS_AS(extract_symbols(g, s), ValidationError);
}

TEST_CASE("layout and grids are deterministic")
{
    const FrameSpec a = build_frame_spec(576);
    const FrameSpec b = build_frame_spec(576);
    CHECK(a == b);
    const cvec data = testutil::random_cvec(std::size_t(a.data_capacity()), 8);
    CHECK(map_symbols(a, data, 42).grid == map_symbols(b, data, 42).grid);
    CHECK(map_symbols(a, data, 42).grid != map_symbols(b, data, 43).grid);
}

TEST_CASE("frame spec JSON round trip and cell-kind CSV")
{
    for (int bw : supported_bandwidths()) {
        const FrameSpec s = build_frame_spec(bw);
        CHECK(frame_spec_from_json(frame_spec_to_json(s)) == s);
    }
    const std::string csv = cell_kinds_csv(build_frame_spec(732));
    CHECK(csv.rfind("symbol,k0,k1,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 65);
}

#include "refofdm/harness.hpp"

#include <filesystem>
#include <random>

#include <json.hpp>

#include "refofdm/io.hpp"
#include "refofdm/ofdm.hpp"

namespace refofdm {

const char* const kVersion = "refofdm 1.0.0";

namespace {

constexpr double kDmeOffsetStepHz = 50e3;
constexpr int kInterferenceRows = 5;
const std::vector<int> kComplexitySizes{64, 128, 256, 512, 1024, 2048};

int user_bands(const UserSpec& u)
{
    return int(u.center_offsets_hz.size());
}

}  // namespace

CompositeTx composite_transmission(const ScenarioSpec& spec, std::uint64_t seed)
{
    CompositeTx out;
    out.signal.sample_rate_hz = kLinkRateHz;
    std::vector<ComplexSignal> streams;
    for (std::size_t u = 0; u < spec.users.size(); ++u) {
        const UserSpec& us = spec.users[u];
        const TxConfig cfg = user_tx_config(us);
        std::mt19937_64 rng(derive_seed(seed, 1000 + u));
        ComplexSignal s;
        s.sample_rate_hz = kLinkRateHz;
        const std::size_t lead =
            spec.max_timing_offset > 0 ? std::size_t(rng() % std::uint64_t(spec.max_timing_offset + 1)) : 0;
        s.samples.assign(lead, cplx(0.0, 0.0));
        for (int f = 0; f < spec.psd_frames; ++f) {
            bits_t payload(static_cast<std::size_t>(payload_bits(cfg)));
            for (auto& b : payload)
                b = std::uint8_t(rng() & 1u);
            if (f == 0)
                out.payloads.push_back(payload);
            const ComplexSignal x = transmit(cfg, payload);
            s.samples.insert(s.samples.end(), x.samples.begin(), x.samples.end());
        }
        streams.push_back(frequency_shift(s, user_mix_hz(us)));
    }
    std::size_t n = 0;
    for (const auto& s : streams)
        n = std::max(n, s.samples.size());
    out.signal.samples.assign(n, cplx(0.0, 0.0));
    for (const auto& s : streams)
        for (std::size_t i = 0; i < s.samples.size(); ++i)
            out.signal.samples[i] += s.samples[i];
    return out;
}

std::vector<InterferenceRow> interference_table(const ScenarioSpec& spec, const SpectrumGrid& psd)
{
    std::vector<InterferenceRow> rows;
    if (spec.users.empty())
        return rows;
    const UserSpec& u = spec.users.front();
    const double center = user_band_centers(u).back();
    const double half_lobe = dme_main_lobe_half_width(spec.dme.value_or(DmeSignalParams{}));
    for (int m = 0; m < kInterferenceRows; ++m) {
        const double off = u.bandwidth_khz * 500.0 + m * kDmeOffsetStepHz;
        const double f = center + off;
        rows.push_back({off, interference_at(psd, f - half_lobe, f + half_lobe)});
    }
    return rows;
}

LinkScenario user_link(const ScenarioSpec& spec, std::size_t user)
{
    const UserSpec& u = spec.users.at(user);
    LinkScenario sc;
    sc.tx = user_tx_config(u);
    if (spec.channel_scenario)
        sc.channel = scenario_channel(spec);
    sc.dme = spec.dme;
    sc.ggi = spec.ggi;
    sc.blank_threshold = spec.blank_threshold;
    sc.max_timing_offset = spec.max_timing_offset;
    sc.mix_hz = user_mix_hz(u);
    for (std::size_t o = 0; o < spec.users.size(); ++o)
        if (o != user)
            sc.interferers.push_back({user_tx_config(spec.users[o]), user_mix_hz(spec.users[o])});
    return sc;
}

std::vector<UserResult> ber_curves(const ScenarioSpec& spec)
{
    std::vector<UserResult> out;
    for (std::size_t u = 0; u < spec.users.size(); ++u) {
        UserResult r;
        r.name = spec.users[u].name;
        try {
            const LinkScenario sc = user_link(spec, u);
            BerCurve total;
            total.snr_db_points = spec.snr_grid_db;
            total.bit_counts.assign(spec.snr_grid_db.size(), 0);
            total.error_counts.assign(spec.snr_grid_db.size(), 0);
            for (std::uint64_t seed : spec.seeds) {
                const BerCurve c = run_ber_monte_carlo(sc, spec.snr_grid_db, spec.monte_carlo.target_errors,
                                                       spec.monte_carlo.max_bits, derive_seed(seed, u));
                for (std::size_t i = 0; i < c.bit_counts.size(); ++i) {
                    total.bit_counts[i] += c.bit_counts[i];
                    total.error_counts[i] += c.error_counts[i];
                }
            }
            for (std::size_t i = 0; i < total.bit_counts.size(); ++i) {
                const auto b = total.bit_counts[i], e = total.error_counts[i];
                total.ber.push_back(b ? double(e) / double(b) : 0.0);
                const WilsonInterval w = wilson_interval(e, b, kWilsonZ);
                total.confidence_halfwidth.push_back(w.halfwidth);
                total.ci_low.push_back(w.low);
                total.ci_high.push_back(w.high);
            }
            r.curve = total;
        } catch (const std::exception& e) {
            r.error = e.what();
        }
        out.push_back(r);
    }
    return out;
}

std::vector<ComplexityRow> complexity_table(const ScenarioSpec& spec)
{
    int bands = spec.complexity_bands;
    if (bands == 0)
        for (const auto& u : spec.users)
            bands = std::max(bands, user_bands(u));
    bands = std::max(bands, 1);
    const int bw = spec.users.empty() ? 498 : spec.users.front().bandwidth_khz;
    const int len = make_ldacs_filter(bw).length();
    std::vector<ComplexityRow> rows;
    for (Waveform w : {Waveform::OFDM, Waveform::FOFDM, Waveform::RefOFDM})
        for (int k : kComplexitySizes)
            rows.push_back(complexity_report(w, k, bands, len, int(std::lround(k * double(kCpLength) / kFftSize))));
    return rows;
}

double user_dme_power(const ScenarioSpec& spec, std::size_t user)
{
    if (!spec.dme)
        return 0.0;
    const UserSpec& u = spec.users.at(user);
    const DmeSignalParams& d = *spec.dme;
    double p = 0.0;
    for (double c : user_band_centers(u)) {
        const double lo = c - u.bandwidth_khz * 500.0 - d.center_offset_hz;
        const double hi = c + u.bandwidth_khz * 500.0 - d.center_offset_hz;
        p += d.pulse_pair_rate_pps * dme_interference_power(d, lo, hi);
    }
    return p;
}

std::vector<TheoryResult> theory_curves(const ScenarioSpec& spec)
{
    std::vector<TheoryResult> out;
    for (std::size_t u = 0; u < spec.users.size(); ++u) {
        const UserSpec& us = spec.users[u];
        TheoryConfig tc;
        tc.modulation = us.modulation;
        tc.dme_power = user_dme_power(spec, u);
        tc.filter_response.clear();
        const FrameSpec fs = build_frame_spec(us.bandwidth_khz);
        if (us.waveform == Waveform::RefOFDM) {
            const rvec f = subcarrier_response(make_ldacs_filter(us.bandwidth_khz).taps);
            for (int k : fs.used_indices())
                tc.filter_response.push_back(f[std::size_t(k)]);
        } else {
            tc.filter_response.assign(std::size_t(fs.used_subcarriers), 1.0);
        }
        out.push_back(theoretical_ber(tc, spec.snr_grid_db));
    }
    return out;
}

RunReport run_experiment(const ScenarioSpec& spec, unsigned parts)
{
    const auto errs = validate_scenario(spec);
    if (!errs.empty())
        throw ScenarioError(errs);
    RunReport rep;
    rep.spec = spec;
    if (parts & unsigned(RunParts::Psd)) {
        rep.composite = composite_transmission(spec, spec.seeds.front());
        rep.psd = estimate_psd(rep.composite->signal);
        rep.interference = interference_table(spec, *rep.psd);
    }
    if (parts & unsigned(RunParts::Ber))
        rep.users = ber_curves(spec);
    if (parts & unsigned(RunParts::Complexity))
        rep.complexity = complexity_table(spec);
    if (parts & unsigned(RunParts::Theory))
        rep.theory = theory_curves(spec);
    return rep;
}

std::string provenance_json(const ScenarioSpec& spec, const std::string& command)
{
    nlohmann::ordered_json j;
    j["command"] = command;
    j["scenario"] = spec.name;
    j["config_sha256"] = sha256_hex(serialize_scenario(spec));
    j["seeds"] = spec.seeds;
    j["version"] = kVersion;
#ifdef __VERSION__
    j["compiler"] = __VERSION__;
#endif
    return j.dump();
}

std::vector<std::string> emit_reports(const RunReport& report, const std::string& directory,
                                      const std::string& command)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(directory, ec);
    if (ec)
        throw IoError("cannot create output directory '" + directory + "': " + ec.message());
    auto path = [&](const std::string& name) { return (fs::path(directory) / name).string(); };
    std::vector<std::string> files;

    if (report.psd) {
        std::vector<CsvRow> rows;
        for (std::size_t i = 0; i < report.psd->frequencies_hz.size(); ++i)
            rows.push_back({fmt(report.psd->frequencies_hz[i]), fmt(report.psd->psd_db_per_hz[i])});
        write_csv(path("psd.csv"), {"freq_hz", "psd_db"}, rows);
        files.push_back("psd.csv");
        rows.clear();
        for (const auto& r : report.interference)
            rows.push_back({fmt(r.offset_hz), fmt(r.db)});
        write_csv(path("interference.csv"), {"offset_hz", "dB"}, rows);
        files.push_back("interference.csv");
    }
    if (report.composite) {
        write_iq(path("tx.iq"), report.composite->signal);
        files.push_back("tx.iq");
        files.push_back("tx.iq.json");
        for (std::size_t u = 0; u < report.composite->payloads.size(); ++u) {
            const std::string name = "payload_" + report.spec.users[u].name + ".bits";
            write_bits(path(name), report.composite->payloads[u]);
            files.push_back(name);
        }
    }
    if (!report.users.empty()) {
        std::vector<CsvRow> rows;
        for (const auto& u : report.users) {
            if (!u.error.empty())
                continue;
            for (std::size_t i = 0; i < u.curve.ber.size(); ++i)
                rows.push_back({fmt(u.curve.snr_db_points[i]), fmt(u.curve.ber[i]), fmt(u.curve.confidence_halfwidth[i])});
        }
        write_csv(path("ber.csv"), {"snr_db", "ber", "ci"}, rows);
        files.push_back("ber.csv");
    }
    if (!report.theory.empty()) {
        std::vector<CsvRow> rows;
        for (const auto& t : report.theory)
            for (std::size_t i = 0; i < t.ber.size(); ++i)
                rows.push_back({fmt(t.snr_db[i]), fmt(t.ber[i]), "0"});
        write_csv(path("theory.csv"), {"snr_db", "ber", "ci"}, rows);
        files.push_back("theory.csv");
    }
    if (!report.complexity.empty()) {
        std::vector<CsvRow> rows;
        for (const auto& r : report.complexity)
            rows.push_back({to_string(r.waveform), std::to_string(r.subcarriers), std::to_string(r.total())});
        write_csv(path("complexity.csv"), {"waveform", "K", "mults"}, rows);
        files.push_back("complexity.csv");
    }

    nlohmann::ordered_json prov = nlohmann::ordered_json::parse(provenance_json(report.spec, command));
    nlohmann::ordered_json users = nlohmann::ordered_json::array();
    for (const auto& u : report.users) {
        nlohmann::ordered_json ju;
        ju["name"] = u.name;
        ju["status"] = u.error.empty() ? "ok" : "failed";
        if (!u.error.empty())
            ju["error"] = u.error;
        ju["bits"] = u.curve.bit_counts;
        ju["errors"] = u.curve.error_counts;
        users.push_back(ju);
    }
    prov["users"] = users;
    for (const auto& t : report.theory)
        if (!t.converged)
            prov["theory_warning"] = t.warning;
    write_manifest(directory, files, prov.dump());
    files.push_back("manifest.json");
    return files;
}

std::vector<std::string> emit_filter_designs(const std::string& directory)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(directory, ec);
    if (ec)
        throw IoError("cannot create output directory '" + directory + "': " + ec.message());
    auto path = [&](const std::string& name) { return (fs::path(directory) / name).string(); };
    std::vector<std::string> files;
    write_coefficients_csv(path("prototype.csv"), ldacs_prototype()->coefficients);
    files.push_back("prototype.csv");
    std::vector<CsvRow> table;
    for (const auto& row : filter_table()) {
        const int bw = row.bandwidth_khz;
        const ReconfigFilter f = make_ldacs_filter(bw);
        const std::string tag = std::to_string(bw);
        write_coefficients_csv(path("filter_" + tag + ".csv"), f.taps);
        write_text(path("frame_" + tag + ".json"), frame_spec_to_json(build_frame_spec(bw)) + "\n");
        write_text(path("cells_" + tag + ".csv"), cell_kinds_csv(build_frame_spec(bw)));
        files.insert(files.end(), {"filter_" + tag + ".csv", "frame_" + tag + ".json", "cells_" + tag + ".csv"});
        table.push_back({tag, std::to_string(f.config.factor), to_string(f.config.method), std::to_string(f.length()),
                         fmt(measured_bandwidth_khz(f)), fmt(stopband_floor_db(f))});
    }
    write_csv(path("filter_table.csv"),
              {"bandwidth_khz", "D", "method", "length", "measured_bw_khz", "stopband_floor_db"}, table);
    files.push_back("filter_table.csv");
    nlohmann::ordered_json prov;
    prov["command"] = "design-filter";
    prov["version"] = kVersion;
    write_manifest(directory, files, prov.dump());
    files.push_back("manifest.json");
    return files;
}

}  // namespace refofdm

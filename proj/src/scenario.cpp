#include "refofdm/scenario.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "refofdm/io.hpp"

namespace refofdm {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string join(const std::vector<std::string>& v)
{
    std::string s;
    for (const auto& e : v)
        s += (s.empty() ? "" : "; ") + e;
    return s;
}

/// Collects type errors instead of throwing at the first one.
struct Reader {
    std::vector<std::string>& errors;

    template <class T>
    std::optional<T> get(const json& j, const std::string& key, const std::string& ctx)
    {
        if (!j.contains(key))
            return std::nullopt;
        try {
            return j.at(key).get<T>();
        } catch (const json::exception&) {
            errors.push_back(ctx + key + ": wrong type (" + std::string(j.at(key).type_name()) + ")");
            return std::nullopt;
        }
    }

    template <class T>
    std::optional<T> need(const json& j, const std::string& key, const std::string& ctx)
    {
        if (!j.contains(key)) {
            errors.push_back(ctx + key + ": missing");
            return std::nullopt;
        }
        return get<T>(j, key, ctx);
    }
};

std::pair<int, int> line_col(const std::string& text, std::size_t byte)
{
    int line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace

ScenarioError::ScenarioError(std::vector<std::string> errors)
    : ValidationError("invalid scenario: " + join(errors)), errors_(std::move(errors))
{
}

rvec user_band_centers(const UserSpec& u)
{
    if (u.center_offsets_hz.size() <= 1)
        return u.center_offsets_hz;
    rvec out;
    const double half_rate = kBaseRateHz / 2.0;
    for (double c : u.center_offsets_hz) {
        const int k = nearest_branch(kMultibandBranches, c / half_rate);
        out.push_back((4 * k - kDcIndex) * kSubcarrierSpacingHz);
    }
    return out;
}

TxConfig user_tx_config(const UserSpec& u)
{
    TxConfig cfg = u.center_offsets_hz.size() > 1
                       ? make_multiband_config(u.bandwidth_khz, u.center_offsets_hz, u.modulation, u.waveform)
                       : make_tx_config(u.bandwidth_khz, u.modulation, u.waveform);
    cfg.fec = u.fec;
    return cfg;
}

double user_mix_hz(const UserSpec& u)
{
    return u.center_offsets_hz.size() == 1 ? u.center_offsets_hz.front() : 0.0;
}

ChannelProfile scenario_channel(const ScenarioSpec& spec)
{
    if (!spec.channel_scenario)
        throw ValidationError("scenario has no fading channel");
    ChannelProfile p = build_channel(*spec.channel_scenario);
    if (spec.tap_delays_samples) {
        p.tap_delays_samples = *spec.tap_delays_samples;
        p.tap_count = int(p.tap_delays_samples.size());
        p.tap_powers = spec.tap_powers ? *spec.tap_powers : default_tap_powers(p.tap_count);
    } else if (spec.tap_powers) {
        p.tap_powers = *spec.tap_powers;
    }
    double sum = 0.0;
    for (double v : p.tap_powers)
        sum += v;
    for (auto& v : p.tap_powers)
        v /= sum;
    return p;
}

std::vector<std::string> validate_scenario(const ScenarioSpec& spec)
{
    std::vector<std::string> errs;
    if (spec.users.empty())
        errs.push_back("users: list is empty");
    const auto& legal = supported_bandwidths();
    struct Band {
        std::string user;
        double lo, hi;
    };
    std::vector<Band> bands;
    for (std::size_t i = 0; i < spec.users.size(); ++i) {
        const UserSpec& u = spec.users[i];
        const std::string ctx = "users[" + std::to_string(i) + "] '" + u.name + "': ";
        if (u.name.empty())
            errs.push_back("users[" + std::to_string(i) + "]: name is empty");
        if (std::find(legal.begin(), legal.end(), u.bandwidth_khz) == legal.end()) {
            std::string list;
            for (int b : legal)
                list += (list.empty() ? "" : ", ") + std::to_string(b);
            errs.push_back(ctx + "bandwidth " + std::to_string(u.bandwidth_khz) + " kHz unsupported (legal: " + list +
                           ")");
            continue;
        }
        if (u.center_offsets_hz.empty()) {
            errs.push_back(ctx + "center_offsets_hz is empty");
            continue;
        }
        if (u.waveform == Waveform::FOFDM)
            errs.push_back(ctx + "F-OFDM is available in complexity reports only");
        const double half = u.bandwidth_khz * 500.0;
        if (u.center_offsets_hz.size() > 1) {
            try {
                validate(user_tx_config(u));
            } catch (const ValidationError& e) {
                errs.push_back(ctx + e.what());
                continue;
            }
        } else if (std::abs(u.center_offsets_hz[0]) + half > 0.45 * kLinkRateHz) {
            errs.push_back(ctx + "band exceeds the link-rate passband");
        }
        for (double c : user_band_centers(u))
            bands.push_back({u.name, c - half - kUserGuardHz, c + half + kUserGuardHz});
    }
    for (std::size_t a = 0; a < bands.size(); ++a)
        for (std::size_t b = a + 1; b < bands.size(); ++b)
            if (bands[a].user != bands[b].user && bands[a].lo < bands[b].hi && bands[b].lo < bands[a].hi)
                errs.push_back("users '" + bands[a].user + "' and '" + bands[b].user + "' overlap");
    for (std::size_t a = 0; a < spec.users.size(); ++a)
        for (std::size_t b = a + 1; b < spec.users.size(); ++b)
            if (spec.users[a].name == spec.users[b].name)
                errs.push_back("duplicate user name '" + spec.users[a].name + "'");
    if (spec.snr_grid_db.empty())
        errs.push_back("snr_grid_db: list is empty");
    if (spec.seeds.empty())
        errs.push_back("seeds: list is empty");
    if (spec.outputs.empty())
        errs.push_back("outputs: path is empty");
    if (spec.dme) {
        try {
            validate(*spec.dme);
        } catch (const ValidationError& e) {
            errs.push_back(std::string("dme: ") + e.what());
        }
    }
    if (spec.ggi) {
        try {
            validate(*spec.ggi);
        } catch (const ValidationError& e) {
            errs.push_back(std::string("ggi: ") + e.what());
        }
    }
    if (spec.tap_delays_samples && spec.tap_powers && spec.tap_delays_samples->size() != spec.tap_powers->size())
        errs.push_back("channel: tap_delays_samples and tap_powers differ in length");
    if (spec.tap_delays_samples)
        for (int d : *spec.tap_delays_samples)
            if (d < 0)
                errs.push_back("channel: negative tap delay");
    if (spec.tap_powers)
        for (double p : *spec.tap_powers)
            if (!(p >= 0.0))
                errs.push_back("channel: negative tap power");
    if ((spec.tap_delays_samples || spec.tap_powers) && !spec.channel_scenario)
        errs.push_back("channel: tap overrides need a scenario (APT, TMA or ENR)");
    if (spec.monte_carlo.target_errors == 0 || spec.monte_carlo.max_bits == 0)
        errs.push_back("monte_carlo: target_errors and max_bits must be positive");
    if (!(spec.blank_threshold > 1.0))
        errs.push_back("pulse_blanking_threshold must exceed 1");
    if (spec.psd_frames < 1)
        errs.push_back("psd_frames must be positive");
    if (spec.complexity_bands < 0)
        errs.push_back("complexity_bands must be non-negative");
    if (spec.max_timing_offset < 0)
        errs.push_back("max_timing_offset must be non-negative");
    return errs;
}

ScenarioSpec parse_scenario_text(const std::string& text, const std::string& origin)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_col(text, e.byte);
        throw ScenarioError({origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what()});
    }
    if (!j.is_object())
        throw ScenarioError({origin + ": top level must be an object"});
    std::vector<std::string> errs;
    Reader r{errs};
    ScenarioSpec s;
    s.name = r.get<std::string>(j, "name", "").value_or("");
    if (auto users = j.find("users"); users == j.end()) {
        errs.push_back("users: missing");
    } else if (!users->is_array()) {
        errs.push_back("users: must be a list");
    } else {
        for (std::size_t i = 0; i < users->size(); ++i) {
            const json& ju = (*users)[i];
            const std::string ctx = "users[" + std::to_string(i) + "].";
            if (!ju.is_object()) {
                errs.push_back(ctx.substr(0, ctx.size() - 1) + ": must be an object");
                continue;
            }
            UserSpec u;
            u.name = r.get<std::string>(ju, "name", ctx).value_or("user" + std::to_string(i));
            u.bandwidth_khz = r.need<int>(ju, "bandwidth_khz", ctx).value_or(0);
            if (auto c = r.get<rvec>(ju, "center_offsets_hz", ctx))
                u.center_offsets_hz = *c;
            if (auto m = r.get<std::string>(ju, "modulation", ctx)) {
                try {
                    u.modulation = modulation_from_string(*m);
                } catch (const ValidationError& e) {
                    errs.push_back(ctx + "modulation: " + e.what());
                }
            }
            if (auto w = r.get<std::string>(ju, "waveform", ctx)) {
                try {
                    u.waveform = waveform_from_string(*w);
                } catch (const ValidationError& e) {
                    errs.push_back(ctx + "waveform: " + e.what());
                }
            }
            u.fec = r.get<bool>(ju, "fec", ctx).value_or(true);
            s.users.push_back(u);
        }
    }
    if (j.contains("channel") && !j.at("channel").is_null()) {
        const json& jc = j.at("channel");
        if (jc.is_string()) {
            try {
                s.channel_scenario = scenario_from_string(jc.get<std::string>());
            } catch (const ValidationError& e) {
                errs.push_back(std::string("channel: ") + e.what());
            }
        } else if (jc.is_object()) {
            if (auto sc = r.need<std::string>(jc, "scenario", "channel.")) {
                try {
                    s.channel_scenario = scenario_from_string(*sc);
                } catch (const ValidationError& e) {
                    errs.push_back(std::string("channel.scenario: ") + e.what());
                }
            }
            s.tap_delays_samples = r.get<std::vector<int>>(jc, "tap_delays_samples", "channel.");
            s.tap_powers = r.get<rvec>(jc, "tap_powers", "channel.");
        } else {
            errs.push_back("channel: must be a scenario name or an object");
        }
    }
    if (j.contains("dme") && !j.at("dme").is_null()) {
        const json& jd = j.at("dme");
        DmeSignalParams d;
        d.alpha = r.get<double>(jd, "alpha", "dme.").value_or(d.alpha);
        d.delta_t = r.get<double>(jd, "delta_t", "dme.").value_or(d.delta_t);
        d.amplitude = r.get<double>(jd, "amplitude", "dme.").value_or(d.amplitude);
        d.center_offset_hz = r.get<double>(jd, "center_offset_hz", "dme.").value_or(d.center_offset_hz);
        d.pulse_pair_rate_pps = r.get<double>(jd, "pulse_pair_rate_pps", "dme.").value_or(d.pulse_pair_rate_pps);
        s.dme = d;
    }
    if (j.contains("ggi") && !j.at("ggi").is_null()) {
        const json& jg = j.at("ggi");
        GgiParams g;
        g.on_fraction = r.get<double>(jg, "on_fraction", "ggi.").value_or(g.on_fraction);
        g.gate_period_samples = r.get<int>(jg, "gate_period_samples", "ggi.").value_or(g.gate_period_samples);
        g.power = r.get<double>(jg, "power", "ggi.").value_or(g.power);
        s.ggi = g;
    }
    s.snr_grid_db = r.need<rvec>(j, "snr_grid_db", "").value_or(rvec{});
    s.seeds = r.need<std::vector<std::uint64_t>>(j, "seeds", "").value_or(std::vector<std::uint64_t>{});
    s.outputs = r.get<std::string>(j, "outputs", "").value_or(s.outputs);
    if (j.contains("monte_carlo")) {
        const json& jm = j.at("monte_carlo");
        s.monte_carlo.target_errors =
            r.get<std::uint64_t>(jm, "target_errors", "monte_carlo.").value_or(s.monte_carlo.target_errors);
        s.monte_carlo.max_bits = r.get<std::uint64_t>(jm, "max_bits", "monte_carlo.").value_or(s.monte_carlo.max_bits);
    }
    s.blank_threshold = r.get<double>(j, "pulse_blanking_threshold", "").value_or(s.blank_threshold);
    s.psd_frames = r.get<int>(j, "psd_frames", "").value_or(s.psd_frames);
    s.complexity_bands = r.get<int>(j, "complexity_bands", "").value_or(s.complexity_bands);
    s.max_timing_offset = r.get<int>(j, "max_timing_offset", "").value_or(s.max_timing_offset);

    if (errs.empty()) {
        auto more = validate_scenario(s);
        errs.insert(errs.end(), more.begin(), more.end());
    }
    if (!errs.empty()) {
        for (auto& e : errs)
            e = origin + ": " + e;
        throw ScenarioError(errs);
    }
    return s;
}

ScenarioSpec parse_scenario(const std::string& path)
{
    std::string text;
    try {
        text = read_text(path);
    } catch (const IoError& e) {
        throw ScenarioError({e.what()});
    }
    return parse_scenario_text(text, path);
}

std::string serialize_scenario(const ScenarioSpec& s)
{
    ordered_json j;
    j["name"] = s.name;
    ordered_json users = ordered_json::array();
    for (const auto& u : s.users) {
        ordered_json ju;
        ju["name"] = u.name;
        ju["bandwidth_khz"] = u.bandwidth_khz;
        ju["center_offsets_hz"] = u.center_offsets_hz;
        ju["modulation"] = to_string(u.modulation);
        ju["waveform"] = to_string(u.waveform);
        ju["fec"] = u.fec;
        users.push_back(ju);
    }
    j["users"] = users;
    if (s.channel_scenario) {
        ordered_json jc;
        jc["scenario"] = to_string(*s.channel_scenario);
        if (s.tap_delays_samples)
            jc["tap_delays_samples"] = *s.tap_delays_samples;
        if (s.tap_powers)
            jc["tap_powers"] = *s.tap_powers;
        j["channel"] = jc;
    } else {
        j["channel"] = nullptr;
    }
    if (s.dme) {
        j["dme"] = {{"alpha", s.dme->alpha},
                    {"delta_t", s.dme->delta_t},
                    {"amplitude", s.dme->amplitude},
                    {"center_offset_hz", s.dme->center_offset_hz},
                    {"pulse_pair_rate_pps", s.dme->pulse_pair_rate_pps}};
    }
    if (s.ggi) {
        j["ggi"] = {{"on_fraction", s.ggi->on_fraction},
                    {"gate_period_samples", s.ggi->gate_period_samples},
                    {"power", s.ggi->power}};
    }
    j["snr_grid_db"] = s.snr_grid_db;
    j["seeds"] = s.seeds;
    j["outputs"] = s.outputs;
    j["monte_carlo"] = {{"target_errors", s.monte_carlo.target_errors}, {"max_bits", s.monte_carlo.max_bits}};
    j["pulse_blanking_threshold"] = s.blank_threshold;
    j["psd_frames"] = s.psd_frames;
    j["complexity_bands"] = s.complexity_bands;
    j["max_timing_offset"] = s.max_timing_offset;
    return j.dump(2) + "\n";
}

}  // namespace refofdm

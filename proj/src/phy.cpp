#include "refofdm/phy.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "refofdm/fft.hpp"
#include "refofdm/kernels.hpp"
#include "refofdm/ofdm.hpp"

namespace refofdm {

namespace {

constexpr int kSymbolLen = kFftSize + kCpLength;

cvec shifted_row(const cvec& row, int shift)
{
    cvec out(kFftSize, cplx(0.0, 0.0));
    for (int k = 0; k < kFftSize; ++k) {
        const int j = k + shift;
        if (j >= 0 && j < kFftSize)
            out[std::size_t(j)] = row[std::size_t(k)];
    }
    return out;
}

KindMap band_kinds(const BandSlot& b)
{
    KindMap base = cell_kinds(b.spec);
    KindMap out(base.size());
    for (std::size_t s = 0; s < base.size(); ++s) {
        out[s].fill(CellKind::Null);
        for (int k = 0; k < kFftSize; ++k) {
            const int j = k + b.shift;
            if (j >= 0 && j < kFftSize && base[s][std::size_t(k)] != CellKind::Null)
                out[s][std::size_t(j)] = base[s][std::size_t(k)];
        }
    }
    return out;
}

std::vector<cvec> band_reference(const BandSlot& b, std::uint32_t seed)
{
    std::vector<cvec> ref = reference_symbols(b.spec, seed);
    for (auto& row : ref)
        row = shifted_row(row, b.shift);
    return ref;
}

std::uint32_t band_seed(const TxConfig& cfg, std::size_t b)
{
    return cfg.pilot_seed + std::uint32_t(b);
}

std::vector<int> band_used(const BandSlot& b)
{
    std::vector<int> u = b.spec.used_indices();
    for (int& k : u)
        k += b.shift;
    return u;
}

/// Response with the linear-phase delay removed, evaluated at the 128 subcarriers.
cvec delay_free_response(const AnyFilter& f)
{
    rvec omegas(kFftSize);
    for (int k = 0; k < kFftSize; ++k)
        omegas[std::size_t(k)] = 2.0 * kPi * double(k - kDcIndex) / double(kFftSize);
    cvec h;
    int gd = 0;
    if (const auto* r = std::get_if<ReconfigFilter>(&f)) {
        h = dtft(r->taps, omegas);
        gd = r->group_delay();
    } else {
        const auto& bank = std::get<MultibandFilterBank>(f);
        h = dtft(bank.composite_taps, omegas);
        gd = bank.group_delay();
    }
    for (int k = 0; k < kFftSize; ++k)
        h[std::size_t(k)] *= std::polar(1.0, omegas[std::size_t(k)] * double(gd));
    return h;
}

int filter_delay(const AnyFilter& f)
{
    return std::visit([](const auto& x) { return x.group_delay(); }, f);
}

}  // namespace

std::string to_string(Waveform w)
{
    switch (w) {
    case Waveform::OFDM: return "OFDM";
    case Waveform::FOFDM: return "F-OFDM";
    case Waveform::RefOFDM: return "Ref-OFDM";
    }
    return "?";
}

Waveform waveform_from_string(const std::string& s)
{
    if (s == "OFDM")
        return Waveform::OFDM;
    if (s == "F-OFDM" || s == "FOFDM")
        return Waveform::FOFDM;
    if (s == "Ref-OFDM" || s == "RefOFDM")
        return Waveform::RefOFDM;
    throw ValidationError("unknown waveform '" + s + "' (expected OFDM, F-OFDM or Ref-OFDM)");
}

TxConfig make_tx_config(int bandwidth_khz, Modulation m, Waveform w)
{
    TxConfig cfg;
    cfg.bands.push_back({build_frame_spec(bandwidth_khz), 0});
    cfg.modulation = m;
    if (w == Waveform::RefOFDM || w == Waveform::FOFDM)
        cfg.filter = AnyFilter(make_ldacs_filter(bandwidth_khz));
    return cfg;
}

TxConfig make_multiband_config(int bandwidth_khz, const std::vector<double>& centers_hz, Modulation m, Waveform w)
{
    if (centers_hz.empty())
        throw ValidationError("multi-band user needs at least one center frequency");
    TxConfig cfg;
    cfg.modulation = m;
    std::set<int> active;
    const double half_rate = kBaseRateHz / 2.0;
    for (double c : centers_hz) {
        const int k = nearest_branch(kMultibandBranches, c / half_rate);
        if (!active.insert(k).second)
            throw ValidationError("multi-band centers snap to the same filter-bank branch");
        const int shift = 4 * k - kDcIndex;
        cfg.bands.push_back({build_frame_spec(bandwidth_khz), shift});
    }
    if (w == Waveform::RefOFDM || w == Waveform::FOFDM)
        cfg.filter = AnyFilter(build_dftfb(make_ldacs_filter(bandwidth_khz), kMultibandBranches, active));
    validate(cfg);
    return cfg;
}

void validate(const TxConfig& cfg)
{
    if (cfg.bands.empty())
        throw ValidationError("transmit configuration has no band");
    if (cfg.cp_length_samples != kCpLength)
        throw ValidationError("cyclic prefix must be " + std::to_string(kCpLength) + " samples");
    if (cfg.upsample_factor != kUpsample)
        throw ValidationError("upsample factor must be 2");
    std::vector<int> owner(kFftSize, -1);
    for (std::size_t b = 0; b < cfg.bands.size(); ++b) {
        const BandSlot& slot = cfg.bands[b];
        if (slot.shift % 4 != 0)
            throw ValidationError("band shift must be a multiple of 4 subcarriers");
        for (int k : band_used(slot)) {
            if (k < 1 || k >= kFftSize)
                throw ValidationError("band shift moves subcarriers off the 128-point grid");
            if (owner[std::size_t(k)] >= 0)
                throw ValidationError("bands " + std::to_string(owner[std::size_t(k)]) + " and " +
                                      std::to_string(b) + " overlap");
            owner[std::size_t(k)] = int(b);
        }
    }
}

int coded_bits(const TxConfig& cfg, std::size_t band)
{
    return cfg.bands.at(band).spec.data_capacity() * bits_per_symbol(cfg.modulation);
}

FecLayout band_fec_layout(const TxConfig& cfg, std::size_t band)
{
    return fec_layout(coded_bits(cfg, band));
}

int payload_bits(const TxConfig& cfg)
{
    int total = 0;
    for (std::size_t b = 0; b < cfg.bands.size(); ++b)
        total += cfg.fec ? band_fec_layout(cfg, b).payload_bits : coded_bits(cfg, b);
    return total;
}

KindMap composite_kinds(const TxConfig& cfg)
{
    KindMap out(kSymbolsPerFrame);
    for (auto& row : out)
        row.fill(CellKind::Null);
    for (const auto& b : cfg.bands) {
        const KindMap k = band_kinds(b);
        for (std::size_t s = 0; s < k.size(); ++s)
            for (int i = 0; i < kFftSize; ++i)
                if (k[s][std::size_t(i)] != CellKind::Null)
                    out[s][std::size_t(i)] = k[s][std::size_t(i)];
    }
    return out;
}

std::vector<cvec> composite_reference(const TxConfig& cfg)
{
    std::vector<cvec> out(kSymbolsPerFrame, cvec(kFftSize, cplx(0.0, 0.0)));
    for (std::size_t b = 0; b < cfg.bands.size(); ++b) {
        const auto ref = band_reference(cfg.bands[b], band_seed(cfg, b));
        for (std::size_t s = 0; s < ref.size(); ++s)
            for (int k = 0; k < kFftSize; ++k)
                out[s][std::size_t(k)] += ref[s][std::size_t(k)];
    }
    return out;
}

ResourceGrid build_tx_grid(const TxConfig& cfg, const bits_t& payload)
{
    validate(cfg);
    const int expected = payload_bits(cfg);
    if (int(payload.size()) != expected)
        throw ValidationError("payload must be " + std::to_string(expected) + " bits, got " +
                              std::to_string(payload.size()));
    ResourceGrid g;
    g.spec = cfg.frame_spec();
    g.kinds = composite_kinds(cfg);
    g.grid.assign(kSymbolsPerFrame, cvec(kFftSize, cplx(0.0, 0.0)));
    std::size_t offset = 0;
    for (std::size_t b = 0; b < cfg.bands.size(); ++b) {
        const BandSlot& slot = cfg.bands[b];
        const int nbits = cfg.fec ? band_fec_layout(cfg, b).payload_bits : coded_bits(cfg, b);
        bits_t chunk(payload.begin() + long(offset), payload.begin() + long(offset) + nbits);
        offset += std::size_t(nbits);
        bits_t coded = randomize(chunk, cfg.randomizer_seed);
        if (cfg.fec) {
            coded = fec_encode(coded, band_fec_layout(cfg, b));
            coded = Interleaver(int(coded.size())).interleave(coded);
        }
        const ResourceGrid band = map_symbols(slot.spec, modulate(coded, cfg.modulation), band_seed(cfg, b));
        for (std::size_t s = 0; s < band.grid.size(); ++s) {
            const cvec row = shifted_row(band.grid[s], slot.shift);
            for (int k = 0; k < kFftSize; ++k)
                g.grid[s][std::size_t(k)] += row[std::size_t(k)];
        }
    }
    return g;
}

ComplexSignal transmit_baseband(const TxConfig& cfg, const bits_t& payload)
{
    const ResourceGrid g = build_tx_grid(cfg, payload);
    ComplexSignal x = ofdm_modulate(g.grid, cfg.cp_length_samples);
    if (cfg.filter)
        x = filter_signal(*cfg.filter, x);
    return x;
}

ComplexSignal transmit(const TxConfig& cfg, const bits_t& payload)
{
    ComplexSignal y = interpolate2(transmit_baseband(cfg, payload));
    double p = 0.0;
    for (const auto& v : y.samples)
        p += std::norm(v);
    p /= double(y.samples.size());
    const double a = 1.0 / std::sqrt(p);
    for (auto& v : y.samples)
        v *= a;
    y.symbol_scale *= a;
    return y;
}

cvec known_response(const TxConfig& cfg)
{
    cvec d(kFftSize, cplx(1.0, 0.0));
    if (!cfg.filter)
        return d;
    const cvec r = delay_free_response(*cfg.filter);
    for (int k = 0; k < kFftSize; ++k)
        d[std::size_t(k)] = r[std::size_t(k)] * r[std::size_t(k)];
    return d;
}

int nominal_timing(const TxConfig& cfg)
{
    return cfg.filter ? 2 * filter_delay(*cfg.filter) : 0;
}

ComplexSignal receiver_front_end(const TxConfig& cfg, const ComplexSignal& rx)
{
    if (rx.samples.empty())
        throw ValidationError("received signal is empty");
    ComplexSignal base = decimate2(rx);
    if (cfg.filter)
        base = filter_signal(*cfg.filter, base);
    return base;
}

SyncResult synchronize(const ComplexSignal& base, const TxConfig& cfg)
{
    const cvec& r = base.samples;
    const int n = int(r.size());
    const int cp = cfg.cp_length_samples;
    const int sym = kFftSize + cp;
    constexpr int lag = kFftSize / 4;
    constexpr int span = kFftSize - lag;
    if (n < 2 * sym + kFftSize)
        throw SyncNotFound("signal shorter than the synchronization preamble");

    // Repetition metric over the four-fold sync symbol.
    const int nd = n - kFftSize;
    rvec metric(static_cast<std::size_t>(nd), 0.0);
    rvec energy(static_cast<std::size_t>(nd), 0.0);
    cplx p(0.0, 0.0);
    double e = 0.0;
    for (int m = 0; m < span; ++m) {
        p += std::conj(r[std::size_t(m)]) * r[std::size_t(m + lag)];
        e += 0.5 * (std::norm(r[std::size_t(m)]) + std::norm(r[std::size_t(m + lag)]));
    }
    for (int d = 0; d < nd; ++d) {
        metric[std::size_t(d)] = e > 0.0 ? std::norm(p) / (e * e) : 0.0;
        energy[std::size_t(d)] = e;
        const std::size_t a = std::size_t(d), b = std::size_t(d + span);
        p += std::conj(r[b]) * r[b + lag] - std::conj(r[a]) * r[a + lag];
        e += 0.5 * (std::norm(r[b]) + std::norm(r[b + lag]) - std::norm(r[a]) - std::norm(r[a + lag]));
    }
    // Weak leakage from neighbouring users also repeats; only windows near full strength count.
    const double e_max = *std::max_element(energy.begin(), energy.end());
    for (int d = 0; d < nd; ++d)
        if (energy[std::size_t(d)] < kSyncEnergyGate * e_max)
            metric[std::size_t(d)] = 0.0;
    const double peak = *std::max_element(metric.begin(), metric.end());
    if (!(peak >= kCoarseSyncThreshold))
        throw SyncNotFound("no synchronization preamble found (coarse metric " + std::to_string(peak) + ")");
    int first = 0;
    while (metric[std::size_t(first)] < 0.5 * peak)
        ++first;
    int coarse = first;
    for (int d = first; d < std::min(nd, first + 2 * lag); ++d)
        if (metric[std::size_t(d)] > metric[std::size_t(coarse)])
            coarse = d;

    // Cross-correlation with the filtered full-band sync symbol.
    const std::vector<cvec> ref = composite_reference(cfg);
    const cvec resp = known_response(cfg);
    cvec s1(kFftSize);
    for (int k = 0; k < kFftSize; ++k)
        s1[std::size_t(k)] = ref[1][std::size_t(k)] * resp[std::size_t(k)];
    {
        std::vector<cvec> one{s1};
        const ComplexSignal t = ofdm_modulate(one, 0);
        s1 = t.samples;
    }
    double s1e = 0.0;
    for (const auto& v : s1)
        s1e += std::norm(v);
    int best = -1;
    double best_c = 0.0;
    const int lo = std::max(0, coarse - 2 * lag - cp);
    const int hi = std::min(n - sym - cp - kFftSize, coarse + lag);
    for (int t = lo; t <= hi; ++t) {
        const std::size_t o = std::size_t(t + sym + cp);
        cplx acc(0.0, 0.0);
        double re = 0.0;
        for (int i = 0; i < kFftSize; ++i) {
            acc += r[o + std::size_t(i)] * std::conj(s1[std::size_t(i)]);
            re += std::norm(r[o + std::size_t(i)]);
        }
        const double c = re > 0.0 ? std::abs(acc) / std::sqrt(re * s1e) : 0.0;
        if (c > best_c) {
            best_c = c;
            best = t;
        }
    }
    if (best < 0 || best_c < kFineSyncThreshold)
        throw SyncNotFound("no synchronization symbol found (correlation " + std::to_string(best_c) + ")");

    // CFO from cyclic-prefix correlation over the ISI-free half of each prefix.
    cplx acc(0.0, 0.0);
    for (int s = 0; s < kSymbolsPerFrame; ++s) {
        const int start = best + s * sym;
        if (start + cp + kFftSize > n)
            break;
        for (int m = cp / 2; m < cp; ++m)
            acc += std::conj(r[std::size_t(start + m)]) * r[std::size_t(start + m + kFftSize)];
    }
    SyncResult res;
    res.frame_start = best;
    res.cfo_hz = std::arg(acc) / (2.0 * kPi * kFftSize) * base.sample_rate_hz;
    res.coarse_metric = peak;
    res.fine_metric = best_c;
    return res;
}

BlankResult pulse_blank(const ComplexSignal& s, double threshold_factor, int window)
{
    if (!(threshold_factor > 1.0))
        throw ValidationError("pulse blanking threshold factor must exceed 1");
    BlankResult out;
    out.signal = s;
    out.mask.assign(s.samples.size(), false);
    if (std::isinf(threshold_factor) || s.samples.empty())
        return out;
    const int n = int(s.samples.size());
    const int half = std::max(1, window / 2);
    rvec mag(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        mag[std::size_t(i)] = std::abs(s.samples[std::size_t(i)]);
    // Two multisets split at the median give O(log w) updates.
    std::multiset<double> low, high;
    auto rebalance = [&] {
        while (low.size() > high.size() + 1) {
            high.insert(*std::prev(low.end()));
            low.erase(std::prev(low.end()));
        }
        while (high.size() > low.size()) {
            low.insert(*high.begin());
            high.erase(high.begin());
        }
    };
    auto insert = [&](double v) {
        if (low.empty() || v <= *std::prev(low.end()))
            low.insert(v);
        else
            high.insert(v);
        rebalance();
    };
    auto erase = [&](double v) {
        auto it = low.find(v);
        if (it != low.end())
            low.erase(it);
        else
            high.erase(high.find(v));
        rebalance();
    };
    int wl = 0, wr = -1;
    for (int i = 0; i < n; ++i) {
        const int a = std::max(0, i - half), b = std::min(n - 1, i + half);
        while (wr < b)
            insert(mag[std::size_t(++wr)]);
        while (wl < a)
            erase(mag[std::size_t(wl++)]);
        const double med = *std::prev(low.end());
        if (mag[std::size_t(i)] > threshold_factor * med) {
            out.mask[std::size_t(i)] = true;
            out.signal.samples[std::size_t(i)] = cplx(0.0, 0.0);
            ++out.blanked;
        }
    }
    return out;
}

std::vector<cvec> demodulate_frame(const ComplexSignal& base, int frame_start, int cp, int backoff)
{
    const int sym = kFftSize + cp;
    const int n = int(base.samples.size());
    std::vector<cvec> grid(kSymbolsPerFrame);
    cvec buf(kFftSize);
    cvec comp(kFftSize);
    for (int k = 0; k < kFftSize; ++k)
        comp[std::size_t(k)] = std::polar(1.0, 2.0 * kPi * double(k - kDcIndex) * backoff / kFftSize);
    for (int s = 0; s < kSymbolsPerFrame; ++s) {
        const int start = frame_start + s * sym + cp - backoff;
        for (int i = 0; i < kFftSize; ++i) {
            const int j = start + i;
            buf[std::size_t(i)] = (j >= 0 && j < n) ? base.samples[std::size_t(j)] : cplx(0.0, 0.0);
        }
        cvec y = ofdm_demodulate_symbol(buf.data());
        for (int k = 0; k < kFftSize; ++k)
            y[std::size_t(k)] *= comp[std::size_t(k)];
        grid[std::size_t(s)] = std::move(y);
    }
    return grid;
}

Equalized estimate_and_equalize(const std::vector<cvec>& grid_rx, const BandSlot& band, std::uint32_t pilot_seed,
                                const cvec& response, const std::optional<cvec>& known_channel)
{
    if (grid_rx.size() != std::size_t(kSymbolsPerFrame))
        throw ValidationError("received grid must hold 64 symbols");
    const KindMap kinds = band_kinds(band);
    const auto ref = band_reference(band, pilot_seed);
    const std::vector<int> used = band_used(band);
    Equalized eq;
    eq.symbols.assign(kSymbolsPerFrame, cvec(kFftSize, cplx(0.0, 0.0)));
    eq.channel.assign(kSymbolsPerFrame, cvec(kFftSize, cplx(0.0, 0.0)));
    eq.erased.assign(kSymbolsPerFrame, std::vector<bool>(kFftSize, false));
    for (int s = band.spec.sync_symbol_count; s < kSymbolsPerFrame; ++s) {
        const auto& y = grid_rx[std::size_t(s)];
        cvec& h = eq.channel[std::size_t(s)];
        if (known_channel) {
            for (int k : used)
                h[std::size_t(k)] = (*known_channel)[std::size_t(k)];
        } else {
            std::vector<int> pk;
            cvec pv;
            for (int k : used) {
                if (kinds[std::size_t(s)][std::size_t(k)] != CellKind::Pilot)
                    continue;
                const cplx d = response[std::size_t(k)];
                if (std::abs(d) < kZfGuard)
                    continue;
                pk.push_back(k);
                pv.push_back(y[std::size_t(k)] / (d * ref[std::size_t(s)][std::size_t(k)]));
            }
            if (pk.empty())
                throw EstimationFailure("symbol " + std::to_string(s) + ": every pilot erased");
            std::size_t j = 0;
            for (int k : used) {
                while (j + 1 < pk.size() && pk[j + 1] <= k)
                    ++j;
                if (pk.size() == 1) {
                    h[std::size_t(k)] = pv[0];
                    continue;
                }
                // Linear interpolation between neighbours, linear extrapolation at the edges.
                const std::size_t a = std::min(j, pk.size() - 2);
                const double t = double(k - pk[a]) / double(pk[a + 1] - pk[a]);
                h[std::size_t(k)] = pv[a] + t * (pv[a + 1] - pv[a]);
            }
        }
        for (int k : used) {
            const cplx g = response[std::size_t(k)] * h[std::size_t(k)];
            if (std::abs(g) < kZfGuard) {
                eq.erased[std::size_t(s)][std::size_t(k)] = true;
                continue;
            }
            eq.symbols[std::size_t(s)][std::size_t(k)] = y[std::size_t(k)] / g;
        }
    }
    return eq;
}

cvec band_data(const std::vector<cvec>& grid, const BandSlot& band)
{
    const KindMap kinds = band_kinds(band);
    cvec out;
    for (std::size_t s = 0; s < kinds.size(); ++s)
        for (int k = 0; k < kFftSize; ++k)
            if (kinds[s][std::size_t(k)] == CellKind::Data)
                out.push_back(grid[s][std::size_t(k)]);
    return out;
}

RxReport receive(const TxConfig& cfg, const ComplexSignal& signal, const RxOptions& opt)
{
    validate(cfg);
    ComplexSignal base = receiver_front_end(cfg, signal);
    RxReport rep;
    const int nominal = nominal_timing(cfg);
    int start = nominal;
    double cfo = 0.0;
    if (opt.known_timing) {
        start = *opt.known_timing;
        cfo = opt.known_cfo_hz.value_or(0.0);
    } else {
        const SyncResult sync = synchronize(base, cfg);
        start = sync.frame_start;
        cfo = opt.known_cfo_hz.value_or(sync.cfo_hz);
    }
    rep.timing_offset = start - nominal;
    const cvec resp = known_response(cfg);

    std::vector<Equalized> eqs;
    auto equalize_at = [&](double f_hz) {
        const ComplexSignal shifted = f_hz != 0.0 ? frequency_shift(base, -f_hz) : base;
        const BlankResult blank = pulse_blank(shifted, opt.blank_threshold);
        rep.blanked_sample_count = blank.blanked;
        const std::vector<cvec> grid = demodulate_frame(blank.signal, start, cfg.cp_length_samples, opt.backoff);
        eqs.clear();
        for (std::size_t b = 0; b < cfg.bands.size(); ++b)
            eqs.push_back(estimate_and_equalize(grid, cfg.bands[b], band_seed(cfg, b), resp, opt.known_channel));
    };
    equalize_at(cfo);
    if (!opt.known_cfo_hz && !opt.known_channel) {
        // Residual CFO from the common phase drift of consecutive channel estimates.
        cplx drift(0.0, 0.0);
        for (std::size_t b = 0; b < cfg.bands.size(); ++b) {
            const auto& h = eqs[b].channel;
            for (int s = cfg.bands[b].spec.sync_symbol_count; s + 1 < kSymbolsPerFrame; ++s)
                for (int k : band_used(cfg.bands[b]))
                    drift += h[std::size_t(s + 1)][std::size_t(k)] * std::conj(h[std::size_t(s)][std::size_t(k)]);
        }
        const double sym_len = double(kFftSize + cfg.cp_length_samples);
        const double residual = std::arg(drift) / (2.0 * kPi * sym_len) * base.sample_rate_hz;
        if (std::abs(drift) > 0.0 && residual != 0.0) {
            cfo += residual;
            equalize_at(cfo);
        }
    }
    rep.cfo_hz = cfo;

    for (std::size_t b = 0; b < cfg.bands.size(); ++b) {
        const BandSlot& slot = cfg.bands[b];
        const Equalized& eq = eqs[b];
        const cvec data = band_data(eq.symbols, slot);
        std::vector<bool> erased;
        {
            const KindMap kinds = band_kinds(slot);
            for (std::size_t s = 0; s < kinds.size(); ++s)
                for (int k = 0; k < kFftSize; ++k)
                    if (kinds[s][std::size_t(k)] == CellKind::Data)
                        erased.push_back(eq.erased[s][std::size_t(k)]);
        }
        for (bool e : erased)
            rep.erased_cells += e;
        bits_t coded = demodulate(data, cfg.modulation, erased);
        bits_t bits;
        if (cfg.fec) {
            coded = Interleaver(int(coded.size())).deinterleave(coded);
            const FecDecodeResult dec = fec_decode(coded, band_fec_layout(cfg, b));
            for (bool f : dec.block_failed)
                rep.rs_block_failures += f;
            bits = dec.bits;
        } else {
            for (auto& v : coded)
                v &= 1u;
            bits = coded;
        }
        bits = randomize(bits, cfg.randomizer_seed);
        rep.decoded_bits.insert(rep.decoded_bits.end(), bits.begin(), bits.end());
        rep.equalized_data.insert(rep.equalized_data.end(), data.begin(), data.end());

        const KindMap kinds = band_kinds(slot);
        for (int k : band_used(slot)) {
            cplx hsum(0.0, 0.0);
            double err = 0.0;
            int nd = 0;
            for (int s = slot.spec.sync_symbol_count; s < kSymbolsPerFrame; ++s) {
                hsum += eq.channel[std::size_t(s)][std::size_t(k)];
                if (kinds[std::size_t(s)][std::size_t(k)] != CellKind::Data ||
                    eq.erased[std::size_t(s)][std::size_t(k)])
                    continue;
                const cplx x = eq.symbols[std::size_t(s)][std::size_t(k)];
                const cplx ref = modulate(demodulate(cvec{x}, cfg.modulation), cfg.modulation)[0];
                err += std::norm(x - ref);
                ++nd;
            }
            rep.channel_estimate.push_back(hsum / double(kSymbolsPerFrame - slot.spec.sync_symbol_count));
            rep.per_subcarrier_evm.push_back(nd > 0 ? db10(std::max(err / nd, 1e-40)) : -400.0);
        }
    }
    return rep;
}

}  // namespace refofdm

#include "refofdm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <mutex>
#include <random>

#include <Eigen/Eigenvalues>

#include "refofdm/fft.hpp"
#include "refofdm/ofdm.hpp"

namespace refofdm {

SpectrumGrid estimate_psd(const ComplexSignal& s, int segment_length, double overlap_fraction)
{
    if (segment_length < 2 || !is_pow2(std::size_t(segment_length)))
        throw ValidationError("PSD segment length must be a power of two");
    if (overlap_fraction < 0.0 || overlap_fraction >= 1.0)
        throw ValidationError("PSD overlap must lie in [0, 1)");
    if (s.samples.size() < std::size_t(segment_length))
        throw ValidationError("signal shorter than one PSD segment");
    const int n = segment_length;
    rvec w(static_cast<std::size_t>(n));
    double w2 = 0.0;
    for (int i = 0; i < n; ++i) {
        w[std::size_t(i)] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / n);
        w2 += w[std::size_t(i)] * w[std::size_t(i)];
    }
    const std::size_t step = std::max<std::size_t>(1, std::size_t(std::floor(n * (1.0 - overlap_fraction))));
    const std::size_t segs = (s.samples.size() - std::size_t(n)) / step + 1;
    rvec acc(static_cast<std::size_t>(n), 0.0);
    cvec buf(static_cast<std::size_t>(n));
    for (std::size_t g = 0; g < segs; ++g) {
        for (int i = 0; i < n; ++i)
            buf[std::size_t(i)] = s.samples[g * step + std::size_t(i)] * w[std::size_t(i)];
        fft_inplace(buf, false);
        for (int i = 0; i < n; ++i)
            acc[std::size_t(i)] += std::norm(buf[std::size_t(i)]);
    }
    SpectrumGrid out;
    out.resolution_hz = s.sample_rate_hz / n;
    for (int i = 0; i < n; ++i) {
        const int bin = (i + n / 2) % n;
        const double p = acc[std::size_t(bin)] / (double(segs) * s.sample_rate_hz * w2);
        out.frequencies_hz.push_back((i - n / 2) * out.resolution_hz);
        out.psd_db_per_hz.push_back(p > 0.0 ? std::max(db10(p), kDbFloor) : kDbFloor);
    }
    return out;
}

namespace {

double linear(double db)
{
    return db <= kDbFloor ? 0.0 : from_db10(db);
}

double psd_at(const SpectrumGrid& g, double f)
{
    const auto& x = g.frequencies_hz;
    auto it = std::upper_bound(x.begin(), x.end(), f);
    if (it == x.begin())
        return linear(g.psd_db_per_hz.front());
    if (it == x.end())
        return linear(g.psd_db_per_hz.back());
    const std::size_t j = std::size_t(it - x.begin());
    const double t = (f - x[j - 1]) / (x[j] - x[j - 1]);
    return (1.0 - t) * linear(g.psd_db_per_hz[j - 1]) + t * linear(g.psd_db_per_hz[j]);
}

}  // namespace

double interference_at(const SpectrumGrid& psd, double f1, double f2)
{
    if (psd.frequencies_hz.empty())
        throw ValidationError("empty spectrum");
    if (f1 > f2)
        std::swap(f1, f2);
    if (f1 < psd.frequencies_hz.front() || f2 > psd.frequencies_hz.back())
        throw ValidationError("interference band [" + std::to_string(f1) + ", " + std::to_string(f2) +
                              "] Hz lies outside the spectrum span");
    const auto& x = psd.frequencies_hz;
    double sum = 0.0;
    double fa = f1, pa = psd_at(psd, f1);
    for (auto it = std::upper_bound(x.begin(), x.end(), f1); it != x.end() && *it < f2; ++it) {
        const double pb = linear(psd.psd_db_per_hz[std::size_t(it - x.begin())]);
        sum += 0.5 * (pa + pb) * (*it - fa);
        fa = *it;
        pa = pb;
    }
    sum += 0.5 * (pa + psd_at(psd, f2)) * (f2 - fa);
    return sum > 0.0 ? db10(sum) : kDbFloor;
}

double dme_main_lobe_half_width(const DmeSignalParams& p)
{
    return 1.0 / (2.0 * p.delta_t);
}

WilsonInterval wilson_interval(std::uint64_t errors, std::uint64_t trials, double z)
{
    WilsonInterval w;
    if (trials == 0) {
        w.high = 1.0;
        w.halfwidth = 0.5;
        w.center = 0.5;
        return w;
    }
    const double n = double(trials);
    const double p = double(errors) / n;
    const double z2 = z * z;
    const double d = 1.0 + z2 / n;
    w.center = (p + z2 / (2.0 * n)) / d;
    w.halfwidth = z / d * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    w.low = std::max(0.0, w.center - w.halfwidth);
    w.high = std::min(1.0, w.center + w.halfwidth);
    return w;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index)
{
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

FrameOutcome simulate_frame(const LinkScenario& sc, double ebn0_db, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    const TxConfig& cfg = sc.tx;
    const int nbits = payload_bits(cfg);
    bits_t payload(static_cast<std::size_t>(nbits));
    for (auto& b : payload)
        b = std::uint8_t(rng() & 1u);
    const ComplexSignal x = transmit(cfg, payload);

    int offset = 0;
    if (sc.max_timing_offset > 0)
        offset = 2 * int(rng() % std::uint64_t(sc.max_timing_offset / 2 + 1));
    constexpr int tail = 512;
    ComplexSignal rx;
    rx.sample_rate_hz = x.sample_rate_hz;
    rx.symbol_scale = x.symbol_scale;
    rx.samples.assign(std::size_t(offset), cplx(0.0, 0.0));
    rx.samples.insert(rx.samples.end(), x.samples.begin(), x.samples.end());
    rx.samples.resize(rx.samples.size() + tail, cplx(0.0, 0.0));

    if (sc.channel)
        rx = propagate(rx, realize_fading(*sc.channel, rx.samples.size(), rng(), Exec::Serial), Exec::Serial);
    rx = frequency_shift(rx, sc.mix_hz);
    for (const Interferer& it : sc.interferers) {
        bits_t other(static_cast<std::size_t>(payload_bits(it.tx)));
        for (auto& b : other)
            b = std::uint8_t(rng() & 1u);
        ComplexSignal y = transmit(it.tx, other);
        const std::size_t lead = sc.max_timing_offset > 0 ? std::size_t(rng() % std::uint64_t(sc.max_timing_offset + 1)) : 0;
        ComplexSignal z;
        z.sample_rate_hz = y.sample_rate_hz;
        z.samples.assign(rx.samples.size(), cplx(0.0, 0.0));
        for (std::size_t i = 0; i + lead < z.samples.size() && i < y.samples.size(); ++i)
            z.samples[i + lead] = y.samples[i];
        if (sc.channel)
            z = propagate(z, realize_fading(*sc.channel, z.samples.size(), rng(), Exec::Serial), Exec::Serial);
        z = frequency_shift(z, it.mix_hz);
        for (std::size_t i = 0; i < rx.samples.size(); ++i)
            rx.samples[i] += z.samples[i];
    }
    if (sc.cfo_hz != 0.0)
        rx = frequency_shift(rx, sc.cfo_hz);
    if (sc.dme) {
        const ComplexSignal d =
            generate_dme_stream(*sc.dme, double(rx.samples.size()) / rx.sample_rate_hz, rx.sample_rate_hz, rng());
        for (std::size_t i = 0; i < std::min(d.samples.size(), rx.samples.size()); ++i)
            rx.samples[i] += d.samples[i];
    }
    if (sc.ggi) {
        const ComplexSignal g = generate_ggi(*sc.ggi, rx.samples.size(), rng(), rx.sample_rate_hz);
        for (std::size_t i = 0; i < rx.samples.size(); ++i)
            rx.samples[i] += g.samples[i];
    }
    const std::uint64_t noise_seed = rng();
    if (!std::isinf(ebn0_db))
        rx = add_noise(rx, noise_variance_for_ebn0(x.symbol_scale, ebn0_db, bits_per_symbol(cfg.modulation)),
                       noise_seed);

    rx = frequency_shift(rx, -sc.mix_hz);

    RxOptions opt;
    opt.blank_threshold = sc.blank_threshold;
    if (sc.genie_timing) {
        opt.known_timing = nominal_timing(cfg) + offset / 2;
        opt.known_cfo_hz = sc.cfo_hz;
    }
    if (sc.genie_csi)
        opt.known_channel = cvec(kFftSize, cplx(x.symbol_scale, 0.0));
    FrameOutcome out;
    out.bits = std::uint64_t(nbits);
    try {
        const RxReport rep = receive(cfg, rx, opt);
        for (int i = 0; i < nbits; ++i)
            out.errors += rep.decoded_bits[std::size_t(i)] != payload[std::size_t(i)];
    } catch (const SyncNotFound&) {
        out.errors = out.bits / 2;
    } catch (const EstimationFailure&) {
        out.errors = out.bits / 2;
    }
    return out;
}

namespace {

/// Bits and errors of one batch of independent resource elements.
FrameOutcome simulate_subcarriers(const LinkScenario& sc, double ebn0_db, std::uint64_t seed)
{
    constexpr int kCells = 4096;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    const Modulation m = sc.tx.modulation;
    const int bps = bits_per_symbol(m);
    const double n0 = std::isinf(ebn0_db) ? 0.0 : 1.0 / (from_db10(ebn0_db) * bps);
    const double nstd = std::sqrt(n0);
    const double dstd = std::sqrt(sc.dme_power);
    bits_t bits(static_cast<std::size_t>(kCells * bps));
    for (auto& b : bits)
        b = std::uint8_t(rng() & 1u);
    const cvec x = modulate(bits, m);
    cvec y(x.size());
    const std::size_t nf = sc.filter_response.size();
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = sc.filter_response[i % nf];
        const cplx h(g(rng), g(rng));
        const cplx hd(g(rng), g(rng));
        const cplx d(g(rng), g(rng));
        const cplx n(g(rng), g(rng));
        const cplx r = f * f * h * x[i] + f * hd * (dstd * d) + f * (nstd * n);
        y[i] = r / (f * f * h);
    }
    const bits_t out = demodulate(y, m);
    FrameOutcome o;
    o.bits = bits.size();
    for (std::size_t i = 0; i < bits.size(); ++i)
        o.errors += out[i] != bits[i];
    return o;
}

}  // namespace

BerCurve run_ber_monte_carlo(const LinkScenario& sc, const rvec& snr_grid_db, std::uint64_t target_errors,
                             std::uint64_t max_bits, std::uint64_t seed, Exec exec)
{
    if (snr_grid_db.empty())
        throw ValidationError("SNR grid is empty");
    if (sc.genie_csi && sc.channel && sc.mode == LinkScenario::Mode::Waveform)
        throw ValidationError("genie CSI is only available without a fading channel");
    const std::size_t np = snr_grid_db.size();
    BerCurve c;
    c.snr_db_points = snr_grid_db;
    c.ber.assign(np, 0.0);
    c.bit_counts.assign(np, 0);
    c.error_counts.assign(np, 0);
    c.confidence_halfwidth.assign(np, 0.0);
    c.ci_low.assign(np, 0.0);
    c.ci_high.assign(np, 0.0);
    auto point = [&](long p) {
        const std::uint64_t ps = derive_seed(seed, std::uint64_t(p));
        std::uint64_t bits = 0, errs = 0;
        for (std::uint64_t f = 0; errs < target_errors && bits < max_bits; ++f) {
            const std::uint64_t fs = derive_seed(ps, f);
            const FrameOutcome o = sc.mode == LinkScenario::Mode::Subcarrier
                                       ? simulate_subcarriers(sc, snr_grid_db[std::size_t(p)], fs)
                                       : simulate_frame(sc, snr_grid_db[std::size_t(p)], fs);
            bits += o.bits;
            errs += o.errors;
        }
        const auto i = std::size_t(p);
        c.bit_counts[i] = bits;
        c.error_counts[i] = errs;
        c.ber[i] = bits ? double(errs) / double(bits) : 0.0;
        const WilsonInterval w = wilson_interval(errs, bits, kWilsonZ);
        c.confidence_halfwidth[i] = w.halfwidth;
        c.ci_low[i] = w.low;
        c.ci_high[i] = w.high;
    };
    const long n = long(np);
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (long p = 0; p < n; ++p)
            point(p);
    } else {
        for (long p = 0; p < n; ++p)
            point(p);
    }
    return c;
}

rvec sinr_per_subcarrier(const SinrInputs& in)
{
    const std::size_t k = in.filter_response.size();
    if (in.channel_gain.size() != k || in.dme_channel_gain.size() != k)
        throw ValidationError("SINR inputs must have equal lengths");
    if (in.signal_power < 0.0 || in.noise_power < 0.0 || in.dme_power < 0.0)
        throw ValidationError("SINR powers must be non-negative");
    rvec out(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double f2 = in.filter_response[i] * in.filter_response[i];
        const double num = f2 * f2 * std::norm(in.channel_gain[i]) * in.signal_power;
        const double den = f2 * in.noise_power + f2 * std::norm(in.dme_channel_gain[i]) * in.dme_power;
        if (den == 0.0) {
            std::cerr << "warning: zero interference-plus-noise power on subcarrier " << i << "\n";
            out[i] = std::numeric_limits<double>::infinity();
        } else {
            out[i] = num / den;
        }
    }
    return out;
}

std::pair<rvec, rvec> gauss_laguerre(int order)
{
    if (order < 1)
        throw ValidationError("quadrature order must be positive");
    static std::mutex mu;
    static std::map<int, std::pair<rvec, rvec>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it != cache.end())
        return it->second;
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(order, order);
    for (int i = 0; i < order; ++i) {
        j(i, i) = 2.0 * i + 1.0;
        if (i + 1 < order)
            j(i, i + 1) = j(i + 1, i) = i + 1.0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
    rvec x(static_cast<std::size_t>(order)), w(static_cast<std::size_t>(order));
    for (int i = 0; i < order; ++i) {
        x[std::size_t(i)] = es.eigenvalues()(i);
        const double v = es.eigenvectors()(0, i);
        w[std::size_t(i)] = v * v;
    }
    return cache[order] = {x, w};
}

namespace {

int sqrt_order(Modulation m)
{
    return int(std::lround(std::sqrt(double(constellation_order(m)))));
}

double qfunc(double x)
{
    return 0.5 * std::erfc(x / std::sqrt(2.0));
}

/// E[Q(√(sλ))] for λ exponential with mean λ̄, by parts: ½(1 − √(sλ̄/(2 + sλ̄))).
double rayleigh_q(double s, double lambda_bar)
{
    const double g = s * lambda_bar;
    return 0.5 * (1.0 - std::sqrt(g / (2.0 + g)));
}

double theory_point(const TheoryConfig& cfg, double snr_lin, int order)
{
    const auto [x, w] = gauss_laguerre(order);
    const int mq = constellation_order(cfg.modulation);
    const int bps = bits_per_symbol(cfg.modulation);
    const int half = sqrt_order(cfg.modulation) / 2;
    const double pre = 4.0 / bps * (1.0 - 1.0 / std::sqrt(double(mq)));
    const double p_noise = 1.0 / snr_lin;
    double total = 0.0;
    for (double f : cfg.filter_response) {
        const double f2 = f * f;
        auto conditional = [&](double lam_d) {
            // Per-bit SINR scale; DME power is per symbol relative to P.
            const double sinr_scale = f2 * f2 / (f2 * p_noise + f2 * lam_d * bps * cfg.dme_power);
            double inner = 0.0;
            for (int i = 1; i <= half; ++i)
                inner += rayleigh_q(double((2 * i - 1) * (2 * i - 1)) * 3.0 * bps * sinr_scale / (mq - 1),
                                    cfg.lambda_bar);
            return pre * inner;
        };
        if (cfg.dme_power == 0.0) {
            total += conditional(0.0);
            continue;
        }
        double avg = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j)
            avg += w[j] * conditional(cfg.lambda_d_bar * x[j]);
        total += avg;
    }
    return total / double(cfg.filter_response.size());
}

}  // namespace

double mqam_ber(Modulation m, double sinr_per_bit)
{
    const int mq = constellation_order(m);
    const int bps = bits_per_symbol(m);
    const int half = sqrt_order(m) / 2;
    double acc = 0.0;
    for (int i = 1; i <= half; ++i)
        acc += qfunc((2 * i - 1) * std::sqrt(3.0 * bps * sinr_per_bit / (mq - 1)));
    return 4.0 / bps * (1.0 - 1.0 / std::sqrt(double(mq))) * acc;
}

TheoryResult theoretical_ber(const TheoryConfig& cfg, const rvec& snr_grid_db)
{
    if (cfg.filter_response.empty())
        throw ValidationError("theory needs at least one subcarrier response");
    if (!(cfg.lambda_bar > 0.0) || !(cfg.lambda_d_bar > 0.0) || cfg.dme_power < 0.0)
        throw ValidationError("fading means must be positive and DME power non-negative");
    TheoryResult r;
    r.snr_db = snr_grid_db;
    const int hi = std::max(2 * cfg.order, 128);
    for (double snr : snr_grid_db) {
        const double lin = from_db10(snr);
        const double a = theory_point(cfg, lin, cfg.order);
        const double b = theory_point(cfg, lin, hi);
        if (std::abs(a - b) > 1e-4 * std::abs(b)) {
            r.converged = false;
            r.warning = "quadrature not converged: order " + std::to_string(cfg.order) + " vs " + std::to_string(hi) +
                        " differ by more than 1e-4 relative";
        }
        r.ber.push_back(b);
    }
    return r;
}

std::uint64_t counted_ifft_mults(int n_subcarriers)
{
    if (n_subcarriers < 2 || !is_pow2(std::size_t(n_subcarriers)))
        throw ValidationError("subcarrier count must be a power of two");
    cvec x(static_cast<std::size_t>(n_subcarriers), cplx(1.0, 0.0));
    std::uint64_t complex_mults = 0;
    fft_inplace(x, true, &complex_mults);
    return 4 * complex_mults;
}

ComplexityRow complexity_report(Waveform w, int n_subcarriers, int bands, int filter_length, int cp)
{
    if (bands < 1)
        throw ValidationError("band count must be at least 1");
    if (filter_length < 1)
        throw ValidationError("filter length must be positive");
    ComplexityRow r;
    r.waveform = w;
    r.subcarriers = n_subcarriers;
    r.bands = bands;
    r.ifft = counted_ifft_mults(n_subcarriers);
    const std::uint64_t samples = std::uint64_t(n_subcarriers + cp);
    const std::uint64_t one_filter = 2 * std::uint64_t(filter_length) * samples;
    switch (w) {
    case Waveform::OFDM:
        break;
    case Waveform::FOFDM:
        r.filtering = one_filter * std::uint64_t(bands);
        break;
    case Waveform::RefOFDM:
        r.filtering = one_filter;
        if (bands > 1) {
            const std::uint64_t kb = next_pow2(std::size_t(bands));
            std::uint64_t lg = 0;
            while ((1ULL << lg) < kb)
                ++lg;
            r.dft_bank = 4 * (kb / 2) * lg * samples;
        }
        break;
    }
    return r;
}

}  // namespace refofdm

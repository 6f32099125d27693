#include "refofdm/interference.hpp"

#include <array>
#include <cmath>
#include <random>

#include "refofdm/fft.hpp"

namespace refofdm {

void validate(const DmeSignalParams& p)
{
    if (!(p.alpha > 0.0) || !(p.delta_t > 0.0))
        throw ValidationError("DME alpha and delta_t must be positive");
    if (p.amplitude < 0.0)
        throw ValidationError("DME amplitude must be non-negative");
    if (p.pulse_pair_rate_pps < 0.0)
        throw ValidationError("DME pulse-pair rate must be non-negative");
}

void validate(const GgiParams& p)
{
    if (!(p.on_fraction > 0.0) || p.on_fraction > 1.0)
        throw ValidationError("GGI on_fraction must lie in (0, 1]");
    if (p.gate_period_samples < 1)
        throw ValidationError("GGI gate period must be positive");
    const double on = p.on_fraction * p.gate_period_samples;
    if (std::abs(on - std::round(on)) > 1e-9)
        throw ValidationError("GGI on_fraction × gate_period must be a whole number of samples");
    if (p.power < 0.0)
        throw ValidationError("GGI power must be non-negative");
}

double dme_pulse_pair(const DmeSignalParams& p, double t)
{
    const double u = t - p.delta_t;
    return std::exp(-p.alpha * t * t / 2.0) + std::exp(-p.alpha * u * u / 2.0);
}

cplx dme_spectrum(const DmeSignalParams& p, double f)
{
    const double mag = p.amplitude * std::sqrt(8.0 * kPi / p.alpha) * std::exp(-2.0 * kPi * kPi * f * f / p.alpha);
    return mag * std::polar(1.0, kPi * f * p.delta_t) * std::cos(kPi * f * p.delta_t);
}

namespace {

constexpr int kWeidemanN = 32;

struct Weideman {
    double L;
    std::array<double, kWeidemanN> a;  ///< highest power first

    Weideman()
    {
        const int m = 2 * kWeidemanN;
        const int m2 = 2 * m;
        L = std::sqrt(kWeidemanN / std::sqrt(2.0));
        cvec f(static_cast<std::size_t>(m2), cplx(0.0, 0.0));
        for (int k = -m + 1; k < m; ++k) {
            const double t = L * std::tan(double(k) * kPi / m / 2.0);
            const double v = std::exp(-t * t) * (L * L + t * t);
            f[std::size_t(k >= 0 ? k : k + m2)] = v;
        }
        fft_inplace(f, false);
        for (int n = 1; n <= kWeidemanN; ++n)
            a[std::size_t(kWeidemanN - n)] = f[std::size_t(n)].real() / m2;
    }
};

/// e^{−s}·erfc(z) for Re z ≥ 0, without overflow for large |Im z|.
cplx scaled_erfc(cplx z, double s) { return std::exp(-s - z * z) * faddeeva(cplx(0.0, 1.0) * z); }

/// e^{−s}·(erf(b) − erf(a)); complementary forms avoid cancellation in the tails.
cplx scaled_erf_diff(cplx b, cplx a, double s)
{
    if (a.real() >= 0.0 && b.real() >= 0.0)
        return scaled_erfc(a, s) - scaled_erfc(b, s);
    if (a.real() <= 0.0 && b.real() <= 0.0)
        return scaled_erfc(-b, s) - scaled_erfc(-a, s);
    return (std::exp(-s) - scaled_erfc(b, s)) - (scaled_erfc(-a, s) - std::exp(-s));
}

double erf_diff(double b, double a)
{
    if (a >= 0.0 && b >= 0.0)
        return std::erfc(a) - std::erfc(b);
    if (a <= 0.0 && b <= 0.0)
        return std::erfc(-b) - std::erfc(-a);
    return std::erf(b) - std::erf(a);
}

}  // namespace

cplx faddeeva(cplx z)
{
    static const Weideman w;
    const cplx iz(-z.imag(), z.real());
    const cplx den = w.L - iz;
    const cplx Z = (w.L + iz) / den;
    cplx p(0.0, 0.0);
    for (double c : w.a)
        p = p * Z + c;
    return 2.0 * p / (den * den) + (1.0 / std::sqrt(kPi)) / den;
}

double dme_interference_power(const DmeSignalParams& p, double f1, double f2)
{
    validate(p);
    if (f1 > f2)
        throw ValidationError("dme_interference_power requires f1 <= f2");
    if (f1 == f2)
        return 0.0;
    const double c1 = 4.0 * kPi * kPi / p.alpha;
    const double sc = std::sqrt(c1);
    const double pre = std::sqrt(kPi) / (2.0 * sc);
    const double i0 = pre * erf_diff(sc * f2, sc * f1);
    // Completing the square moves the cross terms to erf(√C₁f ∓ jy), y = Δt√α/2.
    const double y = p.delta_t * std::sqrt(p.alpha) / 2.0;
    const double s = y * y;
    const cplx ip = pre * scaled_erf_diff(cplx(sc * f2, -y), cplx(sc * f1, -y), s);
    const cplx im = pre * scaled_erf_diff(cplx(sc * f2, y), cplx(sc * f1, y), s);
    const cplx total = 2.0 * i0 + ip + im;
    return p.amplitude * p.amplitude * (2.0 * kPi / p.alpha) * total.real();
}

void add_dme_pair(cvec& out, const DmeSignalParams& p, double t0, double sample_rate_hz, double phase)
{
    const double reach = std::sqrt(2.0 * 40.0 / p.alpha);
    const long lo = std::max(0L, long(std::floor((t0 - reach) * sample_rate_hz)));
    const long hi = std::min(long(out.size()) - 1, long(std::ceil((t0 + p.delta_t + reach) * sample_rate_hz)));
    const double w = 2.0 * kPi * p.center_offset_hz;
    for (long n = lo; n <= hi; ++n) {
        const double t = double(n) / sample_rate_hz;
        out[std::size_t(n)] += p.amplitude * dme_pulse_pair(p, t - t0) * std::polar(1.0, w * t + phase);
    }
}

ComplexSignal generate_dme_stream(const DmeSignalParams& p, double duration_s, double sample_rate_hz,
                                  std::uint64_t seed, rvec* pair_times)
{
    validate(p);
    if (!(duration_s > 0.0) || !(sample_rate_hz > 0.0))
        throw ValidationError("DME stream duration and sample rate must be positive");
    ComplexSignal s;
    s.sample_rate_hz = sample_rate_hz;
    s.samples.assign(std::size_t(std::llround(duration_s * sample_rate_hz)), cplx(0.0, 0.0));
    if (pair_times)
        pair_times->clear();
    if (p.pulse_pair_rate_pps == 0.0 || p.amplitude == 0.0)
        return s;
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> gap(p.pulse_pair_rate_pps);
    std::uniform_real_distribution<double> ph(-kPi, kPi);
    // Arrivals start before t = 0 so the stream is stationary from its first sample.
    const double lead = p.delta_t + std::sqrt(2.0 * 40.0 / p.alpha);
    for (double t = -lead + gap(rng); t < duration_s; t += gap(rng)) {
        const double phase = ph(rng);
        add_dme_pair(s.samples, p, t, sample_rate_hz, phase);
        if (pair_times)
            pair_times->push_back(t);
    }
    return s;
}

ComplexSignal generate_ggi(const GgiParams& p, std::size_t n_samples, std::uint64_t seed, double sample_rate_hz)
{
    validate(p);
    ComplexSignal s;
    s.sample_rate_hz = sample_rate_hz;
    s.samples.assign(n_samples, cplx(0.0, 0.0));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, std::sqrt(p.power / 2.0));
    const std::size_t on = std::size_t(std::llround(p.on_fraction * p.gate_period_samples));
    for (std::size_t i = 0; i < n_samples; ++i) {
        if (i % std::size_t(p.gate_period_samples) >= on)
            continue;
        const double re = g(rng);
        const double im = g(rng);
        s.samples[i] = cplx(re, im);
    }
    return s;
}

}  // namespace refofdm

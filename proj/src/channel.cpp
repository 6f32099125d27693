#include "refofdm/channel.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <random>

#include <boost/math/special_functions/erf.hpp>

namespace refofdm {

std::string to_string(Scenario s)
{
    switch (s) {
    case Scenario::APT: return "APT";
    case Scenario::TMA: return "TMA";
    case Scenario::ENR: return "ENR";
    }
    return "?";
}

Scenario scenario_from_string(const std::string& s)
{
    if (s == "APT")
        return Scenario::APT;
    if (s == "TMA")
        return Scenario::TMA;
    if (s == "ENR")
        return Scenario::ENR;
    throw ValidationError("unknown channel scenario '" + s + "' (expected APT, TMA or ENR)");
}

double doppler_hz(double fc_hz, double speed_ktas)
{
    if (fc_hz < 0.0 || speed_ktas < 0.0)
        throw ValidationError("carrier and speed must be non-negative");
    return fc_hz * speed_ktas * kKtasToMps / kSpeedOfLight;
}

rvec default_tap_powers(int taps)
{
    rvec p(static_cast<std::size_t>(taps));
    double sum = 0.0;
    for (int l = 0; l < taps; ++l)
        sum += p[std::size_t(l)] = from_db10(-3.0 * l);
    for (auto& v : p)
        v /= sum;
    return p;
}

ChannelProfile build_channel(Scenario s, double sample_rate_hz, double fc_hz)
{
    if (!(sample_rate_hz > 0.0))
        throw ValidationError("sample rate must be positive");
    ChannelProfile p;
    p.scenario = s;
    p.sample_rate_hz = sample_rate_hz;
    switch (s) {
    case Scenario::APT:
        p.fading = Fading::Rayleigh;
        p.rician_k_db = kRayleighLosDb;
        p.max_delay_us = 3.0;
        p.doppler_spectrum = DopplerSpectrum::Jakes;
        p.speed_ktas = 200.0;
        p.harmonics = 8;
        break;
    case Scenario::TMA:
        p.fading = Fading::Rician;
        p.rician_k_db = 10.0;
        p.max_delay_us = 20.0;
        p.doppler_spectrum = DopplerSpectrum::Jakes;
        p.speed_ktas = 300.0;
        p.harmonics = 8;
        break;
    case Scenario::ENR:
        p.fading = Fading::Rician;
        p.rician_k_db = 15.0;
        p.max_delay_us = 15.0;
        p.doppler_spectrum = DopplerSpectrum::Gaussian;
        p.speed_ktas = 600.0;
        p.harmonics = 25;
        break;
    }
    p.doppler_hz = doppler_hz(fc_hz, p.speed_ktas);
    const int max_samples = int(std::floor(p.max_delay_us * 1e-6 * sample_rate_hz + 1e-9));
    p.tap_count = 3;
    p.tap_delays_samples = {0, (max_samples + 1) / 2, max_samples};
    p.tap_powers = default_tap_powers(3);
    return p;
}

std::string delay_spread_warning(const ChannelProfile& p)
{
    const double cp_samples = kCpLength * p.sample_rate_hz / kBaseRateHz;
    int maxd = 0;
    for (int d : p.tap_delays_samples)
        maxd = std::max(maxd, d);
    if (maxd <= cp_samples)
        return {};
    return "channel delay spread (" + std::to_string(maxd) + " samples) exceeds the cyclic prefix (" +
           std::to_string(int(cp_samples)) + " samples)";
}

namespace {

struct Oscillators {
    rvec freq_i, freq_q;  ///< Hz, in-phase and quadrature branches
    rvec phase_i, phase_q;
    bool complex_exp = false;  ///< Gaussian spectrum uses complex exponentials
};

Oscillators jakes_oscillators(int m, double fd, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-kPi, kPi);
    Oscillators o;
    const double theta = u(rng);
    for (int n = 1; n <= m; ++n) {
        const double alpha = (2.0 * kPi * n - kPi + theta) / (4.0 * m);
        o.freq_i.push_back(fd * std::cos(alpha));
        o.freq_q.push_back(fd * std::sin(alpha));
        o.phase_i.push_back(u(rng));
        o.phase_q.push_back(u(rng));
    }
    return o;
}

Oscillators gaussian_oscillators(int m, double fd, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    const double sigma = fd / 3.0;
    Oscillators o;
    o.complex_exp = true;
    double m2 = 0.0;
    for (int n = 0; n < m; ++n) {
        const double q = (n + u01(rng)) / m;
        const double f = sigma * std::sqrt(2.0) * boost::math::erf_inv(2.0 * q - 1.0);
        o.freq_i.push_back(f);
        o.phase_i.push_back(u(rng));
        m2 += f * f;
    }
    m2 /= m;
    const double scale = m2 > 0.0 ? sigma / std::sqrt(m2) : 0.0;
    for (auto& f : o.freq_i)
        f *= scale;
    return o;
}

}  // namespace

FadingRealization realize_fading(const ChannelProfile& p, std::size_t n_samples, std::uint64_t seed, Exec exec)
{
    if (n_samples < 1)
        throw ValidationError("fading realization needs at least one sample");
    if (p.tap_delays_samples.size() != p.tap_powers.size() || p.tap_powers.empty())
        throw ValidationError("tap delays and powers must have equal, non-zero length");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    FadingRealization r;
    r.seed = seed;
    r.delays = p.tap_delays_samples;
    const double k_lin = from_db10(p.rician_k_db);
    const double los_phase = u(rng);
    const int m = std::max(1, p.harmonics);
    for (std::size_t l = 0; l < p.tap_powers.size(); ++l) {
        const Oscillators o = p.doppler_spectrum == DopplerSpectrum::Jakes ? jakes_oscillators(m, p.doppler_hz, rng)
                                                                          : gaussian_oscillators(m, p.doppler_hz, rng);
        const double amp = std::sqrt(p.tap_powers[l]);
        const double los = l == 0 ? std::sqrt(k_lin / (k_lin + 1.0)) : 0.0;
        const double scat = l == 0 ? std::sqrt(1.0 / (k_lin + 1.0)) : 1.0;
        const double norm = 1.0 / std::sqrt(double(m));
        cvec taps(n_samples);
        const double dt = 1.0 / p.sample_rate_hz;
        auto body = [&](long i) {
            const double t = double(i) * dt;
            cplx g(0.0, 0.0);
            if (o.complex_exp) {
                for (int n = 0; n < m; ++n)
                    g += std::polar(1.0, 2.0 * kPi * o.freq_i[std::size_t(n)] * t + o.phase_i[std::size_t(n)]);
            } else {
                double gi = 0.0, gq = 0.0;
                for (int n = 0; n < m; ++n) {
                    gi += std::cos(2.0 * kPi * o.freq_i[std::size_t(n)] * t + o.phase_i[std::size_t(n)]);
                    gq += std::cos(2.0 * kPi * o.freq_q[std::size_t(n)] * t + o.phase_q[std::size_t(n)]);
                }
                g = cplx(gi, gq);
            }
            taps[std::size_t(i)] = amp * (los * std::polar(1.0, los_phase) + scat * norm * g);
        };
        const long n = long(n_samples);
        if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
            for (long i = 0; i < n; ++i)
                body(i);
        } else {
            for (long i = 0; i < n; ++i)
                body(i);
        }
        r.taps.push_back(std::move(taps));
    }
    return r;
}

ComplexSignal propagate(const ComplexSignal& s, const FadingRealization& r, Exec exec)
{
    ComplexSignal out = s;
    out.samples = tdl_propagate(s.samples, r.taps, r.delays, exec);
    return out;
}

ComplexSignal add_noise(const ComplexSignal& s, double variance, std::uint64_t seed)
{
    if (variance < 0.0)
        throw ValidationError("noise variance must be non-negative");
    ComplexSignal out = s;
    if (variance == 0.0)
        return out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, std::sqrt(variance / 2.0));
    for (auto& v : out.samples) {
        const double re = g(rng);
        const double im = g(rng);
        v += cplx(re, im);
    }
    return out;
}

ComplexSignal add_awgn(const ComplexSignal& s, double snr_db, std::uint64_t seed)
{
    if (std::isinf(snr_db) && snr_db > 0)
        return s;
    double p = 0.0;
    for (const auto& v : s.samples)
        p += std::norm(v);
    if (!s.samples.empty())
        p /= double(s.samples.size());
    if (p == 0.0) {
        std::cerr << "warning: zero-power signal, noise referenced to unit power\n";
        p = 1.0;
    }
    return add_noise(s, p / from_db10(snr_db), seed);
}

double noise_variance_for_ebn0(double symbol_scale, double ebn0_db, int bits_per_symbol)
{
    const double esn0 = from_db10(ebn0_db) * bits_per_symbol;
    return 2.0 * symbol_scale * symbol_scale / (kFftSize * esn0);
}

}  // namespace refofdm

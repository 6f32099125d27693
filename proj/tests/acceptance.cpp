/**
 * @file acceptance.cpp
 * @brief Acceptance suite: one PASS/FAIL line per criterion with its runtime budget.
 */
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include "refofdm/analysis.hpp"
#include "refofdm/channel.hpp"
#include "refofdm/filterbank.hpp"
#include "refofdm/harness.hpp"
#include "refofdm/io.hpp"
#include "refofdm/ofdm.hpp"
#include "refofdm/phy.hpp"

#ifndef REFOFDM_SCENARIO_DIR
#define REFOFDM_SCENARIO_DIR "scenarios"
#endif

using namespace refofdm;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

bits_t random_bits(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    bits_t b(n);
    for (auto& x : b)
        x = std::uint8_t(rng() & 1u);
    return b;
}

/// Horner evaluation of Σ h[n] e^{-jωn}.
cplx dtft(const rvec& h, double omega)
{
    const cplx z = std::polar(1.0, -omega);
    cplx acc(0.0, 0.0);
    for (std::size_t n = h.size(); n-- > 0;)
        acc = acc * z + h[n];
    return acc;
}

double q_function(double x)
{
    return 0.5 * std::erfc(x / std::sqrt(2.0));
}

std::string fixed(double v, int digits = 3)
{
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(digits);
    os << v;
    return os.str();
}

std::string sci(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// 1 ------------------------------------------------------------------------

/// Two-sided −3 dB width in kHz, scanning outward from DC on a 1 Hz grid step of the base rate.
double minus3db_width_khz(const rvec& taps)
{
    constexpr int grid = 1 << 16;
    double peak = 0.0;
    std::vector<double> mag(grid / 2 + 1);
    for (int i = 0; i <= grid / 2; ++i) {
        mag[std::size_t(i)] = std::abs(dtft(taps, 2.0 * kPi * i / grid));
        peak = std::max(peak, mag[std::size_t(i)]);
    }
    const double level = peak / std::sqrt(2.0);
    int i = 0;
    while (i < grid / 2 && mag[std::size_t(i + 1)] >= level)
        ++i;
    // Linear interpolation of the crossing between bins i and i+1.
    const double a = mag[std::size_t(i)], b = mag[std::size_t(i + 1)];
    const double frac = a == b ? 0.0 : (a - level) / (a - b);
    const double edge_hz = (i + frac) / grid * kBaseRateHz;
    return 2.0 * edge_hz / 1e3;
}

Outcome criterion1()
{
    const std::vector<std::tuple<int, int, DecimationMethod>> table{
        {186, 7, DecimationMethod::MCDM}, {264, 2, DecimationMethod::CDM}, {342, 6, DecimationMethod::MCDM},
        {420, 3, DecimationMethod::CDM},  {498, 5, DecimationMethod::MCDM}, {576, 4, DecimationMethod::CDM},
        {654, 4, DecimationMethod::MCDM}, {732, 5, DecimationMethod::CDM}};
    const double tol_khz = 2.0 * kSubcarrierSpacingHz / 1e3;
    Outcome o{true, ""};
    std::ostringstream os;
    for (const auto& [bw, d, m] : table) {
        const DecimationConfig c = select_config(bw);
        const bool row_ok = c.factor == d && c.method == m;
        const double w = minus3db_width_khz(make_ldacs_filter(bw).taps);
        const bool bw_ok = std::abs(w - bw) <= tol_khz;
        o.pass = o.pass && row_ok && bw_ok;
        os << bw << ":" << (row_ok ? "" : "row-mismatch,") << fixed(w, 1) << (bw_ok ? "" : "(out)") << " ";
    }
    o.detail = "measured -3 dB kHz " + os.str() + "tol +-" + fixed(tol_khz, 2) + " kHz";
    return o;
}

// 2 ------------------------------------------------------------------------

Outcome criterion2()
{
    const rvec& h = ldacs_prototype()->coefficients;
    constexpr int grid = 4096;
    double worst = 0.0;
    for (bool alternate : {false, true})
        for (int d = 1; d <= 7; ++d) {
            const rvec z = zero_interleave(h, d, alternate);
            const double shift = alternate ? kPi / d : 0.0;
            for (int k = 0; k < grid; ++k) {
                const double om = -kPi + 2.0 * kPi * k / grid;
                cplx rhs(0.0, 0.0);
                for (int i = 0; i < d; ++i)
                    rhs += dtft(h, om - shift - 2.0 * kPi * i / d);
                rhs /= double(d);
                worst = std::max(worst, std::abs(dtft(z, om) - rhs));
            }
        }
    return {worst <= 1e-10, "max abs error " + sci(worst) + " (tol 1e-10) over D=1..7, CDM and MCDM"};
}

// 3 ------------------------------------------------------------------------

double integrand(double f, void* ctx)
{
    const auto* p = static_cast<const DmeSignalParams*>(ctx);
    const double g = p->amplitude * std::sqrt(8.0 * kPi / p->alpha) * std::exp(-2.0 * kPi * kPi * f * f / p->alpha);
    const double c = std::cos(kPi * f * p->delta_t);
    return g * g * c * c;
}

double quadrature(const DmeSignalParams& p, double f1, double f2)
{
    gsl_integration_workspace* ws = gsl_integration_workspace_alloc(2000);
    gsl_function fn;
    fn.function = &integrand;
    fn.params = const_cast<DmeSignalParams*>(&p);
    double result = 0.0, err = 0.0;
    const int status = gsl_integration_qag(&fn, f1, f2, 0.0, 1e-12, 2000, GSL_INTEG_GAUSS61, ws, &result, &err);
    gsl_integration_workspace_free(ws);
    if (status != 0)
        throw std::runtime_error("quadrature did not converge");
    return result;
}

Outcome criterion3()
{
    gsl_set_error_handler_off();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> la(std::log(1e11), std::log(2e12));
    std::uniform_real_distribution<double> dt(4e-6, 36e-6);
    std::uniform_real_distribution<double> fr(-600e3, 600e3);
    std::uniform_real_distribution<double> amp(0.1, 5.0);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        DmeSignalParams p;
        p.alpha = std::exp(la(rng));
        p.delta_t = dt(rng);
        p.amplitude = amp(rng);
        double f1 = fr(rng), f2 = fr(rng);
        if (f1 > f2)
            std::swap(f1, f2);
        const double q = quadrature(p, f1, f2);
        worst = std::max(worst, std::abs(dme_interference_power(p, f1, f2) - q) / q);
    }

    DmeSignalParams p;
    p.center_offset_hz = 150e3;
    const double f1 = 100e3, f2 = 230e3;
    const double expected =
        p.pulse_pair_rate_pps * dme_interference_power(p, f1 - p.center_offset_hz, f2 - p.center_offset_hz);
    const ComplexSignal stream = generate_dme_stream(p, 2.0, kLinkRateHz, 77);
    const double measured = std::pow(10.0, interference_at(estimate_psd(stream), f1, f2) / 10.0);
    const double dev = std::abs(measured - expected) / expected;
    return {worst <= 1e-8 && dev <= 0.05, "quadrature worst rel " + sci(worst) + " (tol 1e-8), stream PSD deviation " +
                                              fixed(100.0 * dev, 2) + "% (tol 5%)"};
}

// 4 ------------------------------------------------------------------------

ComplexSignal stream_of_frames(const TxConfig& cfg, std::size_t min_samples, std::uint64_t seed)
{
    ComplexSignal out;
    out.sample_rate_hz = kLinkRateHz;
    for (std::uint64_t f = 0; out.samples.size() < min_samples; ++f) {
        const ComplexSignal x = transmit(cfg, random_bits(std::size_t(payload_bits(cfg)), seed + f));
        out.samples.insert(out.samples.end(), x.samples.begin(), x.samples.end());
    }
    return out;
}

Outcome criterion4()
{
    constexpr double r = 50e3;
    const double h = dme_main_lobe_half_width();
    Outcome o{true, ""};
    std::ostringstream os;
    for (int bw : {498, 732}) {
        const SpectrumGrid ofdm =
            estimate_psd(stream_of_frames(make_tx_config(bw, Modulation::QPSK, Waveform::OFDM), 1000000, 40));
        const SpectrumGrid ref =
            estimate_psd(stream_of_frames(make_tx_config(bw, Modulation::QPSK, Waveform::RefOFDM), 1000000, 40));
        double min_gap = 1e300;
        for (int m = 2; m <= 4; ++m) {
            const double c = bw * 1e3 / 2.0 + m * r;
            const double gap = interference_at(ofdm, c - h, c + h) - interference_at(ref, c - h, c + h);
            min_gap = std::min(min_gap, gap);
        }
        o.pass = o.pass && min_gap >= 30.0;
        os << bw << " kHz min gap " << fixed(min_gap, 1) << " dB; ";
    }
    o.detail = os.str() + "offsets BW/2+{2,3,4}r (tol >= 30 dB)";
    return o;
}

// 5 ------------------------------------------------------------------------

Outcome criterion5()
{
    int total = 0, ok = 0;
    std::string first_failure;
    for (int bw : supported_bandwidths())
        for (Modulation m : {Modulation::QPSK, Modulation::QAM16, Modulation::QAM64})
            for (Waveform w : {Waveform::OFDM, Waveform::RefOFDM}) {
                const TxConfig cfg = make_tx_config(bw, m, w);
                const bits_t p = random_bits(std::size_t(payload_bits(cfg)), std::uint64_t(bw) * 31 + unsigned(m));
                const ComplexSignal clean = transmit(cfg, p);
                const bool clean_ok = receive(cfg, clean).decoded_bits == p;

                // 100 base-rate samples of delay, 1 kHz offset, 30 dB SNR.
                ComplexSignal rx = clean;
                rx.samples.insert(rx.samples.begin(), 200, cplx(0.0, 0.0));
                rx.samples.insert(rx.samples.end(), 400, cplx(0.0, 0.0));
                for (std::size_t n = 0; n < rx.samples.size(); ++n)
                    rx.samples[n] *= std::polar(1.0, 2.0 * kPi * 1000.0 * double(n) / rx.sample_rate_hz);
                rx = add_awgn(rx, 30.0, std::uint64_t(bw) + 7u * unsigned(m));
                bool impaired_ok = false;
                try {
                    impaired_ok = receive(cfg, rx).decoded_bits == p;
                } catch (const std::exception&) {
                }
                total += 2;
                ok += int(clean_ok) + int(impaired_ok);
                if ((!clean_ok || !impaired_ok) && first_failure.empty())
                    first_failure = ", first failure " + std::to_string(bw) + " kHz " + to_string(m) + " " +
                                    to_string(w) + (clean_ok ? " impaired" : " clean");
            }
    return {ok == total, std::to_string(ok) + "/" + std::to_string(total) +
                             " bit-exact (8 bandwidths x 3 modulations x 2 waveforms, clean and 100-sample/1 kHz/30 dB)" +
                             first_failure};
}

// 6 ------------------------------------------------------------------------

Outcome criterion6()
{
    LinkScenario sc;
    sc.tx = make_tx_config(498, Modulation::QPSK, Waveform::OFDM);
    sc.tx.fec = false;
    sc.genie_timing = true;
    sc.genie_csi = true;
    sc.max_timing_offset = 0;
    const rvec grid{0.0, 2.0, 4.0, 6.0, 8.0};
    const BerCurve c = run_ber_monte_carlo(sc, grid, 100, 20000000, 6);
    Outcome o{true, ""};
    std::ostringstream os;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double theory = q_function(std::sqrt(2.0 * std::pow(10.0, grid[i] / 10.0)));
        const bool inside = c.error_counts[i] >= 100 && theory >= c.ci_low[i] && theory <= c.ci_high[i];
        o.pass = o.pass && inside;
        os << fixed(grid[i], 0) << "dB " << sci(c.ber[i]) << " vs " << sci(theory) << (inside ? "" : "(out)") << "; ";
    }
    o.detail = os.str() + "3-sigma Wilson, >= 100 errors";
    return o;
}

// 7 ------------------------------------------------------------------------

Outcome criterion7()
{
    rvec grid;
    for (int s = 0; s <= 20; s += 2)
        grid.push_back(s);
    TheoryConfig t;
    t.modulation = Modulation::QPSK;
    const TheoryResult th = theoretical_ber(t, grid);
    LinkScenario sc;
    sc.mode = LinkScenario::Mode::Subcarrier;
    sc.tx = make_tx_config(498, Modulation::QPSK, Waveform::RefOFDM);
    sc.tx.fec = false;
    const BerCurve mc = run_ber_monte_carlo(sc, grid, 400, 4000000, 7);
    Outcome o{th.converged, ""};
    int inside = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const bool in = th.ber[i] >= mc.ci_low[i] && th.ber[i] <= mc.ci_high[i];
        inside += int(in);
        worst = std::max(worst, std::abs(th.ber[i] - mc.ber[i]) / std::max(mc.confidence_halfwidth[i], 1e-300));
        o.pass = o.pass && in;
    }
    o.detail = std::to_string(inside) + "/" + std::to_string(grid.size()) +
               " points inside 3-sigma (0-20 dB step 2), largest |theory-MC| = " + fixed(worst, 2) + " half-widths";
    return o;
}

// 8 ------------------------------------------------------------------------

Outcome criterion8()
{
    const rvec grid{0.0, 5.0, 10.0, 15.0, 20.0, 25.0};
    Outcome o{true, ""};
    std::ostringstream os;
    for (double center : {0.0, 100e3, 400e3}) {
        BerCurve curves[2];
        int idx = 0;
        for (Waveform w : {Waveform::OFDM, Waveform::RefOFDM}) {
            LinkScenario sc;
            sc.tx = make_tx_config(342, Modulation::QPSK, w);
            sc.tx.fec = false;
            sc.channel = build_channel(Scenario::ENR);
            DmeSignalParams d;
            d.amplitude = 3.0;
            d.center_offset_hz = center + 171e3 + 100e3;
            sc.dme = d;
            sc.mix_hz = center;
            curves[idx++] = run_ber_monte_carlo(sc, grid, 40000, 40000, 8);
        }
        int better = 0;
        for (std::size_t i = 0; i < grid.size(); ++i)
            better += int(curves[1].ber[i] < curves[0].ber[i]);
        o.pass = o.pass && better == int(grid.size());
        os << "center " << fixed(center / 1e3, 0) << " kHz " << better << "/" << grid.size() << " (at 25 dB "
           << fixed(curves[1].ber.back(), 3) << " vs " << fixed(curves[0].ber.back(), 3) << "); ";
    }
    o.detail = os.str() + "Ref-OFDM below OFDM, 0-25 dB";
    return o;
}

// 9 ------------------------------------------------------------------------

Outcome criterion9()
{
    const int len = make_ldacs_filter(498).length();
    const auto r1 = complexity_report(Waveform::RefOFDM, 128, 1, len).filtering;
    const auto r2 = complexity_report(Waveform::RefOFDM, 128, 2, len).filtering;
    const auto r4 = complexity_report(Waveform::RefOFDM, 128, 4, len).filtering;
    const auto f1 = complexity_report(Waveform::FOFDM, 128, 1, len).filtering;
    const auto f2 = complexity_report(Waveform::FOFDM, 128, 2, len).filtering;
    const auto f4 = complexity_report(Waveform::FOFDM, 128, 4, len).filtering;
    const bool ok = r1 == r2 && r2 == r4 && f2 == 2 * f1 && f4 == 4 * f1 && f1 > 0;
    return {ok, "Ref-OFDM filtering " + std::to_string(r1) + "/" + std::to_string(r2) + "/" + std::to_string(r4) +
                    ", F-OFDM " + std::to_string(f1) + "/" + std::to_string(f2) + "/" + std::to_string(f4) +
                    " for K_bands 1/2/4"};
}

// 10 -----------------------------------------------------------------------

Outcome criterion10()
{
    Outcome o{true, ""};
    int compared = 0;
    for (const char* name : {"awgn-quick", "multiband-186"}) {
        const ScenarioSpec s = parse_scenario((fs::path(REFOFDM_SCENARIO_DIR) / (std::string(name) + ".json")).string());
        const fs::path a = fs::temp_directory_path() / ("refofdm_acc_" + std::string(name) + "_a");
        const fs::path b = fs::temp_directory_path() / ("refofdm_acc_" + std::string(name) + "_b");
        fs::remove_all(a);
        fs::remove_all(b);
        const auto fa = emit_reports(run_experiment(s), a.string());
        const auto fb = emit_reports(run_experiment(s), b.string());
        o.pass = o.pass && fa == fb;
        for (const auto& f : fa) {
            if (f.size() < 4 || f.substr(f.size() - 4) != ".csv")
                continue;
            o.pass = o.pass && sha256_file((a / f).string()) == sha256_file((b / f).string());
            ++compared;
        }
    }
    o.detail = std::to_string(compared) + " CSV files SHA-256 compared across reruns of awgn-quick and multiband-186";
    return o;
}

}  // namespace

int main()
{
    struct Criterion {
        int id;
        const char* title;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> all{
        {1, "filter table conformance", 10.0, criterion1},
        {2, "CDM/MCDM spectral identities", 5.0, criterion2},
        {3, "DME closed form", 30.0, criterion3},
        {4, "out-of-band improvement", 120.0, criterion4},
        {5, "end-to-end correctness", 60.0, criterion5},
        {6, "BER calibration", 120.0, criterion6},
        {7, "theory/simulation cross-validation", 300.0, criterion7},
        {8, "DME-resilience direction", 600.0, criterion8},
        {9, "complexity band-independence", 1.0, criterion9},
        {10, "determinism", 600.0, criterion10},
    };
    int failures = 0;
    for (const auto& c : all) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.budget_s;
        const bool pass = o.pass && in_time;
        failures += !pass;
        std::cout << "CRITERION " << c.id << " " << (pass ? "PASS" : "FAIL") << " [" << c.title << "] " << o.detail
                  << " | " << fixed(secs, 2) << " s (budget " << fixed(c.budget_s, 0) << " s)"
                  << (in_time ? "" : " over budget") << std::endl;
    }
    std::cout << (all.size() - std::size_t(failures)) << "/" << all.size() << " criteria passed" << std::endl;
    return failures == 0 ? 0 : 1;
}

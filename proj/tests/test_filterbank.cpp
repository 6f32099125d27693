#include "doctest.h"

#include <cstdio>
#include <filesystem>

#include "refofdm/filterbank.hpp"
#include "refofdm/kernels.hpp"
#include "refofdm/remez.hpp"
#include "test_util.hpp"

using namespace refofdm;
using testutil::naive_dtft;

namespace {

rvec grid4096()
{
    rvec w(4096);
    for (int i = 0; i < 4096; ++i)
        w[std::size_t(i)] = -kPi + 2.0 * kPi * i / 4096.0;
    return w;
}

/// Largest |H(ω)| for ω ≥ edge·π, evaluated directly on an 8192-point grid.
double dense_stopband_peak(const rvec& h, double edge)
{
    double peak = 0.0;
    for (int i = 0; i <= 8192; ++i) {
        const double w = kPi * i / 8192.0;
        if (w >= edge * kPi)
            peak = std::max(peak, std::abs(naive_dtft(h, w)));
    }
    return peak;
}

}  // namespace

TEST_CASE("remez reproduces a reference equiripple lowpass")
{
    // scipy.signal.remez(31, [0, .2, .3, 1], [1, 0], weight=[1, 4], fs=2)
    const double ref[16] = {
        -0.010124808491066754, -0.0072553798680827499, -0.0022537002850784803, 0.0083311920144773198,
        0.020006654888520627, 0.025339813814533253, 0.017913910287546405, -0.0028204790475362287,
        -0.028819080618923028, -0.045084153343605674, -0.035916874672595127, 0.0067987393386315809,
        0.077666685743265407, 0.15760629560917169, 0.22064291729253718, 0.24455362344550924};
    const RemezResult r = remez(31, {0.0, 0.2, 0.3, 1.0}, {1.0, 0.0}, {1.0, 4.0});
    REQUIRE(r.taps.size() == 31);
    for (int i = 0; i < 16; ++i) {
        CHECK(std::abs(r.taps[std::size_t(i)] - ref[i]) < 1e-12);
        CHECK(std::abs(r.taps[std::size_t(30 - i)] - ref[i]) < 1e-12);
    }
}

TEST_CASE("remez reports non-convergence with the last ripple")
{
    try {
        remez(121, {0.0, 0.1, 0.12, 1.0}, {1.0, 0.0}, {1.0, 10.0}, 1);
        FAIL("expected DesignFailure");
    } catch (const DesignFailure& e) {
        CHECK(e.ripple > 0.0);
    }
}

TEST_CASE("prototype is an order-240 symmetric type-I filter at the LDACS passband edge")
{
    const auto p = ldacs_prototype();
    CHECK(p->order == 240);
    CHECK(p->coefficients.size() == 241);
    CHECK(p->passband_edge == doctest::Approx(0.12));
    for (std::size_t i = 0; i < p->coefficients.size(); ++i)
        CHECK(p->coefficients[i] == doctest::Approx(p->coefficients[240 - i]).epsilon(1e-12));
}

TEST_CASE("prototype stopband meets the requested attenuation on a dense grid")
{
    const auto p = ldacs_prototype();
    const double atten = -20.0 * std::log10(dense_stopband_peak(p->coefficients, p->stop_edge));
    MESSAGE("prototype stopband attenuation " << atten << " dB");
    CHECK(atten >= p->design_spec.stopband_attenuation_db - 1.0);
}

TEST_CASE("estimated-order design meets its spec")
{
    DesignSpec s;
    s.stopband_attenuation_db = 40.0;
    s.passband_ripple_db = 1.0;
    s.transition_bw = 0.2;
    s.passband_edge = 0.3;
    s.overdesign = 1.0;
    const PrototypeFilter p = design_prototype(s);
    CHECK(p.order % 2 == 0);
    CHECK(p.coefficients.size() == std::size_t(p.order + 1));
    const double atten = -20.0 * std::log10(dense_stopband_peak(p.coefficients, p.stop_edge));
    CHECK(atten >= 40.0 - 1.0);
}

TEST_CASE("full-band request yields the identity filter")
{
    DesignSpec s;
    s.passband_edge = 1.0;
    const PrototypeFilter p = design_prototype(s);
    CHECK(p.order == 0);
    REQUIRE(p.coefficients.size() == 1);
    CHECK(p.coefficients[0] == 1.0);
}

TEST_CASE("invalid design specs are rejected")
{
    DesignSpec s;
    s.stopband_attenuation_db = -3.0;
    CHECK_THROWS_AS(design_prototype(s), ValidationError);
    s = DesignSpec{};
    s.passband_edge = 0.95;
    CHECK_THROWS_AS(design_prototype(s), ValidationError);
}

TEST_CASE("select_config returns the design table rows")
{
    const std::vector<std::tuple<int, int, DecimationMethod>> rows{
        {186, 7, DecimationMethod::MCDM}, {264, 2, DecimationMethod::CDM}, {342, 6, DecimationMethod::MCDM},
        {420, 3, DecimationMethod::CDM},  {498, 5, DecimationMethod::MCDM}, {576, 4, DecimationMethod::CDM},
        {654, 4, DecimationMethod::MCDM}, {732, 5, DecimationMethod::CDM}};
    for (const auto& [bw, d, m] : rows) {
        const DecimationConfig c = select_config(bw);
        CHECK(c.factor == d);
        CHECK(c.method == m);
    }
}

TEST_CASE("unsupported bandwidth error lists the legal values")
{
    try {
        select_config(500);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        for (int bw : supported_bandwidths())
            CHECK(msg.find(std::to_string(bw)) != std::string::npos);
    }
}

TEST_CASE("decimation factor outside 1..7 is rejected")
{
    CHECK_THROWS_AS(apply_cdm(ldacs_prototype(), 0), ValidationError);
    CHECK_THROWS_AS(apply_mcdm(ldacs_prototype(), 8), ValidationError);
}

TEST_CASE("CDM with D = 1 reproduces the prototype")
{
    const auto p = ldacs_prototype();
    const ReconfigFilter f = apply_cdm(p, 1);
    CHECK(f.realized_coefficients == p->coefficients);
    CHECK(f.taps == p->coefficients);
}

TEST_CASE("compacted length is ceil((N+1)/D)")
{
    for (int d = 1; d <= 7; ++d) {
        CHECK(apply_cdm(ldacs_prototype(), d).realized_coefficients.size() == std::size_t((241 + d - 1) / d));
        CHECK(apply_mcdm(ldacs_prototype(), d).realized_coefficients.size() == std::size_t((241 + d - 1) / d));
    }
}

TEST_CASE("CDM scales the passband and MCDM complements it")
{
    const auto p = ldacs_prototype();
    const double proto_edge = measured_bandwidth(p->coefficients) / 2.0;
    const double cdm2 = measured_bandwidth(apply_cdm(p, 2).taps) / 2.0;
    const double cdm6 = measured_bandwidth(apply_cdm(p, 6).taps) / 2.0;
    MESSAGE("prototype edge " << proto_edge << ", CDM D=2 " << cdm2 << ", CDM D=6 " << cdm6);
    CHECK(cdm2 == doctest::Approx(2.0 * proto_edge).epsilon(0.01));
    CHECK(cdm6 == doctest::Approx(6.0 * proto_edge).epsilon(0.01));
    CHECK(std::abs(cdm2 - 0.24) < 0.02);
    CHECK(std::abs(cdm6 - 0.72) < 0.04);

    // The MCDM complement passes what the shifted bandstop branch rejects.
    const double passband = measured_bandwidth(apply_mcdm(p, 2).taps) / 2.0;
    MESSAGE("MCDM D=2 passband width " << passband);
    CHECK(passband == doctest::Approx(1.0 - 2.0 * proto_edge).epsilon(0.01));
    CHECK(std::abs(passband - 0.76) < 0.02);
}

TEST_CASE("MCDM retained coefficients alternate in sign")
{
    const auto p = ldacs_prototype();
    for (int d = 2; d <= 7; ++d) {
        const ReconfigFilter f = apply_mcdm(p, d);
        const auto& r = f.realized_coefficients;
        const int c = int(r.size() - 1) / 2;
        for (std::size_t m = 0; m < r.size(); ++m) {
            const double h = p->coefficients[std::size_t(f.phase) + m * std::size_t(d)];
            const double expected = ((int(m) - c) % 2 == 0) ? h : -h;
            CHECK(r[m] == expected);
        }
        if (c % 2 == 0)
            for (std::size_t m = 0; m < r.size(); ++m)
                CHECK(r[m] == ((m % 2 == 0) ? 1.0 : -1.0) * p->coefficients[std::size_t(f.phase) + m * std::size_t(d)]);
    }
}

TEST_CASE("MCDM effective response is the delayed input minus the bandstop branch")
{
    const auto p = ldacs_prototype();
    for (int d : {2, 4, 5, 6, 7}) {
        const ReconfigFilter f = apply_mcdm(p, d);
        const int c = f.config.complement_delay;
        const double gain = double(d);
        double worst = 0.0;
        for (int i = 0; i < 2048; ++i) {
            const double w = -kPi + 2.0 * kPi * i / 2048.0;
            const cplx b = gain * naive_dtft(f.realized_coefficients, w);
            const cplx expected = std::polar(1.0, -w * c) - b;
            worst = std::max(worst, std::abs(naive_dtft(f.taps, w) - expected));
        }
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("CDM image theorem holds for every D")
{
    const auto p = ldacs_prototype();
    const rvec& h = p->coefficients;
    const rvec w = grid4096();
    for (int d = 1; d <= 7; ++d) {
        const rvec z = zero_interleave(h, d, false);
        double worst = 0.0;
        for (double om : w) {
            cplx rhs(0.0, 0.0);
            for (int i = 0; i < d; ++i)
                rhs += naive_dtft(h, om - 2.0 * kPi * i / d);
            rhs /= double(d);
            worst = std::max(worst, std::abs(naive_dtft(z, om) - rhs));
        }
        CHECK_MESSAGE(worst < 1e-10, "D=" << d << " error " << worst);
    }
}

TEST_CASE("MCDM shift theorem places images at odd multiples of pi/D")
{
    const auto p = ldacs_prototype();
    const rvec& h = p->coefficients;
    const rvec w = grid4096();
    for (int d = 1; d <= 7; ++d) {
        const rvec z = zero_interleave(h, d, true);
        double worst = 0.0;
        for (double om : w) {
            cplx rhs(0.0, 0.0);
            for (int i = 0; i < d; ++i)
                rhs += naive_dtft(h, om - kPi / d - 2.0 * kPi * i / d);
            rhs /= double(d);
            worst = std::max(worst, std::abs(naive_dtft(z, om) - rhs));
        }
        CHECK_MESSAGE(worst < 1e-10, "D=" << d << " error " << worst);
    }
}

TEST_CASE("masking sequence Fourier coefficients are all exactly one")
{
    for (int d = 1; d <= 7; ++d)
        for (const cplx& b : masking_coefficients(d)) {
            CHECK(b.real() == 1.0);
            CHECK(b.imag() == 0.0);
        }
}

TEST_CASE("every bandwidth reuses prototype coefficients")
{
    const auto p = ldacs_prototype();
    for (int bw : supported_bandwidths()) {
        const ReconfigFilter f = make_ldacs_filter(bw);
        CHECK(f.source.get() == p.get());
        const int d = f.config.factor;
        for (std::size_t m = 0; m < f.realized_coefficients.size(); ++m)
            CHECK(std::abs(f.realized_coefficients[m]) == std::abs(p->coefficients[std::size_t(f.phase) + m * std::size_t(d)]));
    }
}

TEST_CASE("realized filters keep linear phase")
{
    for (int bw : supported_bandwidths()) {
        const ReconfigFilter f = make_ldacs_filter(bw);
        const std::size_t n = f.taps.size();
        for (std::size_t i = 0; i < n; ++i)
            CHECK(f.taps[i] == doctest::Approx(f.taps[n - 1 - i]).epsilon(1e-12));
        const auto [pass, stop] = realized_edges(f);
        (void)stop;
        const double c = double(f.group_delay());
        double worst = 0.0;
        for (int i = 0; i <= 512; ++i) {
            const double w = kPi * pass * i / 512.0;
            const cplx z = naive_dtft(f.taps, w) * std::polar(1.0, w * c);
            worst = std::max(worst, std::abs(std::atan2(z.imag(), std::abs(z.real()))));
        }
        CHECK_MESSAGE(worst < 1e-6, bw << " kHz phase residual " << worst);
    }
}

TEST_CASE("498 kHz realized bandwidth is within two subcarrier spacings")
{
    const double bw = measured_bandwidth_khz(make_ldacs_filter(498));
    MESSAGE("498 kHz filter measures " << bw << " kHz");
    CHECK(std::abs(bw - 498.0) <= 2.0 * kSubcarrierSpacingHz / 1000.0);
}

TEST_CASE("realized stopband floors are below -60 dB")
{
    for (int bw : supported_bandwidths()) {
        const double floor_db = stopband_floor_db(make_ldacs_filter(bw));
        CHECK_MESSAGE(floor_db <= -60.0, bw << " kHz floor " << floor_db);
    }
}

TEST_CASE("frequency response DC gain is the coefficient sum")
{
    const auto p = ldacs_prototype();
    double sum = 0.0;
    for (double h : p->coefficients)
        sum += h;
    const cvec r = frequency_response(p->coefficients, 1024);
    CHECK(std::abs(r[512]) == doctest::Approx(std::abs(sum)).epsilon(1e-12));
    CHECK_THROWS_AS(frequency_response(p->coefficients, 100), ValidationError);
}

TEST_CASE("DFT filter bank branch centers")
{
    const ReconfigFilter f = make_ldacs_filter(186);
    const MultibandFilterBank b = build_dftfb(f, 4, {0});
    CHECK(b.branch_center(0) == -1.0);
    CHECK(b.branch_center(1) == -0.5);
    CHECK(b.branch_center(2) == 0.0);
    CHECK(b.branch_center(3) == 0.5);
    CHECK(nearest_branch(4, 0.49) == 3);
    CHECK(nearest_branch(32, 0.0) == 16);
}

TEST_CASE("single-branch bank equals the base filter")
{
    const ReconfigFilter f = make_ldacs_filter(342);
    const MultibandFilterBank b = build_dftfb(f, 1, {0});
    REQUIRE(b.composite_taps.size() == f.taps.size());
    for (std::size_t i = 0; i < f.taps.size(); ++i)
        CHECK(b.composite_taps[i] == cplx(f.taps[i], 0.0));
}

TEST_CASE("polyphase components cover the padded filter")
{
    const ReconfigFilter f = make_ldacs_filter(498);
    for (int kb : {2, 4, 8, 32}) {
        const MultibandFilterBank b = build_dftfb(f, kb, {1});
        std::size_t total = 0;
        for (const auto& c : b.polyphase_components)
            total += c.size();
        CHECK(total == (f.taps.size() + std::size_t(kb) - 1) / std::size_t(kb) * std::size_t(kb));
        CHECK(total % std::size_t(kb) == 0);
    }
}

TEST_CASE("composite taps equal explicitly modulated copies of the base filter")
{
    const ReconfigFilter f = make_ldacs_filter(186);
    const std::vector<std::pair<int, std::set<int>>> cases{{4, {3}}, {4, {0, 2}}, {8, {1, 5, 6}}, {32, {12, 20}}};
    for (const auto& [kb, active] : cases) {
        const MultibandFilterBank b = build_dftfb(f, kb, active);
        cvec ref(f.taps.size(), cplx(0.0, 0.0));
        for (int k : active)
            for (std::size_t n = 0; n < f.taps.size(); ++n)
                ref[n] += f.taps[n] * std::polar(1.0, kPi * (2.0 * k / kb - 1.0) * double(n));
        CHECK(testutil::max_abs_diff(b.composite_taps, ref) < 1e-10);
    }
}

TEST_CASE("single active band has no mirrored image")
{
    const ReconfigFilter f = make_ldacs_filter(186);
    const MultibandFilterBank b = build_dftfb(f, 4, {3});
    const cvec r = frequency_response(b, 4096);
    const double at_center = std::abs(r[3 * 4096 / 4]);
    const double at_mirror = std::abs(r[4096 / 4]);
    CHECK(20.0 * std::log10(at_mirror / at_center) < -40.0);
}

TEST_CASE("bank construction errors")
{
    const ReconfigFilter f = make_ldacs_filter(186);
    CHECK_THROWS_AS(build_dftfb(f, 4, {}), ValidationError);
    CHECK_THROWS_AS(build_dftfb(f, 3, {0}), ValidationError);
    CHECK_THROWS_AS(build_dftfb(f, 4, {4}), ValidationError);
}

TEST_CASE("filter_signal is a linear convolution carrying the group delay")
{
    const ReconfigFilter f = make_ldacs_filter(420);
    ComplexSignal impulse;
    impulse.samples = {cplx(1.0, 0.0)};
    const ComplexSignal out = filter_signal(f, impulse);
    REQUIRE(out.samples.size() == f.taps.size());
    for (std::size_t i = 0; i < f.taps.size(); ++i)
        CHECK(out.samples[i] == cplx(f.taps[i], 0.0));
    CHECK(out.group_delay_samples == f.group_delay());

    ComplexSignal x;
    x.samples = testutil::random_cvec(256, 11);
    const ComplexSignal y = filter_signal(f, x);
    CHECK(y.samples.size() == 256 + f.taps.size() - 1);
    CHECK(testutil::max_abs_diff(y.samples, testutil::naive_conv(x.samples, f.taps)) < 1e-10);

    CHECK_THROWS_AS(filter_signal(f, ComplexSignal{}), ValidationError);
}

TEST_CASE("single-tap identity filter passes the input through")
{
    DesignSpec s;
    s.passband_edge = 1.0;
    auto p = std::make_shared<const PrototypeFilter>(design_prototype(s));
    const ReconfigFilter f = apply_cdm(p, 1);
    ComplexSignal x;
    x.samples = testutil::random_cvec(64, 12);
    CHECK(filter_signal(f, x).samples == x.samples);
}

TEST_CASE("coefficient CSV round trip is exact")
{
    const auto p = ldacs_prototype();
    const std::string path = (std::filesystem::temp_directory_path() / "refofdm_coeffs.csv").string();
    write_coefficients_csv(path, p->coefficients);
    CHECK(read_coefficients_csv(path) == p->coefficients);
    std::remove(path.c_str());
}

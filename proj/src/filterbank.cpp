#include "refofdm/filterbank.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <sstream>

#include "refofdm/fft.hpp"
#include "refofdm/kernels.hpp"
#include "refofdm/remez.hpp"

namespace refofdm {

namespace {

int herrmann_order(double dp, double ds, double transition)
{
    if (dp < ds)
        std::swap(dp, ds);
    const double lp = std::log10(dp);
    const double ls = std::log10(ds);
    const double dinf = (5.309e-3 * lp * lp + 7.114e-2 * lp - 4.761e-1) * ls +
                        (-2.66e-3 * lp * lp - 5.941e-1 * lp - 4.278e-1);
    const double f = 11.01217 + 0.51244 * (lp - ls);
    const double df = transition / 2.0;
    const int n = int(std::ceil(dinf / df - f * df));
    return n + (n % 2);
}

bool meets_spec(const rvec& h, double pass_edge, double stop_edge, double dp, double ds)
{
    const int grid = 8192;
    for (int i = 0; i <= grid; ++i) {
        const double f = double(i) / double(grid);
        const double a = zero_phase_amplitude(h, kPi * f);
        if (f <= pass_edge && std::abs(a - 1.0) > dp * 1.0001)
            return false;
        if (f >= stop_edge && std::abs(a) > ds * 1.0001)
            return false;
    }
    return true;
}

ReconfigFilter decimate(std::shared_ptr<const PrototypeFilter> proto, int factor, DecimationMethod method)
{
    if (!proto)
        throw ValidationError("null prototype");
    if (factor < 1 || factor > 7)
        throw ValidationError("unsupported decimation factor " + std::to_string(factor) + " (legal: 1..7)");
    const rvec& h = proto->coefficients;
    const int n = int(h.size()) - 1;
    ReconfigFilter f;
    f.source = proto;
    f.config.factor = factor;
    f.config.method = method;
    // Retain the residue class holding the center tap so the result stays symmetric.
    f.phase = (n / 2) % factor;
    std::vector<int> idx;
    for (int i = f.phase; i <= n; i += factor)
        idx.push_back(i);
    const int len = int(idx.size());
    const int center = (len - 1) / 2;
    f.realized_coefficients.resize(std::size_t(len));
    for (int m = 0; m < len; ++m) {
        const double sign = (method == DecimationMethod::MCDM && ((m - center) % 2 != 0)) ? -1.0 : 1.0;
        f.realized_coefficients[std::size_t(m)] = sign * h[std::size_t(idx[std::size_t(m)])];
    }
    f.taps.resize(std::size_t(len));
    for (int m = 0; m < len; ++m)
        f.taps[std::size_t(m)] = double(factor) * f.realized_coefficients[std::size_t(m)];
    if (method == DecimationMethod::MCDM) {
        f.config.complement_delay = center;
        for (auto& t : f.taps)
            t = -t;
        f.taps[std::size_t(center)] += 1.0;
    }
    return f;
}

}  // namespace

DesignSpec ldacs_design_spec()
{
    DesignSpec s;
    s.stopband_attenuation_db = 70.0;
    s.passband_ripple_db = 0.1;
    s.transition_bw = 0.1;
    s.passband_edge = 0.12;
    s.overdesign = 7.0;
    s.order = 240;
    // Calibrated against the realized bandwidths of the design table.
    s.design_transition = 0.036;
    s.stopband_weight = 8.0;
    return s;
}

PrototypeFilter design_prototype(const DesignSpec& spec)
{
    PrototypeFilter p;
    p.design_spec = spec;
    p.passband_edge = spec.passband_edge;
    if (spec.passband_edge >= 1.0) {
        p.coefficients = {1.0};
        p.order = 0;
        p.pass_edge = 1.0;
        p.stop_edge = 1.0;
        return p;
    }
    if (!(spec.stopband_attenuation_db > 0) || !(spec.passband_ripple_db > 0) || !(spec.transition_bw > 0))
        throw ValidationError("design spec: attenuation, ripple and transition must be positive");
    if (!(spec.passband_edge > 0.0) || spec.passband_edge >= 1.0 - spec.transition_bw)
        throw ValidationError("design spec: passband edge must lie in (0, 1 - transition)");
    if (!(spec.overdesign >= 1.0))
        throw ValidationError("design spec: over-design factor must be >= 1");

    const double g = std::pow(10.0, spec.passband_ripple_db / 20.0);
    const double dp = (g - 1.0) / (g + 1.0) / spec.overdesign;
    const double ds = std::pow(10.0, -spec.stopband_attenuation_db / 20.0) / spec.overdesign;
    const double tw = spec.design_transition > 0 ? spec.design_transition : spec.transition_bw / spec.overdesign;
    int order = spec.order > 0 ? spec.order : herrmann_order(dp, ds, tw);
    order += order % 2;
    const double weight = spec.stopband_weight > 0 ? spec.stopband_weight : dp / ds;
    p.pass_edge = spec.passband_edge - tw / 2.0;
    p.stop_edge = spec.passband_edge + tw / 2.0;
    if (p.pass_edge <= 0.0 || p.stop_edge >= 1.0)
        throw ValidationError("design spec: transition band leaves [0, 1]");
    // The order estimate can fall short; grow it until the dense-grid response meets the spec.
    const int max_growth = spec.order > 0 ? 0 : 64;
    for (int grown = 0;; grown += 2) {
        const RemezResult r = remez(order + grown + 1, {0.0, p.pass_edge, p.stop_edge, 1.0}, {1.0, 0.0}, {1.0, weight});
        p.coefficients = r.taps;
        p.order = order + grown;
        p.ripple = r.ripple;
        if (grown >= max_growth || meets_spec(r.taps, p.pass_edge, p.stop_edge, dp, ds))
            return p;
    }
}

std::shared_ptr<const PrototypeFilter> ldacs_prototype()
{
    static std::once_flag once;
    static std::shared_ptr<const PrototypeFilter> proto;
    std::call_once(once, [] { proto = std::make_shared<const PrototypeFilter>(design_prototype(ldacs_design_spec())); });
    return proto;
}

const std::vector<TableRow>& filter_table()
{
    static const std::vector<TableRow> rows = {
        {186, 0.16, 7, DecimationMethod::MCDM}, {264, 0.22, 2, DecimationMethod::CDM},
        {342, 0.28, 6, DecimationMethod::MCDM}, {420, 0.34, 3, DecimationMethod::CDM},
        {498, 0.40, 5, DecimationMethod::MCDM}, {576, 0.46, 4, DecimationMethod::CDM},
        {654, 0.52, 4, DecimationMethod::MCDM}, {732, 0.58, 5, DecimationMethod::CDM},
    };
    return rows;
}

const std::vector<int>& supported_bandwidths()
{
    static const std::vector<int> bw = [] {
        std::vector<int> v;
        for (const auto& r : filter_table())
            v.push_back(r.bandwidth_khz);
        return v;
    }();
    return bw;
}

void check_bandwidth(int bandwidth_khz)
{
    for (int b : supported_bandwidths())
        if (b == bandwidth_khz)
            return;
    std::ostringstream os;
    os << "unsupported bandwidth " << bandwidth_khz << " kHz; legal values:";
    for (int b : supported_bandwidths())
        os << ' ' << b;
    throw ValidationError(os.str());
}

ReconfigFilter apply_cdm(std::shared_ptr<const PrototypeFilter> proto, int factor)
{
    return decimate(std::move(proto), factor, DecimationMethod::CDM);
}

ReconfigFilter apply_mcdm(std::shared_ptr<const PrototypeFilter> proto, int factor)
{
    return decimate(std::move(proto), factor, DecimationMethod::MCDM);
}

DecimationConfig select_config(int bandwidth_khz)
{
    check_bandwidth(bandwidth_khz);
    for (const auto& r : filter_table()) {
        if (r.bandwidth_khz == bandwidth_khz) {
            DecimationConfig c;
            c.factor = r.factor;
            c.method = r.method;
            if (r.method == DecimationMethod::MCDM) {
                const int len = int(ldacs_prototype()->coefficients.size() + std::size_t(r.factor) - 1) / r.factor;
                c.complement_delay = (len - 1) / 2;
            }
            return c;
        }
    }
    throw ValidationError("unreachable");
}

ReconfigFilter make_ldacs_filter(int bandwidth_khz)
{
    const DecimationConfig c = select_config(bandwidth_khz);
    ReconfigFilter f = c.method == DecimationMethod::CDM ? apply_cdm(ldacs_prototype(), c.factor)
                                                         : apply_mcdm(ldacs_prototype(), c.factor);
    f.target_bandwidth_khz = bandwidth_khz;
    return f;
}

rvec zero_interleave(const rvec& h, int factor, bool alternate)
{
    rvec out(h.size(), 0.0);
    for (std::size_t n = 0; n < h.size(); n += std::size_t(factor)) {
        const bool odd = (n / std::size_t(factor)) % 2 == 1;
        out[n] = (alternate && odd) ? -h[n] : h[n];
    }
    return out;
}

cvec masking_coefficients(int factor)
{
    if (factor < 1)
        throw ValidationError("masking period must be positive");
    rvec b(std::size_t(factor), 0.0);
    b[0] = 1.0;
    cvec out(static_cast<std::size_t>(factor));
    for (int i = 0; i < factor; ++i) {
        cplx acc(0.0, 0.0);
        for (int n = 0; n < factor; ++n)
            acc += b[std::size_t(n)] * std::polar(1.0, -2.0 * kPi * double(i) * double(n) / double(factor));
        out[std::size_t(i)] = acc;
    }
    return out;
}

double MultibandFilterBank::branch_center(int k) const
{
    if (branches == 1)
        return 0.0;
    return 2.0 * double(k) / double(branches) - 1.0;
}

int nearest_branch(int branches, double center)
{
    if (branches == 1)
        return 0;
    int k = int(std::lround((center + 1.0) * double(branches) / 2.0));
    return ((k % branches) + branches) % branches;
}

MultibandFilterBank build_dftfb(const ReconfigFilter& filter, int branches, const std::set<int>& active)
{
    if (branches < 1 || !is_pow2(std::size_t(branches)))
        throw ValidationError("DFT filter bank order must be a power of two");
    if (active.empty())
        throw ValidationError("DFT filter bank needs at least one active band");
    for (int k : active)
        if (k < 0 || k >= branches)
            throw ValidationError("active band " + std::to_string(k) + " outside 0.." + std::to_string(branches - 1));
    MultibandFilterBank bank;
    bank.base = filter;
    bank.branches = branches;
    bank.active_bands = active;

    const std::size_t len = filter.taps.size();
    const std::size_t padded = (len + std::size_t(branches) - 1) / std::size_t(branches) * std::size_t(branches);
    const std::size_t per = padded / std::size_t(branches);
    bank.polyphase_components.assign(std::size_t(branches), rvec(per, 0.0));
    for (std::size_t n = 0; n < len; ++n)
        bank.polyphase_components[n % std::size_t(branches)][n / std::size_t(branches)] = filter.taps[n];

    // Branch k sits at 2k/K_b − 1: modulation e^{jπ(2k/K_b−1)n} = (−1)^n e^{j2πkn/K_b},
    // and e^{j2πkn/K_b} depends only on the polyphase index q = n mod K_b.
    cvec mask(std::size_t(branches), cplx(0.0, 0.0));
    for (int k : active)
        mask[std::size_t(k)] = 1.0;
    fft_inplace(mask, true);
    bank.composite_taps.assign(len, cplx(0.0, 0.0));
    for (std::size_t q = 0; q < std::size_t(branches); ++q) {
        for (std::size_t m = 0; m < per; ++m) {
            const std::size_t n = m * std::size_t(branches) + q;
            if (n >= len)
                continue;
            const double sign = (branches == 1 || n % 2 == 0) ? 1.0 : -1.0;
            bank.composite_taps[n] = bank.polyphase_components[q][m] * sign * mask[q];
        }
    }
    return bank;
}

ComplexSignal filter_signal(const ReconfigFilter& f, const ComplexSignal& s)
{
    if (s.samples.empty())
        throw ValidationError("filter_signal: empty input");
    ComplexSignal out;
    out.samples = convolve(s.samples, f.taps);
    out.sample_rate_hz = s.sample_rate_hz;
    out.group_delay_samples = s.group_delay_samples + f.group_delay();
    out.symbol_scale = s.symbol_scale;
    return out;
}

ComplexSignal filter_signal(const MultibandFilterBank& f, const ComplexSignal& s)
{
    if (s.samples.empty())
        throw ValidationError("filter_signal: empty input");
    ComplexSignal out;
    out.samples = convolve(s.samples, f.composite_taps);
    out.sample_rate_hz = s.sample_rate_hz;
    out.group_delay_samples = s.group_delay_samples + f.group_delay();
    out.symbol_scale = s.symbol_scale;
    return out;
}

ComplexSignal filter_signal(const AnyFilter& f, const ComplexSignal& s)
{
    return std::visit([&](const auto& x) { return filter_signal(x, s); }, f);
}

namespace {
rvec grid_omegas(int n)
{
    rvec w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        w[std::size_t(i)] = kPi * (-1.0 + 2.0 * double(i) / double(n));
    return w;
}
}  // namespace

cvec frequency_response(const rvec& taps, int grid_points)
{
    if (grid_points < int(taps.size()))
        throw ValidationError("frequency_response: grid smaller than filter length");
    return dtft(taps, grid_omegas(grid_points));
}

cvec frequency_response(const ReconfigFilter& f, int grid_points) { return frequency_response(f.taps, grid_points); }

cvec frequency_response(const MultibandFilterBank& f, int grid_points)
{
    if (grid_points < f.length())
        throw ValidationError("frequency_response: grid smaller than filter length");
    return dtft(f.composite_taps, grid_omegas(grid_points));
}

double zero_phase_amplitude(const rvec& taps, double omega)
{
    const int n = int(taps.size());
    const double c = double(n - 1) / 2.0;
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
        acc += taps[std::size_t(i)] * std::cos(omega * (double(i) - c));
    return acc;
}

double measured_bandwidth(const rvec& taps)
{
    const double dc = zero_phase_amplitude(taps, 0.0);
    const double target = std::abs(dc) / std::sqrt(2.0);
    // Coarse scan for the first crossing, then bisection.
    const int scan = 8192;
    double lo = 0.0, hi = kPi;
    bool found = false;
    for (int i = 1; i <= scan; ++i) {
        const double w = kPi * double(i) / double(scan);
        if (std::abs(zero_phase_amplitude(taps, w)) < target) {
            lo = kPi * double(i - 1) / double(scan);
            hi = w;
            found = true;
            break;
        }
    }
    if (!found)
        return 2.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (std::abs(zero_phase_amplitude(taps, mid)) < target)
            hi = mid;
        else
            lo = mid;
    }
    return 2.0 * 0.5 * (lo + hi) / kPi;
}

double measured_bandwidth_khz(const ReconfigFilter& f)
{
    return measured_bandwidth(f.taps) * kBaseRateHz / 2.0 / 1000.0;
}

std::pair<double, double> realized_edges(const ReconfigFilter& f)
{
    const auto& p = *f.source;
    const double d = double(f.config.factor);
    if (f.config.method == DecimationMethod::CDM)
        return {std::min(1.0, d * p.pass_edge), std::min(1.0, d * p.stop_edge)};
    return {std::max(0.0, 1.0 - d * p.stop_edge), std::max(0.0, 1.0 - d * p.pass_edge)};
}

double stopband_floor_db(const ReconfigFilter& f, int grid_points)
{
    const double stop = realized_edges(f).second;
    double peak = 0.0;
    for (int i = 0; i <= grid_points; ++i) {
        const double w = kPi * double(i) / double(grid_points);
        if (w < stop * kPi)
            continue;
        peak = std::max(peak, std::abs(zero_phase_amplitude(f.taps, w)));
    }
    return peak > 0.0 ? 20.0 * std::log10(peak) : -400.0;
}

rvec subcarrier_response(const rvec& taps)
{
    rvec out(kFftSize);
    for (int k = 0; k < kFftSize; ++k)
        out[std::size_t(k)] = zero_phase_amplitude(taps, 2.0 * kPi * double(k - kDcIndex) / double(kFftSize));
    return out;
}

void write_coefficients_csv(const std::string& path, const rvec& taps)
{
    std::ofstream os(path);
    if (!os)
        throw Error("cannot write " + path);
    os << std::scientific << std::setprecision(16);
    for (double t : taps)
        os << t << '\n';
    if (!os)
        throw Error("write failed: " + path);
}

rvec read_coefficients_csv(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw Error("cannot read " + path);
    rvec out;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty())
            continue;
        try {
            out.push_back(std::stod(line));
        } catch (const std::exception&) {
            throw ValidationError(path + ":" + std::to_string(lineno) + ": not a number");
        }
    }
    return out;
}

std::string to_string(DecimationMethod m) { return m == DecimationMethod::CDM ? "CDM" : "MCDM"; }

}  // namespace refofdm

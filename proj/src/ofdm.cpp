#include "refofdm/ofdm.hpp"

#include "refofdm/fft.hpp"
#include "refofdm/kernels.hpp"
#include "refofdm/remez.hpp"

namespace refofdm {

ComplexSignal ofdm_modulate(const std::vector<cvec>& grid, int cp)
{
    if (cp < 0 || cp >= kFftSize)
        throw ValidationError("cyclic prefix must be in [0, 128)");
    ComplexSignal out;
    out.sample_rate_hz = kBaseRateHz;
    out.samples.reserve(grid.size() * std::size_t(kFftSize + cp));
    cvec buf(kFftSize);
    for (const auto& sym : grid) {
        if (sym.size() != std::size_t(kFftSize))
            throw ValidationError("grid symbol must hold 128 subcarriers");
        for (int k = 0; k < kFftSize; ++k)
            buf[std::size_t((k + kDcIndex) % kFftSize)] = sym[std::size_t(k)];
        fft_inplace(buf, true);
        for (auto& v : buf)
            v /= double(kFftSize);
        out.samples.insert(out.samples.end(), buf.end() - cp, buf.end());
        out.samples.insert(out.samples.end(), buf.begin(), buf.end());
    }
    return out;
}

cvec ofdm_demodulate_symbol(const cplx* samples)
{
    cvec buf(samples, samples + kFftSize);
    fft_inplace(buf, false);
    cvec out(kFftSize);
    for (int k = 0; k < kFftSize; ++k)
        out[std::size_t(k)] = buf[std::size_t((k + kDcIndex) % kFftSize)];
    return out;
}

const rvec& halfband_taps()
{
    static const rvec taps = remez(121, {0.0, 0.45, 0.55, 1.0}, {1.0, 0.0}, {1.0, 1.0}).taps;
    return taps;
}

ComplexSignal interpolate2(const ComplexSignal& s)
{
    const rvec& h = halfband_taps();
    const std::size_t d = (h.size() - 1) / 2;
    cvec up(2 * s.samples.size(), cplx(0.0, 0.0));
    for (std::size_t i = 0; i < s.samples.size(); ++i)
        up[2 * i] = 2.0 * s.samples[i];
    const cvec y = convolve(up, h);
    ComplexSignal out;
    out.samples.assign(y.begin() + long(d), y.begin() + long(d + up.size()));
    out.sample_rate_hz = 2.0 * s.sample_rate_hz;
    out.group_delay_samples = 2 * s.group_delay_samples;
    out.symbol_scale = s.symbol_scale;
    return out;
}

ComplexSignal decimate2(const ComplexSignal& s)
{
    const rvec& h = halfband_taps();
    const std::size_t d = (h.size() - 1) / 2;
    const cvec y = convolve(s.samples, h);
    ComplexSignal out;
    const std::size_t n = (s.samples.size() + 1) / 2;
    out.samples.resize(n);
    for (std::size_t m = 0; m < n; ++m)
        out.samples[m] = y[d + 2 * m];
    out.sample_rate_hz = s.sample_rate_hz / 2.0;
    out.group_delay_samples = s.group_delay_samples / 2;
    out.symbol_scale = s.symbol_scale;
    return out;
}

ComplexSignal frequency_shift(const ComplexSignal& s, double hz)
{
    ComplexSignal out = s;
    if (hz == 0.0)
        return out;
    const double w = 2.0 * kPi * hz / s.sample_rate_hz;
    for (std::size_t n = 0; n < out.samples.size(); ++n)
        out.samples[n] *= std::polar(1.0, w * double(n));
    return out;
}

}  // namespace refofdm

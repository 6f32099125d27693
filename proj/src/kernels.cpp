#include "refofdm/kernels.hpp"

#include <algorithm>

#include "refofdm/fft.hpp"

namespace refofdm {

namespace {

template <typename T>
cvec direct_impl(const cvec& x, const std::vector<T>& h, Exec exec)
{
    if (x.empty() || h.empty())
        return {};
    const long nx = long(x.size());
    const long nh = long(h.size());
    const long ny = nx + nh - 1;
    cvec y(std::size_t(ny), cplx(0.0, 0.0));
    auto body = [&](long n) {
        const long k0 = std::max(0L, n - nx + 1);
        const long k1 = std::min(nh - 1, n);
        cplx acc(0.0, 0.0);
        for (long k = k0; k <= k1; ++k)
            acc += h[std::size_t(k)] * x[std::size_t(n - k)];
        y[std::size_t(n)] = acc;
    };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (long n = 0; n < ny; ++n)
            body(n);
    } else {
        for (long n = 0; n < ny; ++n)
            body(n);
    }
    return y;
}

template <typename T>
cvec overlap_save_impl(const cvec& x, const std::vector<T>& h)
{
    if (x.empty() || h.empty())
        return {};
    const std::size_t m = h.size();
    const std::size_t nfft = std::max<std::size_t>(next_pow2(4 * m), 256);
    const std::size_t step = nfft - (m - 1);
    cvec hf(nfft, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < m; ++i)
        hf[i] = h[i];
    fft_inplace(hf, false);

    const std::size_t ny = x.size() + m - 1;
    cvec y(ny);
    const std::size_t blocks = (ny + step - 1) / step;
#pragma omp parallel for schedule(static)
    for (long b = 0; b < long(blocks); ++b) {
        const long out0 = long(b) * long(step);
        cvec buf(nfft);
        for (std::size_t i = 0; i < nfft; ++i) {
            const long src = out0 - long(m - 1) + long(i);
            buf[i] = (src >= 0 && src < long(x.size())) ? x[std::size_t(src)] : cplx(0.0, 0.0);
        }
        fft_inplace(buf, false);
        for (std::size_t i = 0; i < nfft; ++i)
            buf[i] *= hf[i];
        fft_inplace(buf, true);
        const double s = 1.0 / double(nfft);
        for (std::size_t i = 0; i < step; ++i) {
            const std::size_t o = std::size_t(out0) + i;
            if (o < ny)
                y[o] = buf[m - 1 + i] * s;
        }
    }
    return y;
}

template <typename T>
cvec dtft_impl(const std::vector<T>& h, const rvec& w, Exec exec)
{
    cvec out(w.size());
    auto body = [&](std::size_t i) {
        // Horner in e^{-jω} keeps the cost at one complex multiply per tap.
        const cplx z = std::polar(1.0, -w[i]);
        cplx acc(0.0, 0.0);
        for (std::size_t n = h.size(); n-- > 0;)
            acc = acc * z + cplx(h[n]);
        out[i] = acc;
    };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (long i = 0; i < long(w.size()); ++i)
            body(std::size_t(i));
    } else {
        for (std::size_t i = 0; i < w.size(); ++i)
            body(i);
    }
    return out;
}

}  // namespace

cvec convolve_direct(const cvec& x, const rvec& h, Exec exec) { return direct_impl(x, h, exec); }
cvec convolve_direct(const cvec& x, const cvec& h, Exec exec) { return direct_impl(x, h, exec); }
cvec convolve_overlap_save(const cvec& x, const rvec& h) { return overlap_save_impl(x, h); }
cvec convolve_overlap_save(const cvec& x, const cvec& h) { return overlap_save_impl(x, h); }

cvec convolve(const cvec& x, const rvec& h)
{
    return x.size() >= kOverlapSaveThreshold ? overlap_save_impl(x, h) : direct_impl(x, h, Exec::Parallel);
}

cvec convolve(const cvec& x, const cvec& h)
{
    return x.size() >= kOverlapSaveThreshold ? overlap_save_impl(x, h) : direct_impl(x, h, Exec::Parallel);
}

cvec dtft(const rvec& h, const rvec& omegas, Exec exec) { return dtft_impl(h, omegas, exec); }
cvec dtft(const cvec& h, const rvec& omegas, Exec exec) { return dtft_impl(h, omegas, exec); }

cvec tdl_propagate(const cvec& x, const std::vector<cvec>& taps, const std::vector<int>& delays, Exec exec)
{
    if (taps.size() != delays.size())
        throw ValidationError("tap/delay count mismatch");
    for (const auto& t : taps)
        if (t.size() < x.size())
            throw ValidationError("fading realization shorter than signal");
    for (int d : delays)
        if (d < 0)
            throw ValidationError("negative tap delay");
    const long n = long(x.size());
    cvec y(x.size(), cplx(0.0, 0.0));
    auto body = [&](long i) {
        cplx acc(0.0, 0.0);
        for (std::size_t l = 0; l < taps.size(); ++l) {
            const long src = i - delays[l];
            if (src >= 0)
                acc += taps[l][std::size_t(i)] * x[std::size_t(src)];
        }
        y[std::size_t(i)] = acc;
    };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (long i = 0; i < n; ++i)
            body(i);
    } else {
        for (long i = 0; i < n; ++i)
            body(i);
    }
    return y;
}

}  // namespace refofdm

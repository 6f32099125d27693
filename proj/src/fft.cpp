#include "refofdm/fft.hpp"

#include <cmath>
#include <utility>

namespace refofdm {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n)
{
    std::size_t p = 1;
    while (p < n)
        p <<= 1;
    return p;
}

void fft_inplace(cvec& x, bool inverse, std::uint64_t* mults)
{
    const std::size_t n = x.size();
    if (!is_pow2(n))
        throw ValidationError("fft length must be a power of two, got " + std::to_string(n));
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1)
            j ^= bit;
        j ^= bit;
        if (i < j)
            std::swap(x[i], x[j]);
    }
    const double sign = inverse ? 1.0 : -1.0;
    std::uint64_t count = 0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        for (std::size_t k = 0; k < half; ++k) {
            const double a = sign * 2.0 * kPi * double(k) / double(len);
            const cplx w(std::cos(a), std::sin(a));
            for (std::size_t i = k; i < n; i += len) {
                const cplx t = w * x[i + half];
                x[i + half] = x[i] - t;
                x[i] += t;
            }
            count += n / len;
        }
    }
    if (mults)
        *mults += count;
}

cvec fft(const cvec& x)
{
    cvec y = x;
    fft_inplace(y, false);
    return y;
}

cvec ifft(const cvec& x)
{
    cvec y = x;
    fft_inplace(y, true);
    const double s = 1.0 / double(y.size());
    for (auto& v : y)
        v *= s;
    return y;
}

}  // namespace refofdm

#include "refofdm/modulation.hpp"

#include <cmath>

#include "refofdm/coding.hpp"

namespace refofdm {

namespace {

double scale(Modulation m)
{
    switch (m) {
    case Modulation::QPSK: return 1.0 / std::sqrt(2.0);
    case Modulation::QAM16: return 1.0 / std::sqrt(10.0);
    case Modulation::QAM64: return 1.0 / std::sqrt(42.0);
    }
    return 1.0;
}

// Magnitude levels indexed by the Gray-coded magnitude bits.
double axis_level(const std::uint8_t* b, int nb)
{
    const double sign = (b[0] & 1u) ? -1.0 : 1.0;
    if (nb == 1)
        return sign;
    if (nb == 2)
        return sign * ((b[1] & 1u) ? 3.0 : 1.0);
    static const double lv[4] = {1.0, 3.0, 7.0, 5.0};  // 00, 01, 10, 11
    return sign * lv[((b[1] & 1u) << 1) | (b[2] & 1u)];
}

void axis_bits(double v, int nb, std::uint8_t* out)
{
    out[0] = v < 0.0;
    const double a = std::abs(v);
    if (nb == 2) {
        out[1] = a > 2.0;
    } else if (nb == 3) {
        // 1 -> 00, 3 -> 01, 5 -> 11, 7 -> 10
        const int idx = a < 2.0 ? 0 : a < 4.0 ? 1 : a < 6.0 ? 2 : 3;
        static const std::uint8_t gray[4][2] = {{0, 0}, {0, 1}, {1, 1}, {1, 0}};
        out[1] = gray[idx][0];
        out[2] = gray[idx][1];
    }
}

}  // namespace

int bits_per_symbol(Modulation m)
{
    switch (m) {
    case Modulation::QPSK: return 2;
    case Modulation::QAM16: return 4;
    case Modulation::QAM64: return 6;
    }
    return 2;
}

int constellation_order(Modulation m) { return 1 << bits_per_symbol(m); }

std::string to_string(Modulation m)
{
    switch (m) {
    case Modulation::QPSK: return "QPSK";
    case Modulation::QAM16: return "QAM16";
    case Modulation::QAM64: return "QAM64";
    }
    return "?";
}

Modulation modulation_from_string(const std::string& s)
{
    if (s == "QPSK")
        return Modulation::QPSK;
    if (s == "QAM16" || s == "16QAM")
        return Modulation::QAM16;
    if (s == "QAM64" || s == "64QAM")
        return Modulation::QAM64;
    throw ValidationError("unknown modulation '" + s + "' (QPSK, QAM16, QAM64)");
}

cvec modulate(const bits_t& bits, Modulation m)
{
    const int bps = bits_per_symbol(m);
    if (bits.size() % std::size_t(bps) != 0)
        throw ValidationError("modulate: bit count not divisible by " + std::to_string(bps));
    const int half = bps / 2;
    const double s = scale(m);
    cvec out(bits.size() / std::size_t(bps));
    for (std::size_t i = 0; i < out.size(); ++i) {
        const std::uint8_t* b = bits.data() + i * std::size_t(bps);
        out[i] = s * cplx(axis_level(b, half), axis_level(b + half, half));
    }
    return out;
}

bits_t demodulate(const cvec& symbols, Modulation m) { return demodulate(symbols, m, {}); }

bits_t demodulate(const cvec& symbols, Modulation m, const std::vector<bool>& erased)
{
    const int bps = bits_per_symbol(m);
    const int half = bps / 2;
    const double inv = 1.0 / scale(m);
    bits_t out(symbols.size() * std::size_t(bps));
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        std::uint8_t* b = out.data() + i * std::size_t(bps);
        if (!erased.empty() && erased[i]) {
            for (int j = 0; j < bps; ++j)
                b[j] = kErased;
            continue;
        }
        axis_bits(symbols[i].real() * inv, half, b);
        axis_bits(symbols[i].imag() * inv, half, b + half);
    }
    return out;
}

}  // namespace refofdm

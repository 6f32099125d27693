#include "refofdm/coding.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace refofdm {

bits_t prbs_stream(std::size_t n, std::uint32_t seed)
{
    std::uint32_t state = seed & 0x7FFFu;
    if (state == 0)
        state = 0x4A80u;  // 100101010000000
    bits_t out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t b = ((state >> 13) ^ (state >> 14)) & 1u;
        state = ((state << 1) | b) & 0x7FFFu;
        out[i] = std::uint8_t(b);
    }
    return out;
}

bits_t randomize(const bits_t& bits, std::uint32_t seed)
{
    const bits_t s = prbs_stream(bits.size(), seed);
    bits_t out(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i)
        out[i] = std::uint8_t((bits[i] ^ s[i]) & 1u);
    return out;
}

// ---------------------------------------------------------------- GF(256)

namespace {

struct Gf {
    std::array<std::uint8_t, 512> exp{};
    std::array<int, 256> log{};
    Gf()
    {
        int x = 1;
        for (int i = 0; i < 255; ++i) {
            exp[std::size_t(i)] = std::uint8_t(x);
            log[std::size_t(x)] = i;
            x <<= 1;
            if (x & 0x100)
                x ^= 0x11D;
        }
        for (int i = 255; i < 512; ++i)
            exp[std::size_t(i)] = exp[std::size_t(i - 255)];
        log[0] = -1;
    }
    std::uint8_t mul(std::uint8_t a, std::uint8_t b) const
    {
        if (!a || !b)
            return 0;
        return exp[std::size_t(log[a] + log[b])];
    }
    std::uint8_t div(std::uint8_t a, std::uint8_t b) const
    {
        if (!a)
            return 0;
        return exp[std::size_t((log[a] - log[b] + 255) % 255)];
    }
    std::uint8_t pow_alpha(int e) const { return exp[std::size_t(((e % 255) + 255) % 255)]; }
    std::uint8_t inv(std::uint8_t a) const { return exp[std::size_t(255 - log[a])]; }
};

const Gf& gf()
{
    static const Gf g;
    return g;
}

/// Evaluate a polynomial stored highest degree first.
std::uint8_t poly_eval(const std::vector<std::uint8_t>& p, std::uint8_t x)
{
    const Gf& g = gf();
    std::uint8_t y = 0;
    for (std::uint8_t c : p)
        y = std::uint8_t(g.mul(y, x) ^ c);
    return y;
}

}  // namespace

ReedSolomon::ReedSolomon(int n, int k) : n_(n), k_(k)
{
    if (n < 1 || n > 255 || k < 1 || k > n || (n - k) % 2 != 0)
        throw ValidationError("invalid RS(" + std::to_string(n) + "," + std::to_string(k) + ")");
    const Gf& g = gf();
    // g(x) = Π_{i=0}^{2t-1} (x - α^i), highest degree first.
    gen_ = {1};
    for (int i = 0; i < n - k; ++i) {
        std::vector<std::uint8_t> next(gen_.size() + 1, 0);
        const std::uint8_t r = g.pow_alpha(i);
        for (std::size_t j = 0; j < gen_.size(); ++j) {
            next[j] ^= gen_[j];
            next[j + 1] ^= g.mul(gen_[j], r);
        }
        gen_ = next;
    }
}

std::vector<std::uint8_t> ReedSolomon::encode(const std::vector<std::uint8_t>& msg) const
{
    if (int(msg.size()) != k_)
        throw ValidationError("RS encode: expected " + std::to_string(k_) + " bytes");
    const Gf& g = gf();
    const int nk = n_ - k_;
    std::vector<std::uint8_t> rem(std::size_t(nk), 0);
    for (std::uint8_t m : msg) {
        const std::uint8_t f = std::uint8_t(m ^ (nk ? rem[0] : 0));
        for (int j = 0; j < nk - 1; ++j)
            rem[std::size_t(j)] = std::uint8_t(rem[std::size_t(j + 1)] ^ g.mul(f, gen_[std::size_t(j + 1)]));
        if (nk)
            rem[std::size_t(nk - 1)] = g.mul(f, gen_[std::size_t(nk)]);
    }
    std::vector<std::uint8_t> cw = msg;
    cw.insert(cw.end(), rem.begin(), rem.end());
    return cw;
}

bool ReedSolomon::decode(std::vector<std::uint8_t>& cw) const
{
    if (int(cw.size()) != n_)
        throw ValidationError("RS decode: expected " + std::to_string(n_) + " bytes");
    const Gf& g = gf();
    const int nsym = n_ - k_;
    if (nsym == 0)
        return true;
    std::vector<std::uint8_t> synd(static_cast<std::size_t>(nsym));
    bool clean = true;
    for (int i = 0; i < nsym; ++i) {
        synd[std::size_t(i)] = poly_eval(cw, g.pow_alpha(i));
        clean &= synd[std::size_t(i)] == 0;
    }
    if (clean)
        return true;

    // Berlekamp-Massey; polynomials stored lowest degree first.
    std::vector<std::uint8_t> lambda{1}, prev{1};
    int l = 0, m = 1;
    std::uint8_t b = 1;
    for (int r = 0; r < nsym; ++r) {
        std::uint8_t d = synd[std::size_t(r)];
        for (int i = 1; i <= l && i < int(lambda.size()); ++i)
            d ^= g.mul(lambda[std::size_t(i)], synd[std::size_t(r - i)]);
        if (d == 0) {
            ++m;
            continue;
        }
        std::vector<std::uint8_t> t = lambda;
        const std::uint8_t coef = g.div(d, b);
        if (lambda.size() < prev.size() + std::size_t(m))
            lambda.resize(prev.size() + std::size_t(m), 0);
        for (std::size_t i = 0; i < prev.size(); ++i)
            lambda[i + std::size_t(m)] ^= g.mul(coef, prev[i]);
        if (2 * l <= r) {
            l = r + 1 - l;
            prev = t;
            b = d;
            m = 1;
        } else {
            ++m;
        }
    }
    while (lambda.size() > 1 && lambda.back() == 0)
        lambda.pop_back();
    const int nerr = int(lambda.size()) - 1;
    if (nerr != l || 2 * nerr > nsym)
        return false;

    // Ω(x) = S(x)Λ(x) mod x^{2t}
    std::vector<std::uint8_t> omega(std::size_t(nsym), 0);
    for (int i = 0; i < nsym; ++i)
        for (int j = 0; j <= i && j < int(lambda.size()); ++j)
            omega[std::size_t(i)] ^= g.mul(lambda[std::size_t(j)], synd[std::size_t(i - j)]);

    // Chien search over the shortened positions. Byte i has degree n-1-i.
    int found = 0;
    for (int i = 0; i < n_; ++i) {
        const int deg = n_ - 1 - i;
        const std::uint8_t xinv = g.pow_alpha(-deg);
        std::uint8_t v = 0, xp = 1;
        for (std::uint8_t c : lambda) {
            v ^= g.mul(c, xp);
            xp = g.mul(xp, xinv);
        }
        if (v != 0)
            continue;
        ++found;
        std::uint8_t om = 0;
        xp = 1;
        for (std::uint8_t c : omega) {
            om ^= g.mul(c, xp);
            xp = g.mul(xp, xinv);
        }
        // Formal derivative keeps odd-degree terms.
        std::uint8_t dl = 0;
        xp = 1;
        for (std::size_t j = 1; j < lambda.size(); ++j) {
            if (j % 2 == 1)
                dl ^= g.mul(lambda[j], xp);
            xp = g.mul(xp, xinv);
        }
        if (dl == 0)
            return false;
        // First consecutive root α^0: e = X · Ω(X^{-1}) / Λ'(X^{-1}).
        const std::uint8_t x = g.pow_alpha(deg);
        cw[std::size_t(i)] ^= g.mul(x, g.div(om, dl));
    }
    if (found != nerr)
        return false;
    for (int i = 0; i < nsym; ++i)
        if (poly_eval(cw, g.pow_alpha(i)) != 0)
            return false;
    return true;
}

// ------------------------------------------------------ convolutional code

namespace {
constexpr int kStates = 64;
constexpr unsigned kG0 = 0133;
constexpr unsigned kG1 = 0171;

inline unsigned parity(unsigned x) { return unsigned(__builtin_popcount(x) & 1); }

/// Register holds the newest bit at bit 6, previous six below.
inline void branch_out(unsigned state, unsigned bit, unsigned& o0, unsigned& o1)
{
    const unsigned reg = (bit << 6) | state;
    o0 = parity(reg & kG0);
    o1 = parity(reg & kG1);
}
}  // namespace

bits_t cc_encode(const bits_t& bits)
{
    bits_t out;
    out.reserve(2 * (bits.size() + 6));
    unsigned state = 0;
    auto push = [&](unsigned b) {
        unsigned o0, o1;
        branch_out(state, b, o0, o1);
        out.push_back(std::uint8_t(o0));
        out.push_back(std::uint8_t(o1));
        state = ((b << 6) | state) >> 1;
    };
    for (auto b : bits)
        push(b & 1u);
    for (int i = 0; i < 6; ++i)
        push(0);
    return out;
}

bits_t viterbi_decode(const bits_t& coded)
{
    if (coded.size() % 2 != 0 || coded.size() < 12)
        throw ValidationError("viterbi: coded length must be even and include the tail");
    const std::size_t steps = coded.size() / 2;
    std::array<std::array<std::uint8_t, 2>, kStates * 2> outs{};
    for (unsigned s = 0; s < kStates; ++s)
        for (unsigned b = 0; b < 2; ++b) {
            unsigned o0, o1;
            branch_out(s, b, o0, o1);
            outs[s * 2 + b] = {std::uint8_t(o0), std::uint8_t(o1)};
        }
    constexpr int kInf = 1 << 28;
    std::array<int, kStates> metric{}, next{};
    metric.fill(kInf);
    metric[0] = 0;
    // decision[t][ns] = predecessor state
    std::vector<std::array<std::uint8_t, kStates>> pred(steps);
    for (std::size_t t = 0; t < steps; ++t) {
        next.fill(kInf);
        const std::uint8_t r0 = coded[2 * t], r1 = coded[2 * t + 1];
        for (unsigned s = 0; s < kStates; ++s) {
            if (metric[s] >= kInf)
                continue;
            for (unsigned b = 0; b < 2; ++b) {
                const auto& o = outs[s * 2 + b];
                int cost = 0;
                if (r0 != kErased)
                    cost += (o[0] != (r0 & 1u));
                if (r1 != kErased)
                    cost += (o[1] != (r1 & 1u));
                const unsigned ns = ((b << 6) | s) >> 1;
                const int m = metric[s] + cost;
                if (m < next[ns]) {
                    next[ns] = m;
                    pred[t][ns] = std::uint8_t(s);
                }
            }
        }
        metric = next;
    }
    bits_t out(steps);
    unsigned s = 0;
    for (std::size_t t = steps; t-- > 0;) {
        out[t] = std::uint8_t((s >> 5) & 1u);
        s = pred[t][s];
    }
    out.resize(steps - 6);
    return out;
}

// ------------------------------------------------------------- interleaver

Interleaver::Interleaver(int block)
{
    if (block < 1)
        throw ValidationError("interleaver block must be positive");
    const double root = std::sqrt(double(block));
    int best = 1;
    for (int c = 1; c <= block; ++c)
        if (block % c == 0 && std::abs(c - root) < std::abs(best - root))
            best = c;
    cols_ = best;
    rows_ = block / best;
}

int Interleaver::source(int j) const
{
    const int c = j / rows_;
    const int r = j % rows_;
    return ((r + c) % rows_) * cols_ + c;
}

bits_t Interleaver::interleave(const bits_t& in) const
{
    const int n = block();
    if (in.size() % std::size_t(n) != 0)
        throw ValidationError("interleave: length " + std::to_string(in.size()) + " not a multiple of block " +
                              std::to_string(n));
    bits_t out(in.size());
    for (std::size_t b = 0; b < in.size(); b += std::size_t(n))
        for (int j = 0; j < n; ++j)
            out[b + std::size_t(j)] = in[b + std::size_t(source(j))];
    return out;
}

bits_t Interleaver::deinterleave(const bits_t& in) const
{
    const int n = block();
    if (in.size() % std::size_t(n) != 0)
        throw ValidationError("deinterleave: length " + std::to_string(in.size()) + " not a multiple of block " +
                              std::to_string(n));
    bits_t out(in.size());
    for (std::size_t b = 0; b < in.size(); b += std::size_t(n))
        for (int j = 0; j < n; ++j)
            out[b + std::size_t(source(j))] = in[b + std::size_t(j)];
    return out;
}

// -------------------------------------------------------------- FEC frame

double FecLayout::rs_rate() const
{
    int n = 0, k = 0;
    for (const auto& b : blocks) {
        n += b.n;
        k += b.k;
    }
    return n ? double(k) / double(n) : 0.0;
}

FecLayout fec_layout(int coded_bits)
{
    if (coded_bits < 2 * (6 + 8 * 3) || coded_bits % 2 != 0)
        throw ValidationError("frame too small for the FEC chain: " + std::to_string(coded_bits) + " coded bits");
    FecLayout l;
    l.coded_bits = coded_bits;
    l.cc_input_bits = coded_bits / 2 - 6;
    const int total = l.cc_input_bits / 8;
    l.pad_bits = l.cc_input_bits - 8 * total;
    const int nblocks = (total + 254) / 255;
    for (int i = 0; i < nblocks; ++i) {
        const int n = total / nblocks + (i < total % nblocks ? 1 : 0);
        const int t = std::max(1, int(std::lround(0.05 * n)));
        l.blocks.push_back({n, n - 2 * t});
        l.payload_bits += 8 * (n - 2 * t);
    }
    return l;
}

bits_t fec_encode(const bits_t& payload, const FecLayout& layout)
{
    if (int(payload.size()) != layout.payload_bits)
        throw ValidationError("fec_encode: payload must be " + std::to_string(layout.payload_bits) + " bits, got " +
                              std::to_string(payload.size()));
    bits_t rs_bits;
    rs_bits.reserve(std::size_t(layout.cc_input_bits));
    std::size_t pos = 0;
    for (const auto& blk : layout.blocks) {
        std::vector<std::uint8_t> msg(static_cast<std::size_t>(blk.k));
        for (auto& byte : msg) {
            std::uint8_t v = 0;
            for (int i = 0; i < 8; ++i)
                v = std::uint8_t((v << 1) | (payload[pos++] & 1u));
            byte = v;
        }
        const auto cw = ReedSolomon(blk.n, blk.k).encode(msg);
        for (std::uint8_t byte : cw)
            for (int i = 7; i >= 0; --i)
                rs_bits.push_back(std::uint8_t((byte >> i) & 1u));
    }
    rs_bits.insert(rs_bits.end(), std::size_t(layout.pad_bits), 0);
    return cc_encode(rs_bits);
}

FecDecodeResult fec_decode(const bits_t& coded, const FecLayout& layout)
{
    if (int(coded.size()) != layout.coded_bits)
        throw ValidationError("fec_decode: expected " + std::to_string(layout.coded_bits) + " coded bits");
    const bits_t rs_bits = viterbi_decode(coded);
    FecDecodeResult res;
    res.bits.reserve(std::size_t(layout.payload_bits));
    std::size_t pos = 0;
    for (const auto& blk : layout.blocks) {
        std::vector<std::uint8_t> cw(static_cast<std::size_t>(blk.n));
        for (auto& byte : cw) {
            std::uint8_t v = 0;
            for (int i = 0; i < 8; ++i)
                v = std::uint8_t((v << 1) | (rs_bits[pos++] & 1u));
            byte = v;
        }
        const bool ok = ReedSolomon(blk.n, blk.k).decode(cw);
        res.block_failed.push_back(!ok);
        for (int b = 0; b < blk.k; ++b)
            for (int i = 7; i >= 0; --i)
                res.bits.push_back(std::uint8_t((cw[std::size_t(b)] >> i) & 1u));
    }
    return res;
}

}  // namespace refofdm

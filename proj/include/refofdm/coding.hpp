/**
 * @file coding.hpp
 * @brief Randomizer, Reed-Solomon outer code, K=7 convolutional inner code and
 *        helical block interleaver.
 *
 * Bit vectors hold one bit per byte. Decoder inputs may also carry the value
 * kErased, which contributes nothing to the Viterbi path metric.
 */
#ifndef REFOFDM_CODING_HPP
#define REFOFDM_CODING_HPP

#include "refofdm/types.hpp"

namespace refofdm {

constexpr std::uint8_t kErased = 2;

/// PRBS 1 + x^14 + x^15; seed taken modulo 2^15, zero selects the default state.
bits_t prbs_stream(std::size_t n, std::uint32_t seed);
bits_t randomize(const bits_t& bits, std::uint32_t seed);

/// Shortened Reed-Solomon code over GF(256), primitive polynomial 0x11D.
class ReedSolomon {
public:
    ReedSolomon(int n, int k);
    int n() const { return n_; }
    int k() const { return k_; }
    int t() const { return (n_ - k_) / 2; }

    std::vector<std::uint8_t> encode(const std::vector<std::uint8_t>& msg) const;
    /// Corrects in place; returns false when the block is uncorrectable.
    bool decode(std::vector<std::uint8_t>& codeword) const;

private:
    int n_, k_;
    std::vector<std::uint8_t> gen_;
};

bits_t cc_encode(const bits_t& bits);           ///< appends 6 zero tail bits
bits_t viterbi_decode(const bits_t& coded);     ///< returns information bits without the tail

class Interleaver {
public:
    explicit Interleaver(int block);
    int block() const { return rows_ * cols_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bits_t interleave(const bits_t& in) const;
    bits_t deinterleave(const bits_t& in) const;
    /// Source index read by output position j.
    int source(int j) const;

private:
    int rows_, cols_;
};

struct RsBlock {
    int n, k;
};

/// Per-frame FEC geometry derived from the number of coded bits.
struct FecLayout {
    int coded_bits = 0;
    int cc_input_bits = 0;
    int pad_bits = 0;
    std::vector<RsBlock> blocks;
    int payload_bits = 0;

    double rs_rate() const;
};

FecLayout fec_layout(int coded_bits);

struct FecDecodeResult {
    bits_t bits;
    std::vector<bool> block_failed;
};

bits_t fec_encode(const bits_t& payload, const FecLayout& layout);
FecDecodeResult fec_decode(const bits_t& coded, const FecLayout& layout);

}  // namespace refofdm

#endif

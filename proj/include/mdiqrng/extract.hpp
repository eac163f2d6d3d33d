#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mdiqrng/errors.hpp"

namespace mdiqrng::extract {

// Packed bit string. Bit k lives at bit (k % 64) of word k/64; byte I/O is
// little-endian within bytes (bit k of a byte is (byte >> k) & 1). Unused
// high bits of the last word are kept zero.
class BitVector {
  public:
    BitVector() = default;
    explicit BitVector(std::size_t nbits) : words_((nbits + 63) / 64, 0), size_(nbits) {}

    static BitVector from_bytes(std::span<const std::uint8_t> bytes, std::size_t nbits);
    std::vector<std::uint8_t> to_bytes() const;  // (size+7)/8 bytes, zero-padded

    bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i, bool v) {
        const std::uint64_t mask = std::uint64_t{1} << (i & 63);
        if (v) {
            words_[i >> 6] |= mask;
        } else {
            words_[i >> 6] &= ~mask;
        }
    }

    std::size_t size() const { return size_; }
    std::size_t popcount() const;
    const std::vector<std::uint64_t>& words() const { return words_; }

    // Bulk word write; bits beyond size() are masked off.
    void store_word(std::size_t word_index, std::uint64_t value);

  private:
    std::vector<std::uint64_t> words_;
    std::size_t size_ = 0;
};

// Leftover-hash output length m = floor(n h_min - 2 log2(1/eps_ext)),
// floored at 0.
std::size_t output_length(std::size_t n, double h_min, double eps_ext);

struct ExtractorConfig {
    std::size_t block_input_bits = 1'000'000;
    double eps_ext = 1e-10;
    double h_min = 0.0;
    BitVector seed;  // exactly block_input_bits + output_bits() - 1 bits

    std::size_t output_bits() const { return output_length(block_input_bits, h_min, eps_ext); }
    void validate() const;
};

// Toeplitz hash over GF(2): out = T raw with T(i,j) = seed[m-1+j-i], i.e.
// row i of T is the contiguous seed slice starting at bit m-1-i. Linear in
// raw and deterministic in (seed, raw); the parallel and serial paths are
// bit-identical.
BitVector toeplitz_extract(const BitVector& raw, const ExtractorConfig& cfg, bool parallel = true);

struct SelfTestReport {
    double monobit_p = 0.0;
    double chisq_byte_p = 0.0;
};

// Monobit z-test plus a 256-bin byte-frequency chi-square test. Requires at
// least 1e5 bits; trailing bits of a partial byte are ignored by the byte
// test.
SelfTestReport uniformity_selftest(const BitVector& bits);

}  // namespace mdiqrng::extract

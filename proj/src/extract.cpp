#include "mdiqrng/extract.hpp"

#include <bit>
#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

namespace mdiqrng::extract {

BitVector BitVector::from_bytes(std::span<const std::uint8_t> bytes, std::size_t nbits) {
    if (bytes.size() * 8 < nbits) throw IoError("byte buffer shorter than requested bit count");
    BitVector v(nbits);
    for (std::size_t b = 0; b * 8 < nbits; ++b) {
        v.words_[b / 8] |= static_cast<std::uint64_t>(bytes[b]) << (8 * (b % 8));
    }
    // Clear any padding bits of the final byte.
    if (nbits % 64 != 0 && !v.words_.empty()) {
        v.words_.back() &= (std::uint64_t{1} << (nbits % 64)) - 1;
    }
    return v;
}

std::vector<std::uint8_t> BitVector::to_bytes() const {
    std::vector<std::uint8_t> out((size_ + 7) / 8, 0);
    for (std::size_t b = 0; b < out.size(); ++b) {
        out[b] = static_cast<std::uint8_t>(words_[b / 8] >> (8 * (b % 8)));
    }
    return out;
}

std::size_t BitVector::popcount() const {
    std::size_t n = 0;
    for (std::uint64_t w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

void BitVector::store_word(std::size_t word_index, std::uint64_t value) {
    if (word_index == words_.size() - 1 && size_ % 64 != 0) {
        value &= (std::uint64_t{1} << (size_ % 64)) - 1;
    }
    words_[word_index] = value;
}

std::size_t output_length(std::size_t n, double h_min, double eps_ext) {
    const double m = std::floor(static_cast<double>(n) * h_min - 2.0 * std::log2(1.0 / eps_ext));
    return m > 0.0 ? static_cast<std::size_t>(m) : 0;
}

void ExtractorConfig::validate() const {
    if (block_input_bits == 0) throw ConfigError("extractor block size must be positive");
    if (!(eps_ext > 0.0 && eps_ext < 1.0)) throw ConfigError("eps_ext must be in (0,1)");
    if (!(h_min > 0.0 && h_min <= 1.0)) throw ConfigError("h_min must be in (0,1]");
    const std::size_t m = output_bits();
    if (m < 1) throw ConfigError("no extractable bits: n h_min does not cover the penalty");
    if (seed.size() != block_input_bits + m - 1) {
        throw ConfigError("seed must be exactly n + m - 1 bits");
    }
}

BitVector toeplitz_extract(const BitVector& raw, const ExtractorConfig& cfg, bool parallel) {
    cfg.validate();
    if (raw.size() != cfg.block_input_bits) {
        throw ConfigError("raw block length does not match the extractor configuration");
    }
    const std::size_t m = cfg.output_bits();
    const std::size_t raw_words = raw.words().size();

    // Seed words padded with one trailing zero word so the shifted window
    // reads below never index out of range.
    std::vector<std::uint64_t> seed = cfg.seed.words();
    seed.push_back(0);

    BitVector out(m);
    const std::int64_t out_words = static_cast<std::int64_t>(out.words().size());

    // Output bit i is the parity of raw AND the seed slice starting at bit
    // (m-1-i); the slice is assembled word-by-word with a double-word shift.
    // Threads own whole output words, so parallel and serial runs agree
    // bitwise.
#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t ow = 0; ow < out_words; ++ow) {
        std::uint64_t word = 0;
        const std::size_t i_end = std::min(m, static_cast<std::size_t>(ow + 1) * 64);
        for (std::size_t i = static_cast<std::size_t>(ow) * 64; i < i_end; ++i) {
            const std::size_t base = m - 1 - i;
            const std::size_t q = base >> 6;
            const unsigned r = static_cast<unsigned>(base & 63);
            std::uint64_t acc = 0;
            if (r == 0) {
                for (std::size_t w = 0; w < raw_words; ++w) {
                    acc ^= raw.words()[w] & seed[q + w];
                }
            } else {
                for (std::size_t w = 0; w < raw_words; ++w) {
                    const std::uint64_t window = (seed[q + w] >> r) | (seed[q + w + 1] << (64 - r));
                    acc ^= raw.words()[w] & window;
                }
            }
            word |= static_cast<std::uint64_t>(std::popcount(acc) & 1) << (i & 63);
        }
        out.store_word(static_cast<std::size_t>(ow), word);
    }
    return out;
}

SelfTestReport uniformity_selftest(const BitVector& bits) {
    if (bits.size() < 100'000) {
        throw ConfigError("uniformity self-test needs at least 1e5 bits");
    }
    SelfTestReport rep;

    const double n = static_cast<double>(bits.size());
    const double ones = static_cast<double>(bits.popcount());
    const double z = (2.0 * ones - n) / std::sqrt(n);
    rep.monobit_p = std::erfc(std::abs(z) / std::sqrt(2.0));

    const std::vector<std::uint8_t> bytes = bits.to_bytes();
    const std::size_t whole = bits.size() / 8;  // ignore a trailing partial byte
    std::array<std::size_t, 256> hist{};
    for (std::size_t i = 0; i < whole; ++i) ++hist[bytes[i]];
    const double expected = static_cast<double>(whole) / 256.0;
    double chi2 = 0.0;
    for (std::size_t c : hist) {
        const double d = static_cast<double>(c) - expected;
        chi2 += d * d / expected;
    }
    rep.chisq_byte_p = boost::math::gamma_q(255.0 / 2.0, chi2 / 2.0);
    return rep;
}

}  // namespace mdiqrng::extract

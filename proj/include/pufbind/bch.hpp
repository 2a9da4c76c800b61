// Copyright pufbind contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pufbind/bitstring.hpp"

namespace pufbind::bch {

// Binary BCH codec over GF(2^8), shortened from length 255 to 128.
//
// Parameters: designed distance 37 (generator polynomial of degree 124,
// roots alpha^1..alpha^36), so up to 18 bit errors are corrected by
// bounded-distance decoding. A shortened codeword carries 4 message bits
// and 124 parity bits. Bit 0 of a 128-bit word is the coefficient of
// x^127; message bits sit in the top 4 positions (systematic form).
class Codec {
public:
    static constexpr std::size_t kLength = 128;       // shortened code length
    static constexpr std::size_t kMessageBits = 4;
    static constexpr std::size_t kParityBits = 124;   // deg(g)
    static constexpr unsigned kCorrectable = 18;
    static constexpr unsigned kDesignedDistance = 37;

    Codec() {
        build_field_tables();
        build_generator_polynomial();
    }

    // Systematic encode of a 4-bit message into a 128-bit codeword.
    BitString encode(const BitString& message) const {
        if (message.size() != kMessageBits) {
            throw std::invalid_argument("BCH message must be 4 bits");
        }
        std::array<std::uint8_t, kLength> reg{};
        for (std::size_t j = 0; j < kMessageBits; ++j) {
            reg[j] = message.bit(j);
        }
        // Remainder of m(x) * x^124 modulo g(x); clearing position j
        // subtracts g(x) aligned so its leading term lands on j.
        std::array<std::uint8_t, kLength> word = reg;
        for (std::size_t j = 0; j < kMessageBits; ++j) {
            if (!word[j]) continue;
            for (std::size_t off = 0; off <= kParityBits; ++off) {
                word[j + off] ^= genpoly_[kParityBits - off];
            }
        }
        BitString out(kLength);
        for (std::size_t j = 0; j < kMessageBits; ++j) out.set(j, reg[j]);
        for (std::size_t j = kMessageBits; j < kLength; ++j) out.set(j, word[j]);
        return out;
    }

    struct DecodeResult {
        BitString codeword;   // corrected word, or the input when ok == false
        bool ok = false;      // true iff the result is a valid codeword
        unsigned errors = 0;  // number of bit corrections applied
    };

    // Bounded-distance decode: corrects up to kCorrectable errors. Never
    // throws on uncorrectable input; ok == false flags the failure and the
    // received word is passed through unchanged.
    DecodeResult decode(const BitString& received) const {
        if (received.size() != kLength) {
            throw std::invalid_argument("BCH received word must be 128 bits");
        }
        std::array<std::uint8_t, 36> synd;
        if (syndromes(received, synd)) {
            return DecodeResult{received, true, 0};
        }

        // Berlekamp-Massey for the error locator polynomial sigma(x).
        std::vector<std::uint8_t> sigma{1}, prev{1};
        unsigned L = 0, shift = 1;
        std::uint8_t prev_disc = 1;
        for (unsigned n = 0; n < 36; ++n) {
            std::uint8_t d = synd[n];
            for (unsigned i = 1; i <= L && i < sigma.size(); ++i) {
                d ^= gf_mul(sigma[i], synd[n - i]);
            }
            if (d == 0) {
                ++shift;
                continue;
            }
            const std::uint8_t coef = gf_mul(d, gf_inv(prev_disc));
            if (2 * L <= n) {
                auto keep = sigma;
                if (sigma.size() < prev.size() + shift) sigma.resize(prev.size() + shift, 0);
                for (std::size_t i = 0; i < prev.size(); ++i) {
                    sigma[i + shift] ^= gf_mul(coef, prev[i]);
                }
                L = n + 1 - L;
                prev = std::move(keep);
                prev_disc = d;
                shift = 1;
            } else {
                if (sigma.size() < prev.size() + shift) sigma.resize(prev.size() + shift, 0);
                for (std::size_t i = 0; i < prev.size(); ++i) {
                    sigma[i + shift] ^= gf_mul(coef, prev[i]);
                }
                ++shift;
            }
        }
        while (!sigma.empty() && sigma.back() == 0) sigma.pop_back();
        const unsigned degree = sigma.empty() ? 0 : static_cast<unsigned>(sigma.size() - 1);
        if (degree == 0 || degree > kCorrectable || degree != L) {
            return DecodeResult{received, false, 0};
        }

        // Chien search restricted to the 128 positions of the shortened
        // word: degree e is in error iff sigma(alpha^-e) == 0.
        BitString corrected = received;
        unsigned roots = 0;
        for (unsigned e = 0; e < kLength; ++e) {
            std::uint8_t val = 0;
            for (std::size_t i = 0; i < sigma.size(); ++i) {
                if (sigma[i] == 0) continue;
                val ^= gf_mul(sigma[i], alpha_pow((255 - e) % 255 * i));
            }
            if (val == 0) {
                corrected.flip(kLength - 1 - e);
                ++roots;
            }
        }
        if (roots != degree) {
            return DecodeResult{received, false, 0};
        }
        std::array<std::uint8_t, 36> check;
        if (!syndromes(corrected, check)) {
            return DecodeResult{received, false, 0};
        }
        return DecodeResult{std::move(corrected), true, roots};
    }

    // Coefficients of g(x); index i holds the coefficient of x^i.
    const std::array<std::uint8_t, kParityBits + 1>& generator_polynomial() const {
        return genpoly_;
    }

private:
    void build_field_tables() {
        // GF(2^8) generated by x^8 + x^4 + x^3 + x^2 + 1.
        constexpr unsigned kPrimitive = 0x11d;
        unsigned x = 1;
        for (unsigned i = 0; i < 255; ++i) {
            alpha_to_[i] = static_cast<std::uint8_t>(x);
            index_of_[x] = static_cast<std::uint8_t>(i);
            x <<= 1;
            if (x & 0x100) x ^= kPrimitive;
        }
    }

    void build_generator_polynomial() {
        // Product of (x + alpha^r) over the union of cyclotomic cosets of
        // 1..36; coefficients must come out binary.
        std::array<bool, 255> is_root{};
        for (unsigned i = 1; i <= 36; ++i) {
            unsigned j = i;
            while (!is_root[j]) {
                is_root[j] = true;
                j = (j * 2) % 255;
            }
        }
        std::vector<std::uint8_t> g{1};
        for (unsigned r = 0; r < 255; ++r) {
            if (!is_root[r]) continue;
            std::vector<std::uint8_t> next(g.size() + 1, 0);
            for (std::size_t k = 0; k < g.size(); ++k) {
                next[k + 1] ^= g[k];
                next[k] ^= gf_mul(g[k], alpha_to_[r]);
            }
            g = std::move(next);
        }
        if (g.size() != kParityBits + 1) {
            throw std::logic_error("unexpected generator polynomial degree");
        }
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (g[i] > 1) {
                throw std::logic_error("generator polynomial is not binary");
            }
            genpoly_[i] = g[i];
        }
    }

    std::uint8_t gf_mul(std::uint8_t a, std::uint8_t b) const {
        if (a == 0 || b == 0) return 0;
        return alpha_to_[(index_of_[a] + index_of_[b]) % 255];
    }

    std::uint8_t gf_inv(std::uint8_t a) const {
        return alpha_to_[(255 - index_of_[a]) % 255];
    }

    std::uint8_t alpha_pow(unsigned e) const { return alpha_to_[e % 255]; }

    // Syndromes S_1..S_36 of a shortened word; returns true iff all zero.
    bool syndromes(const BitString& word, std::array<std::uint8_t, 36>& out) const {
        out.fill(0);
        std::vector<unsigned> degrees;
        degrees.reserve(32);
        for (std::size_t j = 0; j < kLength; ++j) {
            if (word.bit(j)) degrees.push_back(static_cast<unsigned>(kLength - 1 - j));
        }
        bool all_zero = true;
        for (unsigned p = 1; p <= 36; ++p) {
            std::uint8_t s = 0;
            for (unsigned deg : degrees) {
                s ^= alpha_pow(p * deg);
            }
            out[p - 1] = s;
            if (s != 0) all_zero = false;
        }
        return all_zero;
    }

    std::array<std::uint8_t, 256> alpha_to_{};
    std::array<std::uint8_t, 256> index_of_{};
    std::array<std::uint8_t, kParityBits + 1> genpoly_{};
};

// Shared immutable instance; table construction is cheap but there is no
// reason to repeat it per encode/decode call.
inline const Codec& default_codec() {
    static const Codec codec;
    return codec;
}

}  // namespace pufbind::bch

// Copyright pufbind contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "pufbind/bitstring.hpp"

namespace pufbind {

namespace sha256_detail {

inline constexpr std::array<std::uint32_t, 64> kRoundConstants = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
    0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
    0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
    0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
    0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
    0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
    0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
    0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
    0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
    0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
    0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};

inline constexpr std::array<std::uint32_t, 8> kInitialState = {
    0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
    0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};

inline std::uint32_t rotr(std::uint32_t x, int s) {
    return (x >> s) | (x << (32 - s));
}

inline void compress(std::array<std::uint32_t, 8>& state, const std::uint8_t* block) {
    std::array<std::uint32_t, 64> w;
    for (int t = 0; t < 16; ++t) {
        w[t] = (static_cast<std::uint32_t>(block[4 * t]) << 24) |
               (static_cast<std::uint32_t>(block[4 * t + 1]) << 16) |
               (static_cast<std::uint32_t>(block[4 * t + 2]) << 8) |
               static_cast<std::uint32_t>(block[4 * t + 3]);
    }
    for (int t = 16; t < 64; ++t) {
        const std::uint32_t s0 = rotr(w[t - 15], 7) ^ rotr(w[t - 15], 18) ^ (w[t - 15] >> 3);
        const std::uint32_t s1 = rotr(w[t - 2], 17) ^ rotr(w[t - 2], 19) ^ (w[t - 2] >> 10);
        w[t] = w[t - 16] + s0 + w[t - 7] + s1;
    }

    std::uint32_t a = state[0], b = state[1], c = state[2], d = state[3];
    std::uint32_t e = state[4], f = state[5], g = state[6], h = state[7];
    for (int t = 0; t < 64; ++t) {
        const std::uint32_t big_s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
        const std::uint32_t ch = (e & f) ^ (~e & g);
        const std::uint32_t t1 = h + big_s1 + ch + kRoundConstants[t] + w[t];
        const std::uint32_t big_s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
        const std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
        const std::uint32_t t2 = big_s0 + maj;
        h = g;
        g = f;
        f = e;
        e = d + t1;
        d = c;
        c = b;
        b = a;
        a = t1 + t2;
    }
    state[0] += a;
    state[1] += b;
    state[2] += c;
    state[3] += d;
    state[4] += e;
    state[5] += f;
    state[6] += g;
    state[7] += h;
}

inline BitString state_to_digest(const std::array<std::uint32_t, 8>& state) {
    std::array<std::uint8_t, 32> out;
    for (int i = 0; i < 8; ++i) {
        out[4 * i] = static_cast<std::uint8_t>(state[i] >> 24);
        out[4 * i + 1] = static_cast<std::uint8_t>(state[i] >> 16);
        out[4 * i + 2] = static_cast<std::uint8_t>(state[i] >> 8);
        out[4 * i + 3] = static_cast<std::uint8_t>(state[i]);
    }
    return BitString::from_bytes(out);
}

}  // namespace sha256_detail

// One-shot SHA-256 with standard padding; 256-bit digest.
inline BitString sha256(std::span<const std::uint8_t> message) {
    using namespace sha256_detail;
    std::array<std::uint32_t, 8> state = kInitialState;

    std::size_t offset = 0;
    while (message.size() - offset >= 64) {
        compress(state, message.data() + offset);
        offset += 64;
    }

    // Final block(s): 0x80 marker, zero fill, 64-bit big-endian bit length.
    std::array<std::uint8_t, 128> tail{};
    const std::size_t rem = message.size() - offset;
    for (std::size_t i = 0; i < rem; ++i) tail[i] = message[offset + i];
    tail[rem] = 0x80;
    const std::size_t tail_len = (rem + 1 + 8 <= 64) ? 64 : 128;
    const std::uint64_t bit_len = static_cast<std::uint64_t>(message.size()) * 8;
    for (int i = 0; i < 8; ++i) {
        tail[tail_len - 8 + i] = static_cast<std::uint8_t>(bit_len >> (56 - 8 * i));
    }
    compress(state, tail.data());
    if (tail_len == 128) compress(state, tail.data() + 64);

    return state_to_digest(state);
}

inline BitString sha256(std::string_view text) {
    return sha256(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

// Word-streaming SHA-256 engine with a cycle counter: absorbing one 32-bit
// word costs one cycle, and a compression fires as soon as 16 words (one
// 512-bit block) have been buffered. Compression runs concurrently with
// buffer fill, so it adds no cycles of its own; the padding words fed by
// finalize() are cycle-counted like any other word, which keeps
// cycles_consumed() == 16 * blocks_compressed() at every block boundary.
class Sha256Stream {
public:
    // Appends `word` to the current block as four big-endian bytes.
    void absorb_word(std::uint32_t word) {
        if (finalized_) {
            throw std::logic_error("absorb_word after finalize");
        }
        message_bits_ += 32;
        push_word(word);
    }

    // Closes the stream with standard padding and returns the digest.
    // Single use; the padding words pass through the same cycle-counted path.
    BitString finalize() {
        if (finalized_) {
            throw std::logic_error("finalize called twice");
        }
        finalized_ = true;

        const std::uint64_t msg_bytes = message_bits_ / 8;
        // Bytes of padding so that msg + pad is a whole number of 64-byte
        // blocks; message bytes are always word-aligned, so pad is too.
        const std::size_t pad_len = 64 - static_cast<std::size_t>((msg_bytes + 8) % 64);
        std::vector<std::uint8_t> pad(pad_len + 8, 0);
        pad[0] = 0x80;
        for (int i = 0; i < 8; ++i) {
            pad[pad_len + i] = static_cast<std::uint8_t>(message_bits_ >> (56 - 8 * i));
        }
        for (std::size_t i = 0; i < pad.size(); i += 4) {
            push_word((static_cast<std::uint32_t>(pad[i]) << 24) |
                      (static_cast<std::uint32_t>(pad[i + 1]) << 16) |
                      (static_cast<std::uint32_t>(pad[i + 2]) << 8) |
                      static_cast<std::uint32_t>(pad[i + 3]));
        }
        return sha256_detail::state_to_digest(state_);
    }

    std::uint64_t cycles_consumed() const { return cycles_; }
    std::uint64_t blocks_compressed() const { return blocks_; }
    std::uint64_t total_bits() const { return message_bits_; }
    std::size_t buffered_bits() const { return buffer_len_ * 8; }

private:
    void push_word(std::uint32_t word) {
        buffer_[buffer_len_++] = static_cast<std::uint8_t>(word >> 24);
        buffer_[buffer_len_++] = static_cast<std::uint8_t>(word >> 16);
        buffer_[buffer_len_++] = static_cast<std::uint8_t>(word >> 8);
        buffer_[buffer_len_++] = static_cast<std::uint8_t>(word);
        ++cycles_;
        if (buffer_len_ == 64) {
            sha256_detail::compress(state_, buffer_.data());
            buffer_len_ = 0;
            ++blocks_;
        }
    }

    std::array<std::uint32_t, 8> state_ = sha256_detail::kInitialState;
    std::array<std::uint8_t, 64> buffer_{};
    std::size_t buffer_len_ = 0;       // bytes, always < 64
    std::uint64_t message_bits_ = 0;   // data bits absorbed, pre-padding
    std::uint64_t cycles_ = 0;
    std::uint64_t blocks_ = 0;
    bool finalized_ = false;
};

// Digest of a 448-bit derived key, i.e. SHA-256 over its 56 bytes.
inline BitString digest_key(const BitString& key) {
    if (key.size() != 448) {
        throw std::invalid_argument("derived key must be exactly 448 bits");
    }
    return sha256(std::span<const std::uint8_t>(key.bytes()));
}

}  // namespace pufbind

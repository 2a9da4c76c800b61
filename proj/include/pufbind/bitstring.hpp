// Copyright pufbind contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pufbind {

// Fixed-width bit string with MSB-first indexing: bit 0 is the most
// significant bit of the first byte, i.e. the leftmost character of the hex
// rendering. All file formats and digests in this project use this order.
class BitString {
public:
    BitString() = default;

    explicit BitString(std::size_t nbits) : nbits_(nbits), bytes_((nbits + 7) / 8, 0) {}

    static BitString from_bytes(std::span<const std::uint8_t> bytes) {
        BitString out;
        out.nbits_ = bytes.size() * 8;
        out.bytes_.assign(bytes.begin(), bytes.end());
        return out;
    }

    static BitString from_hex(std::string_view hex) {
        if (hex.size() % 2 != 0) {
            throw std::invalid_argument("hex string must have even length");
        }
        BitString out;
        out.nbits_ = hex.size() * 4;
        out.bytes_.reserve(hex.size() / 2);
        for (std::size_t i = 0; i < hex.size(); i += 2) {
            out.bytes_.push_back(static_cast<std::uint8_t>(
                (hex_nibble(hex[i]) << 4) | hex_nibble(hex[i + 1])));
        }
        return out;
    }

    std::size_t size() const { return nbits_; }
    bool empty() const { return nbits_ == 0; }
    const std::vector<std::uint8_t>& bytes() const { return bytes_; }

    bool bit(std::size_t i) const {
        check_index(i);
        return (bytes_[i / 8] >> (7 - i % 8)) & 1u;
    }

    void set(std::size_t i, bool value) {
        check_index(i);
        const std::uint8_t mask = static_cast<std::uint8_t>(1u << (7 - i % 8));
        if (value) {
            bytes_[i / 8] |= mask;
        } else {
            bytes_[i / 8] &= static_cast<std::uint8_t>(~mask);
        }
    }

    void flip(std::size_t i) { set(i, !bit(i)); }

    std::string to_hex() const {
        if (nbits_ % 8 != 0) {
            throw std::logic_error("to_hex requires a whole number of bytes");
        }
        static constexpr char kDigits[] = "0123456789abcdef";
        std::string out;
        out.reserve(bytes_.size() * 2);
        for (std::uint8_t b : bytes_) {
            out.push_back(kDigits[b >> 4]);
            out.push_back(kDigits[b & 0x0f]);
        }
        return out;
    }

    std::size_t popcount() const {
        std::size_t n = 0;
        for (std::uint8_t b : bytes_) {
            n += static_cast<std::size_t>(std::popcount(b));
        }
        return n;
    }

    friend BitString operator^(const BitString& a, const BitString& b) {
        if (a.nbits_ != b.nbits_) {
            throw std::invalid_argument("bit string width mismatch in XOR");
        }
        BitString out(a.nbits_);
        for (std::size_t i = 0; i < a.bytes_.size(); ++i) {
            out.bytes_[i] = static_cast<std::uint8_t>(a.bytes_[i] ^ b.bytes_[i]);
        }
        return out;
    }

    friend bool operator==(const BitString&, const BitString&) = default;

    static std::size_t hamming_distance(const BitString& a, const BitString& b) {
        return (a ^ b).popcount();
    }

private:
    static std::uint8_t hex_nibble(char c) {
        if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
        if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
        if (c >= 'A' && c <= 'F') return static_cast<std::uint8_t>(c - 'A' + 10);
        throw std::invalid_argument(std::string("invalid hex character: ") + c);
    }

    void check_index(std::size_t i) const {
        if (i >= nbits_) {
            throw std::out_of_range("bit index out of range");
        }
    }

    std::size_t nbits_ = 0;
    std::vector<std::uint8_t> bytes_;
};

}  // namespace pufbind

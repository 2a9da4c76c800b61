// Copyright pufbind contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pufbind/bch.hpp"
#include "pufbind/bitstring.hpp"
#include "pufbind/puf.hpp"
#include "pufbind/rng.hpp"
#include "pufbind/sha256.hpp"

namespace pufbind {

// Code-offset fuzzy extractor over 128-bit noisy readouts.
//
// Encode draws a random codeword c and publishes offset = R0 XOR c plus a
// salt; decode shifts a noisy readout back by the offset, error-corrects to
// the nearest codeword, and re-derives R0 as offset XOR c. The key is a
// salted 448-bit expansion of the (re)covered stable pattern. `k` is the
// guaranteed correction budget; the underlying code actually corrects up to
// bch::Codec::kCorrectable errors, which keeps regeneration reliable when
// the error count strays a little past the budget.
struct FuzzyParams {
    std::size_t n = 128;        // input width in bits
    unsigned k = 13;            // guaranteed error-correction budget
    std::size_t key_bits = 448; // derived-key width
};

inline constexpr std::size_t kSaltBits = 128;

struct HelperData {
    BitString code_offset;    // R0 XOR codeword, n bits
    BitString extractor_salt; // kSaltBits of key-strengthening salt
    FuzzyParams params_echo;  // parameters recorded at encode time
};

struct DerivedKey {
    BitString bits;  // 448 bits
};

namespace fe_detail {

inline void check_params(const FuzzyParams& p) {
    if (p.n != 128) {
        throw std::invalid_argument("fuzzy extractor supports n = 128 only");
    }
    if (p.k == 0 || p.k >= p.n / 2) {
        throw std::invalid_argument("fuzzy extractor requires 0 < k < n/2");
    }
    if (p.key_bits != 448) {
        throw std::invalid_argument("fuzzy extractor emits 448-bit keys only");
    }
}

// Deterministic expansion of the 128-bit stable value to 448 bits:
// two counter-separated SHA-256 blocks over (salt || counter || value),
// truncated to 56 bytes. Identical at encode and decode by construction.
inline DerivedKey derive_key(const BitString& salt, const BitString& stable_value) {
    std::vector<std::uint8_t> material;
    material.reserve(salt.bytes().size() + 1 + stable_value.bytes().size());
    std::vector<std::uint8_t> key_bytes;
    key_bytes.reserve(64);
    for (std::uint8_t counter = 0; counter < 2; ++counter) {
        material.clear();
        material.insert(material.end(), salt.bytes().begin(), salt.bytes().end());
        material.push_back(counter);
        material.insert(material.end(), stable_value.bytes().begin(),
                        stable_value.bytes().end());
        const BitString block = sha256(std::span<const std::uint8_t>(material));
        key_bytes.insert(key_bytes.end(), block.bytes().begin(), block.bytes().end());
    }
    key_bytes.resize(56);
    return DerivedKey{BitString::from_bytes(key_bytes)};
}

inline void check_helper(const HelperData& helper) {
    if (helper.params_echo.n != 128 || helper.code_offset.size() != 128) {
        throw std::invalid_argument("malformed helper data: offset width must be n = 128");
    }
    if (helper.extractor_salt.size() != kSaltBits) {
        throw std::invalid_argument("malformed helper data: salt width");
    }
    if (helper.params_echo.k == 0 || helper.params_echo.k >= helper.params_echo.n / 2) {
        throw std::invalid_argument("malformed helper data: k out of range");
    }
    if (helper.params_echo.key_bits != 448) {
        throw std::invalid_argument("malformed helper data: key width");
    }
}

}  // namespace fe_detail

// Encoding phase: derives the stable key K0 and the public helper data HD0
// from a reference readout. Pure function of (response, params, encode_seed).
inline std::pair<DerivedKey, HelperData> fe_encode(const PufResponse& response,
                                                   const FuzzyParams& params,
                                                   std::uint64_t encode_seed) {
    fe_detail::check_params(params);
    if (response.bits.size() != params.n) {
        throw std::invalid_argument("response width must equal n = 128");
    }

    auto gen = rng::engine(encode_seed);
    BitString salt(kSaltBits);
    for (std::size_t i = 0; i < kSaltBits / 64; ++i) {
        const std::uint64_t draw = gen();
        for (std::size_t b = 0; b < 64; ++b) {
            salt.set(i * 64 + b, (draw >> (63 - b)) & 1u);
        }
    }
    BitString message(bch::Codec::kMessageBits);
    const std::uint64_t draw = gen();
    for (std::size_t b = 0; b < bch::Codec::kMessageBits; ++b) {
        message.set(b, (draw >> (63 - b)) & 1u);
    }

    const BitString codeword = bch::default_codec().encode(message);
    HelperData helper;
    helper.code_offset = response.bits ^ codeword;
    helper.extractor_salt = std::move(salt);
    helper.params_echo = params;

    DerivedKey key = fe_detail::derive_key(helper.extractor_salt, response.bits);
    return {std::move(key), std::move(helper)};
}

// Decoding phase: regenerates the key from a noisy readout. Total: when the
// error count exceeds the code's reach the returned key is simply wrong, and
// downstream digest comparison catches it.
inline DerivedKey fe_decode(const PufResponse& noisy_response, const HelperData& helper) {
    fe_detail::check_helper(helper);
    if (noisy_response.bits.size() != helper.params_echo.n) {
        throw std::invalid_argument("response width must equal helper n");
    }

    const BitString shifted = noisy_response.bits ^ helper.code_offset;
    const auto decoded = bch::default_codec().decode(shifted);
    const BitString stable = helper.code_offset ^ decoded.codeword;
    return fe_detail::derive_key(helper.extractor_salt, stable);
}

// --- helper-data serialization ---------------------------------------------

inline std::string helper_to_text(const HelperData& helper) {
    std::ostringstream out;
    out << "PUFBIND-HELPER v1\n"
        << "n=" << helper.params_echo.n << "\n"
        << "k=" << helper.params_echo.k << "\n"
        << "offset=" << helper.code_offset.to_hex() << "\n"
        << "salt=" << helper.extractor_salt.to_hex() << "\n";
    return out.str();
}

inline HelperData helper_from_text(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) lines.push_back(line);
        pos = nl + 1;
    }
    if (lines.size() != 5) {
        throw std::runtime_error("helper file: expected exactly 5 lines");
    }
    if (lines[0] != "PUFBIND-HELPER v1") {
        throw std::runtime_error("helper file: bad header line");
    }
    auto field = [](std::string_view line, std::string_view key) {
        if (line.substr(0, key.size()) != key) {
            throw std::runtime_error("helper file: expected '" + std::string(key) + "' line");
        }
        return line.substr(key.size());
    };
    HelperData helper;
    const std::string_view n_str = field(lines[1], "n=");
    auto [np, nec] = std::from_chars(n_str.data(), n_str.data() + n_str.size(),
                                     helper.params_echo.n);
    if (nec != std::errc{} || np != n_str.data() + n_str.size() || helper.params_echo.n == 0 ||
        helper.params_echo.n % 8 != 0) {
        throw std::runtime_error("helper file: bad n value");
    }
    const std::string_view k_str = field(lines[2], "k=");
    auto [kp, kec] = std::from_chars(k_str.data(), k_str.data() + k_str.size(),
                                     helper.params_echo.k);
    if (kec != std::errc{} || kp != k_str.data() + k_str.size()) {
        throw std::runtime_error("helper file: bad k value");
    }
    const std::string_view offset_hex = field(lines[3], "offset=");
    if (offset_hex.size() != helper.params_echo.n / 4) {
        throw std::runtime_error("helper file: offset length does not match n");
    }
    helper.code_offset = BitString::from_hex(offset_hex);
    const std::string_view salt_hex = field(lines[4], "salt=");
    if (salt_hex.size() != kSaltBits / 4) {
        throw std::runtime_error("helper file: salt must be 32 hex characters");
    }
    helper.extractor_salt = BitString::from_hex(salt_hex);
    helper.params_echo.key_bits = 448;
    return helper;
}

inline void write_helper_file(const HelperData& helper, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open helper file for writing: " + path.string());
    }
    out << helper_to_text(helper);
}

inline HelperData read_helper_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open helper file: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return helper_from_text(buf.str());
    } catch (const std::exception& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

}  // namespace pufbind

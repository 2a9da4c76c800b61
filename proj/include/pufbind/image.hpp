// Copyright pufbind contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pufbind/bitstring.hpp"
#include "pufbind/sha256.hpp"

namespace pufbind {

// Parsed assembler output: one 18-bit instruction per line of the .hex file.
struct ProgramHex {
    std::vector<std::uint32_t> instructions;  // each < 2^18
};

inline constexpr std::uint32_t kInstructionMask = 0x3ffff;

// Memory geometry of the target block RAM: fixed 32-bit words, with the
// last 8 words reserved for the piggybacked 256-bit signature.
struct BramGeometry {
    static constexpr std::size_t kWordBits = 32;
    static constexpr std::size_t kSignatureWords = 8;
    std::size_t total_words = 1024;
};

// A packed memory image: instruction words (top 14 bits zero), zero fill,
// and the golden signature in the last 8 words.
struct BramImage {
    std::vector<std::uint32_t> words;
    BramGeometry geometry;

    std::size_t program_region_words() const {
        return geometry.total_words - BramGeometry::kSignatureWords;
    }
};

// Parses assembler .hex text: one instruction per non-empty line, exactly
// 5 hex digits, value below 2^18. Trailing whitespace and blank lines are
// tolerated; anything else is rejected with the offending line number.
inline ProgramHex parse_hex(std::string_view text) {
    ProgramHex prog;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
            line.remove_suffix(1);
        }
        if (line.empty()) continue;
        if (line.size() != 5) {
            throw std::runtime_error("hex line " + std::to_string(line_no) +
                                     ": expected exactly 5 hex digits");
        }
        std::uint32_t value = 0;
        for (char c : line) {
            std::uint32_t nibble;
            if (c >= '0' && c <= '9') nibble = static_cast<std::uint32_t>(c - '0');
            else if (c >= 'a' && c <= 'f') nibble = static_cast<std::uint32_t>(c - 'a' + 10);
            else if (c >= 'A' && c <= 'F') nibble = static_cast<std::uint32_t>(c - 'A' + 10);
            else {
                throw std::runtime_error("hex line " + std::to_string(line_no) +
                                         ": invalid hex character");
            }
            value = (value << 4) | nibble;
        }
        if (value > kInstructionMask) {
            throw std::runtime_error("hex line " + std::to_string(line_no) +
                                     ": value exceeds 18 bits");
        }
        prog.instructions.push_back(value);
    }
    if (prog.instructions.empty()) {
        throw std::runtime_error("hex file contains no instructions");
    }
    return prog;
}

// Zero-extends each 18-bit instruction into a 32-bit word.
inline std::vector<std::uint32_t> align_instructions(const ProgramHex& prog) {
    return prog.instructions;
}

namespace image_detail {

inline void append_word_be(std::vector<std::uint8_t>& out, std::uint32_t word) {
    out.push_back(static_cast<std::uint8_t>(word >> 24));
    out.push_back(static_cast<std::uint8_t>(word >> 16));
    out.push_back(static_cast<std::uint8_t>(word >> 8));
    out.push_back(static_cast<std::uint8_t>(word));
}

}  // namespace image_detail

// Program region serialized as big-endian bytes: the exact digest input.
inline std::vector<std::uint8_t> program_region_bytes(const BramImage& image) {
    std::vector<std::uint8_t> bytes;
    bytes.reserve(image.program_region_words() * 4);
    for (std::size_t i = 0; i < image.program_region_words(); ++i) {
        image_detail::append_word_be(bytes, image.words[i]);
    }
    return bytes;
}

// SHA-256 over everything except the last 8 words (instructions + zero fill).
inline BitString program_region_digest(const BramImage& image) {
    const auto bytes = program_region_bytes(image);
    return sha256(std::span<const std::uint8_t>(bytes));
}

// The 256-bit signature held by the last 8 words, most significant word first.
inline BitString golden_signature(const BramImage& image) {
    std::vector<std::uint8_t> bytes;
    bytes.reserve(32);
    for (std::size_t i = image.program_region_words(); i < image.geometry.total_words; ++i) {
        image_detail::append_word_be(bytes, image.words[i]);
    }
    return BitString::from_bytes(bytes);
}

inline void set_golden_signature(BramImage& image, const BitString& signature) {
    if (signature.size() != 256) {
        throw std::invalid_argument("golden signature must be 256 bits");
    }
    const auto& b = signature.bytes();
    for (std::size_t i = 0; i < BramGeometry::kSignatureWords; ++i) {
        image.words[image.program_region_words() + i] =
            (static_cast<std::uint32_t>(b[4 * i]) << 24) |
            (static_cast<std::uint32_t>(b[4 * i + 1]) << 16) |
            (static_cast<std::uint32_t>(b[4 * i + 2]) << 8) |
            static_cast<std::uint32_t>(b[4 * i + 3]);
    }
}

// Packs a program and binds it to a device: aligned instructions, zero fill,
// then signature = SHA-256(program region) XOR device_digest in the last 8
// words. One-time software step per (program, device) pair.
inline BramImage bind_image(const ProgramHex& prog, const BramGeometry& geometry,
                            const BitString& device_digest) {
    if (device_digest.size() != 256) {
        throw std::invalid_argument("device digest must be 256 bits");
    }
    if (geometry.total_words < BramGeometry::kSignatureWords + 1) {
        throw std::invalid_argument("geometry too small for signature");
    }
    if (prog.instructions.size() > geometry.total_words - BramGeometry::kSignatureWords) {
        throw std::runtime_error("program too large for geometry: " +
                                 std::to_string(prog.instructions.size()) + " words, " +
                                 std::to_string(geometry.total_words) + "-word image");
    }
    BramImage image;
    image.geometry = geometry;
    image.words.assign(geometry.total_words, 0);
    const auto aligned = align_instructions(prog);
    std::copy(aligned.begin(), aligned.end(), image.words.begin());

    const BitString signature = program_region_digest(image) ^ device_digest;
    set_golden_signature(image, signature);
    return image;
}

// Bit-exact image file: total_words big-endian 32-bit words, address 0 first.
inline void write_image(const BramImage& image, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open image file for writing: " + path.string());
    }
    std::vector<std::uint8_t> bytes;
    bytes.reserve(image.words.size() * 4);
    for (std::uint32_t w : image.words) {
        image_detail::append_word_be(bytes, w);
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw std::runtime_error("failed writing image file: " + path.string());
    }
}

inline BramImage read_image(const std::filesystem::path& path, const BramGeometry& geometry) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open image file: " + path.string());
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (bytes.size() != geometry.total_words * 4) {
        throw std::runtime_error(path.string() + ": expected " +
                                 std::to_string(geometry.total_words * 4) + " bytes, got " +
                                 std::to_string(bytes.size()));
    }
    BramImage image;
    image.geometry = geometry;
    image.words.reserve(geometry.total_words);
    for (std::size_t i = 0; i < bytes.size(); i += 4) {
        image.words.push_back((static_cast<std::uint32_t>(bytes[i]) << 24) |
                              (static_cast<std::uint32_t>(bytes[i + 1]) << 16) |
                              (static_cast<std::uint32_t>(bytes[i + 2]) << 8) |
                              static_cast<std::uint32_t>(bytes[i + 3]));
    }
    return image;
}

}  // namespace pufbind

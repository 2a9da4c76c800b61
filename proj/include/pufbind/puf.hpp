// Copyright pufbind contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pufbind/bitstring.hpp"
#include "pufbind/rng.hpp"

namespace pufbind {

inline constexpr std::size_t kPufCells = 128;

// Behavioral model of a 128-cell butterfly-latch PUF array on one device.
// Each cell settles to a fixed preferred value (its bias); a read returns
// the biases with independent per-cell flips. Immutable after creation.
struct DeviceModel {
    std::string device_id;
    BitString cell_biases;                          // 128 stable values
    std::array<double, kPufCells> flip_probabilities{};
    std::uint64_t creation_seed = 0;
    double noise_level = 0.0;
};

// One raw 128-bit readout of a device's PUF array.
struct PufResponse {
    BitString bits;
    std::string device_id;
};

// Fabricates a device: biases drawn uniformly per cell from creation_seed,
// all cells sharing the same flip probability. Deterministic in its inputs.
inline DeviceModel create_device(std::string device_id, std::uint64_t creation_seed,
                                 double noise_level) {
    if (!(noise_level >= 0.0 && noise_level < 0.5)) {
        throw std::invalid_argument("noise_level must lie in [0, 0.5)");
    }
    DeviceModel dev;
    dev.device_id = std::move(device_id);
    dev.creation_seed = creation_seed;
    dev.noise_level = noise_level;
    dev.flip_probabilities.fill(noise_level);
    dev.cell_biases = BitString(kPufCells);
    auto gen = rng::engine(creation_seed);
    for (std::size_t i = 0; i < kPufCells; ++i) {
        dev.cell_biases.set(i, (gen() >> 63) & 1u);
    }
    return dev;
}

// Samples the array once: each bit of the stable pattern flips independently
// with its cell's probability. (creation_seed, noise, read_seed) fully
// determine the result.
inline PufResponse read_response(const DeviceModel& device, std::uint64_t read_seed) {
    PufResponse resp;
    resp.device_id = device.device_id;
    resp.bits = device.cell_biases;
    auto gen = std::mt19937_64(rng::mix(device.creation_seed, read_seed));
    for (std::size_t i = 0; i < kPufCells; ++i) {
        if (rng::chance(gen, device.flip_probabilities[i])) {
            resp.bits.flip(i);
        }
    }
    return resp;
}

// Noise-suppressed readout used at enrollment: the stable pattern itself.
inline PufResponse stable_response(const DeviceModel& device) {
    return PufResponse{device.cell_biases, device.device_id};
}

namespace device_file_detail {

inline std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

inline std::string_view expect_field(std::string_view line, std::string_view key) {
    if (line.size() < key.size() || line.substr(0, key.size()) != key) {
        throw std::runtime_error("device file: expected '" + std::string(key) + "' line");
    }
    return line.substr(key.size());
}

}  // namespace device_file_detail

inline std::string device_to_text(const DeviceModel& device) {
    std::array<char, 64> buf;
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), device.noise_level);
    if (ec != std::errc{}) {
        throw std::runtime_error("failed to format noise level");
    }
    std::ostringstream out;
    out << "PUFBIND-DEVICE v1\n"
        << "id=" << device.device_id << "\n"
        << "seed=" << device.creation_seed << "\n"
        << "noise=" << std::string_view(buf.data(), end - buf.data()) << "\n"
        << "biases=" << device.cell_biases.to_hex() << "\n";
    return out.str();
}

inline DeviceModel device_from_text(std::string_view text) {
    using namespace device_file_detail;
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = strip_cr(text.substr(pos, nl - pos));
        if (!line.empty()) lines.push_back(line);
        pos = nl + 1;
    }
    if (lines.size() != 5) {
        throw std::runtime_error("device file: expected exactly 5 lines");
    }
    if (lines[0] != "PUFBIND-DEVICE v1") {
        throw std::runtime_error("device file: bad header line");
    }

    DeviceModel dev;
    dev.device_id = std::string(expect_field(lines[1], "id="));
    if (dev.device_id.empty() || dev.device_id.find_first_of(" \t") != std::string::npos) {
        throw std::runtime_error("device file: id must be non-empty without whitespace");
    }

    const std::string_view seed_str = expect_field(lines[2], "seed=");
    auto [sp, sec] = std::from_chars(seed_str.data(), seed_str.data() + seed_str.size(),
                                     dev.creation_seed);
    if (sec != std::errc{} || sp != seed_str.data() + seed_str.size()) {
        throw std::runtime_error("device file: bad seed value");
    }

    const std::string_view noise_str = expect_field(lines[3], "noise=");
    auto [np, nec] = std::from_chars(noise_str.data(), noise_str.data() + noise_str.size(),
                                     dev.noise_level);
    if (nec != std::errc{} || np != noise_str.data() + noise_str.size()) {
        throw std::runtime_error("device file: bad noise value");
    }
    if (!(dev.noise_level >= 0.0 && dev.noise_level < 0.5)) {
        throw std::runtime_error("device file: noise must lie in [0, 0.5)");
    }
    dev.flip_probabilities.fill(dev.noise_level);

    const std::string_view biases_hex = expect_field(lines[4], "biases=");
    if (biases_hex.size() != kPufCells / 4) {
        throw std::runtime_error("device file: biases must be 32 hex characters");
    }
    dev.cell_biases = BitString::from_hex(biases_hex);
    return dev;
}

inline void write_device_file(const DeviceModel& device, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open device file for writing: " + path.string());
    }
    out << device_to_text(device);
    if (!out) {
        throw std::runtime_error("failed writing device file: " + path.string());
    }
}

inline DeviceModel read_device_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open device file: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return device_from_text(buf.str());
    } catch (const std::exception& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

}  // namespace pufbind

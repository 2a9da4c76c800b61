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
#include <vector>

#include "pufbind/authenticator.hpp"
#include "pufbind/bitstring.hpp"
#include "pufbind/fuzzy_extractor.hpp"
#include "pufbind/puf.hpp"
#include "pufbind/sha256.hpp"

namespace pufbind {

// The supply-chain tuple for one enrolled device. Records are immutable
// once written; the registry file is append-only.
struct EnrollmentRecord {
    std::string device_id;
    BitString sha256_k0;  // 256-bit device identifier digest
    HelperData helper;
};

// One record per line: id, digest, then the helper fields.
//   <id> <sha256_k0:64hex> <n> <k> <offset:hex> <salt:32hex>
inline std::string record_to_line(const EnrollmentRecord& record) {
    std::ostringstream out;
    out << record.device_id << ' ' << record.sha256_k0.to_hex() << ' '
        << record.helper.params_echo.n << ' ' << record.helper.params_echo.k << ' '
        << record.helper.code_offset.to_hex() << ' '
        << record.helper.extractor_salt.to_hex();
    return out.str();
}

inline EnrollmentRecord record_from_line(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (pos < line.size()) {
        std::size_t sp = line.find(' ', pos);
        if (sp == std::string_view::npos) sp = line.size();
        if (sp > pos) fields.push_back(line.substr(pos, sp - pos));
        pos = sp + 1;
    }
    if (fields.size() != 6) {
        throw std::runtime_error("registry record: expected 6 fields");
    }
    EnrollmentRecord record;
    record.device_id = std::string(fields[0]);
    if (fields[1].size() != 64) {
        throw std::runtime_error("registry record: digest must be 64 hex characters");
    }
    record.sha256_k0 = BitString::from_hex(fields[1]);

    auto parse_num = [](std::string_view s, auto& out_value) {
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out_value);
        if (ec != std::errc{} || p != s.data() + s.size()) {
            throw std::runtime_error("registry record: bad numeric field");
        }
    };
    parse_num(fields[2], record.helper.params_echo.n);
    parse_num(fields[3], record.helper.params_echo.k);
    if (record.helper.params_echo.n == 0 || record.helper.params_echo.n % 8 != 0 ||
        fields[4].size() != record.helper.params_echo.n / 4) {
        throw std::runtime_error("registry record: offset length does not match n");
    }
    record.helper.code_offset = BitString::from_hex(fields[4]);
    if (fields[5].size() != kSaltBits / 4) {
        throw std::runtime_error("registry record: salt must be 32 hex characters");
    }
    record.helper.extractor_salt = BitString::from_hex(fields[5]);
    record.helper.params_echo.key_bits = 448;
    return record;
}

// In-memory view of the registry file.
class Registry {
public:
    static Registry load(const std::filesystem::path& path) {
        Registry reg;
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            return reg;  // absent registry reads as empty
        }
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            try {
                reg.records_.push_back(record_from_line(line));
            } catch (const std::exception& e) {
                throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                         ": " + e.what());
            }
        }
        return reg;
    }

    const EnrollmentRecord* find(std::string_view device_id) const {
        for (const auto& r : records_) {
            if (r.device_id == device_id) return &r;
        }
        return nullptr;
    }

    const std::vector<EnrollmentRecord>& records() const { return records_; }

private:
    std::vector<EnrollmentRecord> records_;
};

inline void append_record(const std::filesystem::path& path, const EnrollmentRecord& record) {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) {
        throw std::runtime_error("cannot open registry for append: " + path.string());
    }
    out << record_to_line(record) << '\n';
    if (!out) {
        throw std::runtime_error("failed appending to registry: " + path.string());
    }
}

// One-time enrollment: reads the stable pattern at nominal conditions, runs
// fuzzy-extractor encoding, and appends the <id, SHA256_K0, HD0> tuple.
// Re-enrollment of a known id is rejected.
inline EnrollmentRecord enroll(const DeviceModel& device,
                               const std::filesystem::path& registry_path,
                               std::uint64_t encode_seed) {
    const Registry registry = Registry::load(registry_path);
    if (registry.find(device.device_id) != nullptr) {
        throw std::runtime_error("device already enrolled: " + device.device_id);
    }
    const PufResponse r0 = stable_response(device);
    auto [key, helper] = fe_encode(r0, FuzzyParams{}, encode_seed);

    EnrollmentRecord record;
    record.device_id = device.device_id;
    record.sha256_k0 = digest_key(key.bits);
    record.helper = std::move(helper);
    append_record(registry_path, record);
    return record;
}

// Platform authentication: fresh noisy readout, key regeneration with the
// stored helper data, digest comparison against the stored identifier.
inline Verdict auth_device(const DeviceModel& device, const EnrollmentRecord& record,
                           std::uint64_t read_seed) {
    const PufResponse r1 = read_response(device, read_seed);
    const DerivedKey k1 = fe_decode(r1, record.helper);
    return digest_key(k1.bits) == record.sha256_k0 ? Verdict::Pass : Verdict::Fail;
}

}  // namespace pufbind

// Copyright pufbind contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

#include "pufbind/bitstring.hpp"
#include "pufbind/fuzzy_extractor.hpp"
#include "pufbind/image.hpp"
#include "pufbind/puf.hpp"
#include "pufbind/sha256.hpp"

namespace pufbind {

enum class Verdict { Pass, Fail };

// Fetch enable for the soft core. Starts closed and can only be opened, and
// only the authenticator opens it on a Pass verdict; there is no way back to
// the closed state within a run.
class ExecutionGate {
public:
    bool enabled() const { return enabled_; }
    void open() { enabled_ = true; }

private:
    bool enabled_ = false;
};

// Full trace of one authentication run.
struct AuthReport {
    BitString sha_bpuf;            // digest of the key regenerated from the PUF
    BitString sha_prog_bin;        // streaming digest of the program region
    BitString sha_exor_hardware;   // sha_prog_bin XOR sha_bpuf
    BitString sha_exor_reference;  // golden signature read from the image tail
    Verdict verdict = Verdict::Fail;
    std::uint64_t cycles = 0;
    double latency_seconds = 0.0;
};

// Cycles for one authentication of a total_words image: 16 per 512-bit
// compression block of the program-region digest (the padding block
// included, since its words flow through the same buffer) plus one final
// comparison cycle.
inline std::uint64_t cycle_model(std::size_t total_words) {
    if (total_words < BramGeometry::kSignatureWords) {
        throw std::invalid_argument("geometry too small: need at least 8 words");
    }
    const std::uint64_t region_bits =
        static_cast<std::uint64_t>(total_words - BramGeometry::kSignatureWords) * 32;
    const std::uint64_t blocks = (region_bits + 1 + 64 + 511) / 512;
    return 16 * blocks + 1;
}

// Runs the hardware-side verification flow against an image loaded in BRAM:
// re-read the PUF, regenerate the key, stream the program region through the
// digest engine, and compare the XOR of the two digests with the piggybacked
// reference. Opens `gate` iff the verdict is Pass.
inline AuthReport authenticate(const BramImage& image, const DeviceModel& device,
                               const HelperData& helper, std::uint64_t read_seed,
                               double clock_hz, ExecutionGate& gate) {
    if (image.geometry.total_words < BramGeometry::kSignatureWords ||
        image.words.size() != image.geometry.total_words) {
        throw std::invalid_argument("malformed image: word count does not match geometry");
    }
    if (!(clock_hz > 0.0)) {
        throw std::invalid_argument("clock frequency must be positive");
    }

    const PufResponse fresh = read_response(device, read_seed);
    const DerivedKey regenerated = fe_decode(fresh, helper);

    AuthReport report;
    report.sha_bpuf = digest_key(regenerated.bits);

    Sha256Stream stream;
    for (std::size_t i = 0; i < image.program_region_words(); ++i) {
        stream.absorb_word(image.words[i]);
    }
    report.sha_prog_bin = stream.finalize();

    report.sha_exor_hardware = report.sha_prog_bin ^ report.sha_bpuf;
    report.sha_exor_reference = golden_signature(image);
    report.verdict = (report.sha_exor_hardware == report.sha_exor_reference)
                         ? Verdict::Pass
                         : Verdict::Fail;
    report.cycles = stream.cycles_consumed() + 1;  // +1 for the comparison
    report.latency_seconds = static_cast<double>(report.cycles) / clock_hz;

    if (report.verdict == Verdict::Pass) {
        gate.open();
    }
    return report;
}

inline std::string render_report(const AuthReport& report) {
    std::ostringstream out;
    out << "sha_bpuf=" << report.sha_bpuf.to_hex() << "\n"
        << "sha_prog_bin=" << report.sha_prog_bin.to_hex() << "\n"
        << "sha_exor_hardware=" << report.sha_exor_hardware.to_hex() << "\n"
        << "sha_exor_reference=" << report.sha_exor_reference.to_hex() << "\n"
        << "verdict=" << (report.verdict == Verdict::Pass ? "PASS" : "FAIL") << "\n"
        << "cycles=" << report.cycles << "\n";
    out.precision(9);
    out << "latency_seconds=" << report.latency_seconds << "\n";
    return out.str();
}

}  // namespace pufbind

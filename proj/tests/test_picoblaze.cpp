// Copyright pufbind contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <sstream>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "pufbind/authenticator.hpp"
#include "pufbind/fuzzy_extractor.hpp"
#include "pufbind/image.hpp"
#include "pufbind/picoblaze.hpp"
#include "pufbind/puf.hpp"

using pufbind::BitString;
using pufbind::BramGeometry;
using pufbind::BramImage;
using pufbind::ExecutionGate;
namespace pico = pufbind::pico;

namespace {

// Packs instructions into an unauthenticated image for core-level tests;
// the gate is opened by hand where the test calls for it.
BramImage raw_image(const std::vector<std::uint32_t>& instructions,
                    std::size_t total_words = 64) {
    BramImage image;
    image.geometry.total_words = total_words;
    image.words.assign(total_words, 0);
    for (std::size_t i = 0; i < instructions.size(); ++i) {
        image.words[i] = instructions[i];
    }
    return image;
}

ExecutionGate open_gate() {
    ExecutionGate gate;
    gate.open();
    return gate;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("fetch with a closed gate is a hard error") {
    const auto image = raw_image({pico::encode_load(0, 1)});
    ExecutionGate gate;
    pico::CoreState core;
    CHECK_THROWS_AS(pico::step(core, image, gate), pico::GateDisabledError);
    CHECK(core.instructions_retired == 0);
    CHECK_THROWS_AS(pico::run(core, image, gate, 100), pico::GateDisabledError);
}

TEST_CASE("instruction semantics") {
    const auto gate = open_gate();

    SECTION("load then output") {
        const auto image = raw_image({pico::encode_load(2, 0xab), pico::encode_output(2)});
        auto r1 = pico::step(pico::CoreState{}, image, gate);
        CHECK(r1.state.registers[2] == 0xab);
        CHECK(r1.state.pc == 1);
        CHECK_FALSE(r1.port_write.has_value());
        auto r2 = pico::step(r1.state, image, gate);
        CHECK(r2.state.output_port == 0xab);
        REQUIRE(r2.port_write.has_value());
        CHECK(*r2.port_write == 0xab);
        CHECK(r2.state.instructions_retired == 2);
    }

    SECTION("add wraps modulo 256") {
        const auto image = raw_image({pico::encode_load(1, 0xff), pico::encode_add(1, 2)});
        auto s = pico::run(pico::CoreState{}, image, gate, 2);
        CHECK(s.registers[1] == 0x01);
    }

    SECTION("jump redirects the program counter") {
        const auto image = raw_image({pico::encode_jump(3), 0, 0, pico::encode_load(0, 7)});
        auto s = pico::run(pico::CoreState{}, image, gate, 2);
        CHECK(s.registers[0] == 7);
        CHECK(s.pc == 4);
    }

    SECTION("the all-zero word halts") {
        const auto image = raw_image({pico::encode_load(0, 1), 0});
        auto s = pico::run(pico::CoreState{}, image, gate, 100);
        CHECK(s.halted);
        CHECK(s.instructions_retired == 2);
    }
}

TEST_CASE("errors: undecodable opcodes, halted core, pc out of range") {
    const auto gate = open_gate();
    CHECK_THROWS_AS(pico::step(pico::CoreState{}, raw_image({0x3f000}), gate),
                    std::runtime_error);
    // Opcode 0 with non-zero operand bits is not a valid halt.
    CHECK_THROWS_AS(pico::step(pico::CoreState{}, raw_image({0x00001}), gate),
                    std::runtime_error);

    pico::CoreState halted;
    halted.halted = true;
    CHECK_THROWS_AS(pico::step(halted, raw_image({0}), gate), std::logic_error);

    // Jump beyond the program region errors at the next fetch.
    const auto image = raw_image({pico::encode_jump(60)});  // region is 56 words
    auto r = pico::step(pico::CoreState{}, image, gate);
    CHECK_THROWS_AS(pico::step(r.state, image, gate), std::runtime_error);
}

TEST_CASE("only the low 18 bits of a word influence execution") {
    const auto gate = open_gate();
    auto image = raw_image({pico::encode_load(0, 5), pico::encode_output(0)});
    auto noisy = image;
    noisy.words[0] |= 0xfffc0000;  // garbage in the ignored top 14 bits
    noisy.words[1] |= 0xabcc0000;
    const auto a = pico::run(pico::CoreState{}, image, gate, 2);
    const auto b = pico::run(pico::CoreState{}, noisy, gate, 2);
    CHECK(a.output_port == b.output_port);
    CHECK(a.pc == b.pc);
    CHECK(a.registers == b.registers);
}

TEST_CASE("run with zero budget leaves the state unchanged") {
    const auto gate = open_gate();
    const auto image = raw_image({pico::encode_load(0, 1)});
    pico::CoreState core;
    const auto after = pico::run(core, image, gate, 0);
    CHECK(after.pc == core.pc);
    CHECK(after.instructions_retired == 0);
}

TEST_CASE("run is deterministic") {
    const auto gate = open_gate();
    const auto image = raw_image({pico::encode_load(0, 3), pico::encode_add(0, 3),
                                  pico::encode_output(0), pico::encode_jump(1)});
    std::vector<std::uint8_t> t1, t2;
    const auto a = pico::run(pico::CoreState{}, image, gate, 50, &t1);
    const auto b = pico::run(pico::CoreState{}, image, gate, 50, &t2);
    CHECK(t1 == t2);
    CHECK(a.pc == b.pc);
    CHECK(a.instructions_retired == b.instructions_retired);
}

TEST_CASE("ring-counter demo: authenticate, then observe the rotating pattern") {
    const auto device = pufbind::create_device("demo", 2024, 0.05);
    auto [key, helper] =
        pufbind::fe_encode(pufbind::stable_response(device), pufbind::FuzzyParams{}, 1);
    const auto prog = pufbind::parse_hex(read_file(PUFBIND_DEMO_HEX));
    const auto image = pufbind::bind_image(prog, BramGeometry{}, pufbind::digest_key(key.bits));

    ExecutionGate gate;
    const auto report = pufbind::authenticate(image, device, helper, 3, 100e6, gate);
    REQUIRE(report.verdict == pufbind::Verdict::Pass);

    std::vector<std::uint8_t> trace;
    const auto final_state = pico::run(pico::CoreState{}, image, gate, 64, &trace);
    CHECK(final_state.instructions_retired == 64);

    // Hand-traced: 17-step loop emits 8 writes; 64 steps = 3 full loops + 13
    // steps (6 more writes).
    std::vector<std::uint8_t> expected;
    for (int loop = 0; loop < 3; ++loop) {
        for (int b = 0; b < 8; ++b) expected.push_back(static_cast<std::uint8_t>(1 << b));
    }
    for (int b = 0; b < 6; ++b) expected.push_back(static_cast<std::uint8_t>(1 << b));
    CHECK(trace == expected);
}

TEST_CASE("tampered image: gate never opens, nothing retires") {
    const auto device = pufbind::create_device("demo2", 2025, 0.05);
    auto [key, helper] =
        pufbind::fe_encode(pufbind::stable_response(device), pufbind::FuzzyParams{}, 1);
    const auto prog = pufbind::parse_hex(read_file(PUFBIND_DEMO_HEX));
    auto image = pufbind::bind_image(prog, BramGeometry{}, pufbind::digest_key(key.bits));
    image.words[3] ^= 0x2;  // one instruction bit

    ExecutionGate gate;
    const auto report = pufbind::authenticate(image, device, helper, 3, 100e6, gate);
    CHECK(report.verdict == pufbind::Verdict::Fail);
    CHECK_FALSE(gate.enabled());

    pico::CoreState core;
    CHECK_THROWS_AS(pico::run(core, image, gate, 64), pico::GateDisabledError);
    CHECK(core.instructions_retired == 0);
}

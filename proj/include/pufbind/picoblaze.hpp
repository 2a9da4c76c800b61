// Copyright pufbind contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pufbind/authenticator.hpp"
#include "pufbind/image.hpp"

namespace pufbind::pico {

// Minimal 8-bit soft core with 18-bit instructions, fetching from a packed
// image strictly through the execution gate. Instruction encodings are
// documented in docs/isa.md:
//
//   [17:12] opcode, [11:8] register, [7:0] immediate ([11:0] jump target)
//
//   000000 000000000000  HALT            (the all-zero word)
//   000001 xxxx kkkkkkkk  LOAD   rx, kk   rx = kk
//   000010 xxxx kkkkkkkk  ADD    rx, kk   rx = (rx + kk) & 0xff
//   000011 xxxx --------  OUTPUT rx       port = rx
//   000100 aaaaaaaaaaaa   JUMP   aaa      pc = aaa
//
// The top 14 bits of each 32-bit word are ignored at fetch.

inline constexpr std::uint32_t kOpcodeHalt = 0x00;
inline constexpr std::uint32_t kOpcodeLoad = 0x01;
inline constexpr std::uint32_t kOpcodeAdd = 0x02;
inline constexpr std::uint32_t kOpcodeOutput = 0x03;
inline constexpr std::uint32_t kOpcodeJump = 0x04;

inline std::uint32_t encode_load(unsigned reg, std::uint8_t imm) {
    return (kOpcodeLoad << 12) | ((reg & 0xf) << 8) | imm;
}
inline std::uint32_t encode_add(unsigned reg, std::uint8_t imm) {
    return (kOpcodeAdd << 12) | ((reg & 0xf) << 8) | imm;
}
inline std::uint32_t encode_output(unsigned reg) {
    return (kOpcodeOutput << 12) | ((reg & 0xf) << 8);
}
inline std::uint32_t encode_jump(std::uint32_t addr) {
    return (kOpcodeJump << 12) | (addr & 0xfff);
}

class GateDisabledError : public std::runtime_error {
public:
    GateDisabledError() : std::runtime_error("instruction fetch with execution gate disabled") {}
};

struct CoreState {
    std::uint32_t pc = 0;
    std::array<std::uint8_t, 16> registers{};
    std::uint8_t output_port = 0;
    bool halted = false;
    std::uint64_t instructions_retired = 0;
};

struct StepResult {
    CoreState state;
    std::optional<std::uint8_t> port_write;
};

// Executes one instruction. Fetching with the gate disabled is a hard error:
// that is the security property the authenticator enforces.
inline StepResult step(const CoreState& core, const BramImage& image,
                       const ExecutionGate& gate) {
    if (!gate.enabled()) {
        throw GateDisabledError();
    }
    if (core.halted) {
        throw std::logic_error("step on a halted core");
    }
    if (core.pc >= image.program_region_words()) {
        throw std::runtime_error("program counter out of range: " + std::to_string(core.pc));
    }

    StepResult result{core, std::nullopt};
    CoreState& next = result.state;
    const std::uint32_t word = image.words[core.pc] & kInstructionMask;

    if (word == 0) {
        next.halted = true;
        ++next.instructions_retired;
        return result;
    }
    const std::uint32_t opcode = word >> 12;
    const unsigned reg = (word >> 8) & 0xf;
    const std::uint8_t imm = static_cast<std::uint8_t>(word & 0xff);
    switch (opcode) {
        case kOpcodeLoad:
            next.registers[reg] = imm;
            ++next.pc;
            break;
        case kOpcodeAdd:
            next.registers[reg] = static_cast<std::uint8_t>(next.registers[reg] + imm);
            ++next.pc;
            break;
        case kOpcodeOutput:
            next.output_port = next.registers[reg];
            result.port_write = next.output_port;
            ++next.pc;
            break;
        case kOpcodeJump:
            next.pc = word & 0xfff;
            break;
        default:
            throw std::runtime_error("undecodable instruction at pc " +
                                     std::to_string(core.pc));
    }
    ++next.instructions_retired;
    return result;
}

// Steps until halt or max_steps, whichever comes first. Every OUTPUT write
// is appended to port_trace when provided.
inline CoreState run(CoreState core, const BramImage& image, const ExecutionGate& gate,
                     std::uint64_t max_steps,
                     std::vector<std::uint8_t>* port_trace = nullptr) {
    for (std::uint64_t i = 0; i < max_steps && !core.halted; ++i) {
        StepResult result = step(core, image, gate);
        if (result.port_write && port_trace) {
            port_trace->push_back(*result.port_write);
        }
        core = std::move(result.state);
    }
    return core;
}

}  // namespace pufbind::pico

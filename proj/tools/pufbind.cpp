// Copyright pufbind contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0
//
// Operator CLI for the PUF-bound program image toolchain: device fabrication,
// enrollment, platform authentication, image binding, verification, and
// gated execution of the packed program.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pufbind/pufbind.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const pufbind::EnrollmentRecord& require_record(const pufbind::Registry& registry,
                                                const std::string& device_id) {
    const auto* record = registry.find(device_id);
    if (record == nullptr) {
        throw std::runtime_error("device not enrolled: " + device_id);
    }
    return *record;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PUF-based device enrollment and program image binding toolchain"};
    app.require_subcommand(1);

    std::string registry_path = "registry.txt";
    app.add_option("--registry", registry_path, "Registry file path")
        ->capture_default_str();

    // new-device
    auto* cmd_new = app.add_subcommand("new-device", "Fabricate a simulated device");
    std::string new_id;
    std::uint64_t new_seed = 1;
    double new_noise = 0.05;
    std::string new_out;
    cmd_new->add_option("--id", new_id, "Device identifier")->required();
    cmd_new->add_option("--seed", new_seed, "Fabrication seed")->capture_default_str();
    cmd_new->add_option("--noise", new_noise, "Per-cell flip probability in [0, 0.5)")
        ->capture_default_str();
    cmd_new->add_option("--out", new_out, "Device file to write")->required();

    // enroll
    auto* cmd_enroll = app.add_subcommand("enroll", "Enroll a device into the registry");
    std::string enroll_device_file;
    std::uint64_t enroll_seed = 1;
    cmd_enroll->add_option("device_file", enroll_device_file, "Device file")->required();
    cmd_enroll->add_option("--seed", enroll_seed, "Encoding seed")->capture_default_str();

    // auth-device
    auto* cmd_auth = app.add_subcommand("auth-device", "Authenticate a device platform");
    std::string auth_device_file;
    std::uint64_t auth_seed = 1;
    cmd_auth->add_option("device_file", auth_device_file, "Device file")->required();
    cmd_auth->add_option("--seed", auth_seed, "Readout seed")->capture_default_str();

    // bind
    auto* cmd_bind = app.add_subcommand("bind", "Bind a program to an enrolled device");
    std::string bind_hex_file;
    std::string bind_device_id;
    std::string bind_out;
    std::size_t bind_bram_words = 1024;
    cmd_bind->add_option("hex_file", bind_hex_file, "Assembler .hex file")->required();
    cmd_bind->add_option("--device-id", bind_device_id, "Enrolled device id")->required();
    cmd_bind->add_option("--bram-words", bind_bram_words, "Image size in 32-bit words")
        ->capture_default_str();
    cmd_bind->add_option("--out", bind_out, "Image file to write")->required();

    // verify
    auto* cmd_verify = app.add_subcommand("verify", "Authenticate an image on a device");
    std::string verify_image_file;
    std::string verify_device_file;
    std::uint64_t verify_seed = 1;
    std::size_t verify_bram_words = 1024;
    double verify_clock_hz = 100000000.0;
    cmd_verify->add_option("image_file", verify_image_file, "Packed image file")->required();
    cmd_verify->add_option("device_file", verify_device_file, "Device file")->required();
    cmd_verify->add_option("--seed", verify_seed, "Readout seed")->capture_default_str();
    cmd_verify->add_option("--bram-words", verify_bram_words, "Image size in 32-bit words")
        ->capture_default_str();
    cmd_verify->add_option("--clock-hz", verify_clock_hz, "Clock frequency for latency")
        ->capture_default_str();

    // run
    auto* cmd_run = app.add_subcommand("run", "Verify, then execute the packed program");
    std::string run_image_file;
    std::string run_device_file;
    std::uint64_t run_seed = 1;
    std::size_t run_bram_words = 1024;
    double run_clock_hz = 100000000.0;
    std::uint64_t run_max_steps = 256;
    cmd_run->add_option("image_file", run_image_file, "Packed image file")->required();
    cmd_run->add_option("device_file", run_device_file, "Device file")->required();
    cmd_run->add_option("--seed", run_seed, "Readout seed")->capture_default_str();
    cmd_run->add_option("--bram-words", run_bram_words, "Image size in 32-bit words")
        ->capture_default_str();
    cmd_run->add_option("--clock-hz", run_clock_hz, "Clock frequency for latency")
        ->capture_default_str();
    cmd_run->add_option("--max-steps", run_max_steps, "Instruction budget")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitUsage;
    }

    try {
        if (cmd_new->parsed()) {
            const auto device = pufbind::create_device(new_id, new_seed, new_noise);
            pufbind::write_device_file(device, new_out);
            std::cout << "id=" << device.device_id << "\n"
                      << "biases=" << device.cell_biases.to_hex() << "\n"
                      << "file=" << new_out << "\n";
            return kExitPass;
        }

        if (cmd_enroll->parsed()) {
            const auto device = pufbind::read_device_file(enroll_device_file);
            const auto record = pufbind::enroll(device, registry_path, enroll_seed);
            std::cout << "id=" << record.device_id << "\n"
                      << "sha256_k0=" << record.sha256_k0.to_hex() << "\n"
                      << "helper_offset=" << record.helper.code_offset.to_hex() << "\n"
                      << "helper_salt=" << record.helper.extractor_salt.to_hex() << "\n";
            return kExitPass;
        }

        if (cmd_auth->parsed()) {
            const auto device = pufbind::read_device_file(auth_device_file);
            const auto registry = pufbind::Registry::load(registry_path);
            const auto& record = require_record(registry, device.device_id);
            const auto verdict = pufbind::auth_device(device, record, auth_seed);
            std::cout << (verdict == pufbind::Verdict::Pass ? "PASS" : "FAIL") << "\n";
            return verdict == pufbind::Verdict::Pass ? kExitPass : kExitFail;
        }

        if (cmd_bind->parsed()) {
            const auto registry = pufbind::Registry::load(registry_path);
            const auto& record = require_record(registry, bind_device_id);
            const auto prog = pufbind::parse_hex(read_text_file(bind_hex_file));
            pufbind::BramGeometry geometry;
            geometry.total_words = bind_bram_words;
            const auto image = pufbind::bind_image(prog, geometry, record.sha256_k0);
            pufbind::write_image(image, bind_out);
            std::cout << "bound " << prog.instructions.size() << " instructions for "
                      << bind_device_id << " into " << bind_out << " ("
                      << geometry.total_words * 4 << " bytes)\n";
            return kExitPass;
        }

        if (cmd_verify->parsed() || cmd_run->parsed()) {
            const bool running = cmd_run->parsed();
            const auto& image_file = running ? run_image_file : verify_image_file;
            const auto& device_file = running ? run_device_file : verify_device_file;
            const auto seed = running ? run_seed : verify_seed;
            const auto bram_words = running ? run_bram_words : verify_bram_words;
            const auto clock_hz = running ? run_clock_hz : verify_clock_hz;

            const auto device = pufbind::read_device_file(device_file);
            const auto registry = pufbind::Registry::load(registry_path);
            const auto& record = require_record(registry, device.device_id);
            pufbind::BramGeometry geometry;
            geometry.total_words = bram_words;
            const auto image = pufbind::read_image(image_file, geometry);

            pufbind::ExecutionGate gate;
            const auto report =
                pufbind::authenticate(image, device, record.helper, seed, clock_hz, gate);
            std::cout << pufbind::render_report(report);
            if (report.verdict != pufbind::Verdict::Pass) {
                return kExitFail;
            }
            if (running) {
                std::vector<std::uint8_t> trace;
                pufbind::pico::run(pufbind::pico::CoreState{}, image, gate, run_max_steps,
                                   &trace);
                for (std::uint8_t value : trace) {
                    std::cout << std::hex << std::setw(2) << std::setfill('0')
                              << static_cast<unsigned>(value) << std::dec << "\n";
                }
            }
            return kExitPass;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

// Copyright pufbind contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <catch2/catch_amalgamated.hpp>

#include "pufbind/puf.hpp"
#include "pufbind/registry.hpp"

using pufbind::create_device;
using pufbind::EnrollmentRecord;
using pufbind::Registry;
using pufbind::Verdict;

namespace {

struct TempRegistry {
    std::filesystem::path path;
    TempRegistry() {
        path = std::filesystem::temp_directory_path() /
               ("pufbind_reg_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++) + ".txt");
    }
    ~TempRegistry() { std::filesystem::remove(path); }
    static inline int counter = 0;
};

}  // namespace

TEST_CASE("enroll writes a well-formed record and reloads bit-exactly") {
    TempRegistry reg;
    const auto device = create_device("fpga-a", 17, 0.05);
    const auto record = pufbind::enroll(device, reg.path, 3);
    CHECK(record.sha256_k0.to_hex().size() == 64);
    CHECK(record.helper.params_echo.n == 128);
    CHECK(record.helper.params_echo.k == 13);

    const auto loaded = Registry::load(reg.path);
    REQUIRE(loaded.records().size() == 1);
    const auto* found = loaded.find("fpga-a");
    REQUIRE(found != nullptr);
    CHECK(found->sha256_k0 == record.sha256_k0);
    CHECK(found->helper.code_offset == record.helper.code_offset);
    CHECK(found->helper.extractor_salt == record.helper.extractor_salt);
}

TEST_CASE("duplicate enrollment is rejected and the file stays append-only") {
    TempRegistry reg;
    const auto a = create_device("one", 1, 0.05);
    const auto b = create_device("two", 2, 0.05);
    pufbind::enroll(a, reg.path, 3);

    std::ifstream in1(reg.path);
    std::string first_line;
    std::getline(in1, first_line);
    in1.close();

    CHECK_THROWS(pufbind::enroll(a, reg.path, 3));
    pufbind::enroll(b, reg.path, 4);

    std::ifstream in2(reg.path);
    std::string line;
    std::getline(in2, line);
    CHECK(line == first_line);  // earlier record untouched
    std::getline(in2, line);
    CHECK(Registry::load(reg.path).records().size() == 2);
}

TEST_CASE("enrolled identifiers are distinct across devices") {
    TempRegistry reg;
    std::set<std::string> digests;
    for (int i = 0; i < 100; ++i) {
        const auto device = create_device("dev-" + std::to_string(i), 1000 + i, 0.05);
        const auto record = pufbind::enroll(device, reg.path, 5);
        digests.insert(record.sha256_k0.to_hex());
    }
    CHECK(digests.size() == 100);
}

TEST_CASE("platform authentication: genuine passes, impostor fails") {
    TempRegistry reg;
    const auto genuine = create_device("plant", 77, 0.05);
    const auto record = pufbind::enroll(genuine, reg.path, 6);

    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        CHECK(pufbind::auth_device(genuine, record, seed) == Verdict::Pass);
    }
    const auto impostor = create_device("plant", 78, 0.05);  // same id, other silicon
    int fails = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        fails += pufbind::auth_device(impostor, record, seed) == Verdict::Fail;
    }
    CHECK(fails == 50);
}

TEST_CASE("record line round trip") {
    TempRegistry reg;
    const auto device = create_device("rt", 5, 0.05);
    const auto record = pufbind::enroll(device, reg.path, 7);
    const auto line = pufbind::record_to_line(record);
    const auto back = pufbind::record_from_line(line);
    CHECK(back.device_id == record.device_id);
    CHECK(back.sha256_k0 == record.sha256_k0);
    CHECK(back.helper.code_offset == record.helper.code_offset);
    CHECK(back.helper.extractor_salt == record.helper.extractor_salt);
    CHECK(back.helper.params_echo.k == record.helper.params_echo.k);
}

TEST_CASE("malformed registry lines are rejected with location info") {
    CHECK_THROWS(pufbind::record_from_line("too few fields"));
    CHECK_THROWS(pufbind::record_from_line("id deadbeef 128 13 00 00"));  // short digest
    const std::string digest(64, 'a');
    const std::string offset(32, 'b');
    const std::string salt(32, 'c');
    CHECK_NOTHROW(pufbind::record_from_line("id " + digest + " 128 13 " + offset + " " + salt));
    CHECK_THROWS(pufbind::record_from_line("id " + digest + " 128 xx " + offset + " " + salt));
    CHECK_THROWS(pufbind::record_from_line("id " + digest + " 64 13 " + offset + " " + salt));

    const auto path = std::filesystem::temp_directory_path() / "pufbind_reg_bad.txt";
    std::ofstream(path) << "garbage line\n";
    CHECK_THROWS_WITH(Registry::load(path), Catch::Matchers::ContainsSubstring(":1:"));
    std::filesystem::remove(path);
}

TEST_CASE("loading a missing registry yields an empty one") {
    const auto loaded = Registry::load("/nonexistent/pufbind/registry.txt");
    CHECK(loaded.records().empty());
    CHECK(loaded.find("anything") == nullptr);
}

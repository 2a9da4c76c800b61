// Copyright pufbind contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <random>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "pufbind/fuzzy_extractor.hpp"
#include "pufbind/puf.hpp"

using pufbind::BitString;
using pufbind::DerivedKey;
using pufbind::fe_decode;
using pufbind::fe_encode;
using pufbind::FuzzyParams;
using pufbind::HelperData;
using pufbind::PufResponse;

namespace {

PufResponse flip_bits(const PufResponse& resp, unsigned weight, std::mt19937_64& gen) {
    std::vector<std::size_t> positions(resp.bits.size());
    for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = i;
    std::shuffle(positions.begin(), positions.end(), gen);
    PufResponse out = resp;
    for (unsigned i = 0; i < weight; ++i) out.bits.flip(positions[i]);
    return out;
}

}  // namespace

TEST_CASE("zero-error round trip regenerates the key exactly") {
    const auto dev = pufbind::create_device("rt", 11, 0.05);
    const auto r0 = pufbind::stable_response(dev);
    const auto [key, helper] = fe_encode(r0, FuzzyParams{}, 77);
    CHECK(key.bits.size() == 448);
    CHECK(fe_decode(r0, helper).bits == key.bits);
}

TEST_CASE("13 flipped bits are always corrected") {
    std::mt19937_64 gen(0x1337);
    const auto dev = pufbind::create_device("budget", 21, 0.05);
    const auto r0 = pufbind::stable_response(dev);
    const auto [key, helper] = fe_encode(r0, FuzzyParams{}, 78);
    for (int trial = 0; trial < 2000; ++trial) {
        const auto noisy = flip_bits(r0, 13, gen);
        CHECK(fe_decode(noisy, helper).bits == key.bits);
    }
}

TEST_CASE("40 flipped bits never regenerate the key") {
    std::mt19937_64 gen(0x40);
    const auto dev = pufbind::create_device("over", 22, 0.05);
    const auto r0 = pufbind::stable_response(dev);
    const auto [key, helper] = fe_encode(r0, FuzzyParams{}, 79);
    for (int trial = 0; trial < 500; ++trial) {
        const auto noisy = flip_bits(r0, 40, gen);
        CHECK(fe_decode(noisy, helper).bits != key.bits);
    }
}

TEST_CASE("a different device's readout never collides") {
    std::mt19937_64 gen(0xdead);
    for (int pair = 0; pair < 200; ++pair) {
        const auto a = pufbind::create_device("a", 1000 + pair, 0.05);
        const auto b = pufbind::create_device("b", 5000 + pair, 0.05);
        const auto [key, helper] = fe_encode(pufbind::stable_response(a), FuzzyParams{},
                                             static_cast<std::uint64_t>(pair));
        const auto r1 = pufbind::read_response(b, gen());
        CHECK(fe_decode(r1, helper).bits != key.bits);
    }
}

TEST_CASE("helper data is a pure function of its inputs") {
    const auto dev = pufbind::create_device("pure", 33, 0.05);
    const auto r0 = pufbind::stable_response(dev);
    const auto [k1, h1] = fe_encode(r0, FuzzyParams{}, 123);
    const auto [k2, h2] = fe_encode(r0, FuzzyParams{}, 123);
    CHECK(k1.bits == k2.bits);
    CHECK(h1.code_offset == h2.code_offset);
    CHECK(h1.extractor_salt == h2.extractor_salt);

    const auto [k3, h3] = fe_encode(r0, FuzzyParams{}, 124);
    CHECK(h3.extractor_salt != h1.extractor_salt);
}

TEST_CASE("encode validates widths and parameters") {
    const auto dev = pufbind::create_device("v", 4, 0.05);
    PufResponse short_resp{BitString(64), "v"};
    CHECK_THROWS_AS(fe_encode(short_resp, FuzzyParams{}, 1), std::invalid_argument);

    FuzzyParams bad_n;
    bad_n.n = 64;
    CHECK_THROWS_AS(fe_encode(pufbind::stable_response(dev), bad_n, 1),
                    std::invalid_argument);
    FuzzyParams bad_k;
    bad_k.k = 0;
    CHECK_THROWS_AS(fe_encode(pufbind::stable_response(dev), bad_k, 1),
                    std::invalid_argument);
}

TEST_CASE("decode rejects malformed helper data") {
    const auto dev = pufbind::create_device("m", 5, 0.05);
    const auto r0 = pufbind::stable_response(dev);
    const auto [key, helper] = fe_encode(r0, FuzzyParams{}, 9);

    HelperData bad_n = helper;
    bad_n.params_echo.n = 64;
    CHECK_THROWS_AS(fe_decode(r0, bad_n), std::invalid_argument);

    HelperData bad_offset = helper;
    bad_offset.code_offset = BitString(64);
    CHECK_THROWS_AS(fe_decode(r0, bad_offset), std::invalid_argument);

    HelperData bad_salt = helper;
    bad_salt.extractor_salt = BitString(8);
    CHECK_THROWS_AS(fe_decode(r0, bad_salt), std::invalid_argument);

    PufResponse wrong_width{BitString(64), "m"};
    CHECK_THROWS_AS(fe_decode(wrong_width, helper), std::invalid_argument);
}

TEST_CASE("helper text round trip") {
    const auto dev = pufbind::create_device("ser", 6, 0.05);
    const auto [key, helper] = fe_encode(pufbind::stable_response(dev), FuzzyParams{}, 10);
    const auto text = pufbind::helper_to_text(helper);
    const auto back = pufbind::helper_from_text(text);
    CHECK(back.code_offset == helper.code_offset);
    CHECK(back.extractor_salt == helper.extractor_salt);
    CHECK(back.params_echo.n == helper.params_echo.n);
    CHECK(back.params_echo.k == helper.params_echo.k);
    // Regenerated keys agree through the serialized helper.
    CHECK(fe_decode(pufbind::stable_response(dev), back).bits == key.bits);
}

TEST_CASE("helper text parsing rejects malformed input") {
    CHECK_THROWS(pufbind::helper_from_text(""));
    CHECK_THROWS(pufbind::helper_from_text("PUFBIND-HELPER v2\nn=128\nk=13\noffset=00\nsalt=00\n"));
    const std::string offset128(32, '0');
    const std::string salt(32, '0');
    CHECK_NOTHROW(pufbind::helper_from_text("PUFBIND-HELPER v1\nn=128\nk=13\noffset=" +
                                            offset128 + "\nsalt=" + salt + "\n"));
    // Offset length inconsistent with n.
    CHECK_THROWS(pufbind::helper_from_text("PUFBIND-HELPER v1\nn=128\nk=13\noffset=0011\nsalt=" +
                                           salt + "\n"));
    // Syntactically valid n=64 parses, then decode refuses it.
    const std::string offset64(16, '0');
    const auto h64 = pufbind::helper_from_text("PUFBIND-HELPER v1\nn=64\nk=13\noffset=" +
                                               offset64 + "\nsalt=" + salt + "\n");
    const auto dev = pufbind::create_device("n64", 8, 0.05);
    CHECK_THROWS_AS(fe_decode(pufbind::stable_response(dev), h64), std::invalid_argument);
}

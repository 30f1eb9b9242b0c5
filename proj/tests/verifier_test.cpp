#include <rarcrack/verifier.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace rarcrack;

namespace {

const salt_bytes fixture_salt{0xDE, 0xAD, 0xBE, 0xEF, 0x01, 0x23, 0x45, 0x67};

archive_info fixture_for(const std::string& pw, byte_vector payload = make_file_header()) {
    return parse_archive(build_fixture({pw, fixture_salt, std::move(payload)}));
}

} // namespace

TEST(VerifyHeader, AcceptsWellFormedFileHeader) {
    EXPECT_TRUE(verify_header(pad_to_block(make_file_header())));
    EXPECT_TRUE(verify_header(pad_to_block(make_file_header(std::string(200, 'n')))));
}

TEST(VerifyHeader, SingleBitChecksumBreakRejected) {
    auto h = pad_to_block(make_file_header());
    h[0] ^= 0x01;
    EXPECT_FALSE(verify_header(h));
}

TEST(VerifyHeader, StructuralChecks) {
    auto h = pad_to_block(make_file_header());
    auto wrong_type = h;
    wrong_type[2] = main_header_type;
    store_le16(&wrong_type[0], header_crc16(std::span(wrong_type).subspan(2, load_le16(&wrong_type[5]) - 2u)));
    EXPECT_FALSE(verify_header(wrong_type));

    auto too_big = h;
    store_le16(&too_big[5], static_cast<std::uint16_t>(h.size() + 1));
    EXPECT_FALSE(verify_header(too_big));

    auto too_small = h;
    store_le16(&too_small[5], 6);
    EXPECT_FALSE(verify_header(too_small));
}

// Seeded random plaintext; checked once to be rejected and frozen here.
TEST(VerifyHeader, SeededRandomBlockRejected) {
    std::mt19937 rng(12345);
    byte_vector random(32);
    for (auto& b : random) b = static_cast<std::uint8_t>(rng());
    EXPECT_FALSE(verify_header(random));
}

TEST(VerifyCandidate, CorrectAndWrongPasswords) {
    auto info = fixture_for("hunter2");
    EXPECT_TRUE(verify_candidate(derive_key_naive("hunter2", fixture_salt), info));
    EXPECT_FALSE(verify_candidate(derive_key_naive("hunter3", fixture_salt), info));
}

TEST(VerifyCandidate, MultiBlockHeaderNeedsAllBlocks) {
    auto payload = make_file_header(std::string(100, 'f'));
    auto info = fixture_for("longname", payload);
    ASSERT_GT(info.encrypted_header.size(), 16u);
    auto dk = derive_key_naive("longname", fixture_salt);
    EXPECT_TRUE(verify_candidate(dk, info));

    auto tampered = info;
    tampered.encrypted_header[info.encrypted_header.size() - 32] ^= 0x80;
    EXPECT_FALSE(verify_candidate(dk, tampered));
}

TEST(VerifyCandidate, NegativeControlFixture) {
    auto payload = make_file_header();
    payload[1] ^= 0x40;
    auto info = fixture_for("abcd", payload);
    EXPECT_FALSE(verify_candidate(derive_key_naive("abcd", fixture_salt), info));
}

TEST(VerifyCandidate, RejectsMisalignedBlob) {
    archive_info info;
    info.encrypted_header.resize(20);
    EXPECT_THROW((void)verify_candidate(derived_key{}, info), error);
}

TEST(VerifyCandidate, FalsePositiveRateIsSmall) {
    auto info = fixture_for("abcd");
    std::mt19937_64 rng(777);
    int accepted = 0;
    const int trials = 20000;
    for (int t = 0; t < trials; ++t) {
        derived_key dk;
        for (auto& b : dk.key) b = static_cast<std::uint8_t>(rng());
        for (auto& b : dk.iv) b = static_cast<std::uint8_t>(rng());
        accepted += verify_candidate(dk, info) ? 1 : 0;
    }
    EXPECT_LT(static_cast<double>(accepted) / trials, 10.0 / 65536.0);
}

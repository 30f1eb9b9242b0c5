#include <rarcrack/aes128.hpp>
#include <rarcrack/crc32.hpp>
#include <rarcrack/sha1.hpp>

#include <gtest/gtest.h>
#include <openssl/evp.h>

#include <random>
#include <string>

using namespace rarcrack;

namespace {

aes_block block_from_hex(std::string_view hex) {
    auto bytes = from_hex(hex).value();
    aes_block b{};
    std::copy(bytes.begin(), bytes.end(), b.begin());
    return b;
}

aes_block openssl_ecb_decrypt(const aes_key128& key, const aes_block& in) {
    EVP_CIPHER_CTX* ctx = EVP_CIPHER_CTX_new();
    EVP_DecryptInit_ex(ctx, EVP_aes_128_ecb(), nullptr, key.data(), nullptr);
    EVP_CIPHER_CTX_set_padding(ctx, 0);
    aes_block out{};
    int len = 0;
    EVP_DecryptUpdate(ctx, out.data(), &len, in.data(), 16);
    EVP_CIPHER_CTX_free(ctx);
    return out;
}

} // namespace

TEST(Sha1, KnownAnswers) {
    EXPECT_EQ(to_hex(sha1("")), "da39a3ee5e6b4b0d3255bfef95601890afd80709");
    EXPECT_EQ(to_hex(sha1("abc")), "a9993e364706816aba3e25717850c26c9cd0d89d");
    EXPECT_EQ(to_hex(sha1("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq")),
              "84983e441c3bd26ebaae4aa1f95129e5e54670f1");
}

TEST(Sha1, PartialDigestIsPure) {
    sha1_state fresh;
    EXPECT_EQ(to_hex(fresh.partial_digest()), "da39a3ee5e6b4b0d3255bfef95601890afd80709");

    sha1_state s;
    s.update("abc");
    const sha1_state before = s;
    EXPECT_EQ(to_hex(s.partial_digest()), "a9993e364706816aba3e25717850c26c9cd0d89d");
    EXPECT_EQ(s.partial_digest(), s.partial_digest());
    EXPECT_EQ(s, before);
}

TEST(Sha1, PeekThenAbsorbEqualsAbsorb) {
    std::mt19937 rng(7);
    std::string text(1000, '\0');
    for (auto& c : text) c = static_cast<char>(rng());
    sha1_state peeked, plain;
    for (std::size_t i = 0; i < text.size(); i += 37) {
        auto piece = std::string_view(text).substr(i, 37);
        peeked.update(piece);
        (void)peeked.partial_digest();
        plain.update(piece);
    }
    EXPECT_EQ(peeked, plain);
    EXPECT_EQ(peeked.partial_digest(), plain.partial_digest());
}

TEST(Sha1, BlockCompressionDiffersForDifferentBlocks) {
    std::array<std::uint8_t, 64> a{}, b{};
    b[63] = 1;
    sha1_state s;
    auto sa = sha1_block(s, a);
    auto sb = sha1_block(s, b);
    EXPECT_NE(sa.words(), sb.words());
    EXPECT_EQ(sa.compressions(), 1u);
    EXPECT_EQ(sa.byte_count(), 64u);
}

TEST(Sha1, MultiBlockMatchesOneShot) {
    std::string million(1000000, 'a');
    EXPECT_EQ(to_hex(sha1(million)), "34aa973cd4c4daa4f61eeb2bdbad27316534016f");
}

TEST(Aes128, Fips197DecryptKnownAnswer) {
    auto key = block_from_hex("000102030405060708090a0b0c0d0e0f");
    aes128_round_keys rk(key);
    auto plain = aes128_decrypt_block(block_from_hex("69c4e0d86a7b0430d8cdb78070b4c55a"), rk);
    EXPECT_EQ(to_hex(plain), "00112233445566778899aabbccddeeff");
    auto cipher = aes128_encrypt_block(block_from_hex("00112233445566778899aabbccddeeff"), rk);
    EXPECT_EQ(to_hex(cipher), "69c4e0d86a7b0430d8cdb78070b4c55a");
}

TEST(Aes128, RoundZeroIsCipherKeyAndLastRoundMatchesFips197) {
    auto key = block_from_hex("2b7e151628aed2a6abf7158809cf4f3c");
    aes128_round_keys rk(key);
    EXPECT_EQ(rk[0], key);
    EXPECT_EQ(to_hex(rk[10]), "d014f9a8c9ee2589e13f0cc8b6630ca6");
}

TEST(Aes128, DecryptInvertsEncrypt) {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        aes_key128 key;
        aes_block x;
        for (auto& b : key) b = static_cast<std::uint8_t>(rng());
        for (auto& b : x) b = static_cast<std::uint8_t>(rng());
        aes128_round_keys rk(key);
        ASSERT_EQ(aes128_decrypt_block(aes128_encrypt_block(x, rk), rk), x);
        ASSERT_EQ(aes128_decrypt_block(x, rk), openssl_ecb_decrypt(key, x));
    }
}

TEST(Aes128, ZeroKeyZeroBlockIsStable) {
    aes_key128 key{};
    aes_block zero{};
    aes128_round_keys rk(key);
    auto first = aes128_decrypt_block(zero, rk);
    EXPECT_EQ(first, aes128_decrypt_block(zero, aes128_round_keys(key)));
    EXPECT_EQ(first, openssl_ecb_decrypt(key, zero));
    EXPECT_EQ(to_hex(aes128_encrypt_block(zero, rk)), "66e94bd4ef8a2c3b884cfa59ca342b2e");
}

TEST(Cbc, RoundTripOneToSixtyFourBlocks) {
    std::mt19937 rng(3);
    aes_key128 key;
    aes_block iv;
    for (auto& b : key) b = static_cast<std::uint8_t>(rng());
    for (auto& b : iv) b = static_cast<std::uint8_t>(rng());
    aes128_round_keys rk(key);
    for (std::size_t blocks = 1; blocks <= 64; ++blocks) {
        byte_vector plain(blocks * 16);
        for (auto& b : plain) b = static_cast<std::uint8_t>(rng());
        auto cipher = cbc_encrypt(plain, rk, iv);
        ASSERT_EQ(cipher.size(), plain.size());
        ASSERT_EQ(cbc_decrypt(cipher, rk, iv), plain);
    }
}

TEST(Cbc, BitFlipGarblesBlockAndFlipsNextBit) {
    aes_key128 key{};
    key[0] = 0x42;
    aes_block iv{};
    aes128_round_keys rk(key);
    byte_vector plain(32, 0x5A);
    auto cipher = cbc_encrypt(plain, rk, iv);
    cipher[3] ^= 0x10;
    auto out = cbc_decrypt(cipher, rk, iv);
    EXPECT_FALSE(std::equal(out.begin(), out.begin() + 16, plain.begin()));
    int diff_bits = 0;
    for (int i = 16; i < 32; ++i) diff_bits += std::popcount(static_cast<unsigned>(out[i] ^ plain[i]));
    EXPECT_EQ(diff_bits, 1);
    EXPECT_EQ(out[16 + 3] ^ plain[16 + 3], 0x10);
}

TEST(Cbc, RejectsUnalignedInput) {
    aes128_round_keys rk(aes_key128{});
    byte_vector bad(17);
    try {
        (void)cbc_decrypt(bad, rk, aes_block{});
        FAIL() << "expected block alignment error";
    } catch (const error& e) {
        EXPECT_EQ(e.code(), error_code::block_alignment);
    }
    EXPECT_THROW((void)cbc_decrypt(byte_vector{}, rk, aes_block{}), error);
}

TEST(Crc32, KnownAnswers) {
    EXPECT_EQ(crc32(""), 0x00000000u);
    EXPECT_EQ(crc32("123456789"), 0xCBF43926u);
    EXPECT_EQ(crc32("The quick brown fox jumps over the lazy dog"), 0x414FA339u);
}

TEST(Crc32, AppendingChangesValue) {
    EXPECT_NE(crc32("123456789"), crc32("1234567890"));
    EXPECT_NE(crc32(""), crc32(std::string(1, '\0')));
}

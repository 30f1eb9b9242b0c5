#include <rarcrack/kdf.hpp>

#include "oracle/rar3_keysetup_oracle.hpp"

#include <gtest/gtest.h>

#include <map>
#include <random>
#include <string>

using namespace rarcrack;

namespace {

const salt_bytes counting_salt{0, 1, 2, 3, 4, 5, 6, 7};

std::string random_ascii_password(std::mt19937& rng, std::size_t len) {
    std::uniform_int_distribution<int> ch(0x20, 0x7E);
    std::string s(len, ' ');
    for (auto& c : s) c = static_cast<char>(ch(rng));
    return s;
}

salt_bytes random_salt(std::mt19937& rng) {
    salt_bytes s;
    for (auto& b : s) b = static_cast<std::uint8_t>(rng());
    return s;
}

void expect_matches_oracle(const derived_key& dk, const std::string& pw, const salt_bytes& salt) {
    auto o = oracle::rar3_key_setup(oracle::widen_ascii(pw), salt.data());
    EXPECT_EQ(to_hex(dk.key), to_hex(o.key)) << "password " << pw;
    EXPECT_EQ(to_hex(dk.iv), to_hex(o.iv)) << "password " << pw;
}

} // namespace

TEST(Utf16le, WidensAscii) {
    EXPECT_EQ(to_hex(utf16le_encode("abcd")), "6100620063006400");
    EXPECT_EQ(to_hex(utf16le_encode("A")), "4100");
    EXPECT_EQ(to_hex(utf16le_encode("\xC3\xA9\xE4\xB8\xAD")), "e9002d4e"); // U+00E9 U+4E2D
}

TEST(Utf16le, RejectsBadLengthAndCharacters) {
    auto code_of = [](std::string_view pw) {
        try {
            (void)utf16le_encode(pw);
        } catch (const error& e) {
            return e.code();
        }
        return error_code::aborted;
    };
    EXPECT_EQ(code_of(""), error_code::range);
    EXPECT_EQ(code_of(std::string(26, 'x')), error_code::range);
    EXPECT_NO_THROW((void)utf16le_encode(std::string(25, 'x')));
    EXPECT_EQ(code_of("\xF0\x9F\x98\x80"), error_code::unsupported_character); // U+1F600
    EXPECT_EQ(code_of("\xFF"), error_code::unsupported_character);
}

TEST(KdfLayout, UnitLengthFormula) {
    for (std::size_t len = 1; len <= 25; ++len) {
        auto layout = kdf_layout::for_length(len);
        EXPECT_EQ(layout.unit_len, len * 2 + 8 + 3);
        EXPECT_EQ(layout.stream_blocks(), 4096u * layout.unit_len);
    }
    EXPECT_EQ(kdf_total_units, 16u * kdf_units_per_iv_byte);
    EXPECT_THROW(kdf_layout::for_length(0), error);
    EXPECT_THROW(kdf_layout::for_length(26), error);
}

TEST(CounterTable, SizeAndCounterPlacement) {
    auto layout = kdf_layout::for_length(4);
    counter_table table(layout);
    ASSERT_EQ(table.size_bytes(), 4980736u);
    const std::uint64_t ul = layout.unit_len;

    EXPECT_EQ(table.byte_at(ul - 3), 0);
    EXPECT_EQ(table.byte_at(ul - 2), 0);
    EXPECT_EQ(table.byte_at(ul - 1), 0);

    const std::uint64_t u = 0x010203;
    EXPECT_EQ(table.byte_at(u * ul + ul - 3), 0x03);
    EXPECT_EQ(table.byte_at(u * ul + ul - 2), 0x02);
    EXPECT_EQ(table.byte_at(u * ul + ul - 1), 0x01);

    for (std::uint64_t p = 0; p < table.size_bytes(); ++p) {
        if (p % ul < ul - 3) {
            ASSERT_EQ(table.byte_at(p), 0) << "position " << p;
        }
    }
}

TEST(PatternBuffer, HoldsPasswordAndSaltWithZeroCounter) {
    auto pattern = build_pattern("abcd", counting_salt);
    EXPECT_EQ(to_hex(pattern.bytes()), "61006200630064000001020304050607000000");
    EXPECT_EQ(pattern.layout().unit_len, 19u);

    auto p1 = build_pattern("Z", salt_bytes{9, 9, 9, 9, 9, 9, 9, 9});
    const auto ul = p1.layout().unit_len;
    for (std::size_t k = ul - 3; k < ul; ++k) EXPECT_EQ(p1.bytes()[k], 0);

    ASSERT_EQ(pattern.expanded().size(), 19u + 16u);
    for (std::size_t k = 0; k < pattern.expanded().size(); ++k) {
        std::uint8_t b[4];
        for (int i = 0; i < 4; ++i) b[i] = pattern.bytes()[(4 * k + i) % 19];
        EXPECT_EQ(pattern.expanded()[k], load_be32(b));
    }
}

TEST(PatternBuffer, OrWithTableRowGivesLittleBlock) {
    std::mt19937 rng(5);
    const std::string pw = "s3cr3t";
    const salt_bytes salt = random_salt(rng);
    auto pattern = build_pattern(pw, salt);
    counter_table table(pattern.layout());
    const auto utf16 = utf16le_encode(pw);
    const std::uint64_t ul = pattern.layout().unit_len;
    std::uniform_int_distribution<std::uint32_t> unit(0, kdf_total_units - 1);
    for (int trial = 0; trial < 500; ++trial) {
        std::uint32_t u = unit(rng);
        auto expected = serialize_little_block(utf16, salt, u);
        ASSERT_EQ(expected.size(), ul);
        for (std::uint64_t j = 0; j < ul; ++j)
            ASSERT_EQ(pattern.bytes()[j] | table.byte_at(u * ul + j), expected[j]) << "unit " << u;
    }
}

TEST(KdfStream, OptimizedBlocksReproduceNaiveStream) {
    for (std::size_t len : {1u, 4u, 13u}) {
        const std::string pw(len, 'q');
        const salt_bytes salt{0xA0, 0xB1, 0xC2, 0xD3, 0xE4, 0xF5, 0x06, 0x17};
        auto pattern = build_pattern(pw, salt);
        counter_table table(pattern.layout());
        const auto utf16 = utf16le_encode(pw);

        byte_vector naive;
        naive.reserve(pattern.layout().stream_bytes());
        for (std::uint32_t u = 0; u < kdf_total_units; ++u) {
            auto lb = serialize_little_block(utf16, salt, u);
            naive.insert(naive.end(), lb.begin(), lb.end());
        }
        ASSERT_EQ(naive.size() % 64, 0u);
        for (std::uint64_t blk = 0; blk < pattern.layout().stream_blocks(); ++blk) {
            auto w = optimized_block_words(pattern, table, blk);
            for (int k = 0; k < 16; ++k)
                ASSERT_EQ(w[k], load_be32(naive.data() + blk * 64 + 4 * k)) << "len " << len << " block " << blk;
        }
    }
}

// Frozen from the OpenSSL-based transliteration in tests/oracle.
TEST(DeriveKeyNaive, MatchesFrozenOracleValue) {
    auto dk = derive_key_naive("abcd", counting_salt);
    EXPECT_EQ(to_hex(dk.key), "25cec9c7bcd5c038a12f0700d582ef9a");
    EXPECT_EQ(to_hex(dk.iv), "d7dce217d0faec26f2e2056fe8f0fdda");
    expect_matches_oracle(dk, "abcd", counting_salt);
}

TEST(DeriveKeyNaive, MatchesOracleOnRandomInputs) {
    std::mt19937 rng(99);
    for (std::size_t len : {1u, 7u, 11u, 25u}) {
        auto pw = random_ascii_password(rng, len);
        auto salt = random_salt(rng);
        expect_matches_oracle(derive_key_naive(pw, salt), pw, salt);
    }
}

TEST(DeriveKeyNaive, DeterministicAndSaltSensitive) {
    auto a = derive_key_naive("abcd", counting_salt);
    EXPECT_EQ(a, derive_key_naive("abcd", counting_salt));

    salt_bytes other = counting_salt;
    other[7] ^= 0x01;
    auto b = derive_key_naive("abcd", other);
    EXPECT_NE(a.key, b.key);
    EXPECT_NE(a.iv, b.iv);
    expect_matches_oracle(b, "abcd", other);
}

TEST(DeriveKeyOptimized, EqualsNaiveForBoundaryLengths) {
    std::mt19937 rng(2015);
    for (std::size_t len : {1u, 4u, 10u, 11u, 25u}) {
        auto pw = random_ascii_password(rng, len);
        auto salt = random_salt(rng);
        counter_table table(kdf_layout::for_length(len));
        EXPECT_EQ(derive_key_optimized(build_pattern(pw, salt), table), derive_key_naive(pw, salt)) << pw;
    }
    counter_table t4(kdf_layout::for_length(4));
    EXPECT_EQ(derive_key_optimized(build_pattern("abcd", salt_bytes{}), t4), derive_key_naive("abcd", salt_bytes{}));
}

TEST(DeriveKeyOptimized, RandomizedEquivalence) {
    std::mt19937 rng(424242);
    std::uniform_int_distribution<std::size_t> length(1, 25);
    std::map<std::size_t, int> per_length;
    for (int i = 0; i < 40; ++i) ++per_length[length(rng)];
    for (auto [len, n] : per_length) {
        counter_table table(kdf_layout::for_length(len));
        for (int k = 0; k < n; ++k) {
            auto pw = random_ascii_password(rng, len);
            auto salt = random_salt(rng);
            ASSERT_EQ(derive_key_optimized(build_pattern(pw, salt), table), derive_key_naive(pw, salt)) << pw;
        }
    }
}

TEST(DeriveKeyOptimized, NonAsciiPasswordsAgree) {
    const std::string pw = "\xD0\xBF\xD0\xB0\xD1\x80\xD0\xBE\xD0\xBB\xD1\x8C"; // Cyrillic, 6 chars
    counter_table table(kdf_layout::for_length(6));
    EXPECT_EQ(derive_key_optimized(build_pattern(pw, counting_salt), table), derive_key_naive(pw, counting_salt));
}

TEST(DeriveKeyOptimized, CompressionCountLaw) {
    for (std::size_t len : {1u, 4u, 10u, 11u, 25u}) {
        counter_table table(kdf_layout::for_length(len));
        kdf_counters opt, naive;
        const std::string pw(len, 'k');
        (void)derive_key_optimized(build_pattern(pw, counting_salt), table, &opt);
        (void)derive_key_naive(pw, counting_salt, &naive);
        EXPECT_EQ(opt.stream_compressions, 4096u * (2 * len + 11));
        EXPECT_EQ(naive.stream_compressions, 4096u * (2 * len + 11));
    }
    kdf_counters c4;
    counter_table t4(kdf_layout::for_length(4));
    (void)derive_key_optimized(build_pattern("abcd", counting_salt), t4, &c4);
    EXPECT_EQ(c4.stream_compressions, 77824u);
}

TEST(DeriveKeyOptimized, RejectsLayoutMismatch) {
    counter_table t5(kdf_layout::for_length(5));
    try {
        (void)derive_key_optimized(build_pattern("abcd", counting_salt), t5);
        FAIL() << "expected contract violation";
    } catch (const error& e) {
        EXPECT_EQ(e.code(), error_code::contract_violation);
    }
}

// iv[i] is the low byte of h4 of the digest over the stream truncated right
// after unit iv_snapshot_unit(i); nothing later feeds into it.
TEST(KdfIv, SegmentDependsOnlyOnEarlierBlocks) {
    const std::string pw = "abcd";
    auto dk = derive_key_naive(pw, counting_salt);
    const auto utf16 = utf16le_encode(pw);
    for (std::size_t i : {0u, 7u, 15u}) {
        ASSERT_LE(iv_snapshot_unit(i), (i + 1) * kdf_units_per_iv_byte - 1);
        sha1_state s;
        for (std::uint32_t u = 0; u <= iv_snapshot_unit(i); ++u) s.update(serialize_little_block(utf16, counting_salt, u));
        EXPECT_EQ(s.partial_digest()[iv_digest_byte], dk.iv[i]) << "segment " << i;
    }
}

/*
 * Copyright 2026 The rarcrack Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include "bytes.hpp"
#include "error.hpp"

namespace rarcrack {

using aes_block = std::array<std::uint8_t, 16>;
using aes_key128 = std::array<std::uint8_t, 16>;

namespace detail {

inline constexpr std::array<std::uint8_t, 256> aes_sbox{
    0x63, 0x7c, 0x77, 0x7b, 0xf2, 0x6b, 0x6f, 0xc5, 0x30, 0x01, 0x67, 0x2b, 0xfe, 0xd7, 0xab, 0x76,
    0xca, 0x82, 0xc9, 0x7d, 0xfa, 0x59, 0x47, 0xf0, 0xad, 0xd4, 0xa2, 0xaf, 0x9c, 0xa4, 0x72, 0xc0,
    0xb7, 0xfd, 0x93, 0x26, 0x36, 0x3f, 0xf7, 0xcc, 0x34, 0xa5, 0xe5, 0xf1, 0x71, 0xd8, 0x31, 0x15,
    0x04, 0xc7, 0x23, 0xc3, 0x18, 0x96, 0x05, 0x9a, 0x07, 0x12, 0x80, 0xe2, 0xeb, 0x27, 0xb2, 0x75,
    0x09, 0x83, 0x2c, 0x1a, 0x1b, 0x6e, 0x5a, 0xa0, 0x52, 0x3b, 0xd6, 0xb3, 0x29, 0xe3, 0x2f, 0x84,
    0x53, 0xd1, 0x00, 0xed, 0x20, 0xfc, 0xb1, 0x5b, 0x6a, 0xcb, 0xbe, 0x39, 0x4a, 0x4c, 0x58, 0xcf,
    0xd0, 0xef, 0xaa, 0xfb, 0x43, 0x4d, 0x33, 0x85, 0x45, 0xf9, 0x02, 0x7f, 0x50, 0x3c, 0x9f, 0xa8,
    0x51, 0xa3, 0x40, 0x8f, 0x92, 0x9d, 0x38, 0xf5, 0xbc, 0xb6, 0xda, 0x21, 0x10, 0xff, 0xf3, 0xd2,
    0xcd, 0x0c, 0x13, 0xec, 0x5f, 0x97, 0x44, 0x17, 0xc4, 0xa7, 0x7e, 0x3d, 0x64, 0x5d, 0x19, 0x73,
    0x60, 0x81, 0x4f, 0xdc, 0x22, 0x2a, 0x90, 0x88, 0x46, 0xee, 0xb8, 0x14, 0xde, 0x5e, 0x0b, 0xdb,
    0xe0, 0x32, 0x3a, 0x0a, 0x49, 0x06, 0x24, 0x5c, 0xc2, 0xd3, 0xac, 0x62, 0x91, 0x95, 0xe4, 0x79,
    0xe7, 0xc8, 0x37, 0x6d, 0x8d, 0xd5, 0x4e, 0xa9, 0x6c, 0x56, 0xf4, 0xea, 0x65, 0x7a, 0xae, 0x08,
    0xba, 0x78, 0x25, 0x2e, 0x1c, 0xa6, 0xb4, 0xc6, 0xe8, 0xdd, 0x74, 0x1f, 0x4b, 0xbd, 0x8b, 0x8a,
    0x70, 0x3e, 0xb5, 0x66, 0x48, 0x03, 0xf6, 0x0e, 0x61, 0x35, 0x57, 0xb9, 0x86, 0xc1, 0x1d, 0x9e,
    0xe1, 0xf8, 0x98, 0x11, 0x69, 0xd9, 0x8e, 0x94, 0x9b, 0x1e, 0x87, 0xe9, 0xce, 0x55, 0x28, 0xdf,
    0x8c, 0xa1, 0x89, 0x0d, 0xbf, 0xe6, 0x42, 0x68, 0x41, 0x99, 0x2d, 0x0f, 0xb0, 0x54, 0xbb, 0x16
};

inline constexpr std::array<std::uint8_t, 256> make_inverse_sbox() noexcept {
    std::array<std::uint8_t, 256> inv{};
    for (int i = 0; i < 256; ++i) inv[aes_sbox[i]] = static_cast<std::uint8_t>(i);
    return inv;
}

inline constexpr auto aes_inv_sbox = make_inverse_sbox();

inline constexpr std::uint8_t xtime(std::uint8_t a) noexcept {
    return static_cast<std::uint8_t>((a << 1) ^ ((a & 0x80) ? 0x1B : 0x00));
}

inline constexpr std::uint8_t gmul(std::uint8_t a, std::uint8_t b) noexcept {
    std::uint8_t r = 0;
    while (b) {
        if (b & 1) r ^= a;
        a = xtime(a);
        b >>= 1;
    }
    return r;
}

inline constexpr std::array<std::array<std::uint8_t, 256>, 4> make_inv_mix_tables() noexcept {
    std::array<std::array<std::uint8_t, 256>, 4> t{};
    constexpr std::uint8_t factors[4] = {0x0E, 0x0B, 0x0D, 0x09};
    for (int f = 0; f < 4; ++f)
        for (int i = 0; i < 256; ++i) t[f][i] = gmul(static_cast<std::uint8_t>(i), factors[f]);
    return t;
}

// Rows: multiply by 0e, 0b, 0d, 09.
inline constexpr auto aes_inv_mix = make_inv_mix_tables();

} // namespace detail

/// Expanded AES-128 key schedule: 11 round keys, round 0 is the cipher key.
class aes128_round_keys {
public:
    explicit aes128_round_keys(std::span<const std::uint8_t, 16> key) noexcept {
        constexpr std::uint8_t rcon[10] = {0x01, 0x02, 0x04, 0x08, 0x10, 0x20, 0x40, 0x80, 0x1B, 0x36};
        for (int i = 0; i < 16; ++i) keys_[0][i] = key[i];
        for (int r = 1; r <= 10; ++r) {
            const auto& prev = keys_[r - 1];
            auto& cur = keys_[r];
            std::uint8_t t[4] = {detail::aes_sbox[prev[13]], detail::aes_sbox[prev[14]],
                                 detail::aes_sbox[prev[15]], detail::aes_sbox[prev[12]]};
            t[0] ^= rcon[r - 1];
            for (int i = 0; i < 4; ++i) cur[i] = prev[i] ^ t[i];
            for (int i = 4; i < 16; ++i) cur[i] = prev[i] ^ cur[i - 4];
        }
    }

    const aes_block& operator[](std::size_t round) const noexcept { return keys_[round]; }

private:
    std::array<aes_block, 11> keys_{};
};

// State layout is the FIPS-197 column-major byte order: s[4 * col + row].

inline aes_block aes128_encrypt_block(const aes_block& in, const aes128_round_keys& rk) noexcept {
    using detail::aes_sbox;
    using detail::xtime;
    aes_block s = in;
    for (int i = 0; i < 16; ++i) s[i] ^= rk[0][i];
    for (int round = 1; round <= 10; ++round) {
        aes_block t{};
        // SubBytes + ShiftRows
        for (int c = 0; c < 4; ++c)
            for (int r = 0; r < 4; ++r) t[4 * c + r] = aes_sbox[s[4 * ((c + r) % 4) + r]];
        if (round != 10) {
            for (int c = 0; c < 4; ++c) {
                std::uint8_t* col = &t[4 * c];
                std::uint8_t a0 = col[0], a1 = col[1], a2 = col[2], a3 = col[3];
                std::uint8_t all = a0 ^ a1 ^ a2 ^ a3;
                col[0] = a0 ^ all ^ xtime(a0 ^ a1);
                col[1] = a1 ^ all ^ xtime(a1 ^ a2);
                col[2] = a2 ^ all ^ xtime(a2 ^ a3);
                col[3] = a3 ^ all ^ xtime(a3 ^ a0);
            }
        }
        for (int i = 0; i < 16; ++i) s[i] = t[i] ^ rk[round][i];
    }
    return s;
}

inline aes_block aes128_decrypt_block(const aes_block& in, const aes128_round_keys& rk) noexcept {
    using detail::aes_inv_mix;
    using detail::aes_inv_sbox;
    aes_block s = in;
    for (int i = 0; i < 16; ++i) s[i] ^= rk[10][i];
    for (int round = 9; round >= 0; --round) {
        aes_block t{};
        // InvShiftRows + InvSubBytes
        for (int c = 0; c < 4; ++c)
            for (int r = 0; r < 4; ++r) t[4 * ((c + r) % 4) + r] = aes_inv_sbox[s[4 * c + r]];
        for (int i = 0; i < 16; ++i) t[i] ^= rk[round][i];
        if (round != 0) {
            for (int c = 0; c < 4; ++c) {
                std::uint8_t* col = &t[4 * c];
                std::uint8_t a0 = col[0], a1 = col[1], a2 = col[2], a3 = col[3];
                col[0] = aes_inv_mix[0][a0] ^ aes_inv_mix[1][a1] ^ aes_inv_mix[2][a2] ^ aes_inv_mix[3][a3];
                col[1] = aes_inv_mix[3][a0] ^ aes_inv_mix[0][a1] ^ aes_inv_mix[1][a2] ^ aes_inv_mix[2][a3];
                col[2] = aes_inv_mix[2][a0] ^ aes_inv_mix[3][a1] ^ aes_inv_mix[0][a2] ^ aes_inv_mix[1][a3];
                col[3] = aes_inv_mix[1][a0] ^ aes_inv_mix[2][a1] ^ aes_inv_mix[3][a2] ^ aes_inv_mix[0][a3];
            }
        }
        s = t;
    }
    return s;
}

inline void require_block_aligned(std::size_t length) {
    if (length == 0 || length % 16 != 0)
        throw error(error_code::block_alignment, "got " + std::to_string(length) + " bytes");
}

/// CBC decryption: P[i] = D(C[i]) ^ C[i-1], with C[-1] = iv.
inline byte_vector cbc_decrypt(std::span<const std::uint8_t> ciphertext, const aes128_round_keys& rk,
                               const aes_block& iv) {
    require_block_aligned(ciphertext.size());
    byte_vector out(ciphertext.size());
    aes_block chain = iv;
    for (std::size_t off = 0; off < ciphertext.size(); off += 16) {
        aes_block c;
        std::copy_n(ciphertext.data() + off, 16, c.begin());
        aes_block p = aes128_decrypt_block(c, rk);
        for (int i = 0; i < 16; ++i) out[off + i] = p[i] ^ chain[i];
        chain = c;
    }
    return out;
}

inline byte_vector cbc_encrypt(std::span<const std::uint8_t> plaintext, const aes128_round_keys& rk,
                               const aes_block& iv) {
    require_block_aligned(plaintext.size());
    byte_vector out(plaintext.size());
    aes_block chain = iv;
    for (std::size_t off = 0; off < plaintext.size(); off += 16) {
        aes_block p;
        for (int i = 0; i < 16; ++i) p[i] = plaintext[off + i] ^ chain[i];
        chain = aes128_encrypt_block(p, rk);
        std::copy(chain.begin(), chain.end(), out.begin() + static_cast<std::ptrdiff_t>(off));
    }
    return out;
}

} // namespace rarcrack

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
#include <cstddef>
#include <cstdint>
#include <span>

#include "aes128.hpp"
#include "archive.hpp"
#include "bytes.hpp"
#include "crc32.hpp"
#include "kdf.hpp"

namespace rarcrack {

/// Accepts a decrypted header block when it looks like a file header whose
/// stored 16-bit checksum matches. The type and size tests are extra
/// structure on top of the checksum and cut the false-accept rate by
/// roughly another factor of 256.
inline bool verify_header(std::span<const std::uint8_t> plaintext) noexcept {
    if (plaintext.size() < 7) return false;
    const std::uint16_t head_crc = load_le16(plaintext.data());
    const std::uint8_t head_type = plaintext[2];
    const std::uint16_t head_size = load_le16(plaintext.data() + 5);
    if (head_type != file_header_type) return false;
    if (head_size < 7 || head_size > plaintext.size()) return false;
    return header_crc16(plaintext.subspan(2, head_size - 2u)) == head_crc;
}

/// Decrypts only the blocks that cover the header's declared size.
inline bool verify_candidate(const derived_key& dk, const archive_info& archive) {
    const auto& blob = archive.encrypted_header;
    require_block_aligned(blob.size());
    const aes128_round_keys rk(dk.key);

    aes_block c0;
    std::copy_n(blob.begin(), 16, c0.begin());
    aes_block p0 = aes128_decrypt_block(c0, rk);
    for (int i = 0; i < 16; ++i) p0[i] ^= dk.iv[i];
    if (p0[2] != file_header_type) return false;

    const std::size_t head_size = load_le16(p0.data() + 5);
    const std::size_t need = std::min((head_size + 15) / 16 * 16, blob.size());
    if (need <= 16) return verify_header(p0);
    const byte_vector plain = cbc_decrypt(std::span(blob).first(need), rk, dk.iv);
    return verify_header(plain);
}

} // namespace rarcrack

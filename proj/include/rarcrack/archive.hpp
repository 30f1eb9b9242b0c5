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

// Container layout handled here (RAR3 with encrypted headers):
//
//   marker      7 bytes   52 61 72 21 1A 07 00
//   main header 13 bytes  crc16 | type 0x73 | flags | size | 6 reserved
//   salt        8 bytes   present when flags has 0x0080
//   ciphertext  AES-128-CBC encrypted block headers
//
// Only the first 1024 bytes of ciphertext are kept; verification needs just
// the first header.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <string_view>

#include "aes128.hpp"
#include "bytes.hpp"
#include "crc32.hpp"
#include "error.hpp"
#include "kdf.hpp"

namespace rarcrack {

inline constexpr std::array<std::uint8_t, 7> rar_marker{0x52, 0x61, 0x72, 0x21, 0x1A, 0x07, 0x00};
inline constexpr std::uint8_t main_header_type = 0x73;
inline constexpr std::uint8_t file_header_type = 0x74;
inline constexpr std::uint16_t main_flag_password = 0x0080;
inline constexpr std::size_t main_header_size = 13;
inline constexpr std::size_t max_encrypted_header = 1024;

/// What the cracker needs from an archive: the salt and the encrypted
/// header blob (16..1024 bytes, block aligned).
struct archive_info {
    salt_bytes salt{};
    byte_vector encrypted_header;

    friend bool operator==(const archive_info&, const archive_info&) = default;
};

struct fixture_recipe {
    std::string password;
    salt_bytes salt{};
    byte_vector header_payload;
};

inline bool validate_marker(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < rar_marker.size())
        throw error(error_code::truncated_input, "need 7 bytes for the marker block, got " + std::to_string(bytes.size()));
    return std::equal(rar_marker.begin(), rar_marker.end(), bytes.begin());
}

inline archive_info parse_archive(std::span<const std::uint8_t> bytes) {
    if (!validate_marker(bytes)) throw error(error_code::bad_format, "missing RAR marker block");

    constexpr std::size_t hdr = rar_marker.size();
    if (bytes.size() < hdr + 7) throw error(error_code::truncated_input, "main header cut short");
    const std::uint16_t head_crc = load_le16(&bytes[hdr]);
    const std::uint8_t head_type = bytes[hdr + 2];
    const std::uint16_t head_flags = load_le16(&bytes[hdr + 3]);
    const std::uint16_t head_size = load_le16(&bytes[hdr + 5]);
    if (head_type != main_header_type) throw error(error_code::bad_format, "first block is not a main header");
    if (head_size < 7) throw error(error_code::corrupt_header, "main header size below 7");
    if (bytes.size() - hdr < head_size) throw error(error_code::truncated_input, "main header cut short");
    if (header_crc16(bytes.subspan(hdr + 2, head_size - 2u)) != head_crc)
        throw error(error_code::corrupt_header, "main header checksum mismatch");
    if (!(head_flags & main_flag_password)) throw error(error_code::not_encrypted, "password flag not set");

    const std::size_t salt_at = hdr + head_size;
    if (bytes.size() - salt_at < 8) throw error(error_code::truncated_input, "salt needs 8 bytes");

    archive_info info;
    std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(salt_at), 8, info.salt.begin());
    const std::size_t blob_at = salt_at + 8;
    std::size_t blob_len = std::min(bytes.size() - blob_at, max_encrypted_header);
    blob_len -= blob_len % 16;
    if (blob_len == 0) throw error(error_code::truncated_input, "no complete ciphertext block after salt");
    info.encrypted_header.assign(bytes.begin() + static_cast<std::ptrdiff_t>(blob_at),
                                 bytes.begin() + static_cast<std::ptrdiff_t>(blob_at + blob_len));
    return info;
}

inline byte_vector read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error(error_code::input, "cannot open " + path.string());
    byte_vector out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw error(error_code::input, "read failed for " + path.string());
    return out;
}

inline archive_info parse_archive_file(const std::filesystem::path& path) {
    return parse_archive(read_file_bytes(path));
}

/// Main header bytes with the password flag and a valid checksum.
inline byte_vector make_main_header(std::uint16_t flags = main_flag_password) {
    byte_vector h(main_header_size, 0);
    h[2] = main_header_type;
    store_le16(&h[3], flags);
    store_le16(&h[5], static_cast<std::uint16_t>(main_header_size));
    store_le16(&h[0], header_crc16(std::span(h).subspan(2)));
    return h;
}

/// A minimal stored-file header (type 0x74) with a correct checksum.
inline byte_vector make_file_header(std::string_view name = "secret.txt", std::uint32_t unpacked_size = 0) {
    const std::size_t size = 32 + name.size();
    byte_vector h(size, 0);
    h[2] = file_header_type;
    store_le16(&h[3], 0x8000);
    store_le16(&h[5], static_cast<std::uint16_t>(size));
    store_le32(&h[7], unpacked_size);
    store_le32(&h[11], unpacked_size);
    h[15] = 2;    // host OS: Windows
    h[24] = 29;   // unpack version
    h[25] = 0x30; // method: store
    store_le16(&h[26], static_cast<std::uint16_t>(name.size()));
    store_le32(&h[28], 0x20);
    std::copy(name.begin(), name.end(), h.begin() + 32);
    store_le16(&h[0], header_crc16(std::span(h).subspan(2)));
    return h;
}

inline byte_vector pad_to_block(byte_vector bytes) {
    bytes.resize((bytes.size() + 15) / 16 * 16, 0);
    return bytes;
}

inline byte_vector encrypt_header(std::span<const std::uint8_t> payload, const derived_key& dk) {
    const byte_vector padded = pad_to_block(byte_vector(payload.begin(), payload.end()));
    return cbc_encrypt(padded, aes128_round_keys(dk.key), dk.iv);
}

/// Writes marker + main header + salt + encrypted payload. The payload is
/// zero padded to a block multiple.
inline byte_vector build_fixture(const fixture_recipe& recipe) {
    if (recipe.header_payload.empty()) throw error(error_code::range, "empty header payload");
    const derived_key dk = derive_key_naive(recipe.password, recipe.salt);
    byte_vector out(rar_marker.begin(), rar_marker.end());
    const byte_vector main = make_main_header();
    out.insert(out.end(), main.begin(), main.end());
    out.insert(out.end(), recipe.salt.begin(), recipe.salt.end());
    const byte_vector cipher = encrypt_header(recipe.header_payload, dk);
    out.insert(out.end(), cipher.begin(), cipher.end());
    return out;
}

inline void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw error(error_code::input, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw error(error_code::input, "write failed for " + path.string());
}

} // namespace rarcrack

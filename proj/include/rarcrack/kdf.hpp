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

// RAR3 key setup: SHA-1 absorbed over 0x40000 repetitions of the "little
// block" utf16le(password) || salt || counter(3 bytes, LSB first). Sixteen
// intermediate digests contribute one IV byte each, and the final digest
// yields the AES-128 key.
//
// Two implementations live here. derive_key_naive() streams the little
// blocks byte by byte through sha1_state, with the usual block-boundary
// test on every byte. derive_key_optimized() precomputes all counter bytes
// once per password length (counter_table) and keeps a per-candidate
// pattern holding only password and salt bytes (pattern_buffer); each SHA-1
// block is then assembled by OR-ing sixteen 32-bit words from the two, with
// no per-byte branching.
//
// IV extraction point. The published pseudo-code finalizes a copy of the
// running state before absorbing each segment, which would make iv[0] a byte
// of the empty-message digest. Real RAR3 archives instead take the snapshot
// right after absorbing unit i * 0x4000 (i.e. on u % 0x4000 == 0), and use
// the low byte of h4. That is what iv_snapshot_unit() encodes; it is the
// only place either path decides where the snapshot happens.

#include <array>
#include <cstddef>
#include <cstdint>
#include <new>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aes128.hpp"
#include "bytes.hpp"
#include "error.hpp"
#include "sha1.hpp"
#include "text.hpp"

namespace rarcrack {

inline constexpr std::size_t min_password_length = 1;
inline constexpr std::size_t max_password_length = 25;

inline constexpr std::uint32_t kdf_total_units = 0x40000;
inline constexpr std::uint32_t kdf_units_per_iv_byte = 0x4000;
inline constexpr std::size_t kdf_iv_bytes = 16;
static_assert(kdf_total_units == kdf_iv_bytes * kdf_units_per_iv_byte);

/// Index of the last little block absorbed before the snapshot for iv[i].
inline constexpr std::uint32_t iv_snapshot_unit(std::size_t i) noexcept {
    return static_cast<std::uint32_t>(i) * kdf_units_per_iv_byte;
}

/// Position of h4's least-significant byte in the big-endian digest.
inline constexpr std::size_t iv_digest_byte = 19;

/// Validates length and plane, then widens to UTF-16LE (low byte first).
inline byte_vector utf16le_encode(std::string_view password) {
    auto cps = decode_utf8(password);
    if (!cps) throw error(error_code::unsupported_character, "password is not valid UTF-8");
    if (cps->size() < min_password_length || cps->size() > max_password_length)
        throw error(error_code::range, "password length " + std::to_string(cps->size()) + " outside [1, 25]");
    byte_vector out;
    out.reserve(cps->size() * 2);
    for (char32_t cp : *cps) {
        if (cp > 0xFFFF)
            throw error(error_code::unsupported_character, "code point outside the basic multilingual plane");
        out.push_back(static_cast<std::uint8_t>(cp & 0xFF));
        out.push_back(static_cast<std::uint8_t>(cp >> 8));
    }
    return out;
}

/// Little-block geometry for one password length.
struct kdf_layout {
    std::size_t password_len = 0;
    std::size_t unit_len = 0;

    static kdf_layout for_length(std::size_t password_len) {
        if (password_len < min_password_length || password_len > max_password_length)
            throw error(error_code::range, "password length " + std::to_string(password_len) + " outside [1, 25]");
        return {password_len, password_len * 2 + 8 + 3};
    }

    std::uint64_t stream_bytes() const noexcept { return std::uint64_t{kdf_total_units} * unit_len; }
    std::uint64_t stream_blocks() const noexcept { return stream_bytes() / 64; }

    friend bool operator==(const kdf_layout&, const kdf_layout&) = default;
};

struct derived_key {
    aes_key128 key{};
    aes_block iv{};

    friend bool operator==(const derived_key&, const derived_key&) = default;
};

/// Instrumentation: SHA-1 compressions spent absorbing the little-block
/// stream (finalization of snapshots and of the last digest excluded).
struct kdf_counters {
    std::uint64_t stream_compressions = 0;
};

inline void write_counter(std::uint8_t* out, std::uint32_t unit) noexcept {
    out[0] = static_cast<std::uint8_t>(unit);
    out[1] = static_cast<std::uint8_t>(unit >> 8);
    out[2] = static_cast<std::uint8_t>(unit >> 16);
}

/// Serialized little block for `unit`: utf16 password || salt || counter.
inline byte_vector serialize_little_block(std::span<const std::uint8_t> utf16_password, const salt_bytes& salt,
                                          std::uint32_t unit) {
    byte_vector out(utf16_password.begin(), utf16_password.end());
    out.insert(out.end(), salt.begin(), salt.end());
    out.resize(out.size() + 3);
    write_counter(out.data() + out.size() - 3, unit);
    return out;
}

namespace detail {

inline aes_key128 key_from_digest(const sha1_words& h) noexcept {
    aes_key128 key{};
    for (int i = 0; i < 4; ++i) store_le32(key.data() + 4 * i, h[i]);
    return key;
}

inline std::uint8_t iv_byte_from_digest(const sha1_words& h) noexcept {
    return sha1_serialize(h)[iv_digest_byte];
}

} // namespace detail

/// Reference derivation: byte-at-a-time streaming into one running SHA-1.
inline derived_key derive_key_naive(std::string_view password, const salt_bytes& salt,
                                    kdf_counters* counters = nullptr) {
    byte_vector raw = utf16le_encode(password);
    raw.insert(raw.end(), salt.begin(), salt.end());

    derived_key dk;
    sha1_state c;
    std::size_t next_iv = 0;
    for (std::uint32_t unit = 0; unit < kdf_total_units; ++unit) {
        c.update(raw);
        std::uint8_t num[3];
        write_counter(num, unit);
        c.update(num);
        if (next_iv < kdf_iv_bytes && unit == iv_snapshot_unit(next_iv)) {
            dk.iv[next_iv++] = detail::iv_byte_from_digest(c.partial_words());
        }
    }
    dk.key = detail::key_from_digest(c.partial_words());
    if (counters) counters->stream_compressions += c.compressions();
    return dk;
}

/// Counter bytes for every unit at their stream offsets, zero elsewhere.
/// Stored as big-endian-loaded 32-bit words so blocks feed straight into
/// the SHA-1 message schedule. Immutable once built; share freely.
class counter_table {
public:
    explicit counter_table(kdf_layout layout) : layout_(layout) {
        if (layout.unit_len != layout.password_len * 2 + 11)
            throw error(error_code::contract_violation, "inconsistent kdf layout");
        try {
            words_.assign(layout.stream_bytes() / 4, 0);
        } catch (const std::bad_alloc&) {
            throw error(error_code::resource,
                        "cannot allocate " + std::to_string(layout.stream_bytes()) + " byte counter table");
        }
        const std::uint64_t ul = layout.unit_len;
        for (std::uint32_t unit = 0; unit < kdf_total_units; ++unit) {
            std::uint64_t pos = unit * ul + ul - 3;
            for (int k = 0; k < 3; ++k, ++pos) {
                auto b = static_cast<std::uint32_t>((unit >> (8 * k)) & 0xFF);
                words_[pos / 4] |= b << (24 - 8 * (pos % 4));
            }
        }
    }

    const kdf_layout& layout() const noexcept { return layout_; }
    std::uint64_t size_bytes() const noexcept { return std::uint64_t{words_.size()} * 4; }
    std::span<const std::uint32_t> words() const noexcept { return words_; }

    std::uint8_t byte_at(std::uint64_t pos) const noexcept {
        return static_cast<std::uint8_t>(words_[pos / 4] >> (24 - 8 * (pos % 4)));
    }

private:
    kdf_layout layout_;
    std::vector<std::uint32_t> words_;
};

inline counter_table build_counter_table(kdf_layout layout) { return counter_table(layout); }

/// Per-candidate password and salt bytes at their little-block offsets,
/// zero in the three counter positions.
///
/// Because unit_len is odd the byte pattern does not tile 32-bit words, so
/// the expanded form covers four consecutive phases (4 * unit_len bytes,
/// i.e. unit_len words). Word k of the stream pattern is expanded()[k %
/// unit_len]; sixteen extra words wrap around so any 16-word window starting
/// below unit_len is contiguous.
class pattern_buffer {
public:
    pattern_buffer(std::string_view password, const salt_bytes& salt) {
        bytes_ = utf16le_encode(password);
        layout_ = kdf_layout::for_length(bytes_.size() / 2);
        bytes_.insert(bytes_.end(), salt.begin(), salt.end());
        bytes_.insert(bytes_.end(), 3, 0);

        const std::size_t ul = layout_.unit_len;
        expanded_.assign(ul + 16, 0);
        for (std::size_t k = 0; k < ul + 16; ++k) {
            std::uint32_t w = 0;
            for (std::size_t b = 0; b < 4; ++b) w = (w << 8) | bytes_[(4 * k + b) % ul];
            expanded_[k] = w;
        }
    }

    const kdf_layout& layout() const noexcept { return layout_; }
    std::span<const std::uint8_t> bytes() const noexcept { return bytes_; }
    std::span<const std::uint32_t> expanded() const noexcept { return expanded_; }

private:
    kdf_layout layout_;
    byte_vector bytes_;
    std::vector<std::uint32_t> expanded_;
};

inline pattern_buffer build_pattern(std::string_view password, const salt_bytes& salt) {
    return pattern_buffer(password, salt);
}

namespace detail {

template <std::size_t... K>
inline void or_block(std::uint32_t* out, const std::uint32_t* pattern, const std::uint32_t* table,
                     std::index_sequence<K...>) noexcept {
    ((out[K] = pattern[K] | table[K]), ...);
}

inline void assemble_block(std::uint32_t* out, const std::uint32_t* pattern, const std::uint32_t* table) noexcept {
    or_block(out, pattern, table, std::make_index_sequence<16>{});
}

inline void check_same_layout(const pattern_buffer& pattern, const counter_table& table) {
    if (!(pattern.layout() == table.layout()))
        throw error(error_code::contract_violation,
                    "pattern unit_len " + std::to_string(pattern.layout().unit_len) + " vs table unit_len " +
                        std::to_string(table.layout().unit_len));
}

} // namespace detail

/// The 16 message words of stream block `block` (pattern OR table).
inline std::array<std::uint32_t, 16> optimized_block_words(const pattern_buffer& pattern, const counter_table& table,
                                                           std::uint64_t block) {
    detail::check_same_layout(pattern, table);
    std::array<std::uint32_t, 16> w{};
    auto phase = static_cast<std::size_t>((block * 16) % pattern.layout().unit_len);
    detail::assemble_block(w.data(), pattern.expanded().data() + phase, table.words().data() + block * 16);
    return w;
}

/// Table-driven derivation. Byte-identical to derive_key_naive().
inline derived_key derive_key_optimized(const pattern_buffer& pattern, const counter_table& table,
                                        kdf_counters* counters = nullptr) {
    detail::check_same_layout(pattern, table);
    const std::size_t ul = pattern.layout().unit_len;
    const std::uint32_t* pat = pattern.expanded().data();
    const std::uint32_t* tab = table.words().data();
    const std::uint64_t total_blocks = pattern.layout().stream_blocks();

    derived_key dk;
    sha1_words h = sha1_initial_state;
    std::uint32_t w[16];
    std::uint64_t block = 0;
    std::uint64_t compressions = 0;
    std::size_t phase = 0;

    auto run_until = [&](std::uint64_t end_block) {
        for (; block < end_block; ++block) {
            detail::assemble_block(w, pat + phase, tab + block * 16);
            sha1_compress(h, w);
            ++compressions;
            phase += 16;
            if (phase >= ul) phase -= ul;
            if (phase >= ul) phase -= ul;
        }
    };

    for (std::size_t i = 0; i < kdf_iv_bytes; ++i) {
        const std::uint64_t snapshot_bytes = (std::uint64_t{iv_snapshot_unit(i)} + 1) * ul;
        run_until(snapshot_bytes / 64);
        // The snapshot usually lands mid-block: finalize a copy with the tail.
        std::uint8_t tail[64];
        detail::assemble_block(w, pat + phase, tab + block * 16);
        for (int k = 0; k < 16; ++k) store_be32(tail + 4 * k, w[k]);
        dk.iv[i] = detail::iv_byte_from_digest(
            sha1_finish(h, std::span(tail, static_cast<std::size_t>(snapshot_bytes % 64)), snapshot_bytes));
    }
    run_until(total_blocks);
    dk.key = detail::key_from_digest(sha1_finish(h, {}, pattern.layout().stream_bytes()));
    if (counters) counters->stream_compressions += compressions;
    return dk;
}

} // namespace rarcrack

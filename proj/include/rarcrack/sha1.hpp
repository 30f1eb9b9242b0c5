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

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <string_view>
#include <utility>

#include "bytes.hpp"

namespace rarcrack {

using sha1_digest = std::array<std::uint8_t, 20>;
using sha1_words = std::array<std::uint32_t, 5>;

inline constexpr sha1_words sha1_initial_state{0x67452301u, 0xEFCDAB89u, 0x98BADCFEu, 0x10325476u,
                                                0xC3D2E1F0u};

namespace detail {

template <int I>
inline std::uint32_t sha1_schedule(std::uint32_t* w) noexcept {
    if constexpr (I < 16) {
        return w[I];
    } else {
        std::uint32_t x = std::rotl(w[(I - 3) & 15] ^ w[(I - 8) & 15] ^ w[(I - 14) & 15] ^ w[I & 15], 1);
        w[I & 15] = x;
        return x;
    }
}

template <int I>
inline void sha1_round(std::uint32_t a, std::uint32_t& b, std::uint32_t c, std::uint32_t d, std::uint32_t& e,
                       std::uint32_t* w) noexcept {
    std::uint32_t f, k;
    if constexpr (I < 20) {
        f = d ^ (b & (c ^ d));
        k = 0x5A827999u;
    } else if constexpr (I < 40) {
        f = b ^ c ^ d;
        k = 0x6ED9EBA1u;
    } else if constexpr (I < 60) {
        f = (b & c) | (d & (b | c));
        k = 0x8F1BBCDCu;
    } else {
        f = b ^ c ^ d;
        k = 0xCA62C1D6u;
    }
    e += std::rotl(a, 5) + f + k + sha1_schedule<I>(w);
    b = std::rotl(b, 30);
}

// Five rounds with the working variables renamed instead of shuffled.
template <int I>
inline void sha1_five_rounds(std::uint32_t& a, std::uint32_t& b, std::uint32_t& c, std::uint32_t& d,
                             std::uint32_t& e, std::uint32_t* w) noexcept {
    sha1_round<I>(a, b, c, d, e, w);
    sha1_round<I + 1>(e, a, b, c, d, w);
    sha1_round<I + 2>(d, e, a, b, c, w);
    sha1_round<I + 3>(c, d, e, a, b, w);
    sha1_round<I + 4>(b, c, d, e, a, w);
}

template <int... G>
inline void sha1_all_rounds(std::uint32_t& a, std::uint32_t& b, std::uint32_t& c, std::uint32_t& d,
                            std::uint32_t& e, std::uint32_t* w, std::integer_sequence<int, G...>) noexcept {
    (sha1_five_rounds<G * 5>(a, b, c, d, e, w), ...);
}

} // namespace detail

/// One SHA-1 compression over a block already loaded as 16 big-endian words.
inline void sha1_compress(sha1_words& h, const std::uint32_t* block_words) noexcept {
    std::uint32_t w[16];
    for (int i = 0; i < 16; ++i) w[i] = block_words[i];
    std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4];
    detail::sha1_all_rounds(a, b, c, d, e, w, std::make_integer_sequence<int, 16>{});
    h[0] += a;
    h[1] += b;
    h[2] += c;
    h[3] += d;
    h[4] += e;
}

inline void sha1_compress_bytes(sha1_words& h, const std::uint8_t* block) noexcept {
    std::uint32_t w[16];
    for (int i = 0; i < 16; ++i) w[i] = load_be32(block + 4 * i);
    sha1_compress(h, w);
}

inline sha1_digest sha1_serialize(const sha1_words& h) noexcept {
    sha1_digest out{};
    for (int i = 0; i < 5; ++i) store_be32(out.data() + 4 * i, h[i]);
    return out;
}

/// Pads and finalizes a copy of `h` given the `pending` tail (< 64 bytes) and
/// the total message length. `h` itself is not modified.
inline sha1_words sha1_finish(sha1_words h, std::span<const std::uint8_t> pending,
                              std::uint64_t total_bytes) noexcept {
    std::uint8_t block[128] = {};
    std::memcpy(block, pending.data(), pending.size());
    block[pending.size()] = 0x80;
    std::size_t blocks = pending.size() + 1 + 8 <= 64 ? 1 : 2;
    std::uint64_t bits = total_bytes * 8;
    std::uint8_t* len = block + blocks * 64 - 8;
    store_be32(len, static_cast<std::uint32_t>(bits >> 32));
    store_be32(len + 4, static_cast<std::uint32_t>(bits));
    for (std::size_t i = 0; i < blocks; ++i) sha1_compress_bytes(h, block + 64 * i);
    return h;
}

/// Streaming SHA-1 context: chaining words, a pending block buffer, and the
/// running byte count. Copies are independent snapshots.
class sha1_state {
public:
    sha1_state() noexcept = default;

    /// Byte-at-a-time absorption with the explicit block-boundary test.
    void update(std::span<const std::uint8_t> bytes) noexcept {
        for (std::uint8_t b : bytes) {
            data_[pending_++] = b;
            if (pending_ == 64) {
                pending_ = 0;
                sha1_compress_bytes(h_, data_.data());
                ++compressions_;
            }
        }
        byte_count_ += bytes.size();
    }

    void update(std::string_view text) noexcept {
        update(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
    }

    /// Digest of everything absorbed so far; the running state is untouched.
    sha1_digest partial_digest() const noexcept { return sha1_serialize(partial_words()); }

    sha1_words partial_words() const noexcept {
        return sha1_finish(h_, std::span(data_.data(), pending_), byte_count_);
    }

    const sha1_words& words() const noexcept { return h_; }
    std::span<const std::uint8_t> pending() const noexcept { return {data_.data(), pending_}; }
    std::uint64_t byte_count() const noexcept { return byte_count_; }
    /// Block compressions performed by update() (finalization excluded).
    std::uint64_t compressions() const noexcept { return compressions_; }

    friend bool operator==(const sha1_state&, const sha1_state&) = default;

private:
    sha1_words h_ = sha1_initial_state;
    std::array<std::uint8_t, 64> data_{};
    std::size_t pending_ = 0;
    std::uint64_t byte_count_ = 0;
    std::uint64_t compressions_ = 0;
};

/// Absorbs one 64-byte block into a copy of `state`.
inline sha1_state sha1_block(sha1_state state, std::span<const std::uint8_t, 64> block) noexcept {
    state.update(block);
    return state;
}

inline sha1_digest sha1(std::span<const std::uint8_t> bytes) noexcept {
    sha1_state s;
    s.update(bytes);
    return s.partial_digest();
}

inline sha1_digest sha1(std::string_view text) noexcept {
    sha1_state s;
    s.update(text);
    return s.partial_digest();
}

} // namespace rarcrack

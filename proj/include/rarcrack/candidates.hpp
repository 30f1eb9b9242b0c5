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
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "error.hpp"
#include "kdf.hpp"
#include "text.hpp"

namespace rarcrack {

/// Named character classes shared by charsets and masks.
inline std::optional<std::u32string_view> char_class(char32_t name) noexcept {
    switch (name) {
        case U'l': return U"abcdefghijklmnopqrstuvwxyz";
        case U'u': return U"ABCDEFGHIJKLMNOPQRSTUVWXYZ";
        case U'd': return U"0123456789";
        case U's': return U" !\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~";
        default: return std::nullopt;
    }
}

namespace detail {

// Splits "?l", "??" and literal characters into one set per element.
inline std::vector<std::u32string> parse_elements(std::string_view text) {
    auto cps = decode_utf8(text);
    if (!cps) throw error(error_code::input, "not valid UTF-8: " + std::string(text));
    std::vector<std::u32string> out;
    for (std::size_t i = 0; i < cps->size(); ++i) {
        char32_t c = (*cps)[i];
        if (c > 0xFFFF) throw error(error_code::unsupported_character, "outside the basic multilingual plane");
        if (c != U'?') {
            out.emplace_back(1, c);
            continue;
        }
        if (i + 1 == cps->size()) throw error(error_code::input, "dangling '?' in " + std::string(text));
        char32_t name = (*cps)[++i];
        if (name == U'?') {
            out.emplace_back(1, U'?');
        } else if (auto cls = char_class(name)) {
            out.emplace_back(*cls);
        } else {
            throw error(error_code::input, "unknown class ?" + encode_utf8(std::u32string(1, name)));
        }
    }
    return out;
}

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    if (b != 0 && a > std::numeric_limits<std::uint64_t>::max() / b)
        throw error(error_code::range, "candidate space exceeds 2^64");
    return a * b;
}

inline void check_length(std::size_t n) {
    if (n < min_password_length || n > max_password_length)
        throw error(error_code::range, "password length " + std::to_string(n) + " outside [1, 25]");
}

} // namespace detail

/// Ordered distinct characters. Accepts literals plus ?l ?u ?d ?s and ??.
inline std::u32string parse_charset(std::string_view text) {
    std::u32string charset;
    for (const auto& element : detail::parse_elements(text)) charset += element;
    if (charset.empty()) throw error(error_code::input, "empty charset");
    std::u32string sorted = charset;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw error(error_code::input, "charset has duplicate characters");
    return charset;
}

struct dictionary_space {
    std::vector<std::string> entries;
    std::size_t skipped = 0;
};

struct brute_force_space {
    std::u32string charset;
    std::size_t length = 0;
};

struct mask_space {
    std::vector<std::u32string> positions;
};

/// An index-addressable candidate space. Immutable after construction.
class candidate_spec {
public:
    using variant_type = std::variant<dictionary_space, brute_force_space, mask_space>;

    static candidate_spec dictionary(const std::vector<std::string>& lines) {
        dictionary_space d;
        for (std::string line : lines) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (is_usable_password(line))
                d.entries.push_back(std::move(line));
            else
                ++d.skipped;
        }
        return candidate_spec(std::move(d));
    }

    static candidate_spec dictionary_file(const std::filesystem::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw error(error_code::input, "cannot read dictionary " + path.string());
        std::vector<std::string> lines;
        for (std::string line; std::getline(in, line);) lines.push_back(std::move(line));
        if (in.bad()) throw error(error_code::input, "read failed for " + path.string());
        return dictionary(lines);
    }

    static candidate_spec brute_force(std::u32string charset, std::size_t length) {
        if (charset.empty()) throw error(error_code::input, "empty charset");
        std::u32string sorted = charset;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw error(error_code::input, "charset has duplicate characters");
        if (sorted.back() > 0xFFFF) throw error(error_code::unsupported_character, "charset outside the BMP");
        detail::check_length(length);
        return candidate_spec(brute_force_space{std::move(charset), length});
    }

    static candidate_spec brute_force(std::string_view charset, std::size_t length) {
        return brute_force(parse_charset(charset), length);
    }

    static candidate_spec mask(std::string_view text) { return mask(detail::parse_elements(text)); }

    static candidate_spec mask(std::vector<std::u32string> positions) {
        detail::check_length(positions.size());
        for (const auto& p : positions)
            if (p.empty()) throw error(error_code::input, "empty mask position");
        return candidate_spec(mask_space{std::move(positions)});
    }

    static bool is_usable_password(std::string_view text) {
        auto cps = decode_utf8(text);
        if (!cps || cps->size() < min_password_length || cps->size() > max_password_length) return false;
        return std::all_of(cps->begin(), cps->end(), [](char32_t c) { return c <= 0xFFFF; });
    }

    const variant_type& space() const noexcept { return space_; }

    /// Dictionary lines rejected at load (too long, empty, bad encoding).
    std::size_t skipped() const noexcept {
        if (auto* d = std::get_if<dictionary_space>(&space_)) return d->skipped;
        return 0;
    }

    /// Fixed password length, or nullopt for dictionaries.
    std::optional<std::size_t> fixed_length() const noexcept {
        if (auto* b = std::get_if<brute_force_space>(&space_)) return b->length;
        if (auto* m = std::get_if<mask_space>(&space_)) return m->positions.size();
        return std::nullopt;
    }

private:
    explicit candidate_spec(variant_type space) : space_(std::move(space)) {}

    variant_type space_;
};

namespace detail {

// Per-position alphabets for the mixed-radix spaces.
template <class F>
decltype(auto) with_radices(const candidate_spec& spec, F&& f) {
    return std::visit(
        [&](const auto& s) -> decltype(auto) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, brute_force_space>) {
                std::vector<std::u32string_view> pos(s.length, s.charset);
                return f(pos);
            } else if constexpr (std::is_same_v<T, mask_space>) {
                std::vector<std::u32string_view> pos(s.positions.begin(), s.positions.end());
                return f(pos);
            } else {
                std::vector<std::u32string_view> none;
                return f(none);
            }
        },
        spec.space());
}

} // namespace detail

inline std::uint64_t space_size(const candidate_spec& spec) {
    if (auto* d = std::get_if<dictionary_space>(&spec.space())) return d->entries.size();
    return detail::with_radices(spec, [](const std::vector<std::u32string_view>& pos) {
        std::uint64_t n = 1;
        for (auto p : pos) n = detail::checked_mul(n, p.size());
        return n;
    });
}

/// Odometer order: the last position varies fastest.
inline std::string candidate_at(const candidate_spec& spec, std::uint64_t index) {
    if (index >= space_size(spec))
        throw error(error_code::range, "candidate index " + std::to_string(index) + " out of range");
    if (auto* d = std::get_if<dictionary_space>(&spec.space())) return d->entries[index];
    return detail::with_radices(spec, [index](const std::vector<std::u32string_view>& pos) mutable {
        std::u32string out(pos.size(), U'\0');
        for (std::size_t i = pos.size(); i-- > 0;) {
            out[i] = pos[i][index % pos[i].size()];
            index /= pos[i].size();
        }
        return encode_utf8(out);
    });
}

/// Inverse of candidate_at for brute force and mask spaces; nullopt when the
/// password is not in the space. Dictionaries return the first occurrence.
inline std::optional<std::uint64_t> index_of(const candidate_spec& spec, std::string_view password) {
    if (auto* d = std::get_if<dictionary_space>(&spec.space())) {
        auto it = std::find(d->entries.begin(), d->entries.end(), password);
        if (it == d->entries.end()) return std::nullopt;
        return static_cast<std::uint64_t>(it - d->entries.begin());
    }
    auto cps = decode_utf8(password);
    if (!cps) return std::nullopt;
    return detail::with_radices(spec, [&](const std::vector<std::u32string_view>& pos) -> std::optional<std::uint64_t> {
        if (cps->size() != pos.size()) return std::nullopt;
        std::uint64_t index = 0;
        for (std::size_t i = 0; i < pos.size(); ++i) {
            auto digit = pos[i].find((*cps)[i]);
            if (digit == std::u32string_view::npos) return std::nullopt;
            index = index * pos[i].size() + digit;
        }
        return index;
    });
}

struct batch {
    std::uint64_t start_index = 0;
    std::uint64_t count = 0;

    std::uint64_t end_index() const noexcept { return start_index + count; }
    friend bool operator==(const batch&, const batch&) = default;
};

/// Contiguous tiling of [first, space_size) into batch_size slices; only the
/// last may be short. Computed on demand, so huge spaces cost nothing.
class batch_sequence {
public:
    batch_sequence(std::uint64_t first, std::uint64_t last, std::uint64_t batch_size)
        : first_(first), last_(std::max(first, last)), batch_size_(batch_size) {
        if (batch_size == 0) throw error(error_code::range, "batch size must be at least 1");
    }

    std::uint64_t size() const noexcept { return (last_ - first_ + batch_size_ - 1) / batch_size_; }
    bool empty() const noexcept { return size() == 0; }

    batch operator[](std::uint64_t i) const noexcept {
        std::uint64_t start = first_ + i * batch_size_;
        return {start, std::min(batch_size_, last_ - start)};
    }

    class iterator {
    public:
        using value_type = batch;
        using difference_type = std::ptrdiff_t;

        iterator() = default;
        iterator(const batch_sequence* seq, std::uint64_t i) : seq_(seq), i_(i) {}
        batch operator*() const noexcept { return (*seq_)[i_]; }
        iterator& operator++() noexcept {
            ++i_;
            return *this;
        }
        iterator operator++(int) noexcept {
            auto copy = *this;
            ++i_;
            return copy;
        }
        friend bool operator==(const iterator& a, const iterator& b) noexcept { return a.i_ == b.i_; }

    private:
        const batch_sequence* seq_ = nullptr;
        std::uint64_t i_ = 0;
    };

    iterator begin() const noexcept { return {this, 0}; }
    iterator end() const noexcept { return {this, size()}; }

private:
    std::uint64_t first_;
    std::uint64_t last_;
    std::uint64_t batch_size_;
};

inline batch_sequence batches(const candidate_spec& spec, std::uint64_t batch_size, std::uint64_t start_index = 0) {
    return batch_sequence(start_index, space_size(spec), batch_size);
}

} // namespace rarcrack

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

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rarcrack {

enum class error_code {
    truncated_input,
    not_encrypted,
    corrupt_header,
    bad_format,
    range,
    unsupported_character,
    block_alignment,
    contract_violation,
    input,
    resource,
    aborted,
};

constexpr std::string_view to_string(error_code code) noexcept {
    switch (code) {
        case error_code::truncated_input: return "truncated input";
        case error_code::not_encrypted: return "archive headers are not encrypted";
        case error_code::corrupt_header: return "corrupt header";
        case error_code::bad_format: return "bad format";
        case error_code::range: return "value out of range";
        case error_code::unsupported_character: return "unsupported character";
        case error_code::block_alignment: return "length is not a multiple of the block size";
        case error_code::contract_violation: return "contract violation";
        case error_code::input: return "input error";
        case error_code::resource: return "resource exhausted";
        case error_code::aborted: return "run aborted";
    }
    return "unknown error";
}

class error : public std::runtime_error {
public:
    error(error_code code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    error_code code() const noexcept { return code_; }

private:
    error_code code_;
};

} // namespace rarcrack

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pastetrace::base64 {

std::string encode(std::span<const std::uint8_t> bytes);
std::string encode(std::string_view bytes);

struct Decoded {
    std::string bytes;
    /// False when the input was damaged (bad characters, bad length, bad padding).
    bool clean = true;
};

/// Lenient decoder: decodes as many whole groups as the input allows and
/// stops at the first character outside the alphabet.
Decoded decode(std::string_view text);

}  // namespace pastetrace::base64

#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace pastetrace::utf8 {

/// Decodes UTF-8 into scalar values. Malformed sequences become U+FFFD.
std::u32string decode(std::string_view text);

/// Encodes scalar values; surrogates and out-of-range values become U+FFFD.
std::string encode(std::u32string_view text);

/// Number of scalar values, with the same replacement rules as decode().
std::size_t length(std::string_view text);

}  // namespace pastetrace::utf8

#pragma once

// Test helpers and independent reference implementations. Nothing here calls
// into the library's own CRC, framing or editing code.

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "pastetrace/identity.hpp"
#include "pastetrace/uuid.hpp"

namespace testsupport {

class TempDir {
  public:
    explicit TempDir(const std::string& tag = "t") {
        static std::uint64_t counter = 0;
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("pastetrace_" + tag + "_" + std::to_string(rd()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

  private:
    std::filesystem::path path_;
};

inline pastetrace::Machine machine_in(const TempDir& dir, const std::string& name, pastetrace::UuidGenerator& gen) {
    return pastetrace::Machine::load(dir / name, gen);
}

// Bitwise CRC-32 (reflected 0x04C11DB7, init and xorout 0xFFFFFFFF).
inline std::uint32_t crc32_oracle(const std::vector<std::uint8_t>& data) {
    std::uint32_t crc = 0xFFFFFFFFu;
    for (auto byte : data) {
        crc ^= byte;
        for (int k = 0; k < 8; ++k) crc = (crc & 1u) ? (crc >> 1) ^ 0xEDB88320u : crc >> 1;
    }
    return crc ^ 0xFFFFFFFFu;
}

// Bitwise CRC-16/CCITT-FALSE (poly 0x1021, init 0xFFFF, no reflection).
inline std::uint16_t crc16_oracle(const std::vector<std::uint8_t>& data) {
    std::uint16_t crc = 0xFFFF;
    for (auto byte : data) {
        crc ^= static_cast<std::uint16_t>(byte << 8);
        for (int k = 0; k < 8; ++k)
            crc = (crc & 0x8000u) ? static_cast<std::uint16_t>((crc << 1) ^ 0x1021u) : static_cast<std::uint16_t>(crc << 1);
    }
    return crc;
}

inline void push_bits(std::vector<std::uint8_t>& bits, std::uint32_t value, int width) {
    for (int i = width - 1; i >= 0; --i) bits.push_back(static_cast<std::uint8_t>((value >> i) & 1u));
}

// Frame layout written out by hand: sync, length, payload, CRC over length+payload.
inline std::vector<std::uint8_t> frame_oracle(const std::vector<std::uint8_t>& payload) {
    std::vector<std::uint8_t> bits;
    push_bits(bits, 0xB7A5, 16);
    push_bits(bits, static_cast<std::uint32_t>(payload.size()), 8);
    for (auto b : payload) push_bits(bits, b, 8);
    std::vector<std::uint8_t> covered{static_cast<std::uint8_t>(payload.size())};
    covered.insert(covered.end(), payload.begin(), payload.end());
    push_bits(bits, crc16_oracle(covered), 16);
    return bits;
}

// Minimal UTF-8 to code points, valid input only.
inline std::u32string to_u32(const std::string& s) {
    std::u32string out;
    for (std::size_t i = 0; i < s.size();) {
        const auto c = static_cast<unsigned char>(s[i]);
        int n = c < 0x80 ? 1 : c < 0xE0 ? 2 : c < 0xF0 ? 3 : 4;
        char32_t cp = n == 1 ? c : n == 2 ? (c & 0x1F) : n == 3 ? (c & 0x0F) : (c & 0x07);
        for (int k = 1; k < n; ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
        out.push_back(cp);
        i += n;
    }
    return out;
}

inline std::string to_u8(const std::u32string& s) {
    std::string out;
    for (char32_t cp : s) {
        if (cp < 0x80) {
            out += static_cast<char>(cp);
        } else if (cp < 0x800) {
            out += static_cast<char>(0xC0 | (cp >> 6));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else if (cp < 0x10000) {
            out += static_cast<char>(0xE0 | (cp >> 12));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else {
            out += static_cast<char>(0xF0 | (cp >> 18));
            out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        }
    }
    return out;
}

// Random text mixing ASCII code with a few multi-byte scalars. Never emits U+200B.
inline std::string random_text(std::mt19937_64& rng, std::size_t scalars, bool newlines = true) {
    static const std::array<char32_t, 8> exotic{U'é', U'λ', U'中', U'\U0001F600', U'ß', U'\t', U'{', U'}'};
    std::u32string out;
    for (std::size_t i = 0; i < scalars; ++i) {
        const auto r = rng() % 100;
        if (newlines && r < 6) out.push_back(U'\n');
        else if (r < 10) out.push_back(exotic[rng() % exotic.size()]);
        else out.push_back(static_cast<char32_t>(' ' + rng() % 95));
    }
    return to_u8(out);
}

}  // namespace testsupport

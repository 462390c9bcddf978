#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pastetrace/events.hpp"
#include "pastetrace/uuid.hpp"

namespace pastetrace::stego {

inline constexpr char32_t kZwsp = 0x200B;
inline constexpr std::uint16_t kSync = 0xB7A5;
/// sync(16) + len(8) + crc(16)
inline constexpr std::size_t kFrameOverheadBits = 40;
inline constexpr std::size_t kInstallOnlyPayload = 16;
inline constexpr std::size_t kWithProjectPayload = 32;
inline constexpr std::size_t kMaxPayload = 255;
/// Bits of the smallest frame (install id only): 168.
inline constexpr std::size_t kMinFrameBits = kFrameOverheadBits + 8 * kInstallOnlyPayload;
/// A richer tier is only used when it still fits this many times.
inline constexpr std::size_t kPreferredCopies = 2;

/// Identifier snapshot of one InfectionStack entry carried in a watermark.
struct StackTailItem {
    InfectionKind kind = InfectionKind::MachineChange;
    std::optional<InstallId> install_id;
    std::optional<ProjectId> project_id;

    friend bool operator==(const StackTailItem&, const StackTailItem&) = default;
};

/// Provenance carried by copied text. Only install_id is guaranteed.
struct StegoRecord {
    InstallId install_id;
    std::optional<ProjectId> project_id;
    std::vector<StackTailItem> stack_tail;

    friend bool operator==(const StegoRecord&, const StegoRecord&) = default;
};

StackTailItem tail_item(const InfectionEntry& entry);

/// Record payload bytes as laid out inside a frame.
std::vector<std::uint8_t> encode_record(const StegoRecord& record);
std::optional<StegoRecord> decode_record(std::span<const std::uint8_t> payload);

/// Full frame bitstream (MSB first): sync, len, payload, CRC-16/CCITT-FALSE over len+payload.
std::vector<std::uint8_t> frame_bits(const StegoRecord& record);

/// Picks the record actually embedded for a channel of the given capacity, or
/// nullopt when not even the smallest frame fits.
std::optional<StegoRecord> select_tier(const StegoRecord& record, std::size_t capacity_bits);

/// Inter-character gaps of the visible (non-U+200B) scalars.
std::size_t capacity(std::string_view visible_text);
std::size_t capacity(std::u32string_view visible_text);

std::string embed(std::string_view visible_text, const StegoRecord& record);
std::u32string embed(std::u32string_view visible_text, const StegoRecord& record);

/// Gap channel of a (possibly watermarked) text: bit i is 1 iff a U+200B sits
/// between visible scalars i and i+1.
std::vector<std::uint8_t> gap_bits(std::u32string_view text);

enum class Verdict { Decoded, None };

struct Extraction {
    std::vector<StegoRecord> records;  // unique, in order of first occurrence
    Verdict verdict = Verdict::None;
};

/// Frame scan over every bit offset. The OpenMP version splits offsets across
/// threads; extract_serial is the reference it is tested against.
Extraction extract(std::string_view text);
Extraction extract(std::u32string_view text);
Extraction extract_bits(std::span<const std::uint8_t> bits);
Extraction extract_bits_serial(std::span<const std::uint8_t> bits);
Extraction extract_serial(std::string_view text);

std::string strip_zwsp(std::string_view text);
std::u32string strip_zwsp(std::u32string_view text);

}  // namespace pastetrace::stego

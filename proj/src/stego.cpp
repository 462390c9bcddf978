#include "pastetrace/stego.hpp"

#include <algorithm>
#include <boost/crc.hpp>

#include "pastetrace/utf8.hpp"

namespace pastetrace::stego {

namespace {

constexpr std::uint8_t kHasInstall = 0x01;
constexpr std::uint8_t kHasProject = 0x02;

void append_uuid(std::vector<std::uint8_t>& out, const Uuid& id) {
    out.insert(out.end(), id.bytes().begin(), id.bytes().end());
}

Uuid read_uuid(std::span<const std::uint8_t> bytes, std::size_t at) {
    Uuid::Bytes b{};
    std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(at), 16, b.begin());
    return Uuid(b);
}

void push_bits(std::vector<std::uint8_t>& bits, std::uint32_t value, int count) {
    for (int i = count - 1; i >= 0; --i) bits.push_back(static_cast<std::uint8_t>((value >> i) & 1u));
}

std::size_t item_size(const StackTailItem& item) {
    return 2 + (item.install_id ? 16 : 0) + (item.project_id ? 16 : 0);
}

std::size_t frame_length(std::size_t payload_bytes) { return kFrameOverheadBits + 8 * payload_bytes; }

}  // namespace

StackTailItem tail_item(const InfectionEntry& entry) { return {entry.kind, entry.install_id, entry.project_id}; }

std::vector<std::uint8_t> encode_record(const StegoRecord& record) {
    std::vector<std::uint8_t> out;
    append_uuid(out, record.install_id.uuid());
    if (!record.project_id) return out;
    append_uuid(out, record.project_id->uuid());
    for (const auto& item : record.stack_tail) {
        out.push_back(static_cast<std::uint8_t>(item.kind));
        out.push_back(static_cast<std::uint8_t>((item.install_id ? kHasInstall : 0) |
                                                (item.project_id ? kHasProject : 0)));
        if (item.install_id) append_uuid(out, item.install_id->uuid());
        if (item.project_id) append_uuid(out, item.project_id->uuid());
    }
    return out;
}

std::optional<StegoRecord> decode_record(std::span<const std::uint8_t> payload) {
    if (payload.size() != kInstallOnlyPayload && payload.size() < kWithProjectPayload) return std::nullopt;
    StegoRecord record;
    record.install_id = InstallId(read_uuid(payload, 0));
    if (payload.size() == kInstallOnlyPayload) return record;
    record.project_id = ProjectId(read_uuid(payload, 16));
    std::size_t at = kWithProjectPayload;
    while (at < payload.size()) {
        if (payload.size() - at < 2) return std::nullopt;
        const std::uint8_t kind = payload[at];
        const std::uint8_t flags = payload[at + 1];
        if (kind > static_cast<std::uint8_t>(InfectionKind::PasteExternal) || (flags & ~(kHasInstall | kHasProject)))
            return std::nullopt;
        at += 2;
        StackTailItem item;
        item.kind = static_cast<InfectionKind>(kind);
        if (flags & kHasInstall) {
            if (payload.size() - at < 16) return std::nullopt;
            item.install_id = InstallId(read_uuid(payload, at));
            at += 16;
        }
        if (flags & kHasProject) {
            if (payload.size() - at < 16) return std::nullopt;
            item.project_id = ProjectId(read_uuid(payload, at));
            at += 16;
        }
        record.stack_tail.push_back(std::move(item));
    }
    return record;
}

std::vector<std::uint8_t> frame_bits(const StegoRecord& record) {
    const auto payload = encode_record(record);
    boost::crc_ccitt_type crc;
    const auto len = static_cast<std::uint8_t>(payload.size());
    crc.process_byte(len);
    crc.process_bytes(payload.data(), payload.size());

    std::vector<std::uint8_t> bits;
    bits.reserve(frame_length(payload.size()));
    push_bits(bits, kSync, 16);
    push_bits(bits, len, 8);
    for (auto b : payload) push_bits(bits, b, 8);
    push_bits(bits, crc.checksum(), 16);
    return bits;
}

std::optional<StegoRecord> select_tier(const StegoRecord& record, std::size_t capacity_bits) {
    std::vector<StegoRecord> candidates;  // richest first
    if (record.project_id) {
        const auto& tail = record.stack_tail;
        std::size_t bytes = kWithProjectPayload;
        std::size_t fitting = 0;
        for (auto it = tail.rbegin(); it != tail.rend(); ++it) {
            if (bytes + item_size(*it) > kMaxPayload) break;
            bytes += item_size(*it);
            ++fitting;
        }
        for (std::size_t k = fitting; k >= 1; --k) {
            StegoRecord r{record.install_id, record.project_id, {}};
            r.stack_tail.assign(tail.end() - static_cast<std::ptrdiff_t>(k), tail.end());
            candidates.push_back(std::move(r));
        }
        candidates.push_back({record.install_id, record.project_id, {}});
    }
    StegoRecord minimal{record.install_id, std::nullopt, {}};
    for (const auto& c : candidates)
        if (kPreferredCopies * frame_length(encode_record(c).size()) <= capacity_bits) return c;
    if (kMinFrameBits <= capacity_bits) return minimal;
    return std::nullopt;
}

std::size_t capacity(std::u32string_view visible_text) {
    auto n = static_cast<std::size_t>(std::count_if(visible_text.begin(), visible_text.end(),
                                                    [](char32_t c) { return c != kZwsp; }));
    return n <= 1 ? 0 : n - 1;
}

std::size_t capacity(std::string_view visible_text) { return capacity(utf8::decode(visible_text)); }

std::u32string embed(std::u32string_view visible_text, const StegoRecord& record) {
    std::u32string visible = strip_zwsp(visible_text);
    const std::size_t cap = capacity(visible);
    auto chosen = select_tier(record, cap);
    if (!chosen) return visible;

    const auto frame = frame_bits(*chosen);
    std::u32string out;
    out.reserve(visible.size() + cap);
    for (std::size_t i = 0; i < visible.size(); ++i) {
        out.push_back(visible[i]);
        // Frames repeat back to back; the tail holds a truncated copy.
        if (i < cap && frame[i % frame.size()]) out.push_back(kZwsp);
    }
    return out;
}

std::string embed(std::string_view visible_text, const StegoRecord& record) {
    return utf8::encode(embed(utf8::decode(visible_text), record));
}

std::vector<std::uint8_t> gap_bits(std::u32string_view text) {
    std::vector<std::uint8_t> bits;
    bits.reserve(text.size());
    bool seen_visible = false;
    bool zwsp_pending = false;
    for (char32_t c : text) {
        if (c == kZwsp) {
            zwsp_pending = true;
            continue;
        }
        if (seen_visible) bits.push_back(zwsp_pending ? 1 : 0);
        seen_visible = true;
        zwsp_pending = false;
    }
    return bits;
}

Extraction extract(std::u32string_view text) { return extract_bits(gap_bits(text)); }
Extraction extract(std::string_view text) { return extract(utf8::decode(text)); }
Extraction extract_serial(std::string_view text) { return extract_bits_serial(gap_bits(utf8::decode(text))); }

std::u32string strip_zwsp(std::u32string_view text) {
    std::u32string out;
    out.reserve(text.size());
    std::copy_if(text.begin(), text.end(), std::back_inserter(out), [](char32_t c) { return c != kZwsp; });
    return out;
}

std::string strip_zwsp(std::string_view text) {
    constexpr std::string_view zwsp = "\xE2\x80\x8B";
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size();) {
        if (text.substr(i, zwsp.size()) == zwsp) {
            i += zwsp.size();
        } else {
            out.push_back(text[i++]);
        }
    }
    return out;
}

}  // namespace pastetrace::stego

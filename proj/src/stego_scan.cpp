// Frame scanning kernels: a serial reference and an OpenMP version.
#include <algorithm>
#include <boost/crc.hpp>
#include <omp.h>

#include "pastetrace/stego.hpp"

namespace pastetrace::stego {

namespace {

struct Hit {
    std::size_t offset;
    StegoRecord record;
};

std::uint32_t read_bits(std::span<const std::uint8_t> bits, std::size_t at, int count) {
    std::uint32_t v = 0;
    for (int i = 0; i < count; ++i) v = (v << 1) | bits[at + static_cast<std::size_t>(i)];
    return v;
}

std::optional<StegoRecord> frame_at(std::span<const std::uint8_t> bits, std::size_t offset) {
    if (read_bits(bits, offset, 16) != kSync) return std::nullopt;
    const auto len = read_bits(bits, offset + 16, 8);
    const std::size_t total = kFrameOverheadBits + 8 * len;
    if (offset + total > bits.size()) return std::nullopt;

    std::vector<std::uint8_t> payload(len);
    for (std::size_t i = 0; i < len; ++i)
        payload[i] = static_cast<std::uint8_t>(read_bits(bits, offset + 24 + 8 * i, 8));
    boost::crc_ccitt_type crc;
    crc.process_byte(static_cast<unsigned char>(len));
    crc.process_bytes(payload.data(), payload.size());
    if (crc.checksum() != read_bits(bits, offset + 24 + 8 * len, 16)) return std::nullopt;
    return decode_record(payload);
}

Extraction collect(std::vector<Hit> hits) {
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.offset < b.offset; });
    Extraction out;
    for (auto& hit : hits)
        if (std::find(out.records.begin(), out.records.end(), hit.record) == out.records.end())
            out.records.push_back(std::move(hit.record));
    out.verdict = out.records.empty() ? Verdict::None : Verdict::Decoded;
    return out;
}

}  // namespace

Extraction extract_bits_serial(std::span<const std::uint8_t> bits) {
    std::vector<Hit> hits;
    if (bits.size() >= kMinFrameBits) {
        for (std::size_t offset = 0; offset + kMinFrameBits <= bits.size(); ++offset)
            if (auto r = frame_at(bits, offset)) hits.push_back({offset, std::move(*r)});
    }
    return collect(std::move(hits));
}

Extraction extract_bits(std::span<const std::uint8_t> bits) {
    if (bits.size() < kMinFrameBits) return {};
    const auto last = static_cast<std::ptrdiff_t>(bits.size() - kMinFrameBits);
    std::vector<Hit> hits;
#pragma omp parallel
    {
        std::vector<Hit> local;
#pragma omp for schedule(static) nowait
        for (std::ptrdiff_t offset = 0; offset <= last; ++offset)
            if (auto r = frame_at(bits, static_cast<std::size_t>(offset)))
                local.push_back({static_cast<std::size_t>(offset), std::move(*r)});
#pragma omp critical
        hits.insert(hits.end(), std::make_move_iterator(local.begin()), std::make_move_iterator(local.end()));
    }
    return collect(std::move(hits));
}

}  // namespace pastetrace::stego

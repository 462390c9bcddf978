#include <cstdlib>

#include "pastetrace/errors.hpp"
#include "pastetrace/session.hpp"
#include "pastetrace/utf8.hpp"

namespace pastetrace {

namespace {

void apply(std::u32string& buffer, const EditEvent& e) {
    const std::u32string text = utf8::decode(e.text);
    auto require = [&](bool ok, const char* what) {
        if (!ok) throw ReplayError(e.seq, what);
    };
    switch (e.kind) {
        case EventKind::Open:
            require(e.offset == 0, "open event with non-zero offset");
            buffer = text;
            break;
        case EventKind::Insert:
        case EventKind::Paste:
            require(e.offset <= buffer.size(), "offset out of bounds");
            buffer.insert(e.offset, text);
            break;
        case EventKind::Delete:
        case EventKind::Cut:
            require(e.offset <= buffer.size() && text.size() <= buffer.size() - e.offset, "range out of bounds");
            require(buffer.compare(e.offset, text.size(), text) == 0, "removed text does not match buffer");
            buffer.erase(e.offset, text.size());
            break;
        case EventKind::Copy:
            require(e.offset <= buffer.size() && text.size() <= buffer.size() - e.offset, "range out of bounds");
            require(buffer.compare(e.offset, text.size(), text) == 0, "copied text does not match buffer");
            break;
    }
}

void check_order(const EditEvent& e, std::size_t index) {
    if (e.seq != index) throw ReplayError(e.seq, "expected seq " + std::to_string(index));
}

}  // namespace

std::string replay(std::span<const EditEvent> events) {
    std::u32string buffer;
    for (std::size_t i = 0; i < events.size(); ++i) {
        check_order(events[i], i);
        apply(buffer, events[i]);
    }
    return utf8::encode(buffer);
}

std::vector<std::string> replay_snapshots(std::span<const EditEvent> events) {
    std::vector<std::string> snapshots;
    snapshots.reserve(events.size());
    std::u32string buffer;
    for (std::size_t i = 0; i < events.size(); ++i) {
        check_order(events[i], i);
        apply(buffer, events[i]);
        snapshots.push_back(utf8::encode(buffer));
    }
    return snapshots;
}

LinearityCounts typing_linearity_counts(std::span<const EditEvent> events) {
    LinearityCounts counts;
    std::optional<std::uint64_t> cursor;
    for (const auto& e : events) {
        if (e.kind != EventKind::Insert && e.kind != EventKind::Paste) continue;
        const std::uint64_t n = utf8::length(e.text);
        if (e.kind == EventKind::Insert) {
            ++counts.inserts;
            const bool adjacent =
                !cursor || (e.offset >= *cursor ? e.offset - *cursor : *cursor - e.offset) <= 1;
            if (n == 1 && adjacent) ++counts.linear;
        }
        cursor = e.offset + n;
    }
    return counts;
}

std::optional<double> typing_linearity(std::span<const EditEvent> events) {
    auto counts = typing_linearity_counts(events);
    if (counts.inserts == 0) return std::nullopt;
    return static_cast<double>(counts.linear) / static_cast<double>(counts.inserts);
}

std::pair<std::uint64_t, std::uint64_t> line_col(std::u32string_view text, std::uint64_t offset) {
    std::uint64_t line = 1, col = 1;
    for (std::uint64_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == U'\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace pastetrace

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pastetrace/events.hpp"
#include "pastetrace/identity.hpp"
#include "pastetrace/metacomment.hpp"
#include "pastetrace/stego.hpp"

namespace pastetrace {

/// Millisecond wall clock. Scenario scripts inject a ManualClock.
using Clock = std::function<std::int64_t()>;

Clock system_clock();

class ManualClock {
  public:
    explicit ManualClock(std::int64_t start = 0) : now_(start) {}

    void set(std::int64_t ms) { now_ = ms; }
    void advance(std::int64_t ms) { now_ += ms; }
    [[nodiscard]] std::int64_t now() const { return now_; }

    /// Clock bound to this object; the ManualClock must outlive it.
    Clock bind() {
        return [this] { return now_; };
    }

  private:
    std::int64_t now_;
};

struct ClipboardPayload {
    std::string text;        // visible text with the embedded watermark
    std::string source_tag;  // diagnostics only; paste never looks at it
};

/// Headless editing session on one file. Every mutation is logged so that
/// replay(events()) reproduces the buffer after each call.
class Session {
  public:
    /// Opens an existing file (or any plain text) on the given machine.
    static Session open(const Machine& machine, std::string_view file_text, Clock clock);
    static Session open(const Machine& machine, std::string_view file_text, Clock clock, UuidGenerator& gen);

    /// Starts an empty buffer for a freshly created project.
    static Session create(const Machine& machine, const Project& project, Clock clock);

    void type_text(std::uint64_t offset, std::string_view text);
    void delete_text(std::uint64_t offset, std::uint64_t length);
    ClipboardPayload copy(std::uint64_t start, std::uint64_t end);
    ClipboardPayload cut(std::uint64_t start, std::uint64_t end);
    void paste(const ClipboardPayload& payload, std::uint64_t offset);

    [[nodiscard]] std::string save() const;

    [[nodiscard]] std::string buffer() const;
    [[nodiscard]] std::uint64_t length() const { return buffer_.size(); }
    [[nodiscard]] const MetaComment& meta() const { return meta_; }
    [[nodiscard]] const std::vector<EditEvent>& events() const { return meta_.events; }
    [[nodiscard]] const std::vector<std::string>& warnings() const { return warnings_; }
    [[nodiscard]] const InstallId& machine_id() const { return machine_id_; }

    /// Record embedded into copies from this session.
    [[nodiscard]] stego::StegoRecord watermark_record() const;

    /// Origin of a clipboard text as seen from this session.
    [[nodiscard]] PasteOrigin classify_origin(std::string_view clipboard_text) const;

  private:
    Session(InstallId machine_id, MetaComment meta, std::u32string buffer, Clock clock);

    EditEvent& log(EventKind kind, std::uint64_t offset, std::u32string_view text);
    void check_range(std::uint64_t start, std::uint64_t end) const;

    InstallId machine_id_;
    MetaComment meta_;
    std::u32string buffer_;
    Clock clock_;
    std::vector<std::string> warnings_;
};

/// Applies a log from the empty buffer. Throws ReplayError at the first
/// inconsistent event.
std::string replay(std::span<const EditEvent> events);

/// Buffer after each event, index-aligned with events.
std::vector<std::string> replay_snapshots(std::span<const EditEvent> events);

/// Share of typed (non-paste) inserts that are single characters placed at or
/// next to the previous insertion point. nullopt when there are no inserts.
std::optional<double> typing_linearity(std::span<const EditEvent> events);

struct LinearityCounts {
    std::size_t linear = 0;
    std::size_t inserts = 0;
};
LinearityCounts typing_linearity_counts(std::span<const EditEvent> events);

/// 1-based line and column of a scalar offset, for display.
std::pair<std::uint64_t, std::uint64_t> line_col(std::u32string_view text, std::uint64_t offset);

}  // namespace pastetrace

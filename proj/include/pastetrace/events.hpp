#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "pastetrace/uuid.hpp"

namespace pastetrace {

enum class EventKind { Open, Insert, Delete, Copy, Cut, Paste };

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view text);

/// Where pasted text came from, derived only from the decoded watermark.
struct PasteOrigin {
    enum class Kind { Internal, SameMachine, Foreign, External };

    Kind kind = Kind::External;
    std::optional<InstallId> install_id;  // Foreign only
    std::optional<ProjectId> project_id;  // SameMachine, and Foreign when the record carried one

    static PasteOrigin internal() { return {Kind::Internal, std::nullopt, std::nullopt}; }
    static PasteOrigin external() { return {Kind::External, std::nullopt, std::nullopt}; }
    static PasteOrigin same_machine(ProjectId p) { return {Kind::SameMachine, std::nullopt, p}; }
    static PasteOrigin foreign(InstallId i, std::optional<ProjectId> p) { return {Kind::Foreign, i, p}; }

    friend bool operator==(const PasteOrigin&, const PasteOrigin&) = default;
};

std::string_view to_string(PasteOrigin::Kind kind);
std::optional<PasteOrigin::Kind> parse_origin_kind(std::string_view text);

/// One logged buffer mutation or clipboard action. Offsets count Unicode scalars.
struct EditEvent {
    std::uint64_t seq = 0;
    std::int64_t timestamp = 0;  // ms since epoch
    EventKind kind = EventKind::Insert;
    std::uint64_t offset = 0;
    std::string text;  // UTF-8; for Open the full initial buffer
    std::optional<PasteOrigin> origin;
    std::optional<std::uint32_t> line_count;

    friend bool operator==(const EditEvent&, const EditEvent&) = default;
};

enum class InfectionKind { MachineChange, PasteForeign, PasteSameMachine, PasteExternal };

std::string_view to_string(InfectionKind kind);
std::optional<InfectionKind> parse_infection_kind(std::string_view text);

struct InfectionEntry {
    InfectionKind kind = InfectionKind::MachineChange;
    std::optional<InstallId> install_id;
    std::optional<ProjectId> project_id;
    std::uint64_t event_seq = 0;
    std::int64_t timestamp = 0;

    friend bool operator==(const InfectionEntry&, const InfectionEntry&) = default;
};

/// Number of lines in pasted text: one plus the number of LF characters.
std::uint32_t count_lines(std::string_view text);

}  // namespace pastetrace

#include "pastetrace/events.hpp"

#include <algorithm>
#include <array>
#include <utility>

namespace pastetrace {

namespace {

template <typename E, std::size_t N>
std::optional<E> lookup(const std::array<std::pair<E, std::string_view>, N>& table, std::string_view text) {
    for (const auto& [value, name] : table)
        if (name == text) return value;
    return std::nullopt;
}

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E value) {
    for (const auto& [v, name] : table)
        if (v == value) return name;
    return "unknown";
}

constexpr std::array<std::pair<EventKind, std::string_view>, 6> kEventNames{{
    {EventKind::Open, "open"},
    {EventKind::Insert, "insert"},
    {EventKind::Delete, "delete"},
    {EventKind::Copy, "copy"},
    {EventKind::Cut, "cut"},
    {EventKind::Paste, "paste"},
}};

constexpr std::array<std::pair<PasteOrigin::Kind, std::string_view>, 4> kOriginNames{{
    {PasteOrigin::Kind::Internal, "internal"},
    {PasteOrigin::Kind::SameMachine, "same_machine"},
    {PasteOrigin::Kind::Foreign, "foreign"},
    {PasteOrigin::Kind::External, "external"},
}};

constexpr std::array<std::pair<InfectionKind, std::string_view>, 4> kInfectionNames{{
    {InfectionKind::MachineChange, "machine_change"},
    {InfectionKind::PasteForeign, "paste_foreign"},
    {InfectionKind::PasteSameMachine, "paste_same_machine"},
    {InfectionKind::PasteExternal, "paste_external"},
}};

}  // namespace

std::string_view to_string(EventKind kind) { return name_of(kEventNames, kind); }
std::optional<EventKind> parse_event_kind(std::string_view text) { return lookup(kEventNames, text); }

std::string_view to_string(PasteOrigin::Kind kind) { return name_of(kOriginNames, kind); }
std::optional<PasteOrigin::Kind> parse_origin_kind(std::string_view text) { return lookup(kOriginNames, text); }

std::string_view to_string(InfectionKind kind) { return name_of(kInfectionNames, kind); }
std::optional<InfectionKind> parse_infection_kind(std::string_view text) { return lookup(kInfectionNames, text); }

std::uint32_t count_lines(std::string_view text) {
    return 1 + static_cast<std::uint32_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace pastetrace

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pastetrace/events.hpp"
#include "pastetrace/uuid.hpp"

namespace pastetrace {

inline constexpr int kFormatVersion = 1;
inline constexpr std::string_view kMarkerOpen = "/*@PASTETRACE1 ";
inline constexpr std::string_view kMarkerClose = " @*/";

/// The hidden per-file record: identities, provenance trail and the full edit log.
struct MetaComment {
    int format_version = kFormatVersion;
    InstallId install_id;
    ProjectId project_id;
    std::vector<InfectionEntry> infection_stack;
    std::vector<EditEvent> events;

    friend bool operator==(const MetaComment&, const MetaComment&) = default;
};

struct ParsedFile {
    std::string body;
    std::optional<MetaComment> meta;
    std::vector<std::string> diagnostics;
};

/// Canonical payload bytes (compact JSON with sorted keys) before base64.
std::string serialize_payload(const MetaComment& meta);

/// Appends the marker line to body. Deterministic and total.
std::string render(const MetaComment& meta, std::string_view body);

/// Splits a file into body and metadata. Damaged payloads are salvaged as far
/// as their records verify; nothing here throws on bad input.
ParsedFile parse(std::string_view file_text);

/// Removes every marker line and every U+200B. Idempotent.
std::string strip(std::string_view file_text);

}  // namespace pastetrace

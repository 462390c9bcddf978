#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pastetrace/uuid.hpp"

namespace pastetrace {

inline constexpr std::string_view kReportSchema = "pastetrace-report";
inline constexpr int kReportVersion = 1;

enum class PasteCategory { ForeignTurnedIn, SameMachineOtherProject, UnassociatedMachine, External };
enum class IgnoreReason { Internal, TooShort };

std::string_view to_string(PasteCategory c);
std::string_view to_string(IgnoreReason r);

enum class Verdict { PlagiarismDetected, LikelyPlagiarized, NoPlagiarismDetected, NoMetacomment };

std::string_view to_string(Verdict v);
std::optional<Verdict> parse_verdict(std::string_view text);
/// Human label, e.g. "Plagiarism Detected".
std::string_view label(Verdict v);

enum class FindingKind {
    Paste,                   // a categorized paste event
    OpenExternal,            // file content that entered through an open without metaComment
    FileShared,              // same ProjectId turned in by several students
    HistoryDestroyingPaste,  // large internal paste
    CollaborationSignal,     // mutual pastes with overlapping activity; review only
    NoMetacomment,
};

std::string_view to_string(FindingKind k);

struct Finding {
    FindingKind kind = FindingKind::Paste;
    bool flagged = false;
    std::optional<PasteCategory> category;
    std::string file;
    std::optional<std::uint64_t> seq;
    std::optional<std::int64_t> timestamp;
    std::optional<std::uint32_t> line_count;
    std::string excerpt;  // complete pasted code
    std::optional<InstallId> origin_install;
    std::optional<ProjectId> origin_project;
    std::vector<std::string> related_students;
    std::optional<std::uint64_t> edits_after;

    friend bool operator==(const Finding&, const Finding&) = default;
};

struct FileSummary {
    std::string path;
    bool has_metacomment = false;
    std::optional<InstallId> install_id;
    std::optional<ProjectId> project_id;
    std::uint64_t event_count = 0;
    std::uint64_t infection_entries = 0;
    std::vector<std::string> diagnostics;

    friend bool operator==(const FileSummary&, const FileSummary&) = default;
};

struct SubmissionReport {
    std::string student;
    Verdict verdict = Verdict::NoPlagiarismDetected;
    std::vector<FileSummary> files;
    std::vector<Finding> findings;
    std::optional<std::uint64_t> edits_after_last_flag;
    std::optional<double> linearity;
    /// Every classified paste, keyed by category or ignore reason.
    std::map<std::string, std::uint64_t> paste_counts;
    std::vector<std::string> diagnostics;

    [[nodiscard]] bool flagged() const { return verdict != Verdict::NoPlagiarismDetected; }

    friend bool operator==(const SubmissionReport&, const SubmissionReport&) = default;
};

struct FileShare {
    ProjectId project_id;
    std::vector<std::string> students;

    friend bool operator==(const FileShare&, const FileShare&) = default;
};

struct Report {
    int version = kReportVersion;
    std::vector<SubmissionReport> submissions;
    std::vector<InstallId> shared_machines;
    std::vector<FileShare> file_shares;

    [[nodiscard]] const SubmissionReport* find(std::string_view student) const;

    friend bool operator==(const Report&, const Report&) = default;
};

enum class ReportFormat { Structured, Human };

inline constexpr std::size_t kHumanExcerptLines = 200;

std::string render_report(const Report& report, ReportFormat format);

/// Parses a structured report; throws ValidationError on schema or version mismatch.
Report parse_report(std::string_view structured);

/// "Plagiarism Detected, 35 Edits" style cell.
std::string automated_check_output(const SubmissionReport& s);
/// Short description of what the metaComment shows.
std::string visible_summary(const SubmissionReport& s);

}  // namespace pastetrace

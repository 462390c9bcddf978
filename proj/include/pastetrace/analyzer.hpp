#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pastetrace/metacomment.hpp"
#include "pastetrace/report.hpp"

namespace pastetrace {

struct SourceFile {
    std::string path;  // relative to the student's directory
    std::string body;
    std::optional<MetaComment> meta;
    std::vector<std::string> diagnostics;
};

struct Submission {
    std::string student;
    std::vector<SourceFile> files;
    std::vector<std::string> diagnostics;
};

using Cohort = std::vector<Submission>;

/// One subdirectory per student; every regular non-hidden file is parsed.
/// Files are parsed in parallel; the result does not depend on thread count.
Cohort ingest(const std::filesystem::path& dir);
Cohort ingest_serial(const std::filesystem::path& dir);

/// One InstallId per line; blank lines and '#' comments ignored.
std::set<InstallId> parse_known_machines(std::string_view text);

/// Paste whose origin resolves to a node of the graph.
struct PasteEdge {
    std::string student;
    std::size_t file_index = 0;
    std::uint64_t seq = 0;
    PasteOrigin origin;
    std::set<std::string> origin_students;
};

struct InfectionEdge {
    std::string student;
    std::size_t file_index = 0;
    InfectionEntry entry;
};

class SubmissionGraph {
  public:
    std::map<ProjectId, std::set<std::string>> project_owners;
    std::map<InstallId, std::set<std::string>> machine_users;
    std::map<std::string, std::set<InstallId>> machines_of;
    std::map<std::string, std::set<ProjectId>> projects_of;
    std::set<InstallId> known_machines;
    std::vector<FileShare> file_shares;
    std::vector<InfectionEdge> infected_by;
    std::vector<PasteEdge> pasted_from;

    /// Used by two or more students, or listed as a known shared machine.
    [[nodiscard]] bool is_shared(const InstallId& id) const;
    [[nodiscard]] std::set<std::string> other_owners(const ProjectId& id, const std::string& student) const;
    [[nodiscard]] std::set<std::string> other_users(const InstallId& id, const std::string& student) const;
    [[nodiscard]] std::vector<InstallId> shared_machines() const;
};

SubmissionGraph build_graph(const Cohort& cohort, const std::set<InstallId>& known_machines = {});

/// Machine a file was on when the event with this seq happened.
InstallId machine_at(const MetaComment& meta, std::uint64_t seq);

inline constexpr std::uint32_t kExternalLineThreshold = 3;
inline constexpr std::uint32_t kUnassociatedLineThreshold = 20;
inline constexpr std::uint32_t kSameMachineLineThreshold = 50;

struct PasteClassification {
    std::optional<PasteCategory> category;
    std::optional<IgnoreReason> ignored;
    bool flagged = false;
    /// Internal paste above the same-machine threshold; drives the "likely" tier.
    bool history_destroying = false;
    std::set<std::string> related_students;
};

PasteClassification classify_paste(const EditEvent& event, const Submission& submission, std::size_t file_index,
                                   const SubmissionGraph& graph);

Report analyze(const Cohort& cohort, const SubmissionGraph& graph);

}  // namespace pastetrace

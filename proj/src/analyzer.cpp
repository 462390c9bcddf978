#include "pastetrace/analyzer.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <tuple>
#include <sstream>

#include "pastetrace/errors.hpp"
#include "pastetrace/session.hpp"
#include "pastetrace/stego.hpp"
#include "pastetrace/utf8.hpp"

namespace pastetrace {

namespace fs = std::filesystem;

namespace {

struct FileTask {
    std::size_t submission;
    fs::path path;
    std::string relative;
};

bool hidden(const fs::path& p) {
    const auto name = p.filename().string();
    return !name.empty() && name.front() == '.';
}

// Lists students and their files in a stable order; parsing happens later.
std::pair<Cohort, std::vector<FileTask>> scan(const fs::path& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw Error("cannot read submissions directory " + dir.string());

    std::vector<fs::path> students;
    for (const auto& entry : fs::directory_iterator(dir, ec))
        if (entry.is_directory() && !hidden(entry.path())) students.push_back(entry.path());
    if (ec) throw Error("cannot read submissions directory " + dir.string() + ": " + ec.message());
    std::sort(students.begin(), students.end());

    Cohort cohort;
    std::vector<FileTask> tasks;
    for (const auto& student_dir : students) {
        Submission s;
        s.student = student_dir.filename().string();
        std::vector<fs::path> files;
        std::error_code walk_ec;
        for (auto it = fs::recursive_directory_iterator(student_dir, walk_ec); !walk_ec && it != fs::end(it);
             it.increment(walk_ec)) {
            if (hidden(it->path())) {
                if (it->is_directory()) it.disable_recursion_pending();
                continue;
            }
            if (it->is_regular_file()) files.push_back(it->path());
        }
        if (walk_ec) s.diagnostics.push_back("cannot list " + student_dir.string() + ": " + walk_ec.message());
        std::sort(files.begin(), files.end());
        if (files.empty()) s.diagnostics.emplace_back("blank submission");
        for (const auto& f : files) tasks.push_back({cohort.size(), f, fs::relative(f, student_dir).generic_string()});
        cohort.push_back(std::move(s));
    }
    return {std::move(cohort), std::move(tasks)};
}

SourceFile load(const FileTask& task) {
    SourceFile file;
    file.path = task.relative;
    std::ifstream in(task.path, std::ios::binary);
    if (!in) {
        file.diagnostics.emplace_back("unreadable file");
        return file;
    }
    std::ostringstream content;
    content << in.rdbuf();
    ParsedFile parsed = parse(content.str());
    file.body = std::move(parsed.body);
    file.meta = std::move(parsed.meta);
    file.diagnostics = std::move(parsed.diagnostics);
    if (file.meta) {
        try {
            if (replay(file.meta->events) != file.body) file.diagnostics.emplace_back("body diverges from event log");
        } catch (const ReplayError& e) {
            file.diagnostics.emplace_back(e.what());
        }
    }
    return file;
}

Cohort assemble(Cohort cohort, const std::vector<FileTask>& tasks, std::vector<SourceFile> files) {
    for (std::size_t i = 0; i < tasks.size(); ++i) cohort[tasks[i].submission].files.push_back(std::move(files[i]));
    return cohort;
}

bool has_machine_change(const MetaComment& meta) {
    return std::any_of(meta.infection_stack.begin(), meta.infection_stack.end(),
                       [](const InfectionEntry& e) { return e.kind == InfectionKind::MachineChange; });
}

const InfectionEntry* first_machine_change(const MetaComment& meta) {
    for (const auto& e : meta.infection_stack)
        if (e.kind == InfectionKind::MachineChange) return &e;
    return nullptr;
}

}  // namespace

Cohort ingest_serial(const fs::path& dir) {
    auto [cohort, tasks] = scan(dir);
    std::vector<SourceFile> files;
    files.reserve(tasks.size());
    for (const auto& t : tasks) files.push_back(load(t));
    return assemble(std::move(cohort), tasks, std::move(files));
}

Cohort ingest(const fs::path& dir) {
    auto [cohort, tasks] = scan(dir);
    std::vector<SourceFile> files(tasks.size());
    const auto n = static_cast<std::ptrdiff_t>(tasks.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) files[static_cast<std::size_t>(i)] = load(tasks[static_cast<std::size_t>(i)]);
    return assemble(std::move(cohort), tasks, std::move(files));
}

std::set<InstallId> parse_known_machines(std::string_view text) {
    std::set<InstallId> ids;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto last = line.find_last_not_of(" \t\r");
        auto id = InstallId::parse(std::string_view(line).substr(first, last - first + 1));
        if (!id) throw ValidationError("known machines line " + std::to_string(number) + ": not an InstallID");
        ids.insert(*id);
    }
    return ids;
}

bool SubmissionGraph::is_shared(const InstallId& id) const {
    if (known_machines.contains(id)) return true;
    auto it = machine_users.find(id);
    return it != machine_users.end() && it->second.size() >= 2;
}

std::set<std::string> SubmissionGraph::other_owners(const ProjectId& id, const std::string& student) const {
    std::set<std::string> out;
    if (auto it = project_owners.find(id); it != project_owners.end())
        for (const auto& s : it->second)
            if (s != student) out.insert(s);
    return out;
}

std::set<std::string> SubmissionGraph::other_users(const InstallId& id, const std::string& student) const {
    std::set<std::string> out;
    if (auto it = machine_users.find(id); it != machine_users.end())
        for (const auto& s : it->second)
            if (s != student) out.insert(s);
    return out;
}

std::vector<InstallId> SubmissionGraph::shared_machines() const {
    std::set<InstallId> out(known_machines.begin(), known_machines.end());
    for (const auto& [id, users] : machine_users)
        if (users.size() >= 2) out.insert(id);
    return {out.begin(), out.end()};
}

InstallId machine_at(const MetaComment& meta, std::uint64_t seq) {
    InstallId machine = meta.install_id;
    for (const auto& e : meta.infection_stack)
        if (e.kind == InfectionKind::MachineChange && e.install_id && e.event_seq <= seq) machine = *e.install_id;
    return machine;
}

SubmissionGraph build_graph(const Cohort& cohort, const std::set<InstallId>& known_machines) {
    SubmissionGraph g;
    g.known_machines = known_machines;
    for (const auto& s : cohort)
        for (const auto& f : s.files)
            if (f.meta) {
                g.project_owners[f.meta->project_id].insert(s.student);
                g.projects_of[s.student].insert(f.meta->project_id);
            }

    for (const auto& [project, owners] : g.project_owners)
        if (owners.size() >= 2) g.file_shares.push_back({project, {owners.begin(), owners.end()}});

    // A copy of somebody else's project only attributes the machines it moved to.
    for (const auto& s : cohort) {
        auto& machines = g.machines_of[s.student];
        for (const auto& f : s.files) {
            if (!f.meta) continue;
            const bool exclusive = g.project_owners[f.meta->project_id].size() == 1;
            if (exclusive || !has_machine_change(*f.meta)) machines.insert(f.meta->install_id);
            for (const auto& e : f.meta->infection_stack)
                if (e.kind == InfectionKind::MachineChange && e.install_id) machines.insert(*e.install_id);
        }
        for (const auto& m : machines) g.machine_users[m].insert(s.student);
    }

    for (const auto& s : cohort) {
        for (std::size_t fi = 0; fi < s.files.size(); ++fi) {
            const auto& f = s.files[fi];
            if (!f.meta) continue;
            for (const auto& e : f.meta->infection_stack) g.infected_by.push_back({s.student, fi, e});
            for (const auto& e : f.meta->events) {
                if (e.kind != EventKind::Paste || !e.origin) continue;
                PasteEdge edge{s.student, fi, e.seq, *e.origin, {}};
                if (e.origin->project_id)
                    for (const auto& o : g.other_owners(*e.origin->project_id, s.student)) edge.origin_students.insert(o);
                if (e.origin->kind == PasteOrigin::Kind::Foreign && e.origin->install_id)
                    for (const auto& o : g.other_users(*e.origin->install_id, s.student)) edge.origin_students.insert(o);
                g.pasted_from.push_back(std::move(edge));
            }
        }
    }
    return g;
}

namespace {

bool matches_local_copy(const EditEvent& paste, const Submission& submission) {
    for (const auto& f : submission.files) {
        if (!f.meta) continue;
        for (const auto& e : f.meta->events)
            if ((e.kind == EventKind::Copy || e.kind == EventKind::Cut) && e.text == paste.text) return true;
    }
    return false;
}

}  // namespace

PasteClassification classify_paste(const EditEvent& event, const Submission& submission, std::size_t file_index,
                                   const SubmissionGraph& graph) {
    PasteClassification out;
    const auto& meta = *submission.files.at(file_index).meta;
    const std::uint32_t lines = event.line_count.value_or(count_lines(event.text));
    const PasteOrigin origin = event.origin.value_or(PasteOrigin::external());
    const std::string& student = submission.student;

    auto ignore = [&](IgnoreReason reason) {
        out.ignored = reason;
        return out;
    };
    auto categorize = [&](PasteCategory category, bool flagged) {
        out.category = category;
        out.flagged = flagged;
        return out;
    };

    switch (origin.kind) {
        case PasteOrigin::Kind::Internal:
            out.history_destroying = lines > kSameMachineLineThreshold;
            return ignore(IgnoreReason::Internal);

        case PasteOrigin::Kind::External: {
            const bool trackable = utf8::length(event.text) > stego::kMinFrameBits;
            if (!trackable && matches_local_copy(event, submission)) return ignore(IgnoreReason::TooShort);
            return categorize(PasteCategory::External, lines > kExternalLineThreshold);
        }

        case PasteOrigin::Kind::SameMachine:
        case PasteOrigin::Kind::Foreign:
            break;
    }

    if (origin.project_id && *origin.project_id == meta.project_id) return ignore(IgnoreReason::Internal);

    if (origin.project_id) out.related_students = graph.other_owners(*origin.project_id, student);
    const bool foreign = origin.kind == PasteOrigin::Kind::Foreign;
    const InstallId source_machine = foreign ? *origin.install_id : machine_at(meta, event.seq);
    if (foreign)
        for (const auto& s : graph.other_users(source_machine, student)) out.related_students.insert(s);
    if (!out.related_students.empty()) return categorize(PasteCategory::ForeignTurnedIn, true);

    if (!foreign) return categorize(PasteCategory::SameMachineOtherProject,
                                    graph.is_shared(source_machine) || lines > kSameMachineLineThreshold);

    if (graph.known_machines.contains(source_machine))
        return categorize(PasteCategory::SameMachineOtherProject, true);
    auto own = graph.machines_of.find(student);
    if (own != graph.machines_of.end() && own->second.contains(source_machine))
        return categorize(PasteCategory::SameMachineOtherProject, lines > kSameMachineLineThreshold);
    return categorize(PasteCategory::UnassociatedMachine, lines > kUnassociatedLineThreshold);
}

namespace {

struct FlagPoint {
    std::int64_t timestamp;
    std::uint64_t seq;
    std::uint64_t after;
};

std::uint64_t events_after(const MetaComment& meta, std::uint64_t seq) {
    return meta.events.size() > seq + 1 ? meta.events.size() - seq - 1 : 0;
}

std::pair<std::int64_t, std::int64_t> activity_span(const Submission& s) {
    std::int64_t lo = std::numeric_limits<std::int64_t>::max(), hi = std::numeric_limits<std::int64_t>::min();
    for (const auto& f : s.files)
        if (f.meta)
            for (const auto& e : f.meta->events) lo = std::min(lo, e.timestamp), hi = std::max(hi, e.timestamp);
    return {lo, hi};
}

// Copies of a shared project that moved to a new machine are the derived ones;
// when every copy looks the same, all owners are flagged.
std::set<std::string> derived_copies(const Cohort& cohort, const FileShare& share) {
    std::set<std::string> pristine, moved;
    for (const auto& s : cohort) {
        if (std::find(share.students.begin(), share.students.end(), s.student) == share.students.end()) continue;
        bool any_moved = false;
        for (const auto& f : s.files)
            if (f.meta && f.meta->project_id == share.project_id && has_machine_change(*f.meta)) any_moved = true;
        (any_moved ? moved : pristine).insert(s.student);
    }
    if (!pristine.empty() && !moved.empty()) return moved;
    std::set<std::string> all(share.students.begin(), share.students.end());
    return all;
}

}  // namespace

Report analyze(const Cohort& cohort, const SubmissionGraph& graph) {
    Report report;
    report.shared_machines = graph.shared_machines();
    report.file_shares = graph.file_shares;

    std::map<std::string, std::vector<ProjectId>> derived_projects;
    for (const auto& share : graph.file_shares)
        for (const auto& s : derived_copies(cohort, share)) derived_projects[s].push_back(share.project_id);

    std::map<std::string, std::set<std::string>> pasted_from_students;

    for (const auto& s : cohort) {
        SubmissionReport sr;
        sr.student = s.student;
        sr.diagnostics = s.diagnostics;
        std::vector<FlagPoint> flags;
        std::optional<FlagPoint> likely;
        bool missing_meta = false;
        LinearityCounts linearity;

        for (std::size_t fi = 0; fi < s.files.size(); ++fi) {
            const auto& f = s.files[fi];
            FileSummary fs;
            fs.path = f.path;
            fs.has_metacomment = f.meta.has_value();
            fs.diagnostics = f.diagnostics;
            if (!f.meta) {
                missing_meta = true;
                sr.findings.push_back({.kind = FindingKind::NoMetacomment, .file = f.path, .excerpt = f.body});
                sr.files.push_back(std::move(fs));
                continue;
            }
            const auto& meta = *f.meta;
            fs.install_id = meta.install_id;
            fs.project_id = meta.project_id;
            fs.event_count = meta.events.size();
            fs.infection_entries = meta.infection_stack.size();
            sr.files.push_back(std::move(fs));

            auto counts = typing_linearity_counts(meta.events);
            linearity.linear += counts.linear;
            linearity.inserts += counts.inserts;

            if (auto it = std::find(derived_projects[s.student].begin(), derived_projects[s.student].end(),
                                    meta.project_id);
                it != derived_projects[s.student].end()) {
                Finding finding{.kind = FindingKind::FileShared, .flagged = true, .file = f.path};
                finding.origin_project = meta.project_id;
                finding.origin_install = meta.install_id;
                for (const auto& other : graph.other_owners(meta.project_id, s.student))
                    finding.related_students.push_back(other);
                FlagPoint point{0, 0, 0};
                if (const auto* moved = first_machine_change(meta)) {
                    finding.seq = moved->event_seq;
                    finding.timestamp = moved->timestamp;
                    point = {moved->timestamp, moved->event_seq, meta.events.size() - std::min<std::uint64_t>(moved->event_seq, meta.events.size())};
                } else if (!meta.events.empty()) {
                    point = {meta.events.back().timestamp, meta.events.back().seq, 0};
                }
                finding.edits_after = point.after;
                flags.push_back(point);
                sr.findings.push_back(std::move(finding));
            }

            for (const auto& e : meta.events) {
                if (e.kind == EventKind::Open) {
                    if (e.text.empty()) continue;
                    const auto lines = count_lines(e.text);
                    Finding finding{.kind = FindingKind::OpenExternal,
                                    .flagged = lines > kExternalLineThreshold,
                                    .category = PasteCategory::External,
                                    .file = f.path,
                                    .seq = e.seq,
                                    .timestamp = e.timestamp,
                                    .line_count = lines,
                                    .excerpt = e.text};
                    ++sr.paste_counts[std::string(to_string(PasteCategory::External))];
                    if (finding.flagged) {
                        finding.edits_after = events_after(meta, e.seq);
                        flags.push_back({e.timestamp, e.seq, *finding.edits_after});
                        sr.findings.push_back(std::move(finding));
                    }
                    continue;
                }
                if (e.kind != EventKind::Paste) continue;
                auto c = classify_paste(e, s, fi, graph);
                ++sr.paste_counts[std::string(c.category ? to_string(*c.category) : to_string(*c.ignored))];
                const auto lines = e.line_count.value_or(count_lines(e.text));
                if (c.history_destroying) {
                    Finding finding{.kind = FindingKind::HistoryDestroyingPaste,
                                    .file = f.path,
                                    .seq = e.seq,
                                    .timestamp = e.timestamp,
                                    .line_count = lines,
                                    .excerpt = e.text,
                                    .edits_after = events_after(meta, e.seq)};
                    FlagPoint point{e.timestamp, e.seq, *finding.edits_after};
                    if (!likely || point.timestamp >= likely->timestamp) likely = point;
                    sr.findings.push_back(std::move(finding));
                }
                if (!c.flagged) continue;
                Finding finding{.kind = FindingKind::Paste,
                                .flagged = true,
                                .category = c.category,
                                .file = f.path,
                                .seq = e.seq,
                                .timestamp = e.timestamp,
                                .line_count = lines,
                                .excerpt = e.text,
                                .origin_install = e.origin ? e.origin->install_id : std::nullopt,
                                .origin_project = e.origin ? e.origin->project_id : std::nullopt,
                                .related_students = {c.related_students.begin(), c.related_students.end()},
                                .edits_after = events_after(meta, e.seq)};
                if (c.category == PasteCategory::ForeignTurnedIn)
                    pasted_from_students[s.student].insert(c.related_students.begin(), c.related_students.end());
                flags.push_back({e.timestamp, e.seq, *finding.edits_after});
                sr.findings.push_back(std::move(finding));
            }
        }

        if (linearity.inserts > 0)
            sr.linearity = static_cast<double>(linearity.linear) / static_cast<double>(linearity.inserts);

        if (!flags.empty()) {
            auto last = std::max_element(flags.begin(), flags.end(), [](const FlagPoint& a, const FlagPoint& b) {
                return std::tie(a.timestamp, a.seq) < std::tie(b.timestamp, b.seq);
            });
            sr.verdict = Verdict::PlagiarismDetected;
            sr.edits_after_last_flag = last->after;
        } else if (missing_meta) {
            sr.verdict = Verdict::NoMetacomment;
        } else if (likely) {
            sr.verdict = Verdict::LikelyPlagiarized;
            sr.edits_after_last_flag = likely->after;
        }
        report.submissions.push_back(std::move(sr));
    }

    // Mutual pastes between two students whose activity overlaps in time.
    for (std::size_t i = 0; i < cohort.size(); ++i) {
        for (std::size_t j = i + 1; j < cohort.size(); ++j) {
            const auto& a = cohort[i].student;
            const auto& b = cohort[j].student;
            if (!pasted_from_students[a].contains(b) || !pasted_from_students[b].contains(a)) continue;
            auto [alo, ahi] = activity_span(cohort[i]);
            auto [blo, bhi] = activity_span(cohort[j]);
            if (alo > bhi || blo > ahi) continue;
            report.submissions[i].findings.push_back(
                {.kind = FindingKind::CollaborationSignal, .related_students = {b}});
            report.submissions[j].findings.push_back(
                {.kind = FindingKind::CollaborationSignal, .related_students = {a}});
        }
    }
    return report;
}

}  // namespace pastetrace

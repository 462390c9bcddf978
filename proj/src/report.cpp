#include "pastetrace/report.hpp"

#include <algorithm>
#include <array>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "pastetrace/errors.hpp"

namespace pastetrace {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 4> kCategoryNames{"foreign_turned_in", "same_machine_other_project",
                                                         "unassociated_machine", "external"};
constexpr std::array<std::string_view, 2> kIgnoreNames{"internal", "too_short"};
constexpr std::array<std::string_view, 4> kVerdictNames{"plagiarism_detected", "likely_plagiarized",
                                                        "no_plagiarism_detected", "no_metacomment"};
constexpr std::array<std::string_view, 4> kVerdictLabels{"Plagiarism Detected", "Likely Plagiarized",
                                                         "No Plagiarism Detected", "No metaComment"};
constexpr std::array<std::string_view, 6> kFindingNames{"paste",
                                                        "open_external",
                                                        "file_shared",
                                                        "history_destroying_paste",
                                                        "collaboration_signal",
                                                        "no_metacomment"};

template <typename E, std::size_t N>
E enum_from(const std::array<std::string_view, N>& names, const std::string& text, const char* what) {
    auto it = std::find(names.begin(), names.end(), text);
    if (it == names.end()) throw ValidationError(std::string("unknown ") + what + ": " + text);
    return static_cast<E>(it - names.begin());
}

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
}

template <typename Id>
void put_id(json& j, const char* key, const std::optional<Id>& v) {
    if (v) j[key] = v->str();
}

template <typename Id>
std::optional<Id> get_id(const json& j, const char* key) {
    if (!j.contains(key)) return std::nullopt;
    auto id = Id::parse(j.at(key).get<std::string>());
    if (!id) throw ValidationError(std::string("malformed id in field ") + key);
    return id;
}

template <typename T>
std::optional<T> get_optional(const json& j, const char* key) {
    if (!j.contains(key)) return std::nullopt;
    return j.at(key).get<T>();
}

json finding_to_json(const Finding& f) {
    json j;
    j["kind"] = to_string(f.kind);
    j["flagged"] = f.flagged;
    if (f.category) j["category"] = to_string(*f.category);
    j["file"] = f.file;
    put_optional(j, "seq", f.seq);
    put_optional(j, "timestamp", f.timestamp);
    put_optional(j, "line_count", f.line_count);
    j["excerpt"] = f.excerpt;
    put_id(j, "origin_install", f.origin_install);
    put_id(j, "origin_project", f.origin_project);
    j["related_students"] = f.related_students;
    put_optional(j, "edits_after", f.edits_after);
    return j;
}

Finding finding_from_json(const json& j) {
    Finding f;
    f.kind = enum_from<FindingKind>(kFindingNames, j.at("kind").get<std::string>(), "finding kind");
    f.flagged = j.at("flagged").get<bool>();
    if (j.contains("category"))
        f.category = enum_from<PasteCategory>(kCategoryNames, j.at("category").get<std::string>(), "category");
    f.file = j.at("file").get<std::string>();
    f.seq = get_optional<std::uint64_t>(j, "seq");
    f.timestamp = get_optional<std::int64_t>(j, "timestamp");
    f.line_count = get_optional<std::uint32_t>(j, "line_count");
    f.excerpt = j.at("excerpt").get<std::string>();
    f.origin_install = get_id<InstallId>(j, "origin_install");
    f.origin_project = get_id<ProjectId>(j, "origin_project");
    f.related_students = j.at("related_students").get<std::vector<std::string>>();
    f.edits_after = get_optional<std::uint64_t>(j, "edits_after");
    return f;
}

json file_to_json(const FileSummary& f) {
    json j;
    j["path"] = f.path;
    j["has_metacomment"] = f.has_metacomment;
    put_id(j, "install_id", f.install_id);
    put_id(j, "project_id", f.project_id);
    j["event_count"] = f.event_count;
    j["infection_entries"] = f.infection_entries;
    j["diagnostics"] = f.diagnostics;
    return j;
}

FileSummary file_from_json(const json& j) {
    FileSummary f;
    f.path = j.at("path").get<std::string>();
    f.has_metacomment = j.at("has_metacomment").get<bool>();
    f.install_id = get_id<InstallId>(j, "install_id");
    f.project_id = get_id<ProjectId>(j, "project_id");
    f.event_count = j.at("event_count").get<std::uint64_t>();
    f.infection_entries = j.at("infection_entries").get<std::uint64_t>();
    f.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
    return f;
}

json submission_to_json(const SubmissionReport& s) {
    json j;
    j["student"] = s.student;
    j["verdict"] = to_string(s.verdict);
    j["files"] = json::array();
    for (const auto& f : s.files) j["files"].push_back(file_to_json(f));
    j["findings"] = json::array();
    for (const auto& f : s.findings) j["findings"].push_back(finding_to_json(f));
    put_optional(j, "edits_after_last_flag", s.edits_after_last_flag);
    put_optional(j, "linearity", s.linearity);
    j["paste_counts"] = s.paste_counts;
    j["diagnostics"] = s.diagnostics;
    return j;
}

SubmissionReport submission_from_json(const json& j) {
    SubmissionReport s;
    s.student = j.at("student").get<std::string>();
    auto verdict = parse_verdict(j.at("verdict").get<std::string>());
    if (!verdict) throw ValidationError("unknown verdict");
    s.verdict = *verdict;
    for (const auto& f : j.at("files")) s.files.push_back(file_from_json(f));
    for (const auto& f : j.at("findings")) s.findings.push_back(finding_from_json(f));
    s.edits_after_last_flag = get_optional<std::uint64_t>(j, "edits_after_last_flag");
    s.linearity = get_optional<double>(j, "linearity");
    s.paste_counts = j.at("paste_counts").get<std::map<std::string, std::uint64_t>>();
    s.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
    return s;
}

std::string render_structured(const Report& report) {
    json j;
    j["schema"] = kReportSchema;
    j["version"] = report.version;
    j["submissions"] = json::array();
    for (const auto& s : report.submissions) j["submissions"].push_back(submission_to_json(s));
    j["shared_machines"] = json::array();
    for (const auto& m : report.shared_machines) j["shared_machines"].push_back(m.str());
    j["file_shares"] = json::array();
    for (const auto& share : report.file_shares)
        j["file_shares"].push_back({{"project_id", share.project_id.str()}, {"students", share.students}});
    return j.dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

std::string truncate_lines(const std::string& text, std::size_t max_lines, std::size_t& total) {
    total = 1 + static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
    if (total <= max_lines) return text;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < max_lines; ++i) pos = text.find('\n', pos) + 1;
    return text.substr(0, pos);
}

std::string render_human(const Report& report) {
    std::vector<std::array<std::string, 3>> rows;
    rows.push_back({"Student", "Visible in metaComment", "Automated Check output"});
    for (const auto& s : report.submissions) rows.push_back({s.student, visible_summary(s), automated_check_output(s)});
    std::array<std::size_t, 3> width{};
    for (const auto& r : rows)
        for (std::size_t c = 0; c < 3; ++c) width[c] = std::max(width[c], r[c].size());

    std::ostringstream out;
    auto rule = [&] {
        out << '+';
        for (auto w : width) out << std::string(w + 2, '-') << '+';
        out << '\n';
    };
    rule();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out << '|';
        for (std::size_t c = 0; c < 3; ++c) out << ' ' << std::left << std::setw(static_cast<int>(width[c])) << rows[i][c] << " |";
        out << '\n';
        if (i == 0) rule();
    }
    rule();

    for (const auto& s : report.submissions) {
        const bool any = std::any_of(s.findings.begin(), s.findings.end(), [](const Finding& f) {
            return f.flagged || f.kind != FindingKind::Paste;
        });
        if (!any && s.diagnostics.empty()) continue;
        out << "\n== " << s.student << " ==\n";
        if (s.linearity) out << "typing linearity: " << std::fixed << std::setprecision(2) << *s.linearity << '\n';
        for (const auto& d : s.diagnostics) out << "note: " << d << '\n';
        for (const auto& f : s.findings) {
            out << "- " << to_string(f.kind);
            if (f.category) out << " [" << to_string(*f.category) << "]";
            if (f.flagged) out << " FLAGGED";
            if (!f.file.empty()) out << " " << f.file;
            if (f.seq) out << " seq " << *f.seq;
            if (f.line_count) out << ", " << *f.line_count << " lines";
            if (f.edits_after) out << ", " << *f.edits_after << " edits after";
            if (!f.related_students.empty()) {
                out << ", related:";
                for (const auto& r : f.related_students) out << ' ' << r;
            }
            out << '\n';
            if (f.excerpt.empty() || f.kind == FindingKind::NoMetacomment) continue;
            std::size_t total = 0;
            std::string shown = truncate_lines(f.excerpt, kHumanExcerptLines, total);
            std::istringstream lines(shown);
            std::string line;
            while (std::getline(lines, line)) out << "    | " << line << '\n';
            if (total > kHumanExcerptLines) out << "    | ... (" << total - kHumanExcerptLines << " more lines)\n";
        }
    }
    return out.str();
}

}  // namespace

std::string_view to_string(PasteCategory c) { return kCategoryNames[static_cast<std::size_t>(c)]; }
std::string_view to_string(IgnoreReason r) { return kIgnoreNames[static_cast<std::size_t>(r)]; }
std::string_view to_string(Verdict v) { return kVerdictNames[static_cast<std::size_t>(v)]; }
std::string_view label(Verdict v) { return kVerdictLabels[static_cast<std::size_t>(v)]; }
std::string_view to_string(FindingKind k) { return kFindingNames[static_cast<std::size_t>(k)]; }

std::optional<Verdict> parse_verdict(std::string_view text) {
    auto it = std::find(kVerdictNames.begin(), kVerdictNames.end(), text);
    if (it == kVerdictNames.end()) return std::nullopt;
    return static_cast<Verdict>(it - kVerdictNames.begin());
}

const SubmissionReport* Report::find(std::string_view student) const {
    for (const auto& s : submissions)
        if (s.student == student) return &s;
    return nullptr;
}

std::string automated_check_output(const SubmissionReport& s) {
    if (s.files.empty()) return "";
    std::string out(label(s.verdict));
    if (s.edits_after_last_flag) out += ", " + std::to_string(*s.edits_after_last_flag) + " Edits";
    return out;
}

std::string visible_summary(const SubmissionReport& s) {
    if (s.files.empty()) return "Blank Submission";
    std::size_t large = 0, external = 0;
    bool shared = false, destroying = false, missing = false;
    std::string shared_with;
    for (const auto& f : s.findings) {
        switch (f.kind) {
            case FindingKind::Paste:
            case FindingKind::OpenExternal:
                if (f.flagged) {
                    ++large;
                    if (f.category == PasteCategory::External) ++external;
                }
                break;
            case FindingKind::FileShared:
                shared = true;
                if (!f.related_students.empty()) shared_with = f.related_students.front();
                break;
            case FindingKind::HistoryDestroyingPaste: destroying = true; break;
            case FindingKind::NoMetacomment: missing = true; break;
            case FindingKind::CollaborationSignal: break;
        }
    }
    if (missing) return "No metaComment";
    if (shared) return "Shares ProjectID with " + shared_with;
    if (large > 1) return "Records multiple large pastes";
    if (large == 1) return external ? "Large external paste" : "Records large paste";
    if (destroying) return "Large internal paste";
    return "No Warning Signs";
}

std::string render_report(const Report& report, ReportFormat format) {
    return format == ReportFormat::Structured ? render_structured(report) : render_human(report);
}

Report parse_report(std::string_view structured) {
    json j;
    try {
        j = json::parse(structured);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("report is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || j.value("schema", "") != kReportSchema) throw ValidationError("not a pastetrace report");
    if (j.value("version", -1) != kReportVersion)
        throw ValidationError("unsupported report version " + std::to_string(j.value("version", -1)));
    try {
        Report report;
        report.version = j.at("version").get<int>();
        for (const auto& s : j.at("submissions")) report.submissions.push_back(submission_from_json(s));
        for (const auto& m : j.at("shared_machines")) {
            auto id = InstallId::parse(m.get<std::string>());
            if (!id) throw ValidationError("malformed shared machine id");
            report.shared_machines.push_back(*id);
        }
        for (const auto& share : j.at("file_shares")) {
            auto id = ProjectId::parse(share.at("project_id").get<std::string>());
            if (!id) throw ValidationError("malformed project id");
            report.file_shares.push_back({*id, share.at("students").get<std::vector<std::string>>()});
        }
        return report;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed report: ") + e.what());
    }
}

}  // namespace pastetrace

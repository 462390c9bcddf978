#include <doctest.h>

#include <fstream>
#include <json.hpp>

#include "pastetrace/analyzer.hpp"
#include "pastetrace/errors.hpp"
#include "pastetrace/report.hpp"
#include "pastetrace/session.hpp"
#include "support.hpp"

using namespace pastetrace;
using testsupport::TempDir;

namespace {

// N lines, no trailing newline, every line `width` characters.
std::string block(std::size_t lines, std::size_t width = 24, char fill = 'k') {
    std::string out;
    for (std::size_t i = 0; i < lines; ++i) {
        std::string line = "v" + std::to_string(i) + " = ";
        line.resize(width, fill);
        out += (i ? "\n" : "") + line;
    }
    return out;
}

struct Class {
    TempDir dir{"analyzer"};
    UuidGenerator ids{21};
    ManualClock clock{5000};

    Machine machine(const std::string& name) { return testsupport::machine_in(dir, "machines/" + name, ids); }
    Session project(const Machine& m, const std::string& name = "hw") {
        return Session::create(m, new_project(m.install_id, name, ids), clock.bind());
    }
    void submit(const std::string& student, const std::string& text, const std::string& file = "sketch.pde") {
        auto p = dir / ("subs/" + student + "/" + file);
        std::filesystem::create_directories(p.parent_path());
        std::ofstream(p, std::ios::binary) << text;
    }
    void submit(const std::string& student, const Session& s) { submit(student, s.save()); }
    // Clipboard holding exactly `text`, copied from a fresh project on `m`.
    ClipboardPayload clip_from(const Machine& m, const std::string& text, const std::string& name = "src") {
        auto s = project(m, name);
        s.type_text(0, text);
        return s.copy(0, s.length());
    }
    Report run(const std::set<InstallId>& known = {}) {
        auto cohort = ingest(dir / "subs");
        return analyze(cohort, build_graph(cohort, known));
    }
};

const Finding* paste_finding(const SubmissionReport& s) {
    for (const auto& f : s.findings)
        if (f.kind == FindingKind::Paste) return &f;
    return nullptr;
}

// nullopt unless exactly one paste of this category was classified; then
// whether it was flagged. Unflagged pastes only show up in paste_counts.
std::optional<bool> flagged_as(const Report& r, const std::string& who, PasteCategory category) {
    const auto* s = r.find(who);
    if (!s) return std::nullopt;
    auto it = s->paste_counts.find(std::string(to_string(category)));
    if (it == s->paste_counts.end() || it->second != 1) return std::nullopt;
    for (const auto& f : s->findings)
        if (f.kind == FindingKind::Paste && f.category == category) return f.flagged;
    return false;
}

// Student "s" types a line then pastes the clipboard.
Report one_paste(Class& c, const Machine& m, const ClipboardPayload& clip, const std::set<InstallId>& known = {}) {
    auto s = c.project(m);
    s.type_text(0, "void setup() {}\n");
    s.paste(clip, s.length());
    c.submit("s", s);
    auto other = c.project(c.machine("bystander"));
    other.type_text(0, "x");
    c.submit("bystander", other);
    return c.run(known);
}

}  // namespace

TEST_CASE("external pastes flip at four lines") {
    for (std::size_t lines : {3u, 4u}) {
        Class c;
        auto r = one_paste(c, c.machine("s-pc"), {block(lines, 10), "web"});
        CHECK(flagged_as(r, "s", PasteCategory::External) == (lines == 4));
        CHECK(r.find("s")->flagged() == (lines == 4));
        if (lines == 4) CHECK(paste_finding(*r.find("s"))->line_count == 4);
    }
}

TEST_CASE("unassociated machine pastes flip at twenty-one lines") {
    for (std::size_t lines : {20u, 21u}) {
        Class c;
        auto clip = c.clip_from(c.machine("stranger"), block(lines));
        auto r = one_paste(c, c.machine("s-pc"), clip);
        CHECK(flagged_as(r, "s", PasteCategory::UnassociatedMachine) == (lines == 21));
    }
}

TEST_CASE("same machine pastes from another project flip at fifty-one lines") {
    for (std::size_t lines : {50u, 51u}) {
        Class c;
        auto pc = c.machine("s-pc");
        auto clip = c.clip_from(pc, block(lines), "older");
        auto r = one_paste(c, pc, clip);
        CHECK(flagged_as(r, "s", PasteCategory::SameMachineOtherProject) == (lines == 51));
        CHECK(r.find("s")->verdict == (lines == 51 ? Verdict::PlagiarismDetected : Verdict::NoPlagiarismDetected));
    }
}

TEST_CASE("same machine pastes on a shared machine are flagged at any size") {
    Class c;
    auto lab = c.machine("lab");
    auto clip = c.clip_from(lab, block(2, 320), "scratch");
    auto s = c.project(lab);
    s.paste(clip, 0);
    c.submit("s", s);
    auto t = c.project(lab, "t-hw");
    t.type_text(0, "int t;");
    c.submit("t", t);
    auto r = c.run();
    const auto* f = paste_finding(*r.find("s"));
    REQUIRE(f);
    CHECK(f->category == PasteCategory::SameMachineOtherProject);
    CHECK(f->line_count == 2);
    CHECK(f->flagged);
    CHECK(r.find("t")->verdict == Verdict::NoPlagiarismDetected);
    CHECK(r.shared_machines == std::vector<InstallId>{lab.install_id});
}

TEST_CASE("known machines count as shared") {
    Class c;
    auto pc = c.machine("s-pc");
    auto clip = c.clip_from(pc, block(2, 320), "scratch");
    auto r = one_paste(c, pc, clip, {pc.install_id});
    CHECK(paste_finding(*r.find("s"))->flagged);
}

TEST_CASE("a decodable two-line paste from another student's turned-in project is flagged") {
    Class c;
    auto author_pc = c.machine("a-pc");
    auto a = c.project(author_pc, "a-hw");
    a.type_text(0, block(2, 100));
    auto clip = a.copy(0, a.length());
    c.submit("a", a);
    auto s = c.project(c.machine("s-pc"));
    s.type_text(0, "x\n");
    s.paste(clip, s.length());
    s.type_text(0, "y");
    s.type_text(0, "z");
    c.submit("s", s);
    auto r = c.run();
    const auto* f = paste_finding(*r.find("s"));
    REQUIRE(f);
    CHECK(f->category == PasteCategory::ForeignTurnedIn);
    CHECK(f->flagged);
    CHECK(f->related_students == std::vector<std::string>{"a"});
    CHECK(f->excerpt == block(2, 100));
    CHECK(r.find("s")->edits_after_last_flag == 2);
    CHECK(r.find("a")->verdict == Verdict::NoPlagiarismDetected);
}

TEST_CASE("pastes from a student's own second machine use the fifty-line rule") {
    for (std::size_t lines : {50u, 51u}) {
        Class c;
        auto desk = c.machine("s-desk"), laptop = c.machine("s-laptop");
        auto s = c.project(desk);
        s.type_text(0, "int a;\n");
        auto moved = Session::open(laptop, s.save(), c.clock.bind());
        moved.type_text(0, "// on laptop\n");
        auto clip = c.clip_from(desk, block(lines), "old");
        moved.paste(clip, moved.length());
        c.submit("s", moved);
        auto r = c.run();
        CHECK(flagged_as(r, "s", PasteCategory::SameMachineOtherProject) == (lines == 51));
    }
}

TEST_CASE("short pastes of locally copied text are ignored as too short") {
    Class c;
    auto s = c.project(c.machine("s-pc"));
    s.type_text(0, "line one\nline two\nline three\nline four\nline five");
    auto clip = s.copy(0, s.length());
    s.paste(clip, s.length());
    c.submit("s", s);
    auto r = c.run();
    const auto* sub = r.find("s");
    CHECK(sub->verdict == Verdict::NoPlagiarismDetected);
    CHECK(sub->paste_counts.at("too_short") == 1);
}

TEST_CASE("internal pastes are ignored; a huge one makes the submission likely plagiarized") {
    for (std::size_t lines : {50u, 51u}) {
        Class c;
        auto s = c.project(c.machine("s-pc"));
        s.type_text(0, block(lines));
        auto clip = s.copy(0, s.length());
        s.delete_text(0, s.length());
        s.paste(clip, 0);
        c.submit("s", s);
        auto r = c.run();
        CHECK(r.find("s")->paste_counts.at("internal") == 1);
        CHECK(r.find("s")->verdict == (lines == 51 ? Verdict::LikelyPlagiarized : Verdict::NoPlagiarismDetected));
    }
}

TEST_CASE("a verbatim copy of someone's saved file is flagged with zero edits after") {
    Class c;
    auto a = c.project(c.machine("a-pc"));
    a.type_text(0, "int a = 1;\n");
    c.submit("a", a);
    c.submit("b", a);
    auto r = c.run();
    for (const char* who : {"a", "b"}) {
        const auto* s = r.find(who);
        CHECK(s->verdict == Verdict::PlagiarismDetected);
        CHECK(s->edits_after_last_flag == 0);
    }
    REQUIRE(r.file_shares.size() == 1);
    CHECK(r.file_shares[0].students == std::vector<std::string>{"a", "b"});
}

TEST_CASE("a shared file edited on another machine flags only the one who moved it") {
    Class c;
    auto a = c.project(c.machine("a-pc"));
    a.type_text(0, "int a = 1;\n");
    c.submit("a", a);
    auto b = Session::open(c.machine("b-pc"), a.save(), c.clock.bind());
    b.type_text(0, "// mine\n");
    b.delete_text(0, 1);
    b.type_text(0, "/");
    c.submit("b", b);
    auto r = c.run();
    CHECK(r.find("a")->verdict == Verdict::NoPlagiarismDetected);
    CHECK(r.find("b")->verdict == Verdict::PlagiarismDetected);
    CHECK(r.find("b")->edits_after_last_flag == 3);
}

TEST_CASE("opened plain files count as external content") {
    Class c;
    auto s = Session::open(c.machine("s-pc"), block(4, 10), c.clock.bind(), c.ids);
    c.submit("s", s);
    auto r = c.run();
    const auto* sub = r.find("s");
    REQUIRE(sub->findings.size() >= 1);
    CHECK(sub->findings[0].kind == FindingKind::OpenExternal);
    CHECK(sub->verdict == Verdict::PlagiarismDetected);
    CHECK(sub->edits_after_last_flag == 0);
}

TEST_CASE("files without a metaComment and blank submissions") {
    Class c;
    c.submit("plain", "void draw() {}\n");
    std::filesystem::create_directories(c.dir / "subs/empty");
    auto r = c.run();
    CHECK(r.find("plain")->verdict == Verdict::NoMetacomment);
    CHECK(r.find("empty")->verdict == Verdict::NoPlagiarismDetected);
    CHECK(r.find("empty")->diagnostics == std::vector<std::string>{"blank submission"});
}

TEST_CASE("mutual overlapping pastes raise a collaboration signal") {
    Class c;
    auto x = c.project(c.machine("x-pc"), "x"), y = c.project(c.machine("y-pc"), "y");
    x.type_text(0, block(5, 50));
    y.paste(x.copy(0, x.length()), 0);
    c.clock.advance(100);
    y.type_text(y.length(), "\n" + block(5, 50, 'q'));
    x.paste(y.copy(0, y.length()), x.length());
    c.submit("x", x);
    c.submit("y", y);
    auto r = c.run();
    for (auto [self, other] : {std::pair{"x", "y"}, std::pair{"y", "x"}}) {
        const auto* s = r.find(self);
        CHECK(s->verdict == Verdict::PlagiarismDetected);
        bool signal = false;
        for (const auto& f : s->findings)
            if (f.kind == FindingKind::CollaborationSignal && f.related_students == std::vector<std::string>{other})
                signal = true;
        CHECK(signal);
    }
}

TEST_CASE("structured report round-trips and rejects other versions") {
    Class c;
    one_paste(c, c.machine("s-pc"), {block(6, 12), "web"});
    auto r = c.run();
    auto text = render_report(r, ReportFormat::Structured);
    CHECK(parse_report(text) == r);

    auto j = nlohmann::json::parse(text);
    CHECK(j["schema"] == "pastetrace-report");
    j["version"] = 99;
    CHECK_THROWS_AS(parse_report(j.dump()), ValidationError);
    j["version"] = 1;
    j["schema"] = "other";
    CHECK_THROWS_AS(parse_report(j.dump()), ValidationError);
    CHECK_THROWS_AS(parse_report("{"), ValidationError);
}

TEST_CASE("human report shows the table and truncates long excerpts") {
    Class c;
    one_paste(c, c.machine("s-pc"), {block(250, 8), "web"});
    auto r = c.run();
    auto human = render_report(r, ReportFormat::Human);
    CHECK(human.find("Student") != std::string::npos);
    CHECK(human.find("Automated Check output") != std::string::npos);
    CHECK(human.find("Plagiarism Detected, 0 Edits") != std::string::npos);
    CHECK(human.find("v199 = ") != std::string::npos);
    CHECK(human.find("v200 = ") == std::string::npos);
    CHECK(paste_finding(*r.find("s"))->excerpt == block(250, 8));
}

TEST_CASE("parallel ingest matches the serial reference") {
    Class c;
    for (int i = 0; i < 6; ++i) {
        auto s = c.project(c.machine("m" + std::to_string(i)));
        s.type_text(0, block(3 + i));
        c.submit("st" + std::to_string(i), s);
        c.submit("st" + std::to_string(i), "loose file " + std::to_string(i), "notes.txt");
    }
    auto par = ingest(c.dir / "subs");
    auto ser = ingest_serial(c.dir / "subs");
    REQUIRE(par.size() == ser.size());
    for (std::size_t i = 0; i < par.size(); ++i) {
        CHECK(par[i].student == ser[i].student);
        REQUIRE(par[i].files.size() == ser[i].files.size());
        for (std::size_t k = 0; k < par[i].files.size(); ++k) {
            CHECK(par[i].files[k].path == ser[i].files[k].path);
            CHECK(par[i].files[k].body == ser[i].files[k].body);
            CHECK(par[i].files[k].meta == ser[i].files[k].meta);
        }
    }
}

TEST_CASE("known machine list parsing") {
    UuidGenerator ids(1);
    auto a = InstallId(ids.next());
    auto set = parse_known_machines("# lab machines\n\n" + a.str() + "\n");
    CHECK(set == std::set<InstallId>{a});
    CHECK_THROWS_AS(parse_known_machines("nonsense\n"), ValidationError);
}

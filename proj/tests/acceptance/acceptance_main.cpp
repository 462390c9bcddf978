// Acceptance gate: one line per criterion, non-zero exit if any fails.

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "generators.hpp"
#include "pastetrace/analyzer.hpp"
#include "pastetrace/metacomment.hpp"
#include "pastetrace/scenario.hpp"
#include "pastetrace/session.hpp"
#include "pastetrace/stego.hpp"
#include "pastetrace/utf8.hpp"
#include "support.hpp"

using namespace pastetrace;
using testsupport::TempDir;
using clock_type = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(2);
    ss << std::fixed << v;
    return ss.str();
}

stego::StegoRecord random_record(std::mt19937_64& rng, UuidGenerator& ids) {
    stego::StegoRecord r{InstallId(ids.next()), ProjectId(ids.next()), {}};
    for (auto n = rng() % 4; n > 0; --n)
        r.stack_tail.push_back({static_cast<InfectionKind>(rng() % 4), InstallId(ids.next()),
                                rng() % 2 ? std::optional(ProjectId(ids.next())) : std::nullopt});
    return r;
}

struct StegoRun {
    std::size_t cases = 0, recovered = 0;
    std::size_t slices = 0, slices_with_frame = 0, slices_recovered = 0;
    std::size_t stripped_decodes = 0;
    std::size_t invisible = 0;
    double seconds = 0;
};

// Shared by the round-trip and invisibility criteria.
const StegoRun& stego_run() {
    static const StegoRun run = [] {
        StegoRun r;
        std::mt19937_64 rng(2024);
        UuidGenerator ids(2024);
        const auto t0 = clock_type::now();
        for (int i = 0; i < 1000; ++i) {
            ++r.cases;
            const auto text = testsupport::random_text(rng, 400 + rng() % 1600);
            const auto record = random_record(rng, ids);
            const auto marked = stego::embed(text, record);
            if (stego::strip_zwsp(marked) == text) ++r.invisible;

            auto got = stego::extract(marked);
            if (got.verdict == stego::Verdict::Decoded && got.records.size() == 1 &&
                got.records[0].install_id == record.install_id)
                ++r.recovered;

            const auto scalars = utf8::decode(marked);
            const auto visible = testsupport::to_u32(text);
            const std::size_t n = visible.size();
            const std::size_t frame = stego::frame_bits(*stego::select_tier(record, n - 1)).size();
            const std::size_t len = n * 6 / 10;
            const std::size_t a = rng() % (n - len + 1);
            // Whole frames occupy gaps [kF, kF+F) within the embedded channel.
            bool has_frame = false;
            for (std::size_t k = (a + frame - 1) / frame; (k + 1) * frame <= n - 1; ++k)
                if ((k + 1) * frame <= a + len - 1) has_frame = true;
            // Map visible-scalar slice [a, a+len) onto the watermarked text.
            std::size_t seen = 0, begin = 0, end = scalars.size();
            for (std::size_t p = 0; p < scalars.size(); ++p) {
                if (scalars[p] == stego::kZwsp) continue;
                if (seen == a) begin = p;
                if (seen == a + len - 1) {
                    end = p + 1;
                    break;
                }
                ++seen;
            }
            ++r.slices;
            if (has_frame) {
                ++r.slices_with_frame;
                auto part = stego::extract(std::u32string_view(scalars).substr(begin, end - begin));
                if (part.verdict == stego::Verdict::Decoded && !part.records.empty() &&
                    part.records[0].install_id == record.install_id)
                    ++r.slices_recovered;
            }
            if (stego::extract(stego::strip_zwsp(marked)).verdict != stego::Verdict::None) ++r.stripped_decodes;
        }
        r.seconds = seconds_since(t0);
        return r;
    }();
    return run;
}

Outcome stego_round_trip() {
    const auto& r = stego_run();
    Outcome o;
    o.pass = r.recovered == r.cases && r.slices_with_frame > 0 && r.slices_recovered == r.slices_with_frame &&
             r.stripped_decodes == 0 && r.seconds < 10.0;
    o.detail = "recovered " + std::to_string(r.recovered) + "/" + std::to_string(r.cases) + ", slices " +
               std::to_string(r.slices_recovered) + "/" + std::to_string(r.slices_with_frame) + " (of " +
               std::to_string(r.slices) + " drawn), decodes after strip " + std::to_string(r.stripped_decodes) +
               ", " + fmt(r.seconds) + " s";
    return o;
}

Outcome channel_invisibility() {
    const auto& r = stego_run();
    return {r.invisible == r.cases, std::to_string(r.invisible) + "/" + std::to_string(r.cases) + " exact"};
}

Outcome replay_equivalence() {
    TempDir dir("accept_replay");
    UuidGenerator ids(77);
    ManualClock clock(0);
    Machine home = Machine::load(dir / "home", ids), away = Machine::load(dir / "away", ids);
    std::mt19937_64 rng(77);
    std::size_t scripts_ok = 0, checks = 0;
    for (int script = 0; script < 500; ++script) {
        auto s = Session::create(home, new_project(home.install_id, "p", ids), clock.bind());
        auto donor = Session::create(away, new_project(away.install_id, "d", ids), clock.bind());
        donor.type_text(0, testsupport::random_text(rng, 700));
        std::u32string model;
        std::vector<ClipboardPayload> clips{{"plain\ntext", "web"}};
        bool ok = true;
        const int ops = 10 + static_cast<int>(rng() % 60);
        for (int op = 0; op < ops && ok; ++op) {
            clock.advance(static_cast<std::int64_t>(rng() % 2000));
            const auto n = model.size();
            switch (rng() % 6) {
                case 0:
                case 1: {
                    const auto at = rng() % (n + 1);
                    const auto t = testsupport::random_text(rng, 1 + rng() % 10);
                    s.type_text(at, t);
                    model.insert(at, testsupport::to_u32(t));
                    break;
                }
                case 2:
                    if (n) {
                        const auto at = rng() % n, len = 1 + rng() % (n - at);
                        s.delete_text(at, len);
                        model.erase(at, len);
                    }
                    break;
                case 3:
                case 4: {
                    if (n == 0) break;
                    auto a = rng() % n, b = rng() % n;
                    if (a > b) std::swap(a, b);
                    ++b;
                    if (rng() % 2) {
                        clips.push_back(s.copy(a, b));
                    } else {
                        clips.push_back(s.cut(a, b));
                        model.erase(a, b - a);
                    }
                    break;
                }
                default: {
                    const auto at = rng() % (n + 1);
                    const auto clip = rng() % 3 == 0 ? donor.copy(0, 200 + rng() % 500) : clips[rng() % clips.size()];
                    s.paste(clip, at);
                    model.insert(at, testsupport::to_u32(stego::strip_zwsp(clip.text)));
                    break;
                }
            }
            ++checks;
            const auto expected = testsupport::to_u8(model);
            ok = s.buffer() == expected && replay(s.events()) == expected;
        }
        if (ok) {
            const auto reopened = parse(s.save());
            ok = reopened.meta && replay(reopened.meta->events) == reopened.body;
        }
        if (ok) ++scripts_ok;
    }
    return {scripts_ok == 500, std::to_string(scripts_ok) + "/500 scripts, " + std::to_string(checks) + " checks"};
}

Outcome metacomment_round_trip() {
    std::mt19937_64 rng(99);
    UuidGenerator ids(99);
    std::size_t exact = 0, crashes = 0, prefix_ok = 0, salvaged = 0;
    for (int i = 0; i < 500; ++i) {
        const auto m = testsupport::random_meta(rng, ids);
        const auto body = testsupport::random_text(rng, rng() % 400);
        const auto file = render(m, body);
        const auto parsed = parse(file);
        if (parsed.meta && *parsed.meta == m && parsed.body == body) ++exact;

        const auto start = file.rfind(kMarkerOpen) + kMarkerOpen.size();
        const auto stop = file.rfind(kMarkerClose);
        const auto a = start + rng() % (stop - start);
        const auto len = 1 + rng() % (stop - a);
        try {
            const auto damaged = parse(file.substr(0, a) + file.substr(a + len));
            const auto& ev = damaged.meta ? damaged.meta->events : std::vector<EditEvent>{};
            if (ev.size() <= m.events.size() && std::equal(ev.begin(), ev.end(), m.events.begin())) ++prefix_ok;
            if (damaged.meta) ++salvaged;
        } catch (...) {
            ++crashes;
        }
    }
    return {exact == 500 && crashes == 0 && prefix_ok == 500,
            "exact " + std::to_string(exact) + "/500, deletions: crashes " + std::to_string(crashes) + ", prefixes " +
                std::to_string(prefix_ok) + "/500 (" + std::to_string(salvaged) + " with salvaged meta)"};
}

// Cohort fixture for threshold probes: student "s" pastes once.
struct Probe {
    TempDir dir{"accept_threshold"};
    UuidGenerator ids{5};
    ManualClock clock{0};

    Machine machine(const std::string& name) { return Machine::load(dir / ("machines/" + name), ids); }
    Session project(const Machine& m, const std::string& name) {
        return Session::create(m, new_project(m.install_id, name, ids), clock.bind());
    }
    void submit(const std::string& who, const Session& s) {
        auto p = dir / ("subs/" + who + "/sketch.pde");
        std::filesystem::create_directories(p.parent_path());
        std::ofstream(p, std::ios::binary) << s.save();
    }
    // nullopt unless the single paste landed in the expected category.
    std::optional<bool> flag_of(const std::string& who, PasteCategory category) {
        auto cohort = ingest(dir / "subs");
        auto report = analyze(cohort, build_graph(cohort));
        const auto* sub = report.find(who);
        if (!sub) return std::nullopt;
        auto it = sub->paste_counts.find(std::string(to_string(category)));
        if (it == sub->paste_counts.end() || it->second != 1) return std::nullopt;
        for (const auto& f : sub->findings)
            if (f.kind == FindingKind::Paste && f.category == category) return f.flagged;
        return false;
    }
};

std::string lines_of(std::size_t n, std::size_t width) {
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
        std::string line = "x" + std::to_string(i) + " += 1;";
        line.resize(width, ' ');
        line.back() = ';';
        out += (i ? "\n" : "") + line;
    }
    return out;
}

std::optional<bool> probe_external(std::size_t n) {
    Probe p;
    auto s = p.project(p.machine("pc"), "hw");
    s.paste({lines_of(n, 12), "web"}, 0);
    p.submit("s", s);
    return p.flag_of("s", PasteCategory::External);
}

std::optional<bool> probe_unassociated(std::size_t n) {
    Probe p;
    auto src = p.project(p.machine("stranger"), "src");
    src.type_text(0, lines_of(n, 30));
    auto clip = src.copy(0, src.length());
    auto s = p.project(p.machine("pc"), "hw");
    s.paste(clip, 0);
    p.submit("s", s);
    return p.flag_of("s", PasteCategory::UnassociatedMachine);
}

std::optional<bool> probe_same_machine(std::size_t n, bool shared) {
    Probe p;
    auto pc = p.machine("pc");
    auto src = p.project(pc, "older");
    src.type_text(0, lines_of(n, n < 10 ? 320 : 30));
    auto clip = src.copy(0, src.length());
    auto s = p.project(pc, "hw");
    s.paste(clip, 0);
    p.submit("s", s);
    if (shared) {
        auto other = p.project(pc, "t");
        other.type_text(0, "int t;");
        p.submit("t", other);
    }
    return p.flag_of("s", PasteCategory::SameMachineOtherProject);
}

std::optional<bool> probe_foreign_turned_in(std::size_t n) {
    Probe p;
    auto a = p.project(p.machine("a-pc"), "a");
    // Wide enough that even one line carries a frame.
    a.type_text(0, lines_of(n, n == 1 ? 200 : 100));
    auto clip = a.copy(0, a.length());
    p.submit("a", a);
    auto s = p.project(p.machine("pc"), "hw");
    s.paste(clip, 0);
    p.submit("s", s);
    return p.flag_of("s", PasteCategory::ForeignTurnedIn);
}

Outcome threshold_boundaries() {
    struct Case {
        std::string name;
        std::optional<bool> got;
        bool want;
    };
    const std::vector<Case> cases{
        {"external 3", probe_external(3), false},
        {"external 4", probe_external(4), true},
        {"unassociated 20", probe_unassociated(20), false},
        {"unassociated 21", probe_unassociated(21), true},
        {"same machine 50", probe_same_machine(50, false), false},
        {"same machine 51", probe_same_machine(51, false), true},
        {"shared machine 2", probe_same_machine(2, true), true},
        {"foreign turned-in 1", probe_foreign_turned_in(1), true},
        {"foreign turned-in 2", probe_foreign_turned_in(2), true},
    };
    Outcome o{true, ""};
    for (const auto& c : cases) {
        const bool ok = c.got && *c.got == c.want;
        o.pass &= ok;
        if (!ok) o.detail += c.name + " wrong; ";
    }
    if (o.pass) o.detail = std::to_string(cases.size()) + " boundary probes as expected";
    return o;
}

Outcome scenario_suite() {
    const auto t0 = clock_type::now();
    std::size_t cohorts = 0, matched = 0, tp = 0, fp = 0, fn = 0, organic_flags = 0;
    std::string first_mismatch;
    for (auto kind : {ScenarioKind::P2P, ScenarioKind::Collaboration, ScenarioKind::Theft, ScenarioKind::Search,
                      ScenarioKind::Expert, ScenarioKind::Organic}) {
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            TempDir dir("accept_scenario");
            const auto manifest = generate_scenario({kind, seed}, dir.path());
            const auto cohort = ingest(dir / "submissions");
            const auto report = analyze(cohort, build_graph(cohort));
            const auto cmp = compare(manifest, report);
            ++cohorts;
            if (cmp.match) ++matched;
            else if (first_mismatch.empty())
                first_mismatch = std::string(to_string(kind)) + "/" + std::to_string(seed) + ": " + cmp.mismatches[0];
            tp += cmp.true_positives;
            fp += cmp.false_positives;
            fn += cmp.false_negatives;
            if (kind == ScenarioKind::Organic)
                for (const auto& s : report.submissions) organic_flags += s.flagged();
        }
    }
    const double secs = seconds_since(t0);
    Outcome o;
    o.pass = matched == cohorts && fp == 0 && fn == 0 && organic_flags == 0 && secs < 60.0;
    o.detail = std::to_string(matched) + "/" + std::to_string(cohorts) + " cohorts match, tp " + std::to_string(tp) +
               " fp " + std::to_string(fp) + " fn " + std::to_string(fn) + ", organic flags " +
               std::to_string(organic_flags) + ", " + fmt(secs) + " s";
    if (!first_mismatch.empty()) o.detail += "; first mismatch " + first_mismatch;
    return o;
}

Outcome unmodified_file_handoff() {
    Probe p;
    auto a = p.project(p.machine("a-pc"), "a");
    a.type_text(0, "void setup() {\n  size(400, 400);\n}\n");
    p.submit("a", a);
    p.submit("b", a);
    auto cohort = ingest(p.dir / "subs");
    auto report = analyze(cohort, build_graph(cohort));
    const auto* b = report.find("b");
    const bool ok = b && b->verdict == Verdict::PlagiarismDetected && b->edits_after_last_flag == 0;
    return {ok, ok ? "copy flagged with 0 edits after" : "copy not flagged with 0 edits after"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"stego round-trip", stego_round_trip},
        {"channel invisibility", channel_invisibility},
        {"replay equivalence", replay_equivalence},
        {"metaComment round-trip and fault tolerance", metacomment_round_trip},
        {"threshold boundaries", threshold_boundaries},
        {"scenario suite", scenario_suite},
        {"unmodified file handoff", unmodified_file_handoff},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << ": " << o.detail << std::endl;
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}

#include "pastetrace/scenario.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <json.hpp>
#include <random>

#include "pastetrace/errors.hpp"
#include "pastetrace/identity.hpp"
#include "pastetrace/session.hpp"
#include "pastetrace/stego.hpp"

namespace pastetrace {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::array<std::pair<ScenarioKind, std::string_view>, 6> kKindNames{{
    {ScenarioKind::P2P, "p2p"},
    {ScenarioKind::Collaboration, "collaboration"},
    {ScenarioKind::Theft, "theft"},
    {ScenarioKind::Search, "search"},
    {ScenarioKind::Expert, "expert"},
    {ScenarioKind::Organic, "organic"},
}};

constexpr std::int64_t kEpoch = 1'700'000'000'000;
constexpr std::string_view kSketch = "sketch.pde";

// Minimum visible characters for a copy whose watermark carries the ProjectID.
constexpr std::size_t kProjectTrackable = stego::kPreferredCopies * (stego::kFrameOverheadBits + 8 * stego::kWithProjectPayload) + 1;

void write_file(const fs::path& p, std::string_view content) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + p.string());
    out << content;
}

// Shared state for one generated cohort. Sessions bind to the clock member,
// so a World never moves.
class World {
  public:
    World(const Scenario& s, fs::path out)
        : out_(std::move(out)), rng(s.seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(s.kind)),
          ids(s.seed ^ (0xA5A5A5A5ull << static_cast<unsigned>(s.kind))), clock(kEpoch + static_cast<std::int64_t>(s.seed % 1000) * 86'400'000) {}
    World(const World&) = delete;
    World& operator=(const World&) = delete;

    Machine machine(const std::string& name) {
        fs::path dir = out_ / "machines" / name;
        fs::create_directories(dir);
        return Machine::load(dir, ids);
    }

    Session create(const Machine& m, const std::string& name) {
        return Session::create(m, new_project(m.install_id, name, ids), clock.bind());
    }

    Session open(const Machine& m, std::string_view text) { return Session::open(m, text, clock.bind(), ids); }

    void submit(const Session& s, const std::string& student) { write_file(out_ / "submissions" / student / kSketch, s.save()); }

    void submit_plain(const std::string& student, std::string_view text) {
        write_file(out_ / "submissions" / student / kSketch, text);
    }

    std::size_t uniform(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); }
    bool chance(double p) { return std::bernoulli_distribution(p)(rng); }
    void tick() { clock.advance(static_cast<std::int64_t>(uniform(60, 900))); }
    void pause() { clock.advance(static_cast<std::int64_t>(uniform(60'000, 3'600'000))); }

    std::string code_line() {
        static constexpr std::array<std::string_view, 10> names{"x", "y", "speed", "angle", "radius", "hue", "total",
                                                                "offsetX", "offsetY", "scale"};
        static constexpr std::array<std::string_view, 6> words{"bounce", "edge", "color", "shape", "frame", "zoom"};
        auto n = [&] { return std::to_string(uniform(1, 400)); };
        auto v = [&] { return std::string(names[uniform(0, names.size() - 1)]); };
        std::string indent(2 * uniform(0, 2), ' ');
        switch (uniform(0, 6)) {
            case 0: return indent + "float " + v() + n() + " = " + n() + " * " + v() + " + " + n() + ";";
            case 1: return indent + "if (" + v() + " > width - " + n() + ") { " + v() + " = -" + v() + "; }";
            case 2: return indent + "ellipse(" + v() + ", " + v() + ", " + n() + ", " + n() + ");";
            case 3: return indent + "for (int i = 0; i < " + n() + "; i++) { " + v() + " += i * " + n() + "; }";
            case 4: return indent + "// adjust " + std::string(words[uniform(0, words.size() - 1)]) + " for step " + n();
            case 5: return indent + "fill(" + n() + ", " + n() + ", " + n() + ");";
            default: return indent + v() + " = lerp(" + v() + ", " + v() + ", 0." + n() + ");";
        }
    }

    /// Exactly `lines` lines, no trailing LF, at least min_chars long.
    std::string code_block(std::size_t lines, std::size_t min_chars = 0) {
        std::vector<std::string> out(lines);
        std::size_t chars = lines - 1;
        for (auto& l : out) {
            l = code_line();
            chars += l.size();
        }
        for (std::size_t i = 0; chars < min_chars; i = (i + 1) % lines) {
            std::string pad = " // " + code_line().substr(0, 30);
            out[i] += pad;
            chars += pad.size();
        }
        std::string joined;
        for (std::size_t i = 0; i < lines; ++i) joined += (i ? "\n" : "") + out[i];
        return joined;
    }

    /// Types text at the end of the buffer the way a person would.
    void type(Session& s, std::string_view text) {
        const bool by_char = chance(0.5);
        std::size_t i = 0;
        while (i < text.size()) {
            tick();
            if (by_char) {
                if (chance(0.03)) {
                    s.type_text(s.length(), "q");
                    tick();
                    s.delete_text(s.length() - 1, 1);
                    tick();
                }
                s.type_text(s.length(), text.substr(i, 1));
                ++i;
            } else {
                std::size_t end = text.find_first_of(" \n", i);
                end = end == std::string_view::npos ? text.size() : end + 1;
                s.type_text(s.length(), text.substr(i, end - i));
                i = end;
            }
        }
    }

    /// Types each line in one event; used for helper projects nobody submits.
    void type_fast(Session& s, std::string_view text) {
        std::size_t i = 0;
        while (i < text.size()) {
            tick();
            std::size_t end = text.find('\n', i);
            end = end == std::string_view::npos ? text.size() : end + 1;
            s.type_text(s.length(), text.substr(i, end - i));
            i = end;
        }
    }

    void newline(Session& s) {
        tick();
        s.type_text(s.length(), "\n");
    }

    /// Single-event edits after a planted paste. Returns the number of events.
    std::size_t tweak(Session& s, std::size_t count) {
        for (std::size_t k = 0; k < count; ++k) {
            tick();
            if (s.length() > 4 && chance(0.4)) {
                s.delete_text(uniform(0, s.length() - 2), 1);
            } else {
                s.type_text(uniform(0, s.length()), chance(0.5) ? " " : "// ok");
            }
        }
        return count;
    }

    /// Offsets of whole lines [first, first+count) in the current buffer.
    static std::pair<std::uint64_t, std::uint64_t> line_range(const std::string& text, std::size_t first, std::size_t count) {
        std::vector<std::size_t> starts{0};
        for (std::size_t i = 0; i < text.size(); ++i)
            if (text[i] == '\n') starts.push_back(i + 1);
        first = std::min(first, starts.size() - 1);
        std::size_t last = std::min(first + count, starts.size());
        std::uint64_t begin = starts[first];
        std::uint64_t end = last < starts.size() ? starts[last] - 1 : text.size();
        return {begin, end};
    }

  private:
    fs::path out_;

  public:
    std::mt19937_64 rng;
    UuidGenerator ids;
    ManualClock clock;
};

struct OrganicOptions {
    bool same_machine_paste = true;
};

// A student who writes their own code. Every paste stays at or below its
// category's threshold.
void organic_student(World& w, Manifest& manifest, const std::string& label, OrganicOptions opt = {},
                     std::optional<Machine> machine = std::nullopt) {
    Machine m = machine ? *machine : w.machine(label + "-pc");
    std::optional<Session> helper;
    if (opt.same_machine_paste && w.chance(0.6)) {
        helper.emplace(w.create(m, label + "-old"));
        w.type_fast(*helper, w.code_block(w.uniform(55, 65), 1400));
    }
    Session s = w.create(m, label + "-hw");
    w.type(s, w.code_block(w.uniform(10, 16)));
    w.newline(s);

    // Reuse a few of their own lines.
    {
        auto text = s.buffer();
        auto [b, e] = World::line_range(text, w.uniform(0, 5), w.uniform(2, 6));
        w.tick();
        auto clip = s.copy(b, e);
        w.pause();
        s.paste(clip, s.length());
        w.newline(s);
    }
    if (w.chance(0.6)) {
        w.tick();
        s.paste({w.code_block(w.uniform(1, 3)), "docs"}, s.length());
        w.newline(s);
    }
    if (helper) {
        const std::size_t lines = w.chance(0.5) ? 50 : w.uniform(10, 50);
        auto [b, e] = World::line_range(helper->buffer(), 0, lines);
        w.tick();
        auto clip = helper->copy(b, e);
        w.tick();
        s.paste(clip, s.length());
        w.newline(s);
    }
    if (w.chance(0.5)) {
        // Code from a personal laptop that never submits anything.
        Machine laptop = w.machine(label + "-laptop");
        Session side = w.create(laptop, label + "-scratch");
        w.type_fast(side, w.code_block(24, 700));
        const std::size_t lines = w.chance(0.5) ? 20 : w.uniform(8, 20);
        auto [b, e] = World::line_range(side.buffer(), 0, lines);
        w.tick();
        auto clip = side.copy(b, e);
        w.pause();
        s.paste(clip, s.length());
        w.newline(s);
    }
    w.type(s, w.code_block(w.uniform(8, 14)));
    w.submit(s, label);
    manifest.students[label] = {Verdict::NoPlagiarismDetected, "organic", std::nullopt};
}

std::vector<std::string> labels(World& w, std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(std::string(1, static_cast<char>('A' + i)));
    std::shuffle(out.begin(), out.end(), w.rng);
    return out;
}

// Copy `lines` whole lines starting at `first`, growing the range until the
// clipboard is long enough to carry the wanted watermark tier.
ClipboardPayload copy_lines(World& w, Session& s, std::size_t first, std::size_t lines, std::size_t min_chars) {
    const auto text = s.buffer();
    auto [b, e] = World::line_range(text, first, lines);
    while (e - b < min_chars && e < text.size()) {
        auto [b2, e2] = World::line_range(text, first, ++lines);
        b = b2, e = e2;
    }
    if (e - b < min_chars) throw Error("scenario generator: source too short to watermark");
    w.tick();
    return s.copy(b, e);
}

void gen_p2p(World& w, Manifest& m, const Scenario& sc, std::vector<std::string>& who) {
    const auto author = who[0], peer = who[1];
    Machine ma = w.machine(author + "-pc");
    Machine mp = w.machine(peer + "-pc");
    Session a = w.create(ma, author + "-hw");
    w.type(a, w.code_block(w.uniform(20, 30), 700));

    if (w.chance(0.5)) {
        // Handoff of the saved file; the peer edits it on their own machine.
        w.submit(a, author);
        w.pause();
        Session p = w.open(mp, a.save());
        const auto tweaks = w.tweak(p, sc.tweaks);
        w.submit(p, peer);
        m.students[peer] = {Verdict::PlagiarismDetected, "p2p-file", tweaks};
    } else {
        // Code sent over a messenger.
        auto clip = copy_lines(w, a, 0, w.uniform(2, 20), stego::kMinFrameBits + 1);
        w.submit(a, author);
        Session p = w.create(mp, peer + "-hw");
        w.type(p, w.code_block(w.uniform(2, 5)));
        w.newline(p);
        w.pause();
        p.paste(clip, p.length());
        const auto tweaks = w.tweak(p, sc.tweaks);
        w.submit(p, peer);
        m.students[peer] = {Verdict::PlagiarismDetected, "p2p-message", tweaks};
    }
    m.students[author] = {Verdict::NoPlagiarismDetected, "author", std::nullopt};
}

void gen_collaboration(World& w, Manifest& m, std::vector<std::string>& who) {
    const auto x = who[0], y = who[1];
    Machine mx = w.machine(x + "-pc");
    Machine my = w.machine(y + "-pc");
    Session sx = w.create(mx, x + "-hw");
    Session sy = w.create(my, y + "-hw");
    const std::size_t rounds = w.uniform(2, 3);
    for (std::size_t r = 0; r < rounds; ++r) {
        for (auto [from, to] : {std::pair{&sx, &sy}, std::pair{&sy, &sx}}) {
            const auto before = from->buffer();
            const std::size_t first_line =
                static_cast<std::size_t>(std::count(before.begin(), before.end(), '\n'));
            w.type(*from, w.code_block(w.uniform(6, 10), 260));
            w.newline(*from);
            auto clip = copy_lines(w, *from, first_line, 6, stego::kMinFrameBits + 1);
            w.tick();
            to->paste(clip, to->length());
            w.newline(*to);
        }
    }
    w.submit(sx, x);
    w.submit(sy, y);
    m.students[x] = {Verdict::PlagiarismDetected, "collaborator", std::nullopt};
    m.students[y] = {Verdict::PlagiarismDetected, "collaborator", std::nullopt};
    m.collaboration_pairs.emplace_back(std::min(x, y), std::max(x, y));
}

void gen_theft(World& w, Manifest& m, const Scenario& sc, std::vector<std::string>& who) {
    const auto author = who[0], thief = who[1];
    Machine lab = w.machine("lab-1");
    Machine home = w.machine(thief + "-pc");

    Session a = w.create(lab, author + "-hw");
    w.type(a, w.code_block(w.uniform(32, 40), kProjectTrackable + 200));
    w.submit(a, author);
    const std::string left_on_lab = a.save();

    Session t = w.create(home, thief + "-hw");
    w.type(t, w.code_block(w.uniform(3, 6)));
    w.newline(t);
    const std::string thief_draft = t.save();
    w.pause();

    // At the lab: open the author's leftover file, copy, paste into own project.
    Session found = w.open(lab, left_on_lab);
    auto clip = copy_lines(w, found, 0, w.uniform(25, 30), kProjectTrackable);
    Session t_lab = w.open(lab, thief_draft);
    w.tick();
    t_lab.paste(clip, t_lab.length());
    const auto tweaks = w.tweak(t_lab, sc.tweaks);
    w.submit(t_lab, thief);
    m.students[thief] = {Verdict::PlagiarismDetected, "thief", tweaks};
    m.students[author] = {Verdict::NoPlagiarismDetected, "theft-victim", std::nullopt};
}

void gen_search(World& w, Manifest& m, const Scenario& sc, std::vector<std::string>& who) {
    const auto s = who[0];
    Machine ms = w.machine(s + "-pc");
    const std::string found = w.code_block(w.uniform(4, 60));
    switch (w.uniform(0, 2)) {
        case 0: {
            Session sess = w.create(ms, s + "-hw");
            w.type(sess, w.code_block(w.uniform(2, 6)));
            w.newline(sess);
            w.tick();
            sess.paste({found, "browser"}, sess.length());
            const auto tweaks = w.tweak(sess, sc.tweaks);
            w.submit(sess, s);
            m.students[s] = {Verdict::PlagiarismDetected, "search-paste", tweaks};
            break;
        }
        case 1:
            w.submit_plain(s, found + "\n");
            m.students[s] = {Verdict::NoMetacomment, "search-unopened", std::nullopt};
            break;
        default: {
            Session sess = w.open(ms, found + "\n");
            const auto tweaks = w.tweak(sess, sc.tweaks);
            w.submit(sess, s);
            m.students[s] = {Verdict::PlagiarismDetected, "search-opened", tweaks};
            break;
        }
    }
}

void gen_expert(World& w, Manifest& m, const Scenario& sc, std::vector<std::string>& who) {
    const auto s = who[0];
    Machine ms = w.machine(s + "-pc");
    Session sess = w.create(ms, s + "-hw");
    w.type(sess, w.code_block(w.uniform(2, 6)));
    w.newline(sess);
    std::string role;
    switch (w.uniform(0, 2)) {
        case 0:
            w.tick();
            sess.paste({w.code_block(w.uniform(4, 80)), "paid-site"}, sess.length());
            role = "expert-external";
            break;
        case 1: {
            // The tutor writes the solution on a machine no student submits from.
            Machine tutor = w.machine("tutor-pc");
            Session solution = w.create(tutor, "solution");
            w.type_fast(solution, w.code_block(70, 1600));
            auto clip = copy_lines(w, solution, 0, w.uniform(21, 60), stego::kMinFrameBits + 1);
            w.pause();
            sess.paste(clip, sess.length());
            role = "expert-unassociated";
            break;
        }
        default: {
            // Solution assembled in a scratch project, then moved in wholesale.
            Session scratch = w.create(ms, s + "-scratch");
            w.type_fast(scratch, w.code_block(75, 1600));
            auto clip = copy_lines(w, scratch, 0, w.uniform(51, 70), kProjectTrackable);
            w.tick();
            sess.paste(clip, sess.length());
            role = "expert-same-machine";
            break;
        }
    }
    const auto tweaks = w.tweak(sess, sc.tweaks);
    w.submit(sess, s);
    m.students[s] = {Verdict::PlagiarismDetected, role, tweaks};
}

}  // namespace

std::string_view to_string(ScenarioKind k) {
    for (const auto& [kind, name] : kKindNames)
        if (kind == k) return name;
    return "unknown";
}

std::optional<ScenarioKind> parse_scenario_kind(std::string_view text) {
    for (const auto& [kind, name] : kKindNames)
        if (name == text) return kind;
    return std::nullopt;
}

Manifest generate_scenario(const Scenario& sc, const fs::path& out_dir) {
    if (sc.cohort_size < 2 || sc.cohort_size > 26) throw ValidationError("cohort size must be between 2 and 26");
    fs::create_directories(out_dir / "submissions");
    World w(sc, out_dir);
    Manifest m;
    m.kind = sc.kind;
    m.seed = sc.seed;
    auto who = labels(w, sc.cohort_size);

    std::size_t actors = 0;
    switch (sc.kind) {
        case ScenarioKind::P2P: gen_p2p(w, m, sc, who), actors = 2; break;
        case ScenarioKind::Collaboration: gen_collaboration(w, m, who), actors = 2; break;
        case ScenarioKind::Theft: gen_theft(w, m, sc, who), actors = 2; break;
        case ScenarioKind::Search: gen_search(w, m, sc, who), actors = 1; break;
        case ScenarioKind::Expert: gen_expert(w, m, sc, who), actors = 1; break;
        case ScenarioKind::Organic: break;
    }
    for (std::size_t i = actors; i < who.size(); ++i) {
        w.pause();
        organic_student(w, m, who[i]);
    }
    write_file(out_dir / "manifest.json", render_manifest(m));
    return m;
}

std::string render_manifest(const Manifest& m) {
    json j;
    j["kind"] = to_string(m.kind);
    j["seed"] = m.seed;
    j["students"] = json::object();
    for (const auto& [label, e] : m.students) {
        json s{{"verdict", to_string(e.verdict)}, {"role", e.role}};
        if (e.edits_after) s["edits_after"] = *e.edits_after;
        j["students"][label] = std::move(s);
    }
    j["collaboration_pairs"] = json::array();
    for (const auto& [a, b] : m.collaboration_pairs) j["collaboration_pairs"].push_back({a, b});
    return j.dump(2) + "\n";
}

Manifest parse_manifest(std::string_view text) {
    try {
        auto j = json::parse(text);
        Manifest m;
        auto kind = parse_scenario_kind(j.at("kind").get<std::string>());
        if (!kind) throw ValidationError("unknown scenario kind");
        m.kind = *kind;
        m.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& [label, s] : j.at("students").items()) {
            auto verdict = parse_verdict(s.at("verdict").get<std::string>());
            if (!verdict) throw ValidationError("unknown verdict in manifest");
            ExpectedOutcome e{*verdict, s.at("role").get<std::string>(), std::nullopt};
            if (s.contains("edits_after")) e.edits_after = s.at("edits_after").get<std::uint64_t>();
            m.students[label] = std::move(e);
        }
        for (const auto& p : j.at("collaboration_pairs"))
            m.collaboration_pairs.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
        return m;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed manifest: ") + e.what());
    }
}

ManifestComparison compare(const Manifest& manifest, const Report& report) {
    ManifestComparison c;
    auto miss = [&](std::string what) {
        c.match = false;
        c.mismatches.push_back(std::move(what));
    };
    for (const auto& s : report.submissions)
        if (!manifest.students.contains(s.student)) miss(s.student + ": not in manifest");
    for (const auto& [label, expected] : manifest.students) {
        const auto* got = report.find(label);
        if (!got) {
            miss(label + ": missing from report");
            continue;
        }
        const bool want_flag = expected.verdict != Verdict::NoPlagiarismDetected;
        if (want_flag && got->flagged()) ++c.true_positives;
        if (!want_flag && got->flagged()) ++c.false_positives;
        if (want_flag && !got->flagged()) ++c.false_negatives;
        if (got->verdict != expected.verdict)
            miss(label + ": expected " + std::string(to_string(expected.verdict)) + ", got " +
                 std::string(to_string(got->verdict)));
        if (expected.edits_after && got->edits_after_last_flag != expected.edits_after)
            miss(label + ": expected " + std::to_string(*expected.edits_after) + " edits after, got " +
                 (got->edits_after_last_flag ? std::to_string(*got->edits_after_last_flag) : "none"));
    }
    for (const auto& [a, b] : manifest.collaboration_pairs) {
        for (auto [self, other] : {std::pair{a, b}, std::pair{b, a}}) {
            const auto* got = report.find(self);
            const bool signalled = got && std::any_of(got->findings.begin(), got->findings.end(), [&](const Finding& f) {
                return f.kind == FindingKind::CollaborationSignal &&
                       std::find(f.related_students.begin(), f.related_students.end(), other) != f.related_students.end();
            });
            if (!signalled) miss(self + ": missing collaboration signal with " + other);
        }
    }
    return c;
}

}  // namespace pastetrace

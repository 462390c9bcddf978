#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <iterator>
#include <json.hpp>
#include <sstream>

#include "pastetrace/analyzer.hpp"
#include "pastetrace/errors.hpp"
#include "pastetrace/identity.hpp"
#include "pastetrace/metacomment.hpp"
#include "pastetrace/report.hpp"
#include "pastetrace/scenario.hpp"
#include "pastetrace/script.hpp"
#include "pastetrace/session.hpp"
#include "pastetrace/stego.hpp"
#include "pastetrace/utf8.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pastetrace;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitFlagged = 2;

std::string read_all(const std::string& path) {
    if (path.empty() || path == "-") {
        return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_all(const std::string& path, std::string_view content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    if (auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path);
    out << content;
}

json record_json(const stego::StegoRecord& r) {
    json j{{"install_id", r.install_id.str()}};
    if (r.project_id) j["project_id"] = r.project_id->str();
    j["stack_tail"] = json::array();
    for (const auto& t : r.stack_tail) {
        json item{{"kind", to_string(t.kind)}};
        if (t.install_id) item["install_id"] = t.install_id->str();
        if (t.project_id) item["project_id"] = t.project_id->str();
        j["stack_tail"].push_back(std::move(item));
    }
    return j;
}

// Event timeline plus the buffer after every event, consumed by the review UI.
json replay_export(const ParsedFile& parsed) {
    json j;
    j["events"] = json::array();
    j["snapshots"] = json::array();
    j["diagnostics"] = parsed.diagnostics;
    if (!parsed.meta) {
        j["final"] = parsed.body;
        return j;
    }
    const auto& events = parsed.meta->events;
    const auto snapshots = replay_snapshots(events);
    std::u32string before;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        auto [line, col] = line_col(before, std::min<std::uint64_t>(e.offset, before.size()));
        json ev{{"seq", e.seq}, {"timestamp", e.timestamp}, {"kind", to_string(e.kind)}, {"offset", e.offset},
                {"line", line}, {"col", col}, {"text", e.text}};
        if (e.origin) {
            json o{{"kind", to_string(e.origin->kind)}};
            if (e.origin->install_id) o["install_id"] = e.origin->install_id->str();
            if (e.origin->project_id) o["project_id"] = e.origin->project_id->str();
            ev["origin"] = std::move(o);
        }
        if (e.line_count) ev["line_count"] = *e.line_count;
        j["events"].push_back(std::move(ev));
        j["snapshots"].push_back(snapshots[i]);
        before = utf8::decode(snapshots[i]);
    }
    j["final"] = parsed.body;
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pastetrace: paste provenance tracing for programming submissions"};
    app.require_subcommand(1);

    std::string state_dir = ".pastetrace";
    auto add_state = [&](CLI::App* sub) {
        sub->add_option("--state", state_dir, "machine state directory holding install_id")->capture_default_str();
    };

    // init
    auto* init = app.add_subcommand("init", "create or show this machine's InstallID; optionally start a project file");
    add_state(init);
    std::string init_project, init_out;
    init->add_option("--project", init_project, "name of a new project");
    init->add_option("--out", init_out, "file to write the empty project to (requires --project)");

    // run
    auto* run = app.add_subcommand("run", "run an edit script");
    add_state(run);
    std::string script_path;
    run->add_option("script", script_path, "edit script")->required();

    // copy
    auto* copy = app.add_subcommand("copy", "copy a region of a file; the file gains a copy event");
    add_state(copy);
    std::string copy_file, copy_out;
    std::uint64_t copy_start = 0, copy_end = 0;
    bool copy_cut = false;
    copy->add_option("file", copy_file, "source file")->required();
    copy->add_option("--start", copy_start, "first scalar offset")->required();
    copy->add_option("--end", copy_end, "one past the last scalar offset")->required();
    copy->add_option("--out", copy_out, "clipboard output (default stdout)");
    copy->add_flag("--cut", copy_cut, "remove the region after copying");

    // paste
    auto* paste = app.add_subcommand("paste", "paste clipboard text into a file");
    add_state(paste);
    std::string paste_file, paste_clip;
    std::optional<std::uint64_t> paste_at;
    paste->add_option("file", paste_file, "target file (created if missing)")->required();
    paste->add_option("--clip", paste_clip, "clipboard file (default stdin)");
    paste->add_option("--at", paste_at, "scalar offset (default end of buffer)");

    // encode
    auto* encode = app.add_subcommand("encode", "embed a provenance record into text");
    std::string enc_install, enc_project, enc_in, enc_out;
    encode->add_option("--install", enc_install, "InstallID to embed")->required();
    encode->add_option("--project", enc_project, "ProjectID to embed");
    encode->add_option("--in", enc_in, "input text (default stdin)");
    encode->add_option("--out", enc_out, "output (default stdout)");

    // decode
    auto* decode = app.add_subcommand("decode", "extract provenance records from text");
    std::string dec_in;
    decode->add_option("--in", dec_in, "input text (default stdin)");

    // analyze
    auto* analyze_cmd = app.add_subcommand("analyze", "classify a directory of submissions");
    std::string an_dir, an_known, an_out, an_format = "human";
    analyze_cmd->add_option("dir", an_dir, "one subdirectory per student")->required()->check(CLI::ExistingDirectory);
    analyze_cmd->add_option("--known-machines", an_known, "file of shared machine InstallIDs")->check(CLI::ExistingFile);
    analyze_cmd->add_option("--out", an_out, "report path (default stdout)");
    analyze_cmd->add_option("--format", an_format, "structured or human")
        ->check(CLI::IsMember({"structured", "human"}))
        ->capture_default_str();

    // scenario gen
    auto* scenario = app.add_subcommand("scenario", "synthetic cohorts with ground truth");
    scenario->require_subcommand(1);
    auto* gen = scenario->add_subcommand("gen", "generate a cohort and manifest");
    std::string sc_kind, sc_out;
    Scenario sc;
    gen->add_option("--kind", sc_kind, "p2p, collaboration, theft, search, expert or organic")->required();
    gen->add_option("--seed", sc.seed, "generator seed")->required();
    gen->add_option("--out", sc_out, "output directory")->required();
    gen->add_option("--cohort", sc.cohort_size, "number of students")->capture_default_str();
    gen->add_option("--tweaks", sc.tweaks, "edits made after a planted paste")->capture_default_str();

    // replay export
    auto* replay_cmd = app.add_subcommand("replay", "event timeline tools");
    replay_cmd->require_subcommand(1);
    auto* exp = replay_cmd->add_subcommand("export", "dump events and per-event snapshots as JSON");
    std::string rp_file, rp_out;
    exp->add_option("file", rp_file, "source file with a metaComment")->required();
    exp->add_option("--out", rp_out, "output (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        if (*init) {
            auto machine = Machine::load(state_dir);
            std::cout << machine.install_id.str() << "\n";
            if (!init_project.empty()) {
                auto project = new_project(machine.install_id, init_project);
                const auto text = render(project.meta, "");
                if (init_out.empty()) init_out = init_project + ".pde";
                write_all(init_out, text);
                std::cout << project.meta.project_id.str() << "\n";
            }
        } else if (*run) {
            auto result = run_script(script_path, state_dir);
            for (const auto& p : result.saved) std::cout << "saved " << p.string() << "\n";
            for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
        } else if (*copy) {
            auto machine = Machine::load(state_dir);
            auto session = Session::open(machine, read_all(copy_file), system_clock());
            auto clip = copy_cut ? session.cut(copy_start, copy_end) : session.copy(copy_start, copy_end);
            write_all(copy_file, session.save());
            write_all(copy_out, clip.text);
            for (const auto& w : session.warnings()) std::cerr << "warning: " << w << "\n";
        } else if (*paste) {
            auto machine = Machine::load(state_dir);
            const std::string existing = fs::exists(paste_file) ? read_all(paste_file) : std::string();
            auto session = fs::exists(paste_file)
                               ? Session::open(machine, existing, system_clock())
                               : Session::create(machine, new_project(machine.install_id, fs::path(paste_file).stem().string()),
                                                 system_clock());
            session.paste({read_all(paste_clip), "cli"}, paste_at.value_or(session.length()));
            write_all(paste_file, session.save());
            const auto& last = session.events().back();
            std::cout << "pasted " << *last.line_count << " line(s), origin " << to_string(last.origin->kind) << "\n";
            for (const auto& w : session.warnings()) std::cerr << "warning: " << w << "\n";
        } else if (*encode) {
            auto install = InstallId::parse(enc_install);
            if (!install) throw ValidationError("malformed InstallID: " + enc_install);
            stego::StegoRecord record{*install, std::nullopt, {}};
            if (!enc_project.empty()) {
                record.project_id = ProjectId::parse(enc_project);
                if (!record.project_id) throw ValidationError("malformed ProjectID: " + enc_project);
            }
            const auto text = read_all(enc_in);
            if (!stego::select_tier(record, stego::capacity(text)))
                std::cerr << "warning: text too short to carry a frame, left unchanged\n";
            write_all(enc_out, stego::embed(text, record));
        } else if (*decode) {
            const auto result = stego::extract(read_all(dec_in));
            json j{{"verdict", result.verdict == stego::Verdict::Decoded ? "decoded" : "none"}, {"records", json::array()}};
            for (const auto& r : result.records) j["records"].push_back(record_json(r));
            std::cout << j.dump(2) << "\n";
        } else if (*analyze_cmd) {
            std::set<InstallId> known;
            if (!an_known.empty()) known = parse_known_machines(read_all(an_known));
            const auto cohort = ingest(an_dir);
            const auto report = analyze(cohort, build_graph(cohort, known));
            const auto format = an_format == "structured" ? ReportFormat::Structured : ReportFormat::Human;
            write_all(an_out, render_report(report, format));
            const bool flagged =
                std::any_of(report.submissions.begin(), report.submissions.end(), [](const auto& s) { return s.flagged(); });
            return flagged ? kExitFlagged : kExitOk;
        } else if (*scenario && *gen) {
            auto kind = parse_scenario_kind(sc_kind);
            if (!kind) throw ValidationError("unknown scenario kind: " + sc_kind);
            sc.kind = *kind;
            const auto manifest = generate_scenario(sc, sc_out);
            std::cout << "wrote " << manifest.students.size() << " submissions to " << (fs::path(sc_out) / "submissions").string()
                      << "\n";
        } else if (*replay_cmd && *exp) {
            write_all(rp_out, replay_export(parse(read_all(rp_file))).dump(2) + "\n");
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitOk;
}

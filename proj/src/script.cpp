#include "pastetrace/script.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "pastetrace/errors.hpp"

namespace pastetrace {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot read " + p.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const fs::path& p, std::string_view content) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + p.string());
    out << content;
}

std::uint64_t fnv1a(std::string_view a, std::string_view b) {
    std::uint64_t h = 1469598103934665603ull;
    for (auto part : {a, b})
        for (unsigned char c : part) h = (h ^ c) * 1099511628211ull;
    return h;
}

class Interpreter {
  public:
    Interpreter(std::string_view script, fs::path base, const Machine& machine)
        : base_(std::move(base)), machine_(machine), gen_(fnv1a(script, machine.install_id.str())) {}

    void execute(std::size_t line_no, std::string_view line) {
        line_ = line_no;
        std::istringstream in{std::string(line)};
        std::string cmd;
        in >> cmd;
        if (cmd == "CLOCK") return clock_cmd(word(in, "time"));
        if (cmd == "SEED") return seed_cmd(word(in, "seed"));
        if (cmd == "OPEN") return open_cmd(word(in, "path or NEW"), in);
        if (cmd == "TYPE") {
            auto offset = position(word(in, "offset"));
            return session().type_text(offset, literal(rest(in)));
        }
        if (cmd == "DELETE") {
            auto offset = number(word(in, "offset"));
            return session().delete_text(offset, number(word(in, "length")));
        }
        if (cmd == "COPY" || cmd == "CUT") {
            auto start = number(word(in, "start"));
            auto end = position(word(in, "end"));
            auto slot = word(in, "slot");
            clips_[slot] = cmd == "COPY" ? session().copy(start, end) : session().cut(start, end);
            return;
        }
        if (cmd == "PASTE") return paste_cmd(in);
        if (cmd == "CLIPOUT") {
            auto slot = word(in, "slot");
            auto it = clips_.find(slot);
            if (it == clips_.end()) fail("empty clipboard slot " + slot);
            write_file(resolve(word(in, "path")), it->second.text);
            return;
        }
        if (cmd == "SAVE") {
            auto path = resolve(word(in, "path"));
            write_file(path, session().save());
            result.saved.push_back(path);
            return;
        }
        fail("unknown command " + cmd);
    }

    ScriptResult result;

  private:
    [[noreturn]] void fail(const std::string& what) const { throw ScriptError(line_, what); }

    std::string word(std::istringstream& in, const char* what) const {
        std::string w;
        if (!(in >> w)) fail(std::string("missing ") + what);
        return w;
    }

    static std::string rest(std::istringstream& in) {
        std::string r;
        std::getline(in >> std::ws, r);
        return r;
    }

    std::string literal(const std::string& text) const {
        try {
            auto j = nlohmann::json::parse(text);
            if (j.is_string()) return j.get<std::string>();
        } catch (const nlohmann::json::exception&) {
        }
        fail("expected a quoted string");
    }

    std::uint64_t number(const std::string& w) const {
        try {
            std::size_t used = 0;
            auto v = std::stoull(w, &used);
            if (used == w.size()) return v;
        } catch (const std::exception&) {
        }
        fail("expected a number, got " + w);
    }

    std::uint64_t position(const std::string& w) { return w == "END" ? session().length() : number(w); }

    fs::path resolve(const std::string& p) const {
        fs::path path(p);
        return path.is_absolute() ? path : base_ / path;
    }

    Session& session() {
        if (!session_) fail("no open file");
        return *session_;
    }

    void clock_cmd(const std::string& w) {
        if (!w.empty() && w.front() == '+') {
            clock_.advance(static_cast<std::int64_t>(number(w.substr(1))));
        } else {
            clock_.set(static_cast<std::int64_t>(number(w)));
        }
    }

    void seed_cmd(const std::string& w) { gen_ = UuidGenerator(number(w)); }

    void open_cmd(const std::string& target, std::istringstream& in) {
        if (target == "NEW") {
            auto project = new_project(machine_.install_id, word(in, "project name"), gen_);
            session_.emplace(Session::create(machine_, project, clock_.bind()));
            return;
        }
        session_.emplace(Session::open(machine_, read_file(resolve(target)), clock_.bind(), gen_));
        for (const auto& w : session_->warnings()) result.warnings.push_back(target + ": " + w);
    }

    void paste_cmd(std::istringstream& in) {
        auto offset = position(word(in, "offset"));
        auto source = word(in, "CLIP, TEXT or FILE");
        ClipboardPayload payload;
        if (source == "CLIP") {
            auto slot = word(in, "slot");
            auto it = clips_.find(slot);
            if (it == clips_.end()) fail("empty clipboard slot " + slot);
            payload = it->second;
        } else if (source == "TEXT") {
            payload = {literal(rest(in)), "literal"};
        } else if (source == "FILE") {
            auto path = resolve(word(in, "path"));
            payload = {read_file(path), "file:" + path.string()};
        } else {
            fail("unknown paste source " + source);
        }
        session().paste(payload, offset);
    }

    fs::path base_;
    Machine machine_;
    UuidGenerator gen_;
    ManualClock clock_;
    std::optional<Session> session_;
    std::map<std::string, ClipboardPayload> clips_;
    std::size_t line_ = 0;
};

}  // namespace

ScriptResult run_script_text(std::string_view script, const fs::path& base_dir, const Machine& machine) {
    Interpreter interp(script, base_dir, machine);
    std::istringstream in{std::string(script)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        interp.execute(line_no, std::string_view(line).substr(first));
    }
    return std::move(interp.result);
}

ScriptResult run_script(const fs::path& script_file, const fs::path& machine_state_dir) {
    const auto machine = Machine::load(machine_state_dir);
    const auto base = script_file.has_parent_path() ? script_file.parent_path() : fs::current_path();
    return run_script_text(read_file(script_file), base, machine);
}

}  // namespace pastetrace

#include "pastetrace/session.hpp"

#include <chrono>

#include "pastetrace/errors.hpp"
#include "pastetrace/utf8.hpp"

namespace pastetrace {

Clock system_clock() {
    return [] {
        using namespace std::chrono;
        return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
    };
}

namespace {

UuidGenerator& default_generator() {
    thread_local UuidGenerator gen;
    return gen;
}

// The machine a file was last opened on.
InstallId current_machine(const MetaComment& meta) {
    for (auto it = meta.infection_stack.rbegin(); it != meta.infection_stack.rend(); ++it)
        if (it->kind == InfectionKind::MachineChange && it->install_id) return *it->install_id;
    return meta.install_id;
}

}  // namespace

Session::Session(InstallId machine_id, MetaComment meta, std::u32string buffer, Clock clock)
    : machine_id_(machine_id), meta_(std::move(meta)), buffer_(std::move(buffer)), clock_(std::move(clock)) {}

Session Session::open(const Machine& machine, std::string_view file_text, Clock clock) {
    return open(machine, file_text, std::move(clock), default_generator());
}

Session Session::open(const Machine& machine, std::string_view file_text, Clock clock, UuidGenerator& gen) {
    ParsedFile parsed = parse(file_text);
    std::u32string body = utf8::decode(parsed.body);

    if (!parsed.meta) {
        Project project = new_project(machine.install_id, "imported", gen);
        Session s(machine.install_id, std::move(project.meta), {}, std::move(clock));
        s.warnings_ = std::move(parsed.diagnostics);
        s.buffer_ = body;
        const auto& open = s.log(EventKind::Open, 0, body);
        if (!body.empty())
            s.meta_.infection_stack.push_back(
                {InfectionKind::PasteExternal, std::nullopt, std::nullopt, open.seq, open.timestamp});
        return s;
    }

    Session s(machine.install_id, std::move(*parsed.meta), {}, std::move(clock));
    s.warnings_ = std::move(parsed.diagnostics);
    if (current_machine(s.meta_) != machine.install_id) {
        s.meta_.infection_stack.push_back({InfectionKind::MachineChange, machine.install_id, std::nullopt,
                                           s.meta_.events.size(), s.clock_()});
    }

    std::optional<std::string> replayed;
    try {
        replayed = replay(s.meta_.events);
    } catch (const ReplayError& e) {
        s.warnings_.emplace_back(e.what());
    }
    s.buffer_ = body;
    if (!replayed || *replayed != utf8::encode(body)) {
        // Edited outside the IDE, or the log was damaged: record the state we found.
        s.warnings_.emplace_back("body diverges from event log");
        s.log(EventKind::Open, 0, body);
    }
    return s;
}

Session Session::create(const Machine& machine, const Project& project, Clock clock) {
    return Session(machine.install_id, project.meta, {}, std::move(clock));
}

EditEvent& Session::log(EventKind kind, std::uint64_t offset, std::u32string_view text) {
    EditEvent e;
    e.seq = meta_.events.size();
    e.timestamp = clock_();
    e.kind = kind;
    e.offset = offset;
    e.text = utf8::encode(text);
    meta_.events.push_back(std::move(e));
    return meta_.events.back();
}

void Session::check_range(std::uint64_t start, std::uint64_t end) const {
    if (start >= end || end > buffer_.size())
        throw BoundsError("invalid range [" + std::to_string(start) + ", " + std::to_string(end) +
                          ") for buffer of length " + std::to_string(buffer_.size()));
}

void Session::type_text(std::uint64_t offset, std::string_view text) {
    if (offset > buffer_.size())
        throw BoundsError("offset " + std::to_string(offset) + " beyond buffer length " +
                          std::to_string(buffer_.size()));
    std::u32string scalars = utf8::decode(text);
    if (scalars.empty()) return;
    buffer_.insert(offset, scalars);
    log(EventKind::Insert, offset, scalars);
}

void Session::delete_text(std::uint64_t offset, std::uint64_t length) {
    if (length == 0 && offset <= buffer_.size()) return;
    check_range(offset, offset + length);
    std::u32string removed = buffer_.substr(offset, length);
    buffer_.erase(offset, length);
    log(EventKind::Delete, offset, removed);
}

stego::StegoRecord Session::watermark_record() const {
    stego::StegoRecord record{machine_id_, meta_.project_id, {}};
    for (const auto& entry : meta_.infection_stack) record.stack_tail.push_back(stego::tail_item(entry));
    return record;
}

ClipboardPayload Session::copy(std::uint64_t start, std::uint64_t end) {
    check_range(start, end);
    std::u32string text = buffer_.substr(start, end - start);
    log(EventKind::Copy, start, text);
    return {utf8::encode(stego::embed(text, watermark_record())), "copy:" + meta_.project_id.str()};
}

ClipboardPayload Session::cut(std::uint64_t start, std::uint64_t end) {
    check_range(start, end);
    std::u32string text = buffer_.substr(start, end - start);
    ClipboardPayload payload{utf8::encode(stego::embed(text, watermark_record())), "cut:" + meta_.project_id.str()};
    buffer_.erase(start, end - start);
    log(EventKind::Cut, start, text);
    return payload;
}

PasteOrigin Session::classify_origin(std::string_view clipboard_text) const {
    auto extraction = stego::extract(clipboard_text);
    if (extraction.verdict == stego::Verdict::None) return PasteOrigin::external();

    // Several records can appear when the clipboard mixes sources; the most
    // foreign one wins.
    std::optional<PasteOrigin> same_machine;
    for (const auto& record : extraction.records) {
        if (record.install_id != machine_id_) return PasteOrigin::foreign(record.install_id, record.project_id);
        if (record.project_id && *record.project_id != meta_.project_id && !same_machine)
            same_machine = PasteOrigin::same_machine(*record.project_id);
    }
    return same_machine ? *same_machine : PasteOrigin::internal();
}

void Session::paste(const ClipboardPayload& payload, std::uint64_t offset) {
    if (offset > buffer_.size())
        throw BoundsError("offset " + std::to_string(offset) + " beyond buffer length " +
                          std::to_string(buffer_.size()));
    PasteOrigin origin = classify_origin(payload.text);
    std::u32string visible = stego::strip_zwsp(utf8::decode(payload.text));
    buffer_.insert(offset, visible);
    auto& e = log(EventKind::Paste, offset, visible);
    e.origin = origin;
    e.line_count = count_lines(e.text);

    if (origin.kind == PasteOrigin::Kind::Foreign) {
        meta_.infection_stack.push_back(
            {InfectionKind::PasteForeign, origin.install_id, origin.project_id, e.seq, e.timestamp});
    } else if (origin.kind == PasteOrigin::Kind::SameMachine) {
        meta_.infection_stack.push_back(
            {InfectionKind::PasteSameMachine, machine_id_, origin.project_id, e.seq, e.timestamp});
    }
}

std::string Session::save() const { return render(meta_, utf8::encode(buffer_)); }

std::string Session::buffer() const { return utf8::encode(buffer_); }

}  // namespace pastetrace

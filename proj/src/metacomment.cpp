#include "pastetrace/metacomment.hpp"

#include <array>
#include <boost/crc.hpp>
#include <json.hpp>

#include "pastetrace/base64.hpp"

namespace pastetrace {

using nlohmann::json;

namespace {

constexpr std::string_view kZwsp = "\xE2\x80\x8B";
constexpr std::string_view kEscapeHead = "/*@";
constexpr std::string_view kEscapeTail = "PASTETRACE";

// ---------------------------------------------------------------------------
// Record encoding. Every record carries a CRC-32 chained to its predecessor so
// that salvage can stop at the first record that was damaged, reordered or
// dropped.
// ---------------------------------------------------------------------------

std::string canonical(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

std::uint32_t chained_crc(std::uint32_t previous, const json& record_without_crc) {
    boost::crc_32_type crc;
    const std::array<unsigned char, 4> prefix{
        static_cast<unsigned char>(previous >> 24), static_cast<unsigned char>(previous >> 16),
        static_cast<unsigned char>(previous >> 8), static_cast<unsigned char>(previous)};
    crc.process_bytes(prefix.data(), prefix.size());
    const std::string bytes = canonical(record_without_crc);
    crc.process_bytes(bytes.data(), bytes.size());
    return crc.checksum();
}

json origin_to_json(const PasteOrigin& o) {
    json j;
    j["kind"] = to_string(o.kind);
    if (o.install_id) j["install_id"] = o.install_id->str();
    if (o.project_id) j["project_id"] = o.project_id->str();
    return j;
}

json event_to_json(const EditEvent& e) {
    json j;
    j["seq"] = e.seq;
    j["timestamp"] = e.timestamp;
    j["kind"] = to_string(e.kind);
    j["offset"] = e.offset;
    j["text"] = e.text;
    if (e.origin) j["origin"] = origin_to_json(*e.origin);
    if (e.line_count) j["line_count"] = *e.line_count;
    return j;
}

json entry_to_json(const InfectionEntry& e) {
    json j;
    j["kind"] = to_string(e.kind);
    if (e.install_id) j["install_id"] = e.install_id->str();
    if (e.project_id) j["project_id"] = e.project_id->str();
    j["event_seq"] = e.event_seq;
    j["timestamp"] = e.timestamp;
    return j;
}

json identity_to_json(const MetaComment& m) {
    json j;
    j["install_id"] = m.install_id.str();
    j["project_id"] = m.project_id.str();
    return j;
}

// Decoding helpers throw std::exception on any shape problem; salvage treats a
// throw as "this record is damaged".
struct BadRecord : std::exception {};

template <typename Id>
Id id_field(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_string()) throw BadRecord{};
    auto id = Id::parse(v.get_ref<const std::string&>());
    if (!id) throw BadRecord{};
    return *id;
}

template <typename Id>
std::optional<Id> optional_id_field(const json& j, const char* key) {
    if (!j.contains(key)) return std::nullopt;
    return id_field<Id>(j, key);
}

std::uint64_t unsigned_field(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_number_unsigned()) throw BadRecord{};
    return v.get<std::uint64_t>();
}

std::int64_t integer_field(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_number_integer()) throw BadRecord{};
    return v.get<std::int64_t>();
}

const std::string& string_field(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_string()) throw BadRecord{};
    return v.get_ref<const std::string&>();
}

PasteOrigin origin_from_json(const json& j) {
    if (!j.is_object()) throw BadRecord{};
    auto kind = parse_origin_kind(string_field(j, "kind"));
    if (!kind) throw BadRecord{};
    return {*kind, optional_id_field<InstallId>(j, "install_id"), optional_id_field<ProjectId>(j, "project_id")};
}

EditEvent event_from_json(const json& j) {
    EditEvent e;
    e.seq = unsigned_field(j, "seq");
    e.timestamp = integer_field(j, "timestamp");
    auto kind = parse_event_kind(string_field(j, "kind"));
    if (!kind) throw BadRecord{};
    e.kind = *kind;
    e.offset = unsigned_field(j, "offset");
    e.text = string_field(j, "text");
    if (j.contains("origin")) e.origin = origin_from_json(j.at("origin"));
    if (j.contains("line_count")) e.line_count = static_cast<std::uint32_t>(unsigned_field(j, "line_count"));
    return e;
}

InfectionEntry entry_from_json(const json& j) {
    InfectionEntry e;
    auto kind = parse_infection_kind(string_field(j, "kind"));
    if (!kind) throw BadRecord{};
    e.kind = *kind;
    e.install_id = optional_id_field<InstallId>(j, "install_id");
    e.project_id = optional_id_field<ProjectId>(j, "project_id");
    e.event_seq = unsigned_field(j, "event_seq");
    e.timestamp = integer_field(j, "timestamp");
    return e;
}

// Verifies a record's chained CRC and strips it. Returns nullopt on mismatch.
std::optional<json> verified(const json& record, std::uint32_t previous, std::uint32_t& crc_out) {
    if (!record.is_object() || !record.contains("crc") || !record["crc"].is_number_unsigned()) return std::nullopt;
    json body = record;
    const auto stored = body["crc"].get<std::uint64_t>();
    body.erase("crc");
    const auto computed = chained_crc(previous, body);
    if (stored != computed) return std::nullopt;
    crc_out = computed;
    return body;
}

// ---------------------------------------------------------------------------
// SAX handler that keeps whatever was built before a parse error.
// ---------------------------------------------------------------------------

class PartialDomBuilder : public nlohmann::json_sax<json> {
  public:
    json root;
    bool failed = false;

    bool null() override { return add(nullptr); }
    bool boolean(bool v) override { return add(v); }
    bool number_integer(number_integer_t v) override { return add(v); }
    bool number_unsigned(number_unsigned_t v) override { return add(v); }
    bool number_float(number_float_t v, const string_t&) override { return add(v); }
    bool string(string_t& v) override { return add(v); }
    bool binary(binary_t& v) override { return add(json::binary(v)); }
    bool start_object(std::size_t) override { return open(json::object()); }
    bool key(string_t& k) override {
        pending_key_ = k;
        return true;
    }
    bool end_object() override { return close(); }
    bool start_array(std::size_t) override { return open(json::array()); }
    bool end_array() override { return close(); }
    bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception&) override {
        failed = true;
        return false;
    }

  private:
    std::vector<json*> stack_;
    std::string pending_key_;

    json* place(json value) {
        if (stack_.empty()) {
            root = std::move(value);
            return &root;
        }
        json& parent = *stack_.back();
        if (parent.is_array()) {
            parent.push_back(std::move(value));
            return &parent.back();
        }
        parent[pending_key_] = std::move(value);
        return &parent[pending_key_];
    }
    bool add(json value) {
        place(std::move(value));
        return true;
    }
    bool open(json container) {
        stack_.push_back(place(std::move(container)));
        return true;
    }
    bool close() {
        stack_.pop_back();
        return true;
    }
};

// ---------------------------------------------------------------------------
// Marker token escaping inside the body.
// ---------------------------------------------------------------------------

// Calls fn(pos, at_count) for each "/*@" + "@"*k + "PASTETRACE" occurrence.
template <typename Fn>
std::string rewrite_tokens(std::string_view text, Fn&& fn) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        auto hit = text.find(kEscapeHead, i);
        if (hit == std::string_view::npos) break;
        std::size_t j = hit + kEscapeHead.size();
        std::size_t extra = 0;
        while (j < text.size() && text[j] == '@') ++j, ++extra;
        if (text.substr(j, kEscapeTail.size()) == kEscapeTail) {
            out.append(text.substr(i, hit - i));
            out.append(kEscapeHead);
            out.append(fn(extra), '@');
            i = hit + kEscapeHead.size() + extra;
        } else {
            out.append(text.substr(i, hit + 1 - i));
            i = hit + 1;
        }
    }
    out.append(text.substr(i));
    return out;
}

std::string escape_body(std::string_view body) {
    return rewrite_tokens(body, [](std::size_t extra) { return extra + 1; });
}

std::string unescape_body(std::string_view body) {
    return rewrite_tokens(body, [](std::size_t extra) { return extra == 0 ? 0 : extra - 1; });
}

bool is_marker_line_at(std::string_view text, std::size_t pos) {
    return (pos == 0 || text[pos - 1] == '\n') && text.substr(pos, kMarkerOpen.size()) == kMarkerOpen;
}

struct MarkerSpan {
    std::size_t line_begin;  // first char of the marker line
    std::size_t line_end;    // index of its LF, or text.size()
};

std::optional<MarkerSpan> find_last_marker(std::string_view text) {
    std::size_t pos = text.rfind(kMarkerOpen);
    while (pos != std::string_view::npos) {
        if (is_marker_line_at(text, pos)) {
            auto end = text.find('\n', pos);
            return MarkerSpan{pos, end == std::string_view::npos ? text.size() : end};
        }
        if (pos == 0) break;
        pos = text.rfind(kMarkerOpen, pos - 1);
    }
    return std::nullopt;
}

std::string remove_zwsp(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (true) {
        auto hit = text.find(kZwsp, i);
        out.append(text.substr(i, hit == std::string_view::npos ? std::string_view::npos : hit - i));
        if (hit == std::string_view::npos) break;
        i = hit + kZwsp.size();
    }
    return out;
}

void salvage(const json& root, ParsedFile& out) {
    if (!root.is_object() || !root.contains("format_version") || !root.contains("identity")) {
        out.diagnostics.emplace_back("metaComment unrecoverable: header damaged");
        return;
    }
    if (!root["format_version"].is_number_integer() || root["format_version"].get<std::int64_t>() != kFormatVersion) {
        out.diagnostics.emplace_back("metaComment unrecoverable: unsupported format version");
        return;
    }
    std::uint32_t identity_crc = 0;
    auto identity = verified(root["identity"], 0, identity_crc);
    MetaComment meta;
    try {
        if (!identity) throw BadRecord{};
        meta.install_id = id_field<InstallId>(*identity, "install_id");
        meta.project_id = id_field<ProjectId>(*identity, "project_id");
    } catch (const std::exception&) {
        out.diagnostics.emplace_back("metaComment unrecoverable: identity damaged");
        return;
    }

    bool complete = true;
    auto walk = [&](const char* key, auto&& accept) {
        if (!root.contains(key) || !root[key].is_array()) {
            complete = false;
            return;
        }
        std::uint32_t crc = identity_crc;
        for (const auto& record : root[key]) {
            auto body = verified(record, crc, crc);
            if (!body) {
                complete = false;
                return;
            }
            try {
                if (!accept(*body)) {
                    complete = false;
                    return;
                }
            } catch (const std::exception&) {
                complete = false;
                return;
            }
        }
    };
    walk("infection_stack", [&](const json& j) {
        meta.infection_stack.push_back(entry_from_json(j));
        return true;
    });
    walk("log", [&](const json& j) {
        auto e = event_from_json(j);
        if (e.seq != meta.events.size()) return false;
        meta.events.push_back(std::move(e));
        return true;
    });
    if (!complete)
        out.diagnostics.push_back("payload corrupt: salvaged " + std::to_string(meta.infection_stack.size()) +
                                  " infection entries and " + std::to_string(meta.events.size()) + " events");
    out.meta = std::move(meta);
}

}  // namespace

std::string serialize_payload(const MetaComment& meta) {
    json root;
    root["format_version"] = meta.format_version;

    json identity = identity_to_json(meta);
    const std::uint32_t identity_crc = chained_crc(0, identity);
    identity["crc"] = identity_crc;
    root["identity"] = std::move(identity);

    json stack = json::array();
    std::uint32_t crc = identity_crc;
    for (const auto& entry : meta.infection_stack) {
        json j = entry_to_json(entry);
        crc = chained_crc(crc, j);
        j["crc"] = crc;
        stack.push_back(std::move(j));
    }
    root["infection_stack"] = std::move(stack);

    json log = json::array();
    crc = identity_crc;
    for (const auto& event : meta.events) {
        json j = event_to_json(event);
        crc = chained_crc(crc, j);
        j["crc"] = crc;
        log.push_back(std::move(j));
    }
    root["log"] = std::move(log);
    return canonical(root);
}

std::string render(const MetaComment& meta, std::string_view body) {
    std::string out = escape_body(body);
    out.push_back('\n');
    out.append(kMarkerOpen);
    out.append(base64::encode(serialize_payload(meta)));
    out.append(kMarkerClose);
    out.push_back('\n');
    return out;
}

ParsedFile parse(std::string_view file_text) {
    ParsedFile out;
    auto marker = find_last_marker(file_text);
    if (!marker) {
        out.body = std::string(file_text);
        out.diagnostics.emplace_back("no metaComment");
        return out;
    }

    std::string body(file_text.substr(0, marker->line_begin > 0 ? marker->line_begin - 1 : 0));
    if (marker->line_end + 1 < file_text.size()) {
        out.diagnostics.emplace_back("content after metaComment");
        body.push_back('\n');
        body.append(file_text.substr(marker->line_end + 1));
    }
    out.body = unescape_body(body);

    std::string_view line = file_text.substr(marker->line_begin, marker->line_end - marker->line_begin);
    line.remove_prefix(kMarkerOpen.size());
    bool terminated = line.size() >= kMarkerClose.size() && line.ends_with(kMarkerClose);
    if (terminated) line.remove_suffix(kMarkerClose.size());

    auto decoded = base64::decode(line);
    PartialDomBuilder builder;
    bool parsed = json::sax_parse(decoded.bytes, &builder, json::input_format_t::json, false);
    if (!terminated || !decoded.clean || !parsed || builder.failed)
        out.diagnostics.emplace_back("payload truncated");
    salvage(builder.root, out);
    return out;
}

std::string strip(std::string_view file_text) {
    std::string text = remove_zwsp(file_text);
    // Walk marker lines from the end so earlier positions stay valid.
    while (auto marker = find_last_marker(text)) {
        std::size_t begin = marker->line_begin;
        std::size_t end = std::min(marker->line_end + 1, text.size());
        const bool terminal = end == text.size();
        if (terminal && begin > 0) --begin;  // the final marker owns its separating LF
        text.erase(begin, end - begin);
    }
    return text;
}

}  // namespace pastetrace

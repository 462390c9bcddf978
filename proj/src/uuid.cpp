#include "pastetrace/uuid.hpp"

#include <algorithm>
#include <boost/uuid/random_generator.hpp>
#include <boost/uuid/string_generator.hpp>
#include <boost/uuid/uuid_io.hpp>

namespace pastetrace {

namespace {

boost::uuids::uuid to_boost(const Uuid::Bytes& bytes) {
    boost::uuids::uuid u{};
    std::copy(bytes.begin(), bytes.end(), u.begin());
    return u;
}

Uuid from_boost(const boost::uuids::uuid& u) {
    Uuid::Bytes bytes{};
    std::copy(u.begin(), u.end(), bytes.begin());
    return Uuid(bytes);
}

// Boost accepts braces and uppercase; the on-disk form does not.
bool canonical_shape(std::string_view text) {
    if (text.size() != 36) return false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (i == 8 || i == 13 || i == 18 || i == 23) {
            if (c != '-') return false;
        } else if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) {
            return false;
        }
    }
    return true;
}

}  // namespace

std::string Uuid::str() const { return boost::uuids::to_string(to_boost(bytes_)); }

bool Uuid::is_nil() const noexcept {
    return std::all_of(bytes_.begin(), bytes_.end(), [](auto b) { return b == 0; });
}

std::optional<Uuid> Uuid::parse(std::string_view text) {
    if (!canonical_shape(text)) return std::nullopt;
    return from_boost(boost::uuids::string_generator()(text.begin(), text.end()));
}

UuidGenerator::UuidGenerator() {
    std::random_device rd;
    std::seed_seq seq{rd(), rd(), rd(), rd(), rd(), rd(), rd(), rd()};
    engine_.seed(seq);
}

Uuid UuidGenerator::next() {
    boost::uuids::basic_random_generator<std::mt19937_64> gen(engine_);
    return from_boost(gen());
}

}  // namespace pastetrace

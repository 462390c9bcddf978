#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>

namespace pastetrace {

/// 128-bit identifier rendered as lowercase hyphenated hex (8-4-4-4-12).
class Uuid {
  public:
    using Bytes = std::array<std::uint8_t, 16>;

    constexpr Uuid() = default;
    constexpr explicit Uuid(const Bytes& bytes) : bytes_(bytes) {}

    [[nodiscard]] const Bytes& bytes() const noexcept { return bytes_; }
    [[nodiscard]] std::string str() const;
    [[nodiscard]] bool is_nil() const noexcept;

    /// Strict parse: 36 characters, lowercase hex, hyphens at 8/13/18/23.
    static std::optional<Uuid> parse(std::string_view text);

    friend auto operator<=>(const Uuid&, const Uuid&) = default;

  private:
    Bytes bytes_{};
};

/// Source of version-4 UUIDs. Seeded instances give reproducible sequences.
class UuidGenerator {
  public:
    UuidGenerator();
    explicit UuidGenerator(std::uint64_t seed) : engine_(seed) {}

    Uuid next();

  private:
    std::mt19937_64 engine_;
};

/// Strongly typed wrapper so machine and project identities cannot be mixed up.
template <typename Tag>
class TypedId {
  public:
    constexpr TypedId() = default;
    constexpr explicit TypedId(Uuid value) : value_(value) {}

    [[nodiscard]] const Uuid& uuid() const noexcept { return value_; }
    [[nodiscard]] std::string str() const { return value_.str(); }

    static std::optional<TypedId> parse(std::string_view text) {
        if (auto u = Uuid::parse(text)) return TypedId(*u);
        return std::nullopt;
    }

    friend auto operator<=>(const TypedId&, const TypedId&) = default;

  private:
    Uuid value_{};
};

struct InstallIdTag {};
struct ProjectIdTag {};
using InstallId = TypedId<InstallIdTag>;
using ProjectId = TypedId<ProjectIdTag>;

}  // namespace pastetrace

template <>
struct std::hash<pastetrace::Uuid> {
    std::size_t operator()(const pastetrace::Uuid& u) const noexcept {
        std::size_t h = 1469598103934665603ull;
        for (auto b : u.bytes()) h = (h ^ b) * 1099511628211ull;
        return h;
    }
};

template <typename Tag>
struct std::hash<pastetrace::TypedId<Tag>> {
    std::size_t operator()(const pastetrace::TypedId<Tag>& id) const noexcept {
        return std::hash<pastetrace::Uuid>{}(id.uuid());
    }
};

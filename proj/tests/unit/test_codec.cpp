#include <doctest.h>

#include "pastetrace/base64.hpp"
#include "pastetrace/utf8.hpp"
#include "support.hpp"

using namespace pastetrace;

TEST_CASE("base64 matches the RFC 4648 test vectors") {
    const std::pair<std::string, std::string> vectors[] = {
        {"", ""},         {"f", "Zg=="},         {"fo", "Zm8="},        {"foo", "Zm9v"},
        {"foob", "Zm9vYg=="}, {"fooba", "Zm9vYmE="}, {"foobar", "Zm9vYmFy"},
    };
    for (const auto& [plain, coded] : vectors) {
        CHECK(base64::encode(plain) == coded);
        auto d = base64::decode(coded);
        CHECK(d.clean);
        CHECK(std::string(d.bytes.begin(), d.bytes.end()) == plain);
    }
}

TEST_CASE("base64 decode flags damage but keeps what it can") {
    auto d = base64::decode("Zm9v!mFy");
    CHECK_FALSE(d.clean);
    auto truncated = base64::decode("Zm9vYmF");
    CHECK_FALSE(truncated.clean);
    CHECK(std::string(truncated.bytes.begin(), truncated.bytes.begin() + 3) == "foo");
}

TEST_CASE("base64 round-trips random bytes") {
    std::mt19937_64 rng(5);
    for (int n = 0; n < 300; ++n) {
        std::string s(n, '\0');
        for (auto& c : s) c = static_cast<char>(rng());
        auto d = base64::decode(base64::encode(s));
        CHECK(d.clean);
        CHECK(std::string(d.bytes.begin(), d.bytes.end()) == s);
    }
}

TEST_CASE("utf8 decode and encode agree with the reference converter") {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 200; ++i) {
        auto text = testsupport::random_text(rng, 50);
        auto scalars = utf8::decode(text);
        CHECK(scalars == testsupport::to_u32(text));
        CHECK(utf8::encode(scalars) == text);
        CHECK(utf8::length(text) == scalars.size());
    }
}

TEST_CASE("malformed utf8 becomes replacement characters") {
    auto s = utf8::decode(std::string("a\xC3") + "b\xFF");
    CHECK(s == std::u32string{U'a', U'�', U'b', U'�'});
}

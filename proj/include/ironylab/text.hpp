#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

// Small UTF-8 aware string helpers shared by the corpus, prompt, normalizer
// and readability code.
namespace ironylab::text {

// Decodes one code point starting at `pos` and advances `pos`. Invalid bytes
// decode to U+FFFD and advance by one byte, so iteration always terminates.
char32_t next_code_point(std::string_view s, std::size_t& pos) noexcept;

bool is_unicode_space(char32_t cp) noexcept;

std::vector<std::string_view> split_whitespace(std::string_view s);
std::size_t count_tokens(std::string_view s);

std::string_view trim(std::string_view s) noexcept;
std::string to_lower_ascii(std::string_view s);
bool contains_ci(std::string_view haystack, std::string_view needle) noexcept;
std::size_t find_ci(std::string_view haystack, std::string_view needle, std::size_t from = 0) noexcept;

// JSON-style double-quoted literal. Non-ASCII bytes pass through untouched,
// control characters are \u-escaped; the mapping is injective.
std::string quote(std::string_view s);

// Replaces invalid UTF-8 sequences with U+FFFD.
std::string sanitize_utf8(std::string_view s);

std::string sha256_hex(std::string_view data);
std::uint64_t fnv1a64(std::string_view data) noexcept;

std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string utc_timestamp();

}  // namespace ironylab::text

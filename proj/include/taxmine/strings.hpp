#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace taxmine {

// Splits on tabs, preserving empty fields.
std::vector<std::string_view> split_tabs(std::string_view line);

// Splits a normalized query into its terms (single-space separated).
std::vector<std::string> split_terms(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

std::string to_lower_ascii(std::string_view s);

// Canonical query form: ASCII lowercase, whitespace runs collapsed to one
// space, ends trimmed. Bytes outside ASCII pass through unchanged.
std::string normalize_query(std::string_view raw);

// Accepts "YYYY-MM-DD HH:MM:SS" (UTC) or plain epoch seconds.
std::optional<int64_t> parse_timestamp(std::string_view s);

std::optional<uint64_t> parse_u64(std::string_view s);
std::optional<int64_t> parse_i64(std::string_view s);
std::optional<double> parse_double(std::string_view s);

// Shortest round-trip decimal form, identical on every platform.
std::string format_double(double v);

}  // namespace taxmine

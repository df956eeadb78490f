#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace gitnet {

/// Decodes UTF-8 into Unicode scalar values. Invalid bytes are kept as
/// single code points (latin-1 fallback) so arbitrary repository content
/// never throws.
std::vector<char32_t> decode_utf8(std::string_view bytes);

/// Number of Unicode scalar values in `bytes`.
int char_count(std::string_view bytes);

/// Unit-cost edit distance (insert/delete/substitute) over Unicode scalars.
std::int64_t levenshtein(std::string_view a, std::string_view b);

/// Shannon entropy in bits over the 256-symbol byte alphabet; 0 for empty
/// input. Always in [0, 8].
double entropy(std::string_view bytes);

/// True if content contains a NUL byte within its first 8000 bytes.
bool looks_binary(std::string_view content);

} // namespace gitnet

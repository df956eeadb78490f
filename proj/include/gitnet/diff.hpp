#pragma once

#include "gitnet/types.hpp"

#include <string_view>
#include <vector>

namespace gitnet {

struct ParsedDiff {
    std::vector<NumberedLine> deleted; // pre-image coordinates
    std::vector<NumberedLine> added;   // post-image coordinates
};

/// Parses the hunks of a single-file unified diff. Line texts exclude the
/// leading '+'/'-' marker and the trailing newline. Empty input yields an
/// empty result. Throws MalformedDiff on structural errors.
ParsedDiff parse_diff(std::string_view diff_text);

} // namespace gitnet

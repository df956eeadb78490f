#pragma once

#include "gitnet/types.hpp"

#include <vector>

namespace gitnet {

/// Splits parse_diff output into maximal contiguous (D, A) edit groups.
/// A deleted run and an added run belong to one group when the deletion's
/// post-image gap position falls inside the added run. Pure-deletion and
/// pure-addition groups are allowed.
std::vector<EditGroup> group_edits(const std::vector<NumberedLine>& deleted,
                                   const std::vector<NumberedLine>& added);

/// Pairs d_i with a_i by index; excess lines become pure deletions or
/// additions. Events partition D and A.
std::vector<EditEvent> match_line_based(const EditGroup& group);

/// The whole (D, A) pair as a single event.
std::vector<EditEvent> match_block_based(const EditGroup& group);

/// Joins line texts with a single LF, no trailing LF.
std::string join_block(const std::vector<NumberedLine>& lines);

/// Turns matched events into coedit rows, resolving pre-image lines through
/// the blame attribution. Block events spanning several origin commits yield
/// one row per origin with shared block metrics and attributed_line_count.
/// Throws MissingBlameEntry when a referenced pre-line has no blame entry.
std::vector<CoEditRecord> attribute_events(const std::vector<EditEvent>& events,
                                           const LineAttribution& blame,
                                           const CommitRecord& commit,
                                           const FileModification& modification);

} // namespace gitnet

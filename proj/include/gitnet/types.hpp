#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gitnet {

enum class Granularity { Line, Block };
enum class EditKind { Deletion, Addition, Replacement };

const char* to_string(Granularity g);
const char* to_string(EditKind k);
Granularity granularity_from_string(const std::string& s);
EditKind edit_kind_from_string(const std::string& s);

/// One mined commit's metadata (one `commits` table row).
struct CommitRecord {
    std::string hash; // 40 lowercase hex chars
    std::int64_t author_date = 0; // epoch seconds, UTC
    int author_timezone = 0;      // offset minutes
    std::string author_name;
    std::string author_email;
    std::int64_t committer_date = 0;
    int committer_timezone = 0;
    std::string committer_name;
    std::string committer_email;
    std::vector<std::string> branches;
    bool in_main_branch = false;
    bool merge = false;
    int modifications = 0;
    int commit_message_len = 0;
    std::vector<std::string> parents;
    std::string project_name;
};

/// One changed file in a commit, diffed against the first parent.
struct FileModification {
    std::optional<std::string> old_path; // absent for added files
    std::optional<std::string> new_path; // absent for deleted files
    std::string filename;                // basename
    std::string diff_text;               // unified diff, empty for binary files
    bool binary = false;
    int added_count = 0;
    int removed_count = 0;
    std::optional<int> loc;         // post-image line count
    std::optional<int> token_count; // post-image whitespace-delimited tokens
};

/// Per-line original authorship of one file version (pre-image side).
struct LineAttribution {
    struct Origin {
        std::string commit_hash;
        std::string author_email;
        std::string author_name;
    };
    std::map<int, Origin> lines; // 1-based pre-image line number -> origin
};

using NumberedLine = std::pair<int, std::string>; // (line number, text without marker/EOL)

/// Contiguous run of deleted pre-image lines plus the added lines replacing
/// them at the same diff position: the (D, A) pair.
struct EditGroup {
    std::vector<NumberedLine> deleted;
    std::vector<NumberedLine> added;
};

/// One matched edit within a group, at line or block granularity.
struct EditEvent {
    EditKind kind;
    Granularity granularity;
    std::vector<NumberedLine> pre_lines;
    std::vector<NumberedLine> post_lines;
};

/// One attributed edit event (one `coedits` table row).
struct CoEditRecord {
    std::string mod_filename;
    std::optional<std::string> mod_new_path;
    std::optional<std::string> mod_old_path;
    std::optional<std::string> pre_commit; // absent for additions
    std::string post_commit;
    EditKind kind = EditKind::Replacement;
    Granularity granularity = Granularity::Line;

    // line-granularity fields
    std::optional<int> pre_line_num;
    std::optional<int> pre_line_len_in_chars;
    std::optional<double> pre_line_text_entropy;
    std::optional<int> post_line_num;
    std::optional<int> post_line_len_in_chars;
    std::optional<double> post_line_text_entropy;

    // block-granularity fields
    std::optional<int> pre_block_starting_line_num;
    std::optional<int> pre_block_len_in_lines;
    std::optional<int> pre_block_len_in_chars;
    std::optional<double> pre_block_text_entropy;
    std::optional<int> post_block_starting_line_num;
    std::optional<int> post_block_len_in_lines;
    std::optional<int> post_block_len_in_chars;
    std::optional<double> post_block_text_entropy;

    int attributed_line_count = 1; // pre-lines of this row's origin within a block
    int mod_added = 0;
    int mod_removed = 0;
    std::optional<std::int64_t> levenshtein_dist; // absent for deletions
    std::optional<int> mod_cyclomatic_complexity;
    std::optional<int> mod_loc;
    std::optional<int> mod_token_count;
};

} // namespace gitnet

#include "gitnet/coedit.hpp"

#include "gitnet/errors.hpp"
#include "gitnet/text.hpp"

#include <algorithm>

namespace gitnet {

namespace {

// Maximal runs of consecutive line numbers.
std::vector<std::vector<NumberedLine>> split_runs(const std::vector<NumberedLine>& lines)
{
    std::vector<std::vector<NumberedLine>> runs;
    for (const auto& line : lines) {
        if (runs.empty() || line.first != runs.back().back().first + 1)
            runs.emplace_back();
        runs.back().push_back(line);
    }
    return runs;
}

} // namespace

std::vector<EditGroup> group_edits(const std::vector<NumberedLine>& deleted,
                                   const std::vector<NumberedLine>& added)
{
    const auto del_runs = split_runs(deleted);
    const auto add_runs = split_runs(added);

    std::vector<EditGroup> groups;
    std::size_t di = 0, ai = 0;
    long offset = 0; // post-image minus pre-image shift from processed groups
    while (di < del_runs.size() || ai < add_runs.size()) {
        if (di < del_runs.size() && ai < add_runs.size()) {
            const auto& d = del_runs[di];
            const auto& a = add_runs[ai];
            const long gap = d.front().first + offset; // post position of the removed run
            if (a.front().first <= gap && gap <= a.back().first) {
                groups.push_back({d, a});
                offset += static_cast<long>(a.size()) - static_cast<long>(d.size());
                ++di;
                ++ai;
            } else if (a.front().first - offset <= d.front().first) {
                groups.push_back({{}, a});
                offset += static_cast<long>(a.size());
                ++ai;
            } else {
                groups.push_back({d, {}});
                offset -= static_cast<long>(d.size());
                ++di;
            }
        } else if (di < del_runs.size()) {
            groups.push_back({del_runs[di++], {}});
        } else {
            groups.push_back({{}, add_runs[ai++]});
        }
    }
    return groups;
}

std::vector<EditEvent> match_line_based(const EditGroup& group)
{
    std::vector<EditEvent> events;
    const std::size_t paired = std::min(group.deleted.size(), group.added.size());
    for (std::size_t i = 0; i < paired; ++i)
        events.push_back({EditKind::Replacement,
                          Granularity::Line,
                          {group.deleted[i]},
                          {group.added[i]}});
    for (std::size_t i = paired; i < group.deleted.size(); ++i)
        events.push_back({EditKind::Deletion, Granularity::Line, {group.deleted[i]}, {}});
    for (std::size_t i = paired; i < group.added.size(); ++i)
        events.push_back({EditKind::Addition, Granularity::Line, {}, {group.added[i]}});
    return events;
}

std::vector<EditEvent> match_block_based(const EditGroup& group)
{
    if (group.deleted.empty() && group.added.empty())
        return {};
    EditKind kind = EditKind::Replacement;
    if (group.added.empty())
        kind = EditKind::Deletion;
    else if (group.deleted.empty())
        kind = EditKind::Addition;
    return {{kind, Granularity::Block, group.deleted, group.added}};
}

std::string join_block(const std::vector<NumberedLine>& lines)
{
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i)
            out += '\n';
        out += lines[i].second;
    }
    return out;
}

namespace {

CoEditRecord base_record(const CommitRecord& commit, const FileModification& mod,
                         EditKind kind, Granularity granularity)
{
    CoEditRecord rec;
    rec.mod_filename = mod.filename;
    rec.mod_new_path = mod.new_path;
    rec.mod_old_path = mod.old_path;
    rec.post_commit = commit.hash;
    rec.kind = kind;
    rec.granularity = granularity;
    rec.mod_added = mod.added_count;
    rec.mod_removed = mod.removed_count;
    rec.mod_loc = mod.loc;
    rec.mod_token_count = mod.token_count;
    return rec;
}

const LineAttribution::Origin& origin_of(const LineAttribution& blame, int line)
{
    auto it = blame.lines.find(line);
    if (it == blame.lines.end())
        throw MissingBlameEntry(line);
    return it->second;
}

} // namespace

std::vector<CoEditRecord> attribute_events(const std::vector<EditEvent>& events,
                                           const LineAttribution& blame,
                                           const CommitRecord& commit,
                                           const FileModification& modification)
{
    std::vector<CoEditRecord> records;
    for (const auto& ev : events) {
        if (ev.granularity == Granularity::Line) {
            CoEditRecord rec = base_record(commit, modification, ev.kind, ev.granularity);
            if (!ev.pre_lines.empty()) {
                const auto& [num, text] = ev.pre_lines.front();
                rec.pre_commit = origin_of(blame, num).commit_hash;
                rec.pre_line_num = num;
                rec.pre_line_len_in_chars = char_count(text);
                rec.pre_line_text_entropy = entropy(text);
            }
            if (!ev.post_lines.empty()) {
                const auto& [num, text] = ev.post_lines.front();
                rec.post_line_num = num;
                rec.post_line_len_in_chars = char_count(text);
                rec.post_line_text_entropy = entropy(text);
            }
            switch (ev.kind) {
            case EditKind::Replacement:
                rec.levenshtein_dist =
                    levenshtein(ev.pre_lines.front().second, ev.post_lines.front().second);
                break;
            case EditKind::Addition:
                rec.levenshtein_dist = *rec.post_line_len_in_chars;
                break;
            case EditKind::Deletion:
                break; // no Levenshtein for deletions
            }
            records.push_back(std::move(rec));
            continue;
        }

        // Block granularity: metrics shared across rows, one row per origin.
        const std::string pre_text = join_block(ev.pre_lines);
        const std::string post_text = join_block(ev.post_lines);
        CoEditRecord proto = base_record(commit, modification, ev.kind, ev.granularity);
        if (!ev.pre_lines.empty()) {
            proto.pre_block_starting_line_num = ev.pre_lines.front().first;
            proto.pre_block_len_in_lines = static_cast<int>(ev.pre_lines.size());
            proto.pre_block_len_in_chars = char_count(pre_text);
            proto.pre_block_text_entropy = entropy(pre_text);
        }
        if (!ev.post_lines.empty()) {
            proto.post_block_starting_line_num = ev.post_lines.front().first;
            proto.post_block_len_in_lines = static_cast<int>(ev.post_lines.size());
            proto.post_block_len_in_chars = char_count(post_text);
            proto.post_block_text_entropy = entropy(post_text);
        }
        if (ev.kind == EditKind::Replacement)
            proto.levenshtein_dist = levenshtein(pre_text, post_text);
        else if (ev.kind == EditKind::Addition)
            proto.levenshtein_dist = *proto.post_block_len_in_chars;

        if (ev.pre_lines.empty()) {
            records.push_back(std::move(proto));
            continue;
        }
        // Distinct origins in first-appearance order.
        std::vector<std::pair<std::string, int>> origins;
        for (const auto& [num, text] : ev.pre_lines) {
            const auto& origin = origin_of(blame, num).commit_hash;
            auto it = std::find_if(origins.begin(), origins.end(),
                                   [&](const auto& o) { return o.first == origin; });
            if (it == origins.end())
                origins.emplace_back(origin, 1);
            else
                ++it->second;
        }
        for (const auto& [origin, count] : origins) {
            CoEditRecord rec = proto;
            rec.pre_commit = origin;
            rec.attributed_line_count = count;
            records.push_back(std::move(rec));
        }
    }
    return records;
}

} // namespace gitnet

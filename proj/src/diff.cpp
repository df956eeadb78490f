#include "gitnet/diff.hpp"

#include "gitnet/errors.hpp"

#include <charconv>

namespace gitnet {

namespace {

struct HunkHeader {
    int pre_start = 0;
    int pre_count = 0;
    int post_start = 0;
    int post_count = 0;
};

bool parse_int(std::string_view& s, int& out)
{
    const auto* begin = s.data();
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc{} || ptr == begin)
        return false;
    s.remove_prefix(static_cast<std::size_t>(ptr - begin));
    return true;
}

// "@@ -a[,b] +c[,d] @@ ..." -> header; counts default to 1.
bool parse_hunk_header(std::string_view line, HunkHeader& h)
{
    if (!line.starts_with("@@ -"))
        return false;
    line.remove_prefix(4);
    if (!parse_int(line, h.pre_start))
        return false;
    h.pre_count = 1;
    if (line.starts_with(",")) {
        line.remove_prefix(1);
        if (!parse_int(line, h.pre_count))
            return false;
    }
    if (!line.starts_with(" +"))
        return false;
    line.remove_prefix(2);
    if (!parse_int(line, h.post_start))
        return false;
    h.post_count = 1;
    if (line.starts_with(",")) {
        line.remove_prefix(1);
        if (!parse_int(line, h.post_count))
            return false;
    }
    return line.starts_with(" @@");
}

} // namespace

ParsedDiff parse_diff(std::string_view diff_text)
{
    ParsedDiff out;
    bool in_hunk = false;
    int pre_line = 0, post_line = 0;
    int pre_left = 0, post_left = 0;

    std::size_t pos = 0;
    while (pos < diff_text.size()) {
        auto eol = diff_text.find('\n', pos);
        std::string_view line = diff_text.substr(
            pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? diff_text.size() : eol + 1;

        HunkHeader h;
        if (line.starts_with("@@")) {
            if (!parse_hunk_header(line, h))
                throw MalformedDiff("bad hunk header: " + std::string(line));
            if (in_hunk && (pre_left != 0 || post_left != 0))
                throw MalformedDiff("previous hunk shorter than declared");
            in_hunk = true;
            pre_line = h.pre_start;
            post_line = h.post_start;
            pre_left = h.pre_count;
            post_left = h.post_count;
            continue;
        }
        if (!in_hunk)
            continue; // file headers (diff --git, ---, +++, index, ...)
        if (line.starts_with("\\"))
            continue; // "\ No newline at end of file"
        if (pre_left == 0 && post_left == 0) {
            in_hunk = false; // trailing junk between hunks of concatenated diffs
            continue;
        }
        if (line.starts_with("-")) {
            if (pre_left == 0)
                throw MalformedDiff("hunk longer than declared on pre side");
            out.deleted.emplace_back(pre_line++, std::string(line.substr(1)));
            --pre_left;
        } else if (line.starts_with("+")) {
            if (post_left == 0)
                throw MalformedDiff("hunk longer than declared on post side");
            out.added.emplace_back(post_line++, std::string(line.substr(1)));
            --post_left;
        } else if (line.starts_with(" ") || line.empty()) {
            if (pre_left == 0 || post_left == 0)
                throw MalformedDiff("context line past declared hunk length");
            ++pre_line;
            ++post_line;
            --pre_left;
            --post_left;
        } else {
            throw MalformedDiff("unexpected body line: " + std::string(line));
        }
    }
    if (in_hunk && (pre_left != 0 || post_left != 0))
        throw MalformedDiff("final hunk shorter than declared");
    return out;
}

} // namespace gitnet

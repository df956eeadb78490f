#include "gitnet/vcs.hpp"

#include "gitnet/diff.hpp"
#include "gitnet/errors.hpp"
#include "gitnet/process.hpp"
#include "gitnet/text.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace gitnet {

namespace {

constexpr char kRecordSep = '\x1e';
constexpr char kFieldSep = '\x1f';

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> parts;
    std::size_t pos = 0;
    for (;;) {
        const auto next = s.find(sep, pos);
        if (next == std::string::npos) {
            parts.push_back(s.substr(pos));
            return parts;
        }
        parts.push_back(s.substr(pos, next - pos));
        pos = next + 1;
    }
}

std::vector<std::string> split_ws(const std::string& s)
{
    std::vector<std::string> parts;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok)
        parts.push_back(tok);
    return parts;
}

// "1234567890 +0530" -> (epoch seconds, offset minutes)
std::pair<std::int64_t, int> parse_raw_date(const std::string& raw)
{
    const auto parts = split_ws(raw);
    std::int64_t epoch = 0;
    int tz = 0;
    if (!parts.empty())
        epoch = std::stoll(parts[0]);
    if (parts.size() > 1 && parts[1].size() == 5) {
        const int sign = parts[1][0] == '-' ? -1 : 1;
        const int hh = std::stoi(parts[1].substr(1, 2));
        const int mm = std::stoi(parts[1].substr(3, 2));
        tz = sign * (hh * 60 + mm);
    }
    return {epoch, tz};
}

// Undoes git's C-style path quoting ("a\"b\303\251").
std::string unquote_path(const std::string& s)
{
    if (s.size() < 2 || s.front() != '"' || s.back() != '"')
        return s;
    std::string out;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        char c = s[i];
        if (c != '\\') {
            out += c;
            continue;
        }
        ++i;
        if (i + 1 > s.size())
            break;
        char e = s[i];
        switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case 'a': out += '\a'; break;
        case 'b': out += '\b'; break;
        case 'f': out += '\f'; break;
        case 'v': out += '\v'; break;
        case '\\': out += '\\'; break;
        case '"': out += '"'; break;
        default:
            if (e >= '0' && e <= '7') {
                int val = 0, digits = 0;
                while (digits < 3 && i + 1 < s.size() + 1 && s[i] >= '0' && s[i] <= '7') {
                    val = val * 8 + (s[i] - '0');
                    ++i;
                    ++digits;
                }
                --i;
                out += static_cast<char>(val);
            } else {
                out += e;
            }
        }
    }
    return out;
}

std::string basename_of(const std::string& path)
{
    const auto pos = path.find_last_of('/');
    return pos == std::string::npos ? path : path.substr(pos + 1);
}

int count_lines(const std::string& content)
{
    if (content.empty())
        return 0;
    int n = static_cast<int>(std::count(content.begin(), content.end(), '\n'));
    if (content.back() != '\n')
        ++n; // unterminated final line
    return n;
}

int count_tokens(const std::string& content)
{
    int n = 0;
    bool in_token = false;
    for (char c : content) {
        const bool ws = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
        if (!ws && !in_token)
            ++n;
        in_token = !ws;
    }
    return n;
}

} // namespace

GitRepository::GitRepository(std::string path) : path_(std::move(path))
{
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(path_, ec))
        throw NotARepository(path_);
    const auto probe = run_process({"git", "rev-parse", "--git-dir"}, path_);
    if (probe.exit_code != 0)
        throw NotARepository(path_);
    auto abs = fs::weakly_canonical(path_, ec);
    project_name_ = ec ? basename_of(path_) : abs.filename().string();
    if (project_name_.empty())
        project_name_ = basename_of(path_);
}

GitRepository::~GitRepository() = default;
GitRepository::GitRepository(GitRepository&&) noexcept = default;
GitRepository& GitRepository::operator=(GitRepository&&) noexcept = default;

std::string GitRepository::git_out(const std::vector<std::string>& args) const
{
    std::vector<std::string> argv{"git"};
    argv.insert(argv.end(), args.begin(), args.end());
    auto result = run_process(argv, path_);
    if (result.exit_code != 0)
        throw RepositoryError("git " + (args.empty() ? "" : args[0]) +
                              " failed: " + result.err);
    return std::move(result.out);
}

std::vector<CommitRecord> GitRepository::list_commits(CommitOrder order, bool collect_branches)
{
    static const std::string fmt = std::string("--format=") + kRecordSep +
                                   "%H" + kFieldSep + "%P" + kFieldSep + "%at" + kFieldSep +
                                   "%ad" + kFieldSep + "%an" + kFieldSep + "%ae" + kFieldSep +
                                   "%ct" + kFieldSep + "%cd" + kFieldSep + "%cn" + kFieldSep +
                                   "%ce" + kFieldSep + "%B";
    const auto log = run_process({"git", "log", "--all", "--date=raw", fmt}, path_);
    if (log.exit_code != 0 || log.out.empty())
        throw EmptyRepository(path_);

    std::vector<CommitRecord> commits;
    const auto records = split(log.out, kRecordSep);
    for (const auto& raw : records) {
        if (raw.empty())
            continue;
        const auto fields = split(raw, kFieldSep);
        if (fields.size() < 11)
            continue;
        CommitRecord c;
        c.hash = fields[0];
        if (!fields[1].empty())
            c.parents = split_ws(fields[1]);
        c.author_date = std::stoll(fields[2]);
        c.author_timezone = parse_raw_date(fields[3]).second;
        c.author_name = fields[4];
        c.author_email = fields[5];
        c.committer_date = std::stoll(fields[6]);
        c.committer_timezone = parse_raw_date(fields[7]).second;
        c.committer_name = fields[8];
        c.committer_email = fields[9];
        std::string msg = fields[10];
        while (!msg.empty() && msg.back() == '\n')
            msg.pop_back();
        c.commit_message_len = char_count(msg);
        c.merge = c.parents.size() >= 2;
        c.project_name = project_name_;
        commits.push_back(std::move(c));
    }
    if (commits.empty())
        throw EmptyRepository(path_);

    // main-branch membership: reachability from the checked-out branch
    std::string main_branch;
    const auto head = run_process({"git", "symbolic-ref", "--quiet", "--short", "HEAD"}, path_);
    if (head.exit_code == 0 && !head.out.empty()) {
        main_branch = head.out;
        while (!main_branch.empty() && main_branch.back() == '\n')
            main_branch.pop_back();
    }
    if (!main_branch.empty()) {
        const auto rl = run_process({"git", "rev-list", main_branch}, path_);
        if (rl.exit_code == 0) {
            std::unordered_set<std::string> on_main;
            for (auto& h : split(rl.out, '\n'))
                if (!h.empty())
                    on_main.insert(h);
            for (auto& c : commits)
                c.in_main_branch = on_main.count(c.hash) > 0;
        }
    }

    if (collect_branches) {
        const auto refs =
            git_out({"for-each-ref", "refs/heads", "--format=%(refname:short)"});
        std::unordered_map<std::string, std::vector<std::string>> containing;
        for (const auto& branch : split(refs, '\n')) {
            if (branch.empty())
                continue;
            const auto rl = run_process({"git", "rev-list", branch}, path_);
            for (auto& h : split(rl.out, '\n'))
                if (!h.empty())
                    containing[h].push_back(branch);
        }
        for (auto& c : commits)
            if (auto it = containing.find(c.hash); it != containing.end())
                c.branches = it->second;
    }

    if (order == CommitOrder::Chronological) {
        std::sort(commits.begin(), commits.end(), [](const auto& a, const auto& b) {
            return std::tie(a.committer_date, a.hash) < std::tie(b.committer_date, b.hash);
        });
    } else {
        // rev-list --topo-order lists children first; reverse for parents-first
        const auto topo = git_out({"rev-list", "--all", "--topo-order"});
        std::unordered_map<std::string, std::size_t> rank;
        std::size_t i = 0;
        for (const auto& h : split(topo, '\n'))
            if (!h.empty())
                rank[h] = i++;
        std::sort(commits.begin(), commits.end(), [&](const auto& a, const auto& b) {
            return rank[a.hash] > rank[b.hash];
        });
    }
    return commits;
}

std::optional<std::string> GitRepository::read_blob(const std::string& revision,
                                                    const std::string& path)
{
    if (!catfile_)
        catfile_ = std::make_unique<PipeProcess>(
            std::vector<std::string>{"git", "cat-file", "--batch"}, path_);
    catfile_->write_line(revision + ":" + path);
    std::string header;
    if (!catfile_->read_line(header))
        throw RepositoryError("git cat-file --batch terminated unexpectedly");
    const auto parts = split_ws(header);
    if (parts.size() < 3 || parts[1] != "blob")
        return std::nullopt; // "missing", or a tree/submodule at that path
    const auto size = std::stoull(parts[2]);
    std::string content = catfile_->read_exact(size);
    catfile_->read_exact(1); // trailing LF
    return content;
}

std::vector<FileModification> GitRepository::extract_modifications(const CommitRecord& commit)
{
    const auto exists =
        run_process({"git", "cat-file", "-e", commit.hash + "^{commit}"}, path_);
    if (exists.exit_code != 0)
        throw CommitNotFound(commit.hash);

    std::vector<std::string> args{"diff-tree", "-r", "-M", "-p", "--no-commit-id",
                                  "--no-color"};
    const std::string parent = commit.parents.empty() ? "" : commit.parents.front();
    if (parent.empty()) {
        args.push_back("--root");
        args.push_back(commit.hash);
    } else {
        args.push_back(parent);
        args.push_back(commit.hash);
    }
    const std::string patch = git_out(args);

    // Split into per-file sections on "diff --git" boundaries.
    std::vector<std::string> sections;
    std::size_t pos = 0;
    while (pos < patch.size()) {
        const auto next = patch.find("\ndiff --git ", pos);
        if (next == std::string::npos) {
            sections.push_back(patch.substr(pos));
            break;
        }
        sections.push_back(patch.substr(pos, next + 1 - pos));
        pos = next + 1;
    }

    std::vector<FileModification> mods;
    for (const auto& section : sections) {
        if (section.empty() || section.compare(0, 11, "diff --git "))
            continue;
        FileModification mod;
        bool is_new = false, is_deleted = false, git_binary = false;
        std::string rename_from, rename_to, minus_path, plus_path;

        std::size_t lp = 0;
        std::size_t body_start = section.size();
        while (lp < section.size()) {
            const std::size_t line_start = lp;
            auto eol = section.find('\n', lp);
            if (eol == std::string::npos)
                eol = section.size();
            const std::string line = section.substr(lp, eol - lp);
            lp = eol + 1;
            if (line.starts_with("@@")) {
                body_start = line_start;
                break;
            }
            if (line.starts_with("new file mode"))
                is_new = true;
            else if (line.starts_with("deleted file mode"))
                is_deleted = true;
            else if (line.starts_with("rename from "))
                rename_from = unquote_path(line.substr(12));
            else if (line.starts_with("rename to "))
                rename_to = unquote_path(line.substr(10));
            else if (line.starts_with("copy from "))
                rename_from = unquote_path(line.substr(10));
            else if (line.starts_with("copy to "))
                rename_to = unquote_path(line.substr(8));
            else if (line.starts_with("Binary files ") || line.starts_with("GIT binary patch"))
                git_binary = true;
            else if (line.starts_with("--- ")) {
                const auto p = unquote_path(line.substr(4));
                if (p != "/dev/null")
                    minus_path = p.starts_with("a/") ? p.substr(2) : p;
            } else if (line.starts_with("+++ ")) {
                const auto p = unquote_path(line.substr(4));
                if (p != "/dev/null")
                    plus_path = p.starts_with("b/") ? p.substr(2) : p;
            }
        }

        if (!rename_from.empty()) {
            mod.old_path = rename_from;
            mod.new_path = rename_to;
        } else {
            std::string old_p = minus_path, new_p = plus_path;
            if (old_p.empty() && new_p.empty()) {
                // mode-only change or binary diff without ---/+++: recover
                // paths from the "diff --git a/X b/X" line (identical paths)
                const auto header_end = section.find('\n');
                std::string header = section.substr(11, header_end - 11);
                std::string p;
                if (header.starts_with("\"")) {
                    const auto endq = header.find("\" ");
                    p = unquote_path(header.substr(0, endq + 1));
                } else {
                    p = header.substr(0, (header.size() - 1) / 2);
                }
                if (p.starts_with("a/"))
                    p = p.substr(2);
                old_p = new_p = p;
            }
            if (!is_new && !old_p.empty())
                mod.old_path = old_p;
            else if (!is_new && old_p.empty() && !new_p.empty() && !is_deleted)
                mod.old_path = new_p;
            if (!is_deleted && !new_p.empty())
                mod.new_path = new_p;
            else if (!is_deleted && new_p.empty() && !old_p.empty() && !is_new)
                mod.new_path = old_p;
        }
        mod.filename = basename_of(mod.new_path ? *mod.new_path : mod.old_path.value_or(""));

        // spec binary rule: NUL within the first 8000 bytes at either revision
        std::optional<std::string> old_content, new_content;
        if (mod.old_path && !parent.empty())
            old_content = read_blob(parent, *mod.old_path);
        if (mod.new_path)
            new_content = read_blob(commit.hash, *mod.new_path);
        const bool binary = git_binary ||
                            (old_content && looks_binary(*old_content)) ||
                            (new_content && looks_binary(*new_content));
        if (binary) {
            mod.binary = true;
            mods.push_back(std::move(mod));
            continue;
        }

        if (body_start < section.size())
            mod.diff_text = section.substr(body_start);
        const auto parsed = parse_diff(mod.diff_text);
        mod.added_count = static_cast<int>(parsed.added.size());
        mod.removed_count = static_cast<int>(parsed.deleted.size());
        if (new_content) {
            mod.loc = count_lines(*new_content);
            mod.token_count = count_tokens(*new_content);
        }
        mods.push_back(std::move(mod));
    }
    return mods;
}

LineAttribution GitRepository::blame_pre_image(const std::string& path,
                                               const std::string& revision)
{
    const auto content = read_blob(revision, path);
    if (!content)
        throw FileNotAtRevision(path, revision);
    if (looks_binary(*content))
        throw BinaryFile(path);

    const auto result =
        run_process({"git", "blame", "--porcelain", revision, "--", path}, path_);
    if (result.exit_code != 0)
        throw RepositoryError("git blame failed for " + path + " at " + revision + ": " +
                              result.err);

    LineAttribution attribution;
    std::unordered_map<std::string, LineAttribution::Origin> known;
    std::string current_sha;
    int current_final = 0;
    std::size_t pos = 0;
    const std::string& out = result.out;
    while (pos < out.size()) {
        auto eol = out.find('\n', pos);
        if (eol == std::string::npos)
            eol = out.size();
        const std::string line = out.substr(pos, eol - pos);
        pos = eol + 1;
        if (line.starts_with("\t")) {
            auto it = known.find(current_sha);
            if (it != known.end())
                attribution.lines[current_final] = it->second;
            continue;
        }
        if (line.size() > 41 && line[40] == ' ' &&
            line.find_first_not_of("0123456789abcdef") == 40) {
            const auto parts = split_ws(line);
            current_sha = parts[0];
            current_final = std::stoi(parts[2]);
            known.try_emplace(current_sha).first->second.commit_hash = current_sha;
        } else if (line.starts_with("author ")) {
            known[current_sha].author_name = line.substr(7);
        } else if (line.starts_with("author-mail ")) {
            std::string mail = line.substr(12);
            if (mail.size() >= 2 && mail.front() == '<' && mail.back() == '>')
                mail = mail.substr(1, mail.size() - 2);
            known[current_sha].author_email = mail;
        }
    }
    return attribution;
}

} // namespace gitnet

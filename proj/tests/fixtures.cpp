#include "fixtures.hpp"

#include "gitnet/process.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <unistd.h>

namespace gitnet::testing {

namespace fs = std::filesystem;

TempDir::TempDir()
{
    static std::atomic<int> counter{0};
    path_ = (fs::temp_directory_path() /
             ("gitnet_test_" + std::to_string(::getpid()) + "_" +
              std::to_string(counter.fetch_add(1))))
                .string();
    fs::create_directories(path_);
}

TempDir::~TempDir()
{
    std::error_code ec;
    fs::remove_all(path_, ec);
}

std::string git(const std::string& dir, const std::vector<std::string>& args,
                const std::vector<std::string>& env)
{
    std::vector<std::string> argv;
    if (!env.empty()) {
        argv.push_back("env");
        argv.insert(argv.end(), env.begin(), env.end());
    }
    argv.push_back("git");
    argv.insert(argv.end(), args.begin(), args.end());
    const auto result = run_process(argv, dir);
    if (result.exit_code != 0)
        throw std::runtime_error("fixture git command failed: " + result.err);
    return result.out;
}

void init_repo(const std::string& dir)
{
    fs::create_directories(dir);
    git(dir, {"init", "-q", "-b", "main"});
    git(dir, {"config", "user.name", "Fixture"});
    git(dir, {"config", "user.email", "fixture@example.com"});
}

void write_file(const std::string& dir, const std::string& rel, const std::string& content)
{
    const fs::path p = fs::path(dir) / rel;
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << content;
}

void remove_file(const std::string& dir, const std::string& rel)
{
    git(dir, {"rm", "-q", rel});
}

void move_file(const std::string& dir, const std::string& from, const std::string& to)
{
    git(dir, {"mv", from, to});
}

std::string commit_all(const std::string& dir, const Author& author, std::int64_t date,
                       const std::string& message)
{
    git(dir, {"add", "-A"});
    const std::string stamp = std::to_string(date) + " +0000";
    git(dir,
        {"-c", "user.name=" + author.name, "-c", "user.email=" + author.email, "commit",
         "-q", "--allow-empty", "-m", message},
        {"GIT_AUTHOR_DATE=" + stamp, "GIT_COMMITTER_DATE=" + stamp,
         "GIT_AUTHOR_NAME=" + author.name, "GIT_AUTHOR_EMAIL=" + author.email});
    auto hash = git(dir, {"rev-parse", "HEAD"});
    while (!hash.empty() && hash.back() == '\n')
        hash.pop_back();
    return hash;
}

std::string merge_branch(const std::string& dir, const std::string& branch,
                         const Author& author, std::int64_t date)
{
    const std::string stamp = std::to_string(date) + " +0000";
    git(dir,
        {"-c", "user.name=" + author.name, "-c", "user.email=" + author.email, "merge",
         "-q", "--no-ff", "--no-edit", branch},
        {"GIT_AUTHOR_DATE=" + stamp, "GIT_COMMITTER_DATE=" + stamp,
         "GIT_AUTHOR_NAME=" + author.name, "GIT_AUTHOR_EMAIL=" + author.email});
    auto hash = git(dir, {"rev-parse", "HEAD"});
    while (!hash.empty() && hash.back() == '\n')
        hash.pop_back();
    return hash;
}

std::vector<std::string> make_three_commit_repo(const std::string& dir)
{
    init_repo(dir);
    std::vector<std::string> hashes;
    write_file(dir, "a.txt", "one\ntwo\nthree\n");
    hashes.push_back(commit_all(dir, kAlice, kT0, "create a.txt"));
    write_file(dir, "a.txt", "ONE\ntwo\nthree\n");
    hashes.push_back(commit_all(dir, kBob, kT0 + kDay, "rewrite line 1"));
    write_file(dir, "a.txt", "ONE\nthree\n");
    hashes.push_back(commit_all(dir, kCarol, kT0 + 2 * kDay, "delete line 2"));
    return hashes;
}

std::vector<std::string> make_six_commit_repo(const std::string& dir)
{
    init_repo(dir);
    std::vector<std::string> hashes;
    write_file(dir, "a.txt", "alpha\nbravo\ncharlie\n");
    hashes.push_back(commit_all(dir, kAlice, kT0, "create a.txt"));
    write_file(dir, "a.txt", "ALPHA\nbravo\ncharlie\n");
    hashes.push_back(commit_all(dir, kBob, kT0 + kDay, "rewrite line 1"));
    write_file(dir, "a.txt", "ALPHA\ncharlie\n");
    hashes.push_back(commit_all(dir, kCarol, kT0 + 2 * kDay, "delete bravo"));
    write_file(dir, "a.txt", "ALPHA\ncharlie\ndelta\n");
    write_file(dir, "b.txt", "first\nsecond\n");
    hashes.push_back(commit_all(dir, kAlice, kT0 + 3 * kDay, "append delta, add b.txt"));
    write_file(dir, "b.txt", "uno\ndos\ntres\n");
    hashes.push_back(commit_all(dir, kBob, kT0 + 4 * kDay, "rewrite b.txt"));
    write_file(dir, "a.txt", "ALPHA\ncharlie!\ndelta\n");
    hashes.push_back(commit_all(dir, kCarol, kT0 + 33 * kDay, "punctuate charlie"));
    return hashes;
}

} // namespace gitnet::testing

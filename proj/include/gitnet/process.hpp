#pragma once

#include <string>
#include <vector>

namespace gitnet {

struct ProcessResult {
    int exit_code = -1;
    std::string out; // binary-safe
    std::string err;
};

/// Runs a command with argv semantics (no shell), capturing stdout and
/// stderr. `cwd` empty means inherit.
ProcessResult run_process(const std::vector<std::string>& argv, const std::string& cwd = {});

/// Long-lived bidirectional child process (used for `git cat-file --batch`).
class PipeProcess {
public:
    PipeProcess(const std::vector<std::string>& argv, const std::string& cwd);
    ~PipeProcess();
    PipeProcess(const PipeProcess&) = delete;
    PipeProcess& operator=(const PipeProcess&) = delete;

    void write_line(const std::string& line);
    /// Reads until LF (not included). Returns false on EOF.
    bool read_line(std::string& line);
    /// Reads exactly n bytes.
    std::string read_exact(std::size_t n);

private:
    bool fill_buffer();

    int pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
    std::size_t buffer_pos_ = 0;
};

} // namespace gitnet

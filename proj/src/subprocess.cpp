#include "putforge/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>

#include "putforge/error.hpp"

namespace putforge {

namespace {

using Clock = std::chrono::steady_clock;

}  // namespace

CommandResult run_command(const std::string& command, const std::filesystem::path& cwd,
                          const std::vector<std::pair<std::string, std::string>>& env,
                          std::chrono::milliseconds timeout) {
    int pipefd[2];
    if (pipe(pipefd) != 0) throw Error("pipe() failed: " + std::string(strerror(errno)));

    const pid_t pid = fork();
    if (pid < 0) {
        close(pipefd[0]);
        close(pipefd[1]);
        throw Error("fork() failed: " + std::string(strerror(errno)));
    }

    if (pid == 0) {
        // child: own process group so a timeout can kill the whole tree
        setpgid(0, 0);
        close(pipefd[0]);
        dup2(pipefd[1], STDOUT_FILENO);
        dup2(pipefd[1], STDERR_FILENO);
        close(pipefd[1]);
        if (!cwd.empty() && chdir(cwd.c_str()) != 0) _exit(127);
        for (const auto& [key, value] : env) {
            setenv(key.c_str(), value.c_str(), 1);
        }
        execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }

    close(pipefd[1]);
    CommandResult result;
    const auto deadline = timeout.count() > 0 ? Clock::now() + timeout : Clock::time_point::max();

    bool out_open = true;
    while (out_open) {
        const auto now = Clock::now();
        if (now >= deadline) {
            result.timed_out = true;
            kill(-pid, SIGKILL);
            break;
        }
        int wait_ms = -1;
        if (deadline != Clock::time_point::max()) {
            wait_ms = static_cast<int>(
                std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count());
            if (wait_ms < 1) wait_ms = 1;
        }
        struct pollfd pfd {
            pipefd[0], POLLIN, 0
        };
        const int rc = poll(&pfd, 1, wait_ms);
        if (rc < 0) {
            if (errno == EINTR) continue;
            break;
        }
        if (rc == 0) continue;  // loop re-checks deadline
        char buf[4096];
        const ssize_t n = read(pipefd[0], buf, sizeof buf);
        if (n > 0) {
            result.output.append(buf, static_cast<std::size_t>(n));
        } else {
            out_open = false;  // EOF (all writers gone) or error
        }
    }
    // drain whatever remains after a kill
    if (result.timed_out) {
        fcntl(pipefd[0], F_SETFL, O_NONBLOCK);
        char buf[4096];
        ssize_t n;
        while ((n = read(pipefd[0], buf, sizeof buf)) > 0) {
            result.output.append(buf, static_cast<std::size_t>(n));
        }
    }
    close(pipefd[0]);

    int status = 0;
    while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    if (WIFEXITED(status)) {
        result.exit_code = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
        result.signal = WTERMSIG(status);
    }
    return result;
}

std::string expand_placeholders(
    std::string templ, const std::vector<std::pair<std::string, std::string>>& substitutions) {
    for (const auto& [key, value] : substitutions) {
        const std::string pattern = "{" + key + "}";
        std::size_t pos = 0;
        while ((pos = templ.find(pattern, pos)) != std::string::npos) {
            templ.replace(pos, pattern.size(), value);
            pos += value.size();
        }
    }
    return templ;
}

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') {
            out += "'\\''";
        } else {
            out += c;
        }
    }
    out += '\'';
    return out;
}

}  // namespace putforge

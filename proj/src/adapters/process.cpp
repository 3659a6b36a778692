// sentinel: differential bug detection for WebAssembly runtimes
// Copyright 2026 The Sentinel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sentinel/adapters/process.hpp"

#include <algorithm>
#include <cerrno>
#include <csignal>
#include <cstdlib>
#include <cstring>
#include <mutex>

#include <fcntl.h>
#include <poll.h>
#include <sys/resource.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace sentinel::adapters {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Fd {
    int fd = -1;
    Fd() = default;
    explicit Fd(int f) : fd{f} {}
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;
    ~Fd() { reset(); }
    void reset()
    {
        if (fd >= 0)
            ::close(fd);
        fd = -1;
    }
};

void make_pipe(Fd& r, Fd& w)
{
    int p[2];
    if (::pipe2(p, O_CLOEXEC) != 0)
        throw SpawnError(std::string("pipe: ") + std::strerror(errno));
    r.fd = p[0];
    w.fd = p[1];
}

void set_nonblocking(int fd)
{
    ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL) | O_NONBLOCK);
}

std::vector<std::string> child_environment(const std::vector<std::pair<std::string, std::string>>& extra)
{
    std::vector<std::string> env;
    for (char** e = environ; e != nullptr && *e != nullptr; ++e)
    {
        std::string_view kv(*e);
        const auto eq = kv.find('=');
        const auto key = kv.substr(0, eq);
        bool overridden = false;
        for (const auto& [k, v] : extra)
            overridden = overridden || k == key;
        if (!overridden)
            env.emplace_back(kv);
    }
    for (const auto& [k, v] : extra)
        env.push_back(k + "=" + v);
    return env;
}

}  // namespace

fs::path find_executable(const std::string& name)
{
    if (name.empty())
        return {};
    const auto runnable = [](const fs::path& p) {
        struct stat st{};
        return ::stat(p.c_str(), &st) == 0 && S_ISREG(st.st_mode) && ::access(p.c_str(), X_OK) == 0;
    };
    if (name.find('/') != std::string::npos)
        return runnable(name) ? fs::absolute(name) : fs::path{};
    const char* path = std::getenv("PATH");
    std::string_view rest = path != nullptr ? path : "/usr/local/bin:/usr/bin:/bin";
    while (true)
    {
        const auto colon = rest.find(':');
        const auto dir = rest.substr(0, colon);
        const fs::path candidate = fs::path(dir.empty() ? "." : std::string(dir)) / name;
        if (runnable(candidate))
            return candidate;
        if (colon == std::string_view::npos)
            break;
        rest.remove_prefix(colon + 1);
    }
    return {};
}

ProcessOutcome run_process(const ProcessRequest& req)
{
    static std::once_flag ignore_sigpipe;
    std::call_once(ignore_sigpipe, [] { std::signal(SIGPIPE, SIG_IGN); });

    if (req.argv.empty())
        throw SpawnError("empty command line");

    Fd in_r, in_w, out_r, out_w, err_r, err_w, ex_r, ex_w;
    make_pipe(in_r, in_w);
    make_pipe(out_r, out_w);
    make_pipe(err_r, err_w);
    make_pipe(ex_r, ex_w);

    // Everything the child touches is prepared before fork.
    std::vector<std::string> env_store = child_environment(req.extra_env);
    std::vector<char*> envp;
    for (auto& e : env_store)
        envp.push_back(e.data());
    envp.push_back(nullptr);
    std::vector<std::string> argv_store = req.argv;
    std::vector<char*> argv;
    for (auto& a : argv_store)
        argv.push_back(a.data());
    argv.push_back(nullptr);
    const std::string cwd = req.cwd.string();

    const auto start = Clock::now();
    const pid_t pid = ::fork();
    if (pid < 0)
        throw SpawnError(std::string("fork: ") + std::strerror(errno));
    if (pid == 0)
    {
        ::setpgid(0, 0);
        ::signal(SIGPIPE, SIG_DFL);
        ::dup2(in_r.fd, STDIN_FILENO);
        ::dup2(out_w.fd, STDOUT_FILENO);
        ::dup2(err_w.fd, STDERR_FILENO);
        int code = 0;
        if (!cwd.empty() && ::chdir(cwd.c_str()) != 0)
            code = errno;
        else
        {
            ::execve(argv[0], argv.data(), envp.data());
            code = errno;
        }
        [[maybe_unused]] auto n = ::write(ex_w.fd, &code, sizeof(code));
        ::_exit(127);
    }
    ::setpgid(pid, pid);  // also done in the child; whichever runs first wins

    in_r.reset();
    out_w.reset();
    err_w.reset();
    ex_w.reset();

    int exec_errno = 0;
    if (::read(ex_r.fd, &exec_errno, sizeof(exec_errno)) == sizeof(exec_errno))
    {
        int status = 0;
        ::waitpid(pid, &status, 0);
        throw SpawnError("cannot run " + req.argv[0] + ": " + std::strerror(exec_errno));
    }

    ProcessOutcome res;
    res.pgid = pid;
    const std::string input = req.stdin_data.value_or("");
    size_t written = 0;
    if (input.empty())
        in_w.reset();
    else
        set_nonblocking(in_w.fd);
    set_nonblocking(out_r.fd);
    set_nonblocking(err_r.fd);

    const auto deadline = start + req.timeout;
    bool exited = false;
    int status = 0;
    struct rusage usage{};
    char buf[65536];

    while (out_r.fd >= 0 || err_r.fd >= 0 || !exited)
    {
        if (!exited)
        {
            const pid_t w = ::wait4(pid, &status, WNOHANG, &usage);
            if (w == pid)
            {
                exited = true;
                // Descendants must not outlive the run.
                ::kill(-pid, SIGKILL);
            }
        }
        const auto now = Clock::now();
        if (!exited && now >= deadline)
        {
            res.timed_out = true;
            ::kill(-pid, SIGKILL);
            ::wait4(pid, &status, 0, &usage);
            exited = true;
        }

        pollfd fds[3];
        nfds_t n = 0;
        if (out_r.fd >= 0)
            fds[n++] = {out_r.fd, POLLIN, 0};
        if (err_r.fd >= 0)
            fds[n++] = {err_r.fd, POLLIN, 0};
        if (in_w.fd >= 0)
            fds[n++] = {in_w.fd, POLLOUT, 0};
        if (n == 0)
        {
            if (!exited)
                ::usleep(2000);
            continue;
        }
        int wait_ms = 20;
        if (!exited)
        {
            const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
            wait_ms = static_cast<int>(std::clamp<long long>(left, 0, 20));
        }
        if (::poll(fds, n, wait_ms) < 0 && errno != EINTR)
            break;
        for (nfds_t i = 0; i < n; ++i)
        {
            if (fds[i].revents == 0)
                continue;
            if (fds[i].fd == in_w.fd)
            {
                const ssize_t k = ::write(in_w.fd, input.data() + written, input.size() - written);
                if (k > 0)
                    written += static_cast<size_t>(k);
                if (k < 0 && errno != EAGAIN)
                    in_w.reset();
                else if (written == input.size())
                    in_w.reset();
                continue;
            }
            Fd& src = fds[i].fd == out_r.fd ? out_r : err_r;
            std::string& dst = fds[i].fd == out_r.fd ? res.out : res.err;
            while (true)
            {
                const ssize_t k = ::read(src.fd, buf, sizeof(buf));
                if (k > 0)
                {
                    dst.append(buf, static_cast<size_t>(k));
                    continue;
                }
                if (k == 0 || (errno != EAGAIN && errno != EINTR))
                    src.reset();
                break;
            }
        }
        // After exit (and the group kill), pipes drain to EOF promptly; a stuck holder is cut off at the deadline.
        if (exited && Clock::now() >= deadline + std::chrono::milliseconds(500))
            break;
    }

    res.duration = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
    if (!res.timed_out)
    {
        if (WIFSIGNALED(status))
            res.signal = WTERMSIG(status);
        else if (WIFEXITED(status))
            res.exit_code = WEXITSTATUS(status);
    }
    if (usage.ru_maxrss > 0)
        res.peak_memory = static_cast<uint64_t>(usage.ru_maxrss) * 1024u;
    return res;
}

}  // namespace sentinel::adapters

#include "filexpert/process.hpp"

#include <cerrno>
#include <cstring>
#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include "filexpert/error.hpp"

namespace filexpert::process {

namespace {

struct Pipe {
    int fd[2] = {-1, -1};
    Pipe() {
        if (::pipe2(fd, O_CLOEXEC) != 0)
            throw Error("process", "SpawnFailed", std::string("pipe: ") + std::strerror(errno));
    }
    ~Pipe() {
        close_read();
        close_write();
    }
    Pipe(const Pipe&) = delete;
    Pipe& operator=(const Pipe&) = delete;
    void close_read() {
        if (fd[0] >= 0)
            ::close(fd[0]);
        fd[0] = -1;
    }
    void close_write() {
        if (fd[1] >= 0)
            ::close(fd[1]);
        fd[1] = -1;
    }
};

} // namespace

Result run(const std::vector<std::string>& argv, const std::string& cwd, std::string_view input) {
    if (argv.empty())
        throw Error("process", "SpawnFailed", "empty command");

    Pipe in, out, err;
    std::vector<char*> args;
    for (const auto& a : argv)
        args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);

    pid_t pid = ::fork();
    if (pid < 0)
        throw Error("process", "SpawnFailed", std::string("fork: ") + std::strerror(errno));
    if (pid == 0) {
        ::dup2(in.fd[0], STDIN_FILENO);
        ::dup2(out.fd[1], STDOUT_FILENO);
        ::dup2(err.fd[1], STDERR_FILENO);
        if (!cwd.empty() && ::chdir(cwd.c_str()) != 0)
            ::_exit(126);
        ::execvp(args[0], args.data());
        ::_exit(127);
    }

    in.close_read();
    out.close_write();
    err.close_write();
    if (input.empty())
        in.close_write();
    else
        ::fcntl(in.fd[1], F_SETFL, ::fcntl(in.fd[1], F_GETFL) | O_NONBLOCK);

    // A child that exits early must not kill us through SIGPIPE.
    struct sigaction ignore {}, previous {};
    ignore.sa_handler = SIG_IGN;
    ::sigaction(SIGPIPE, &ignore, &previous);

    Result result;
    std::size_t written = 0;
    char buf[65536];
    while (out.fd[0] >= 0 || err.fd[0] >= 0) {
        pollfd fds[3];
        int n = 0;
        int out_slot = -1, err_slot = -1, in_slot = -1;
        if (out.fd[0] >= 0) {
            fds[n] = {out.fd[0], POLLIN, 0};
            out_slot = n++;
        }
        if (err.fd[0] >= 0) {
            fds[n] = {err.fd[0], POLLIN, 0};
            err_slot = n++;
        }
        if (in.fd[1] >= 0) {
            fds[n] = {in.fd[1], POLLOUT, 0};
            in_slot = n++;
        }
        if (::poll(fds, n, -1) < 0) {
            if (errno == EINTR)
                continue;
            break;
        }
        if (in_slot >= 0 && (fds[in_slot].revents & (POLLOUT | POLLERR | POLLHUP))) {
            ssize_t w = ::write(in.fd[1], input.data() + written, input.size() - written);
            if (w > 0)
                written += static_cast<std::size_t>(w);
            if (w < 0 && errno != EAGAIN && errno != EINTR)
                written = input.size();
            if (written >= input.size())
                in.close_write();
        }
        auto drain = [&](int slot, Pipe& p, std::string& sink) {
            if (slot < 0 || !(fds[slot].revents & (POLLIN | POLLHUP | POLLERR)))
                return;
            ssize_t r = ::read(p.fd[0], buf, sizeof buf);
            if (r > 0)
                sink.append(buf, static_cast<std::size_t>(r));
            else if (r == 0 || (errno != EAGAIN && errno != EINTR))
                p.close_read();
        };
        drain(out_slot, out, result.out);
        drain(err_slot, err, result.err);
    }
    in.close_write();
    ::sigaction(SIGPIPE, &previous, nullptr);

    int status = 0;
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
    if (result.exit_code == 127 && result.out.empty())
        throw Error("process", "SpawnFailed", "cannot execute " + argv[0]);
    return result;
}

} // namespace filexpert::process

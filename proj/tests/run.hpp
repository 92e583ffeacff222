#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace clott::test {

struct Run {
    int rc = -1;
    std::string out;
    std::string err;
};

inline std::string slurp(FILE* f) {
    std::string s;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) s.append(buf, n);
    return s;
}

// Runs the clott binary with a shell-quoted argument string; stderr goes to a temp file.
inline Run run_clott(const std::string& args) {
    char path[] = "/tmp/clott-errXXXXXX";
    int fd = mkstemp(path);
    if (fd < 0) return {};
    close(fd);
    std::string cmd = std::string("'") + CLOTT_BIN + "' " + args + " 2>" + path;
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    r.out = slurp(p);
    int status = pclose(p);
    r.rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    if (FILE* e = std::fopen(path, "r")) {
        r.err = slurp(e);
        std::fclose(e);
    }
    std::remove(path);
    return r;
}

inline std::string corpus_arg(const std::string& name) {
    return std::string("'") + CLOTT_CORPUS_DIR + "/" + name + "'";
}

}  // namespace clott::test

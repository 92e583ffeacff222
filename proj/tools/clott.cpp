// Command-line driver: check, eval, normalize and verify .clott files.

#include <unistd.h>

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "clott/elab.hpp"
#include "clott/eval.hpp"
#include "clott/pretty.hpp"
#include "clott/verify.hpp"

using namespace clott;
using json = nlohmann::json;

namespace {

enum Exit { kOk = 0, kTypeError = 1, kParseError = 2, kIoError = 3 };

struct Options {
    int fuel = 8;
    int depth = 4;
    int max_clocks = 2;
    int max_budget = 3;
    int samples = 20;
    bool with_k0 = false;
    bool plain = false;
    bool json = false;
    bool timings = false;
    bool mutate_tick = false;
    std::string stage;
    std::string expr;
    std::vector<std::string> suites;
};

bool color_on(const Options& o) { return !o.plain && !o.json && isatty(fileno(stderr)); }

// Messages are rendered with unicode notation; --plain spells them in the ASCII surface syntax.
std::string to_ascii(std::string s) {
    static const std::pair<const char*, const char*> table[] = {
        {"λ", "\\"}, {"Λ", "/\\"}, {"▷", "|>"}, {"⋄", "<>"}, {"→", "->"}, {"×", "*"},
        {"∀", "forall "}, {"ℕ", "Nat"}, {"≔", ":="}, {"⋆", "*"}, {"⟨", "<"}, {"⟩", ">"}};
    for (const auto& [from, to] : table) {
        std::string f = from;
        for (std::size_t at = s.find(f); at != std::string::npos; at = s.find(f, at + std::strlen(to)))
            s.replace(at, f.size(), to);
    }
    return s;
}

void diag(const Options& o, const std::string& file, Span sp, const std::string& severity, const std::string& raw) {
    std::string msg = o.plain ? to_ascii(raw) : raw;
    std::string sev = severity;
    if (color_on(o)) sev = (severity == "error" ? "\033[1;31m" : "\033[1;33m") + severity + "\033[0m";
    std::cerr << file;
    if (sp.line > 0) std::cerr << ":" << sp.line << ":" << sp.col;
    std::cerr << ": " << sev << ": " << msg << "\n";
}

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Loads and checks one file, printing diagnostics. Returns the exit code for it.
int load(const Options& o, const std::string& path, FileResult& out) {
    auto src = read_file(path);
    if (!src) {
        diag(o, path, {}, "error", "cannot read file");
        return kIoError;
    }
    out = check_source(*src, CheckOptions{o.fuel, o.with_k0});
    if (!out.parse_ok) {
        diag(o, path, out.parse_span, "error", out.parse_message);
        return kParseError;
    }
    int code = kOk;
    for (const auto& d : out.decls)
        if (!d.ok) {
            diag(o, path, d.error_span.line > 0 ? d.error_span : d.span, "error", d.message);
            code = kTypeError;
        }
    return code;
}

json span_json(Span s) { return {{"line", s.line}, {"col", s.col}}; }

int cmd_check(const Options& o, const std::vector<std::string>& files) {
    int code = kOk;
    json rep{{"command", "check"}, {"files", json::array()}};
    for (const auto& path : files) {
        FileResult r;
        int c = load(o, path, r);
        code = std::max(code, c);
        json f{{"file", path}, {"ok", c == kOk}};
        if (c == kIoError) f["io_error"] = "cannot read file";
        if (c == kParseError) f["parse_error"] = {{"span", span_json(r.parse_span)}, {"message", r.parse_message}};
        json decls = json::array();
        for (const auto& d : r.decls) {
            json j{{"name", d.name}, {"kind", d.kind}, {"span", span_json(d.span)}, {"ok", d.ok}};
            if (!d.ok) j["error"] = {{"span", span_json(d.error_span)}, {"message", d.message}};
            decls.push_back(j);
        }
        f["declarations"] = decls;
        rep["files"].push_back(f);
        if (!o.json && c == kOk) {
            int defs = 0;
            for (const auto& d : r.decls) defs += d.kind == "def";
            std::cout << path << ": ok (" << r.decls.size() << " declarations, " << defs << " definitions)\n";
        }
    }
    rep["ok"] = code == kOk;
    if (o.json) std::cout << rep.dump(2) << "\n";
    return code;
}

// The ambient clocks of the file bound to atoms of the stage literal.
std::vector<sem::Atom> bind_ambient(const Program& prog, const sem::NamedStage& st, int count) {
    std::vector<sem::Atom> atoms;
    for (int i = 0; i < count; ++i) {
        const std::string& name = prog.ambient[static_cast<std::size_t>(i)];
        sem::Atom a = st.atom_of(name);
        if (a < 0) throw sem::StageError("the stage gives no budget for clock " + name);
        atoms.push_back(a);
    }
    return atoms;
}

// The term to evaluate or normalize: a definition body or an expression in the full
// ambient context. Returns the core term and the number of ambient clocks it uses.
std::pair<Term, int> target(FileResult& r, const std::string& def, const std::string& expr) {
    if (!expr.empty()) {
        int amb = static_cast<int>(r.prog.ambient.size());
        Elaborator el(r.prog);
        return {el.infer(r.prog.ambient_context(amb), parse_expr(expr)).first, amb};
    }
    const GlobalDef* d = r.prog.find(def);
    if (!d) throw TypeError("unknown definition " + def);
    return {d->body, d->ambient};
}

int with_target(const Options& o, const std::string& path, const std::string& def,
                const std::function<void(FileResult&, const Term&, int)>& body) {
    if (def.empty() == o.expr.empty()) {
        std::cerr << "clott: give exactly one of a definition name or --expr\n";
        return kParseError;
    }
    FileResult r;
    int c = load(o, path, r);
    if (c == kIoError || c == kParseError) return c;
    if (!def.empty()) {
        for (const auto& d : r.decls)
            if (d.name == def && !d.ok) {
                diag(o, path, d.span, "error", "definition " + def + " does not typecheck");
                return kTypeError;
            }
    }
    try {
        auto [t, amb] = target(r, def, o.expr);
        body(r, t, amb);
    } catch (const ParseError& e) {
        diag(o, "<expr>", e.span, "error", e.what());
        return kParseError;
    } catch (const sem::StageError& e) {
        diag(o, "<stage>", {}, "error", e.what());
        return kParseError;
    } catch (const TypeError& e) {
        diag(o, o.expr.empty() ? path : "<expr>", e.span, "error", e.what());
        return kTypeError;
    } catch (const sem::EvalError& e) {
        diag(o, path, {}, "error", std::string("evaluation failed: ") + e.what());
        return kTypeError;
    }
    return kOk;
}

int cmd_eval(const Options& o, const std::string& path, const std::string& def) {
    sem::NamedStage st;
    try {
        st = sem::parse_stage(o.stage);
    } catch (const sem::StageError& e) {
        diag(o, "<stage>", {}, "error", e.what());
        return kParseError;
    }
    return with_target(o, path, def, [&](FileResult& r, const Term& t, int amb) {
        sem::Evaluator ev(r.prog, sem::EvalOptions{1, o.depth, 1, false});
        sem::Env env = ev.global_env(st.stage, bind_ambient(r.prog, st, amb));
        std::cout << sem::show_value(ev.eval(t, env), !o.plain) << "\n";
    });
}

int cmd_normalize(const Options& o, const std::string& path, const std::string& def) {
    return with_target(o, path, def, [&](FileResult& r, const Term& t, int amb) {
        Checker ch(r.prog, o.fuel);
        int fuel = o.fuel;
        Term nf = ch.normalize(t, fuel);
        std::vector<std::string> scope(r.prog.ambient.begin(), r.prog.ambient.begin() + amb);
        std::set<std::string> reserved(r.prog.order.begin(), r.prog.order.end());
        std::cout << pretty(nf, scope, PrettyOptions{!o.plain, &reserved}) << "\n";
    });
}

json cex_json(const Counterexample& c) {
    return {{"term", c.term}, {"stage", c.stage}, {"morphism", c.morphism},
            {"lhs", c.lhs},   {"rhs", c.rhs},     {"note", c.note}};
}

void print_cex(const Counterexample& c) {
    std::cout << "    counterexample: " << c.term << "\n"
              << "      stage:    " << c.stage << "\n";
    if (!c.morphism.empty()) std::cout << "      morphism: " << c.morphism << "\n";
    if (!c.lhs.empty() || !c.rhs.empty())
        std::cout << "      left:     " << c.lhs << "\n"
                  << "      right:    " << c.rhs << "\n";
    if (!c.note.empty()) std::cout << "      note:     " << c.note << "\n";
}

int cmd_verify(const Options& o, const std::vector<std::string>& files) {
    VerifyConfig cfg;
    cfg.fuel = o.fuel;
    cfg.depth = o.depth;
    cfg.max_clocks = o.max_clocks;
    cfg.max_budget = o.max_budget;
    cfg.samples = o.samples;
    cfg.mutate_tick = o.mutate_tick;
    for (const auto& s : o.suites) {
        const auto& names = suite_names();
        if (std::find(names.begin(), names.end(), s) == names.end()) {
            std::cerr << "clott: unknown suite " << s << "\n";
            return kParseError;
        }
    }

    std::vector<FileResult> loaded(files.size());
    int code = kOk;
    for (std::size_t i = 0; i < files.size(); ++i) code = std::max(code, load(o, files[i], loaded[i]));
    if (code != kOk) {
        std::cerr << "clott: verify needs files that typecheck\n";
        return code;
    }
    std::vector<std::pair<std::string, const Program*>> progs;
    for (std::size_t i = 0; i < files.size(); ++i) progs.push_back({files[i], &loaded[i].prog});

    auto t0 = std::chrono::steady_clock::now();
    CorpusReport rep = verify_corpus(progs, cfg, o.suites);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (o.json) {
        json j{{"command", "verify"},
               {"ok", rep.ok()},
               {"config",
                {{"fuel", cfg.fuel},
                 {"depth", cfg.depth},
                 {"max_clocks", cfg.max_clocks},
                 {"max_budget", cfg.max_budget},
                 {"samples", cfg.samples},
                 {"with_k0", o.with_k0},
                 {"mutate_tick", cfg.mutate_tick}}},
               {"files", json::array()},
               {"missing", json::array()},
               {"substitution_instances", rep.subst_instances}};
        for (const auto& f : rep.files) {
            json jf{{"file", f.file}, {"ok", f.ok()}, {"suites", json::array()}};
            for (const auto& s : f.suites) {
                json js{{"name", s.name},         {"ok", s.ok()},           {"checks", s.checks},
                        {"failures", s.failures}, {"skipped", s.skipped}, {"coverage", s.coverage},
                        {"counterexamples", json::array()}};
                for (const auto& c : s.counterexamples) js["counterexamples"].push_back(cex_json(c));
                if (o.timings) js["seconds"] = s.seconds;
                jf["suites"].push_back(js);
            }
            j["files"].push_back(jf);
        }
        for (const auto& [suite, fam] : rep.missing) j["missing"].push_back({{"suite", suite}, {"family", fam}});
        if (o.timings) j["seconds"] = secs;
        std::cout << j.dump(2) << "\n";
        return rep.ok() ? kOk : kTypeError;
    }

    bool shown = false;
    for (const auto& f : rep.files) {
        std::cout << f.file << "\n";
        for (const auto& s : f.suites) {
            std::cout << "  " << s.name << ": " << (s.ok() ? "ok" : "FAILED") << ", " << s.checks << " checks";
            if (s.failures) std::cout << ", " << s.failures << " failures";
            if (s.skipped) std::cout << ", " << s.skipped << " skipped";
            if (o.timings) std::cout << " (" << s.seconds << "s)";
            std::cout << "\n";
            if (!s.ok() && !shown && !s.counterexamples.empty()) {
                print_cex(s.counterexamples.front());
                shown = true;
            }
        }
    }
    for (const auto& [suite, fam] : rep.missing)
        std::cout << "coverage: suite " << suite << " never exercised " << fam << "\n";
    std::cout << (rep.ok() ? "all properties hold" : "verification failed");
    if (o.timings) std::cout << " (" << secs << "s)";
    std::cout << "\n";
    return rep.ok() ? kOk : kTypeError;
}

void common(CLI::App* app, Options& o) {
    app->add_option("--fuel", o.fuel, "unfoldings allowed per conversion check")->check(CLI::PositiveNumber);
    app->add_flag("--with-k0", o.with_k0, "prepend an ambient clock k0 to every file");
    app->add_flag("--plain", o.plain, "ASCII output, no colour");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"clott: checker and evaluator for a guarded type theory with clocks"};
    app.require_subcommand(1);
    Options o;
    std::vector<std::string> files;
    std::string file, def;

    auto* check = app.add_subcommand("check", "typecheck files");
    check->add_option("files", files, "source files")->required();
    check->add_flag("--json", o.json, "print a JSON report");
    common(check, o);

    auto* eval = app.add_subcommand("eval", "evaluate a definition at a stage");
    eval->add_option("file", file, "source file")->required();
    eval->add_option("name", def, "definition name");
    eval->add_option("--expr", o.expr, "evaluate an expression instead of a definition");
    eval->add_option("--stage", o.stage, "budgets of the ambient clocks, e.g. k=3,k0=2");
    eval->add_option("--depth", o.depth, "naturals sampled when comparing functions")->check(CLI::PositiveNumber);
    common(eval, o);

    auto* norm = app.add_subcommand("normalize", "print the normal form of a definition");
    norm->add_option("file", file, "source file")->required();
    norm->add_option("name", def, "definition name");
    norm->add_option("--expr", o.expr, "normalize an expression instead of a definition");
    common(norm, o);

    auto* verify = app.add_subcommand("verify", "run the semantic property suites");
    verify->add_option("files", files, "source files")->required();
    verify->add_option("--depth", o.depth, "naturals sampled when comparing functions")->check(CLI::PositiveNumber);
    verify->add_option("--max-clocks", o.max_clocks, "largest number of clocks in a stage")->check(CLI::PositiveNumber);
    verify->add_option("--max-budget", o.max_budget, "largest budget of a clock")->check(CLI::NonNegativeNumber);
    verify->add_option("--samples", o.samples, "sampled values per stage for the invariance suite")
        ->check(CLI::PositiveNumber);
    verify->add_option("--suite", o.suites, "run only the named suite (repeatable)");
    verify->add_flag("--json", o.json, "print a JSON report");
    verify->add_flag("--timings", o.timings, "include wall-clock times in the report");
    verify->add_flag("--mutate-tick", o.mutate_tick, "evaluate with a broken tick application (testing aid)");
    common(verify, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kParseError;
    }

    try {
        if (*check) return cmd_check(o, files);
        if (*eval) return cmd_eval(o, file, def);
        if (*norm) return cmd_normalize(o, file, def);
        if (*verify) return cmd_verify(o, files);
    } catch (const std::exception& e) {
        std::cerr << "clott: internal error: " << e.what() << "\n";
        return kTypeError;
    }
    return kOk;
}

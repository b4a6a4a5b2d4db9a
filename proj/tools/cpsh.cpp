// Command-line front end.

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "cpsh/arith.hpp"
#include "cpsh/check.hpp"
#include "cpsh/corpus.hpp"
#include "cpsh/eval_cps.hpp"
#include "cpsh/gen.hpp"
#include "cpsh/machine_env.hpp"
#include "cpsh/machine_subst.hpp"
#include "cpsh/nbe.hpp"
#include "cpsh/redsem.hpp"

using namespace cpsh;

namespace {

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_input(const std::string& path) {
    std::stringstream buf;
    if (path == "-") {
        buf << std::cin.rdbuf();
        return buf.str();
    }
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    buf << in.rdbuf();
    return buf.str();
}

// Literals evaluate to their successor: a deliberately broken backend for
// exercising the compare harness.
SStepResult faulty_step(const SConfig& c, int n) {
    if (const auto* e = std::get_if<SEval>(&c))
        if (const auto* lit = e->term.as<term::Lit>()) return SConfig{SCont{1, mk::lit(lit->value + 1), e->tower}};
    return step_subst(c, n);
}

struct Common {
    std::string file;
    int level = 0;
    std::uint64_t fuel = 100000;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("file", c.file, "Program file, or - for stdin")->required();
    cmd->add_option("--level,-n", c.level, "Hierarchy level (default: largest index in the program, at least 1)");
    cmd->add_option("--fuel", c.fuel, "Transition budget")->capture_default_str();
}

struct Loaded {
    Term program;
    int level;
};

Loaded load(const Common& c) {
    Term t = parse(read_input(c.file));
    int n = c.level > 0 ? c.level : std::max(1, max_level(t));
    validate_program(t, n);
    return {t, n};
}

std::string report_line(const std::string& backend, int n, const Outcome& o, double ms) {
    std::ostringstream out;
    out << "backend=" << backend << " level=" << n << " outcome=" << to_string(o.kind) << " steps=" << o.steps
        << " time_ms=" << ms;
    return out.str();
}

int cmd_run(const Common& c, const std::string& backend, const std::string& trace_path, bool dynamic) {
    auto [program, n] = load(c);
    if (dynamic && (backend != "subst" || n != 1))
        throw ValidationError("--dynamic requires --backend subst at level 1");
    std::ofstream trace;
    if (!trace_path.empty()) {
        if (backend == "cps") throw ValidationError("--trace is not available for the cps backend");
        trace.open(trace_path);
        if (!trace) throw InputError("cannot write " + trace_path);
    }
    const bool tracing = trace.is_open();
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    if (backend == "cps") {
        o = run_cps(program, n, c.fuel).outcome();
    } else if (backend == "env") {
        EObserver obs;
        if (tracing) obs = [&](std::uint64_t k, const EConfig& cfg) { trace << trace_line(k, cfg) << '\n'; };
        o = run_env(program, n, c.fuel, obs).outcome();
    } else if (backend == "subst") {
        SObserver obs;
        if (tracing) obs = [&](std::uint64_t k, const SConfig& cfg) { trace << trace_line(k, cfg) << '\n'; };
        o = run_subst(program, n, c.fuel, obs, dynamic ? Control::Dynamic : Control::Static).outcome();
    } else {
        ReductionOptions opts;
        if (tracing) opts.observer = [&](std::uint64_t k, const Term& t) { trace << k << ": " << print_term(t) << '\n'; };
        o = evaluate_by_reduction(program, n, c.fuel, opts).outcome();
    }
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (o.kind == OutcomeKind::Value)
        std::cout << o.observable << '\n';
    else
        std::cout << describe(o) << '\n';
    std::cerr << report_line(dynamic ? "subst-dynamic" : backend, n, o, ms) << '\n';
    return exit_code(o);
}

int cmd_compare(const Common& c, bool fault) {
    auto [program, n] = load(c);
    check::SubstStepper stepper;
    if (fault) stepper = faulty_step;
    auto r = check::compare(program, n, c.fuel, stepper);
    std::cout << r.describe();
    return r.ok() ? 0 : kExitDisagree;
}

int cmd_step(const Common& c, std::uint64_t limit) {
    auto [program, n] = load(c);
    Term t = program;
    for (std::uint64_t k = 0;; ++k) {
        std::cout << k << ": " << print_term(t) << '\n';
        if (k == limit) {
            std::cout << "limit reached\n";
            return exit_code(timeout_outcome(k));
        }
        auto r = reduce_step(t, n);
        if (const auto* next = std::get_if<ReduceNext>(&r)) {
            t = next->term;
        } else if (const auto* done = std::get_if<ReduceDone>(&r)) {
            std::cout << "value: " << observe(done->value) << '\n';
            return 0;
        } else {
            const auto& s = std::get<ReduceStuck>(r);
            std::cout << "stuck: " << to_string(s.info.kind) << " at " << print_term(s.at.focus) << '\n';
            return exit_code(stuck_outcome(s.info, k));
        }
    }
}

int cmd_nbe(const std::string& file, int n, bool verbose) {
    nbe::Mon t = nbe::parse_mon(read_input(file));
    if (nbe::max_index(*t) > n) throw ValidationError("term uses an index above --n");
    nbe::Stats stats;
    nbe::Nf u = nbe::normalize_hier(t, n, &stats);
    std::cout << nbe::print_nf(u) << '\n';
    if (verbose) {
        bool grammar = nbe::grammar_check_nf(u, n);
        bool idem = nbe::nf_equal(nbe::normalize_hier(nbe::embed(u), n), u);
        std::cout << "grammar: " << (grammar ? "ok" : "FAIL") << "\nidempotent: " << (idem ? "yes" : "NO")
                  << "\nnodes: " << stats.nodes << '\n';
    }
    return 0;
}

int cmd_arith(const std::string& mode, const std::string& file) {
    auto e = arith::parse(read_input(file));
    if (mode == "eval") {
        std::cout << arith::eval_direct(*e) << '\n';
    } else if (mode == "machine") {
        auto r = arith::run_machine(e);
        std::cout << r.value << '\n';
        std::cerr << "transitions=" << r.transitions << " configurations=" << r.configurations << '\n';
    } else {
        arith::AExpPtr cur = e;
        for (std::uint64_t k = 0;; ++k) {
            std::cout << k << ": " << arith::print(*cur) << '\n';
            auto r = arith::reduce_step(cur);
            if (const auto* d = std::get_if<arith::Done>(&r)) {
                std::cout << "value: " << d->value << '\n';
                break;
            }
            cur = std::get<arith::AExpPtr>(r);
        }
    }
    return 0;
}

struct SuiteOptions {
    std::string dir = "corpus";
    std::uint64_t fuel = 100000;
    std::uint64_t seed = 1;
    int random = 100;
    int max_level = 4;
};

int cmd_test_corpus(const SuiteOptions& o) {
    auto entries = corpus::load_dir(o.dir);
    struct Line {
        std::string text;
        bool ok;
    };
    std::vector<Line> lines(entries.size());
    const auto count = static_cast<std::int64_t>(entries.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < count; ++i) {
        const auto& e = entries[static_cast<std::size_t>(i)];
        std::ostringstream out;
        bool ok = true;
        Outcome first;
        for (int n = e.level; n <= o.max_level; ++n) {
            auto r = check::compare(e.program, n, o.fuel);
            if (!r.ok()) {
                ok = false;
                out << "\n  level " << n << ": backends disagree\n" << r.describe();
            }
            if (!corpus::matches(r.cps, e.expect)) {
                ok = false;
                out << "\n  level " << n << ": expected " << e.expect << ", got " << describe(r.cps);
            }
            if (n == e.level) first = r.cps;
            else if (!same_observable(first, r.cps)) {
                ok = false;
                out << "\n  level " << n << ": observable differs from level " << e.level;
            }
        }
        if (e.expect_dynamic) {
            auto d = run_dynamic(e.program, o.fuel).outcome();
            if (!corpus::matches(d, *e.expect_dynamic)) {
                ok = false;
                out << "\n  dynamic: expected " << *e.expect_dynamic << ", got " << describe(d);
            }
        }
        lines[static_cast<std::size_t>(i)] = {(ok ? "PASS " : "FAIL ") + e.name + out.str(), ok};
    }
    bool all = true;
    for (const auto& l : lines) {
        std::cout << l.text << '\n';
        all = all && l.ok;
    }

    // The prefix programs against the host oracles on random inputs.
    gen::Rng rng(o.seed);
    int failures = 0;
    for (int i = 0; i < o.random; ++i) {
        std::uniform_int_distribution<int> len(0, 10);
        std::uniform_int_distribution<std::int64_t> elem(0, 9);
        corpus::IntList xs(static_cast<std::size_t>(len(rng)));
        for (auto& x : xs) x = elem(rng);
        std::int64_t th = elem(rng);
        auto p = [th](std::int64_t m) { return m > th; };
        auto first = run_env(parse(corpus::prefix_first_source(th, xs)), 1, o.fuel).outcome();
        auto all_p = run_subst(parse(corpus::prefix_all_source(th, xs)), 1, o.fuel).outcome();
        if (first.observable != corpus::observable(corpus::ref_find_first_prefix(p, xs)) ||
            all_p.observable != corpus::observable(corpus::ref_find_all_prefixes(p, xs))) {
            ++failures;
            std::cout << "FAIL prefix oracle on " << corpus::observable(xs) << " threshold " << th << '\n';
        }
    }
    std::cout << (failures == 0 ? "PASS " : "FAIL ") << "prefix programs vs host oracles (" << o.random
              << " random lists)\n";
    return all && failures == 0 ? 0 : kExitDisagree;
}

struct BenchOptions {
    int count = 200;
    int level = 1;
    std::uint64_t seed = 1;
    std::uint64_t fuel = 100000;
    int depth = 6;
    int nbe_depth = 3;
};

int cmd_bench(const BenchOptions& o) {
    gen::Rng rng(o.seed);
    gen::ProgramOptions po;
    po.level = o.level;
    po.max_depth = o.depth;
    std::uint64_t transitions = 0;
    std::uint64_t reductions = 0;
    for (int i = 0; i < o.count; ++i) {
        Term p = gen::program(rng, po);
        transitions += run_env(p, o.level, o.fuel).steps;
        reductions += evaluate_by_reduction(p, o.level, o.fuel).reductions;
    }
    std::cout << "programs=" << o.count << " level=" << o.level << " machine_transitions=" << transitions
              << " reductions=" << reductions << '\n';
    for (int n = 1; n <= 5; ++n) {
        std::uint64_t nodes = 0;
        std::uint64_t size = 0;
        for (int i = 0; i < o.count; ++i) {
            nbe::Stats s;
            auto u = nbe::normalize_hier(gen::mon(rng, n, o.nbe_depth, 4), n, &s);
            nodes += s.nodes;
            size += nbe::nf_size(u);
        }
        std::cout << "nbe n=" << n << " terms=" << o.count << " nodes_allocated=" << nodes << " nf_nodes=" << size
                  << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Evaluators, abstract machines and reduction semantics for shift/reset in the CPS hierarchy"};
    app.require_subcommand(1);

    Common run_c;
    std::string backend = "env";
    std::string trace_path;
    bool dynamic = false;
    auto* run = app.add_subcommand("run", "Run a program");
    add_common(run, run_c);
    run->add_option("--backend,-b", backend, "cps, env, subst or redsem")
        ->check(CLI::IsMember({"cps", "env", "subst", "redsem"}))
        ->capture_default_str();
    run->add_option("--trace", trace_path, "Write one line per transition to FILE");
    run->add_flag("--dynamic", dynamic, "Dynamic delimiting (subst backend, level 1)");

    Common cmp_c;
    bool fault = false;
    auto* cmp = app.add_subcommand("compare", "Run all backends and check that they agree");
    add_common(cmp, cmp_c);
    cmp->add_flag("--fault", fault, "Use a deliberately broken substitution machine")->group("");

    Common step_c;
    std::uint64_t limit = 1000;
    auto* step = app.add_subcommand("step", "Print the reduction sequence");
    add_common(step, step_c);
    step->add_option("--limit", limit, "Maximum number of reductions")->capture_default_str();

    std::string nbe_file;
    int nbe_n = 2;
    bool nbe_verbose = false;
    auto* nbe_cmd = app.add_subcommand("nbe", "Normalize a unit/product term");
    nbe_cmd->add_option("file", nbe_file, "Term file, or - for stdin")->required();
    nbe_cmd->add_option("--n", nbe_n, "Number of unit/product levels")->capture_default_str()->check(CLI::PositiveNumber);
    nbe_cmd->add_flag("--verbose,-v", nbe_verbose, "Also report grammar, idempotence and allocation");

    BenchOptions bench_o;
    auto* bench = app.add_subcommand("bench", "Count transitions and normalizer allocations on generated inputs");
    bench->add_option("--count", bench_o.count)->capture_default_str();
    bench->add_option("--level,-n", bench_o.level)->capture_default_str();
    bench->add_option("--seed", bench_o.seed)->capture_default_str();
    bench->add_option("--fuel", bench_o.fuel)->capture_default_str();
    bench->add_option("--depth", bench_o.depth)->capture_default_str();
    bench->add_option("--nbe-depth", bench_o.nbe_depth, "depth of generated unit/product terms; normal forms grow doubly exponentially with it from n = 3 on")
        ->capture_default_str()
        ->check(CLI::Range(0, 8));

    SuiteOptions suite_o;
    auto* suite = app.add_subcommand("test-corpus", "Run the corpus suite");
    suite->add_option("dir", suite_o.dir, "Corpus directory")->capture_default_str();
    suite->add_option("--fuel", suite_o.fuel)->capture_default_str();
    suite->add_option("--seed", suite_o.seed, "Seed for the random oracle inputs")->capture_default_str();
    suite->add_option("--random", suite_o.random, "Random inputs for the prefix oracles")->capture_default_str();
    suite->add_option("--max-level", suite_o.max_level, "Also run each program at every level up to this")
        ->capture_default_str();

    std::string arith_mode;
    std::string arith_file;
    auto* ar = app.add_subcommand("arith", "Arithmetic expressions: (+ e e) or a natural");
    ar->add_option("mode", arith_mode, "eval, machine or step")
        ->required()
        ->check(CLI::IsMember({"eval", "machine", "step"}));
    ar->add_option("file", arith_file, "Expression file, or - for stdin")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitParse;
    }

    try {
        if (*run) return cmd_run(run_c, backend, trace_path, dynamic);
        if (*cmp) return cmd_compare(cmp_c, fault);
        if (*step) return cmd_step(step_c, limit);
        if (*nbe_cmd) return cmd_nbe(nbe_file, nbe_n, nbe_verbose);
        if (*bench) return cmd_bench(bench_o);
        if (*suite) return cmd_test_corpus(suite_o);
        if (*ar) return cmd_arith(arith_mode, arith_file);
    } catch (const ParseError& e) {
        std::cerr << e.what() << '\n';
        return kExitParse;
    } catch (const ValidationError& e) {
        std::cerr << "invalid program: " << e.what() << '\n';
        return kExitParse;
    } catch (const InputError& e) {
        std::cerr << e.what() << '\n';
        return kExitParse;
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << '\n';
        return kExitParse;
    }
    return 0;
}

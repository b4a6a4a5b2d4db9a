// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "cpsh/arith.hpp"
#include "cpsh/check.hpp"
#include "cpsh/corpus.hpp"
#include "cpsh/eval_cps.hpp"
#include "cpsh/machine_env.hpp"
#include "cpsh/machine_subst.hpp"
#include "cpsh/nbe.hpp"
#include "cpsh/redsem.hpp"
#include "support.hpp"

using namespace cpsh;

namespace {

constexpr std::uint64_t kFuel = 100000;

struct Verdict {
    bool ok = true;
    std::ostringstream note;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) note << "first failure: " << what << "; ";
        ok = ok && cond;
    }
};

int failures = 0;

void criterion(int id, const char* title, const std::function<void(Verdict&)>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
        body(v);
    } catch (const std::exception& e) {
        v.ok = false;
        v.note << "exception: " << e.what() << "; ";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!v.ok) ++failures;
    std::printf("%s [%2d] %s (%s%.1fs)\n", v.ok ? "PASS" : "FAIL", id, title, v.note.str().c_str(), secs);
    std::fflush(stdout);
}

std::vector<Outcome> all_backends(const Term& t, int n) {
    return {run_cps(t, n, kFuel).outcome(), run_env(t, n, kFuel).outcome(), run_subst(t, n, kFuel).outcome(),
            evaluate_by_reduction(t, n, kFuel).outcome()};
}

}  // namespace

int main() {
    const auto entries = corpus::load_dir(testing::corpus_dir());

    criterion(1, "prefix programs give the reference prefixes on all four backends", [&](Verdict& v) {
        const corpus::IntList xs{0, 3, 1, 4, 2, 5};
        for (const auto& o : all_backends(corpus::load_file(testing::corpus_dir() + "/prefix_first.cps").program, 1))
            v.require(o.observable == "[0, 3]", "prefix_first");
        for (const auto& o : all_backends(corpus::load_file(testing::corpus_dir() + "/prefix_all.cps").program, 1))
            v.require(o.observable == "[[0, 3], [0, 3, 1, 4], [0, 3, 1, 4, 2, 5]]", "prefix_all");
        gen::Rng rng(101);
        int lists = 0;
        for (; lists < 100; ++lists) {
            const auto th = std::uniform_int_distribution<std::int64_t>(0, 9)(rng);
            corpus::IntList ys(std::uniform_int_distribution<std::size_t>(0, 10)(rng));
            for (auto& y : ys) y = std::uniform_int_distribution<std::int64_t>(0, 9)(rng);
            auto p = [th](std::int64_t m) { return m > th; };
            const auto first = corpus::observable(corpus::ref_find_first_prefix(p, ys));
            const auto all = corpus::observable(corpus::ref_find_all_prefixes(p, ys));
            for (const auto& o : all_backends(parse(corpus::prefix_first_source(th, ys)), 1))
                v.require(o.observable == first, "random prefix_first");
            for (const auto& o : all_backends(parse(corpus::prefix_all_source(th, ys)), 1))
                v.require(o.observable == all, "random prefix_all");
        }
        v.note << "2 corpus programs + " << lists << " random lists; ";
    });

    criterion(2, "traversal copies under shift, reverses under F, with the expected trace shapes", [&](Verdict& v) {
        const Term prog = parse(corpus::traverse_source({1, 2}));
        for (const auto& o : all_backends(prog, 1)) v.require(o.observable == "[1, 2]", "static result");
        v.require(run_dynamic(prog, kFuel).outcome().observable == "[2, 1]", "dynamic result");
        for (int len = 1; len <= 8; ++len) {
            v.require(testing::static_shape_ok(testing::traverse_shape(len, Control::Static), len),
                      "static shape, length " + std::to_string(len));
            v.require(testing::dynamic_shape_ok(testing::traverse_shape(len, Control::Dynamic), len),
                      "dynamic shape, length " + std::to_string(len));
        }
    });

    // Criteria 3 and 4 share one batch of random programs.
    std::vector<std::vector<check::Summary>> batches;
    std::size_t random_count = 0;
    const auto t0 = std::chrono::steady_clock::now();
    for (int n = 1; n <= 3; ++n) {
        auto programs = testing::random_programs(1000 + static_cast<std::uint64_t>(n), n, 1000);
        random_count += programs.size();
        batches.push_back(check::run_batch_parallel(programs, n, kFuel));
    }
    const double batch_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    criterion(3, "env and subst machines run in lock step", [&](Verdict& v) {
        std::size_t steps = 0;
        for (const auto& e : entries)
            for (int n = e.level; n <= 4; ++n) {
                auto r = check::lockstep(e.program, n, kFuel);
                v.require(r.ok, e.name + " at level " + std::to_string(n));
                steps += r.steps;
            }
        for (const auto& batch : batches)
            for (const auto& s : batch) {
                v.require(s.env.kind == s.subst.kind && s.env.steps == s.subst.steps, "random program");
                steps += s.lock_steps;
            }
        v.note << entries.size() << " corpus files, " << random_count << " random programs, " << steps
               << " compared states; ";
    });

    criterion(4, "cps, env, subst and reduction agree on outcomes and step counts", [&](Verdict& v) {
        std::size_t values = 0, stuck = 0, timeouts = 0;
        for (const auto& batch : batches)
            for (const auto& s : batch) {
                v.require(s.ok, "random program");
                values += s.env.kind == OutcomeKind::Value;
                stuck += s.env.kind == OutcomeKind::Stuck;
                timeouts += s.env.kind == OutcomeKind::Timeout;
            }
        for (const auto& e : entries) v.require(check::compare(e.program, e.level, kFuel).ok(), e.name);
        v.note << random_count << " programs (" << values << " values, " << stuck << " stuck, " << timeouts
               << " timeouts), fuel " << kFuel << ", batch " << batch_secs << "s; ";
    });

    criterion(5, "unique decomposition and plug/decompose round trips", [&](Verdict& v) {
        gen::Rng rng(505);
        const Term hole = mk::var("#hole");
        for (int n = 1; n <= 3; ++n)
            for (int i = 0; i < 1000; ++i) {
                const Term t = testing::random_reduct(rng, n);
                const auto sites = testing::redex_sites(t);
                const auto d = decompose(t, n);
                if (testing::oracle_is_value(t)) {
                    v.require(sites.empty() && std::holds_alternative<ValueFound>(d), "value " + print_term(t));
                    continue;
                }
                v.require(sites.size() == 1, "site count for " + print_term(t));
                const auto* dec = std::get_if<Decomposition>(&d);
                v.require(dec != nullptr, "decompose found no redex in " + print_term(t));
                if (dec == nullptr || sites.size() != 1) continue;
                v.require(dec->focus == testing::subterm_at(t, sites[0]), "focus of " + print_term(t));
                v.require(plug(dec->tower, hole) == testing::replace_at(t, sites[0], hole),
                          "context of " + print_term(t));
                v.require(plug(*dec) == t && decompose(plug(*dec), n) == d, "round trip of " + print_term(t));
            }
        v.note << "3000 terms; ";
    });

    criterion(6, "refocus equation holds at every step of every corpus run", [&](Verdict& v) {
        ReductionOptions opts;
        opts.check_refocus = true;
        std::uint64_t checks = 0;
        for (const auto& e : entries)
            for (int n = e.level; n <= 4; ++n) {
                auto r = evaluate_by_reduction(e.program, n, kFuel, opts);
                v.require(r.refocus_violations == 0, e.name);
                checks += r.refocus_checks;
            }
        v.require(checks > 0, "no checks ran");
        v.note << checks << " checks; ";
    });

    criterion(7, "programs give the same observable at every level up to 4", [&](Verdict& v) {
        std::size_t runs = 0;
        auto conservative = [&](const Term& t, int j, std::uint64_t fuel, const std::string& what) {
            const auto base = run_env(t, j, fuel).outcome();
            for (int n = j + 1; n <= 4; ++n) {
                v.require(same_observable(run_cps(t, n, fuel).outcome(), base), what);
                v.require(same_observable(run_env(t, n, fuel).outcome(), base), what);
                v.require(same_observable(run_subst(t, n, fuel).outcome(), base), what);
                v.require(same_observable(evaluate_by_reduction(t, n, fuel).outcome(), base), what);
                runs += 4;
            }
        };
        for (const auto& e : entries) conservative(e.program, e.level, kFuel, e.name);
        for (int j = 1; j <= 3; ++j)
            for (const auto& t : testing::random_programs(700 + static_cast<std::uint64_t>(j), j, 200))
                conservative(t, std::max(1, max_level(t)), 10000, print_term(t));
        v.note << runs << " runs; ";
    });

    criterion(8, "arithmetic evaluators agree four ways", [&](Verdict& v) {
        gen::Rng rng(808);
        for (int i = 0; i < 1000; ++i) {
            const auto e = gen::aexp(rng, 6);
            const auto want = arith::eval_direct(*e);
            v.require(arith::eval_cps(*e) == want, arith::print(*e));
            const auto m = arith::run_machine(e);
            const auto r = arith::reduce_all(e);
            v.require(m.value == want && r.value == want, arith::print(*e));
            v.require(m.contractions == r.contractions, "refocusing on " + arith::print(*e));
        }
        const auto one = arith::run_machine(arith::parse("(+ 1 2)"));
        v.require(one.value == 3 && one.configurations == 6, "(+ 1 2)");
        v.note << "1000 expressions; (+ 1 2): " << one.configurations << " configurations, " << one.transitions
               << " transitions; ";
    });

    criterion(9, "normalization by evaluation", [&](Verdict& v) {
        using namespace cpsh::nbe;
        gen::Rng rng(909);
        for (int i = 0; i < 1000; ++i) {
            const Mon t = gen::mon(rng, 1, 6, 4);
            const Nf u = normalize_monoid(t);
            v.require(nf_flat_vars(u) == oracle_flatten(t), "monoid " + print_mon(*t));
            v.require(nf_equal(normalize_hier(t, 1), u), "hier n=1 " + print_mon(*t));
        }
        for (int i = 0; i < 500; ++i) {
            const Mon t = gen::mon(rng, 2, 5, 6);
            const Nf u = normalize_dnf(t);
            v.require(grammar_check_nf(u, 2), "dnf grammar " + print_mon(*t));
            v.require(nf_equal(normalize_dnf(embed(u)), u), "dnf idempotence " + print_mon(*t));
            v.require(oracle_truth_equiv(t, u, variables(*t)), "dnf truth " + print_mon(*t));
            v.require(nf_equal(normalize_hier(t, 2), u), "hier n=2 " + print_mon(*t));
        }
        for (int n = 3; n <= 5; ++n)
            for (int i = 0; i < 500; ++i) {
                const Mon t = gen::mon(rng, n, 3, 4);
                const Nf u = normalize_hier(t, n);
                v.require(grammar_check_nf(u, n), "grammar " + print_mon(*t));
                v.require(nf_equal(normalize_hier(embed(u), n), u), "idempotence " + print_mon(*t));
            }
        const auto ex = normalize_hier(parse_mon("(prod 1 x (prod 2 y z))"), 2);
        v.require(print_nf(ex) ==
                      "(prod 2 (prod 1 x (prod 1 y (unit 1))) (prod 2 (prod 1 x (prod 1 z (unit 1))) (unit 2)))",
                  "x and (y or z)");
    });

    criterion(10, "static and dynamic machines agree when no captured context is applied", [&](Verdict& v) {
        std::size_t n = 0;
        for (const auto& t : testing::random_programs(1010, 1, 500, false)) {
            const auto a = run_subst(t, 1, kFuel).outcome();
            const auto b = run_dynamic(t, kFuel).outcome();
            v.require(same_observable(a, b) && a.steps == b.steps, print_term(t));
            ++n;
        }
        v.note << n << " programs; ";
    });

    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}

#include <doctest.h>

#include <algorithm>

#include "cpsh/check.hpp"
#include "cpsh/corpus.hpp"
#include "cpsh/eval_cps.hpp"
#include "cpsh/machine_env.hpp"
#include "cpsh/machine_subst.hpp"
#include "cpsh/redsem.hpp"
#include "support.hpp"

using namespace cpsh;

namespace {

constexpr std::uint64_t kFuel = 100000;

Outcome on(const std::string& backend, const Term& t, int n) {
    if (backend == "cps") return run_cps(t, n, kFuel).outcome();
    if (backend == "env") return run_env(t, n, kFuel).outcome();
    if (backend == "subst") return run_subst(t, n, kFuel).outcome();
    return evaluate_by_reduction(t, n, kFuel).outcome();
}

const std::vector<std::string> kBackends{"cps", "env", "subst", "redsem"};

std::int64_t int_of(const Outcome& o) {
    REQUIRE(o.kind == OutcomeKind::Value);
    REQUIRE(o.integer.has_value());
    return *o.integer;
}

}  // namespace

TEST_CASE("integer examples on every backend") {
    struct Case {
        const char* src;
        int n;
        std::int64_t value;
    };
    const Case cases[] = {
        {"(succ 0)", 1, 1},
        {"(succ (succ 0))", 1, 2},
        {"(succ (succ 0))", 3, 2},
        {"(reset 1 (succ (shift 1 (k) 5)))", 1, 5},
        {"(reset 1 (succ (shift 1 (k) (k (k 0)))))", 1, 2},
        {"(reset 2 (succ (shift 2 (k) 7)))", 2, 7},
        {"((lambda (x) x) 1)", 1, 1},
        {"(add 10 (reset 2 (succ (shift 1 (k) (k (k 0))))))", 2, 12},
        {"(let (f (fix (f n) (if0 n 0 (add n (f (add n -1)))))) (f 10))", 1, 55},
        {"(gt 3 2)", 1, 1},
        {"(gt 2 3)", 1, 0},
    };
    for (const auto& c : cases)
        for (const auto& b : kBackends) {
            CAPTURE(c.src);
            CAPTURE(b);
            CHECK(int_of(on(b, parse(c.src), c.n)) == c.value);
        }
}

TEST_CASE("stuck and timeout outcomes") {
    for (const auto& b : kBackends) {
        CAPTURE(b);
        auto s = on(b, parse("(1 2)"), 1);
        CHECK(s.kind == OutcomeKind::Stuck);
        CHECK(s.stuck == StuckKind::ApplyNonFunction);
        CHECK(on(b, parse("(lcase 3 0 (h t) h)"), 1).stuck == StuckKind::LCaseNonList);
        CHECK(on(b, parse("(succ nil)"), 1).stuck == StuckKind::SuccNonInteger);
        auto t = on(b, parse("((fix (f x) (f x)) 0)"), 1);
        CHECK(t.kind == OutcomeKind::Timeout);
        CHECK(t.steps == kFuel);
    }
}

TEST_CASE("step counts agree and are pinned") {
    // (succ 0): eval succ, eval 0, cont1 0 into SUCC, cont1 1 into [],
    // cont2 1 into the empty meta-context.
    for (const auto& b : kBackends) CHECK(on(b, parse("(succ 0)"), 1).steps == 4);
    auto env = run_env(parse("(succ 0)"), 1, kFuel);
    auto sub = run_subst(parse("(succ 0)"), 1, kFuel);
    CHECK(env.steps == sub.steps);
    CHECK(run_subst(parse("5"), 1, kFuel).steps == 2);
    CHECK(evaluate_by_reduction(parse("5"), 1, kFuel).reductions == 0);
}

TEST_CASE("levels are checked before running") {
    Term t = parse("(reset 2 1)");
    CHECK_THROWS_AS(run_cps(t, 1, kFuel), ValidationError);
    CHECK_THROWS_AS(run_env(t, 1, kFuel), ValidationError);
    CHECK_THROWS_AS(run_subst(t, 1, kFuel), ValidationError);
    CHECK_THROWS_AS(evaluate_by_reduction(t, 1, kFuel), ValidationError);
    CHECK_THROWS_AS(run_dynamic(t, kFuel), ValidationError);
}

TEST_CASE("env machine transitions") {
    const int n = 2;
    auto first = step_env(env_initial(parse("5"), n), n);
    const auto& c = std::get<EConfig>(first);
    REQUIRE(std::holds_alternative<ECont>(c));
    CHECK(std::get<ECont>(c).level == 1);
    CHECK(std::get<mv::Int>(std::get<ECont>(c).value.v).value == 5);

    // reset 1 pushes the (empty) C_1 on C_2.
    auto r = std::get<EConfig>(step_env(env_initial(parse("(reset 1 7)"), n), n));
    const auto& ev = std::get<EEval>(r);
    CHECK(ev.term == mk::lit(7));
    CHECK(ev.tower.frames.empty());
    CHECK(ev.tower.stack(2).size() == 1);
    CHECK(ev.tower.stack(3).empty());

    // The last transition unloads the value from the empty top level.
    EConfig cur = env_initial(parse("3"), n);
    while (!env_is_final_ready(cur, n)) cur = std::get<EConfig>(step_env(cur, n));
    auto fin = std::get<EConfig>(step_env(cur, n));
    CHECK(std::holds_alternative<EFinal>(fin));
}

TEST_CASE("realize") {
    Realizer R;
    CHECK(R.value(MValue{mv::Int{3}}) == mk::lit(3));
    Term id = mk::lam("x", mk::var("x"));
    CHECK(R.value(MValue{mv::Closure{id, Env{}}}) == id);
    Env e = Env{}.push(EnvBinding{"y", MValue{mv::Int{2}}});
    CHECK(R.value(MValue{mv::Closure{mk::lam("x", mk::var("y")), e}}) == mk::lam("x", mk::lit(2)));
}

TEST_CASE("subst machine transitions") {
    const int n = 1;
    SConfig c = subst_initial(parse("((lambda (x) x) 1)"), n);
    bool saw_body = false;
    for (int i = 0; i < 8 && !saw_body; ++i) {
        c = std::get<SConfig>(step_subst(c, n));
        if (const auto* e = std::get_if<SEval>(&c)) saw_body = e->term == mk::lit(1) && e->tower.frames.empty();
    }
    CHECK(saw_body);

    // shift in a SUCC context: body evaluated with C_1 emptied.
    SubstTower T = SubstTower::empty(2).push_frame(SubstFrame{frame::Succ{}});
    auto s = std::get<SConfig>(step_subst(SEval{mk::shift(1, "k", mk::lit(5)), T}, n));
    const auto& se = std::get<SEval>(s);
    CHECK(se.term == mk::lit(5));
    CHECK(se.tower.frames.empty());
    CHECK(se.tower.stack(2) == T.stack(2));

    // Applying a captured context reinstates it and pushes the current C_1.
    SubstTower cur = SubstTower::empty(2).push_frame(SubstFrame{frame::Fun<Term>{mk::captured(T.prefix(1))}});
    auto a = std::get<SConfig>(step_subst(SCont{1, mk::lit(4), cur}, n));
    const auto& ac = std::get<SCont>(a);
    CHECK(ac.value == mk::lit(4));
    CHECK(ac.tower.frames == T.frames);
    CHECK(ac.tower.stack(2).size() == 1);
    CHECK(ac.tower.stack(2).head().frames.empty());
}

TEST_CASE("reachable-shape invariant holds on the corpus") {
    for (const auto& e : corpus::load_dir(testing::corpus_dir()))
        for (int n = e.level; n <= 4; ++n) {
            CAPTURE(e.name);
            CHECK_NOTHROW(run_env(e.program, n, kFuel, {}, true));
        }
}

TEST_CASE("continuation layers untouched without control operators") {
    for (const auto& t : testing::random_programs(31, 1, 200)) {
        if (print_term(t).find("shift") != std::string::npos || print_term(t).find("reset") != std::string::npos)
            continue;
        CHECK(run_cps(t, 2, 20000).meta_untouched);
    }
    CHECK_FALSE(run_cps(parse("(reset 1 1)"), 1, kFuel).meta_untouched);
}

TEST_CASE("context concatenation") {
    using FL = PList<SubstFrame>;
    FL c2 = FL{}.push(SubstFrame{frame::Succ{}});
    CHECK(concat_ctx(FL{}, c2) == c2);
    FL one = FL{}.push(SubstFrame{frame::Arg<Term>{mk::lit(1)}});
    FL joined = concat_ctx(one, c2);
    CHECK(joined.size() == 2);
    CHECK(joined.head() == one.head());
    CHECK(joined.tail() == c2);

    gen::Rng rng(5);
    auto rand_list = [&] {
        FL out;
        for (int i = std::uniform_int_distribution<int>(0, 4)(rng); i > 0; --i)
            out = out.push(i % 2 ? SubstFrame{frame::Succ{}}
                                 : SubstFrame{frame::AddLeft<Term>{mk::lit(i)}});
        return out;
    };
    for (int i = 0; i < 200; ++i) {
        FL a = rand_list(), b = rand_list(), c = rand_list();
        CHECK(concat_ctx(concat_ctx(a, b), c) == concat_ctx(a, concat_ctx(b, c)));
        CHECK(concat_ctx(a, b).size() == a.size() + b.size());
    }
}

TEST_CASE("traversal copies under shift and reverses under F") {
    auto prog = parse(corpus::traverse_source({1, 2}));
    for (const auto& b : kBackends) CHECK(on(b, prog, 1).observable == "[1, 2]");
    CHECK(run_dynamic(prog, kFuel).outcome().observable == "[2, 1]");
    CHECK(run_dynamic(parse("(reset 1 (succ (shift 1 (k) 5)))"), kFuel).outcome().integer == 5);
}

TEST_CASE("traversal trace shapes") {
    std::size_t prev_meta = 0;
    std::size_t prev_c1 = 0;
    for (int len = 1; len <= 8; ++len) {
        CAPTURE(len);
        auto st = testing::traverse_shape(len, Control::Static);
        auto dy = testing::traverse_shape(len, Control::Dynamic);
        CHECK(testing::static_shape_ok(st, len));
        CHECK(testing::dynamic_shape_ok(dy, len));
        // The static meta-context grows with the list; the dynamic C_1 does.
        CHECK(st.max_meta > prev_meta);
        CHECK(dy.max_c1 > prev_c1);
        prev_meta = st.max_meta;
        prev_c1 = dy.max_c1;
        corpus::IntList xs;
        for (int i = 1; i <= len; ++i) xs.push_back(i);
        CHECK(st.result == corpus::observable(xs));
        std::reverse(xs.begin(), xs.end());
        CHECK(dy.result == corpus::observable(xs));
    }
}

TEST_CASE("trace line format") {
    SConfig c = subst_initial(parse("(succ 0)"), 1);
    CHECK(trace_line(0, c) == "0: eval | • | [] [ (succ 0) ]");
    EConfig e = env_initial(parse("(succ 0)"), 2);
    CHECK(trace_line(3, e) == "3: eval | • | • | [] [ (succ 0) ]");
    CHECK(trace_line(9, SConfig{SFinal{mk::lit(1)}}) == "9: final [ 1 ]");
}

#include <doctest.h>

#include "cpsh/check.hpp"
#include "cpsh/corpus.hpp"
#include "cpsh/eval_cps.hpp"
#include "cpsh/machine_subst.hpp"
#include "cpsh/redsem.hpp"
#include "support.hpp"

using namespace cpsh;

namespace {

constexpr std::uint64_t kFuel = 100000;

}  // namespace

TEST_CASE("reference prefix functions") {
    auto gt2 = [](std::int64_t m) { return m > 2; };
    const corpus::IntList xs{0, 3, 1, 4, 2, 5};
    CHECK(corpus::ref_find_first_prefix(gt2, xs) == corpus::IntList{0, 3});
    CHECK(corpus::ref_find_first_prefix(gt2, {}).empty());
    CHECK(corpus::ref_find_first_prefix([](std::int64_t m) { return m > 9; }, {1, 2, 3}).empty());
    CHECK(corpus::ref_find_all_prefixes(gt2, xs) ==
          std::vector<corpus::IntList>{{0, 3}, {0, 3, 1, 4}, {0, 3, 1, 4, 2, 5}});
    CHECK(corpus::ref_find_all_prefixes(gt2, {}).empty());
    CHECK(corpus::ref_find_all_prefixes([](std::int64_t m) { return m > 0; }, {1}) ==
          std::vector<corpus::IntList>{{1}});
    CHECK(corpus::observable(corpus::IntList{0, 3}) == "[0, 3]");
    CHECK(corpus::observable(std::vector<corpus::IntList>{{1}, {}}) == "[[1], []]");
}

TEST_CASE("every corpus file meets its expectation on every backend") {
    auto entries = corpus::load_dir(testing::corpus_dir());
    REQUIRE(entries.size() >= 10);
    for (const auto& e : entries) {
        CAPTURE(e.name);
        auto r = check::compare(e.program, e.level, kFuel);
        CHECK(r.ok());
        CHECK(corpus::matches(r.env, e.expect));
        CHECK(corpus::matches(r.cps, e.expect));
        if (e.expect_dynamic) CHECK(corpus::matches(run_dynamic(e.program, kFuel).outcome(), *e.expect_dynamic));
    }
}

TEST_CASE("corpus files match the parameterized sources") {
    auto first = corpus::load_file(testing::corpus_dir() + "/prefix_first.cps");
    auto all = corpus::load_file(testing::corpus_dir() + "/prefix_all.cps");
    const corpus::IntList xs{0, 3, 1, 4, 2, 5};
    CHECK(run_env(parse(corpus::prefix_first_source(2, xs)), 1, kFuel).outcome().observable ==
          run_env(first.program, 1, kFuel).outcome().observable);
    CHECK(run_env(parse(corpus::prefix_all_source(2, xs)), 1, kFuel).outcome().observable ==
          run_env(all.program, 1, kFuel).outcome().observable);
}

TEST_CASE("prefix programs agree with the reference on random lists") {
    gen::Rng rng(29);
    for (int i = 0; i < 60; ++i) {
        const auto th = std::uniform_int_distribution<std::int64_t>(0, 9)(rng);
        corpus::IntList xs(std::uniform_int_distribution<std::size_t>(0, 10)(rng));
        for (auto& x : xs) x = std::uniform_int_distribution<std::int64_t>(0, 9)(rng);
        auto p = [th](std::int64_t m) { return m > th; };
        const std::string want_first = corpus::observable(corpus::ref_find_first_prefix(p, xs));
        const std::string want_all = corpus::observable(corpus::ref_find_all_prefixes(p, xs));
        auto r1 = check::compare(parse(corpus::prefix_first_source(th, xs)), 1, kFuel);
        auto r2 = check::compare(parse(corpus::prefix_all_source(th, xs)), 1, kFuel);
        CHECK(r1.ok());
        CHECK(r2.ok());
        CHECK(r1.redsem.observable == want_first);
        CHECK(r2.redsem.observable == want_all);
    }
}

TEST_CASE("matches") {
    CHECK(corpus::matches(value_outcome("5", 5, 1), "5"));
    CHECK(corpus::matches(timeout_outcome(3), "timeout"));
    CHECK(corpus::matches(stuck_outcome(StuckInfo{}, 1), "stuck"));
    CHECK_FALSE(corpus::matches(value_outcome("5", 5, 1), "6"));
}

TEST_CASE("level conservativity") {
    for (const auto& e : corpus::load_dir(testing::corpus_dir())) {
        auto base = run_env(e.program, e.level, kFuel).outcome();
        for (int n = e.level + 1; n <= 4; ++n) {
            CAPTURE(e.name);
            CAPTURE(n);
            CHECK(same_observable(run_cps(e.program, n, kFuel).outcome(), base));
            CHECK(same_observable(run_subst(e.program, n, kFuel).outcome(), base));
        }
    }
    for (int j = 1; j <= 3; ++j)
        for (const auto& t : testing::random_programs(60 + static_cast<std::uint64_t>(j), j, 60)) {
            const int lvl = std::max(1, max_level(t));
            auto base = run_env(t, lvl, 5000).outcome();
            for (int n = lvl + 1; n <= 4; ++n) CHECK(same_observable(run_env(t, n, 5000).outcome(), base));
        }
}

TEST_CASE("lock-step and four-way agreement on random programs") {
    for (int n = 1; n <= 3; ++n)
        for (const auto& t : testing::random_programs(70 + static_cast<std::uint64_t>(n), n, 120)) {
            auto r = check::compare(t, n, 3000);
            CAPTURE(print_term(t));
            CAPTURE(r.describe());
            CHECK(r.ok());
        }
}

TEST_CASE("the harness detects a faulty backend") {
    check::SubstStepper faulty = [](const SConfig& c, int n) -> SStepResult {
        if (const auto* e = std::get_if<SEval>(&c))
            if (const auto* l = e->term.as<term::Lit>()) return SConfig{SCont{1, mk::lit(l->value + 1), e->tower}};
        return step_subst(c, n);
    };
    auto r = check::compare(parse("(succ 0)"), 1, kFuel, faulty);
    CHECK_FALSE(r.ok());
    REQUIRE(r.lock.divergence_step.has_value());
    CHECK(*r.lock.divergence_step == 2);
    CHECK(r.describe().find("first divergence at step 2") != std::string::npos);
}

TEST_CASE("stuck programs are stuck at the same redex everywhere") {
    auto r = check::compare(parse("(1 2)"), 1, kFuel);
    CHECK(r.ok());
    for (const auto* o : {&r.cps, &r.env, &r.subst, &r.redsem}) {
        CHECK(o->kind == OutcomeKind::Stuck);
        CHECK(o->stuck == StuckKind::ApplyNonFunction);
    }
}

TEST_CASE("serial and parallel batch runners agree") {
    for (int n = 1; n <= 2; ++n) {
        auto programs = testing::random_programs(80 + static_cast<std::uint64_t>(n), n, 80);
        auto serial = check::run_batch_serial(programs, n, 3000);
        for (int threads : {1, 2, 4}) {
            auto parallel = check::run_batch_parallel(programs, n, 3000, threads);
            REQUIRE(parallel.size() == serial.size());
            for (std::size_t i = 0; i < serial.size(); ++i) CHECK(parallel[i] == serial[i]);
        }
    }
}

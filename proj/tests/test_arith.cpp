#include <doctest.h>

#include "cpsh/arith.hpp"
#include "cpsh/gen.hpp"
#include "cpsh/syntax.hpp"

using namespace cpsh::arith;

namespace {

// Sum of the leaves, read off the printed form.
Nat oracle_sum(const std::string& text) {
    Nat total = 0;
    Nat cur = 0;
    bool in_num = false;
    for (char c : text) {
        if (c >= '0' && c <= '9') {
            cur = cur * 10 + static_cast<Nat>(c - '0');
            in_num = true;
        } else if (in_num) {
            total += cur;
            cur = 0;
            in_num = false;
        }
    }
    return total + (in_num ? cur : 0);
}

Nat iterate_steps(AExpPtr e) {
    for (;;) {
        auto r = reduce_step(e);
        if (const auto* d = std::get_if<Done>(&r)) return d->value;
        e = std::get<AExpPtr>(r);
    }
}

}  // namespace

TEST_CASE("direct evaluation") {
    CHECK(eval_direct(*num(7)) == 7);
    CHECK(eval_direct(*plus(num(1), num(2))) == 3);
    CHECK(eval_direct(*parse("(+ (+ 1 2) (+ 3 4))")) == 10);
}

TEST_CASE("cps evaluation") {
    CHECK(eval_cps(*num(7)) == 7);
    CHECK(eval_cps(*plus(num(1), num(2))) == 3);
}

TEST_CASE("machine") {
    CHECK(run_machine(num(7)).value == 7);
    auto r = run_machine(plus(num(1), num(2)));
    CHECK(r.value == 3);
    // e => eval, eval(+) => eval 1, eval 1 => apply, apply ADD1 => eval 2,
    // eval 2 => apply, apply ADD2 => apply 3, apply [] => 3.
    CHECK(r.transitions == 7);
    CHECK(r.configurations == 6);
    CHECK(r.contractions.size() == 1);
}

TEST_CASE("one-step reduction") {
    CHECK(std::get<Done>(reduce_step(num(5))).value == 5);
    CHECK(*std::get<AExpPtr>(reduce_step(plus(num(1), num(2)))) == *num(3));
    CHECK(*std::get<AExpPtr>(reduce_step(parse("(+ (+ 1 2) 4)"))) == *parse("(+ 3 4)"));
    CHECK(*std::get<AExpPtr>(reduce_step(parse("(+ 1 (+ 2 4))"))) == *parse("(+ 1 6)"));
}

TEST_CASE("decompose and plug") {
    auto e = parse("(+ (+ 1 2) (+ 3 4))");
    auto d = std::get<Decomposition>(decompose(e));
    CHECK(d.lhs == 1);
    CHECK(d.rhs == 2);
    CHECK(*plug(d) == *e);
    CHECK(std::get<Nat>(decompose(num(9))) == 9);
}

TEST_CASE("parse and print") {
    CHECK(print(*parse(" (+ 1\n (+ 2 3))")) == "(+ 1 (+ 2 3))");
    CHECK_THROWS_AS(parse("(+ 1)"), cpsh::ParseError);
    CHECK_THROWS_AS(parse("-1"), cpsh::ParseError);
    CHECK_THROWS_AS(parse("2147483648"), cpsh::ParseError);
    CHECK_THROWS_AS(parse("(+ 2147483647 1)"), cpsh::ParseError);
    CHECK(eval_direct(*parse("2147483647")) == 2147483647);
}

TEST_CASE("four-way agreement and refocusing on random expressions") {
    cpsh::gen::Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        auto e = cpsh::gen::aexp(rng, 6);
        const Nat v = oracle_sum(print(*e));
        CAPTURE(print(*e));
        CHECK(eval_direct(*e) == v);
        CHECK(eval_cps(*e) == v);
        auto m = run_machine(e);
        CHECK(m.value == v);
        CHECK(iterate_steps(e) == v);
        auto red = reduce_all(e);
        CHECK(red.value == v);
        CHECK(m.contractions == red.contractions);
        CHECK(*parse(print(*e)) == *e);
    }
}

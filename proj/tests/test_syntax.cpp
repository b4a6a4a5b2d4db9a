#include <doctest.h>

#include "cpsh/corpus.hpp"
#include "cpsh/syntax.hpp"
#include "support.hpp"

using namespace cpsh;

TEST_CASE("parse examples") {
    CHECK(parse("5") == mk::lit(5));
    CHECK(parse("(reset 1 (succ (shift 1 (k) 5)))") == mk::reset(1, mk::succ(mk::shift(1, "k", mk::lit(5)))));
    CHECK(parse("(lambda (x) x)") == mk::lam("x", mk::var("x")));
    CHECK(parse("; comment\n (add 1\n  (gt 2 3))") == mk::add(mk::lit(1), mk::gt(mk::lit(2), mk::lit(3))));
    CHECK(parse("(let (x 1) (fix (f y) (f y)))") ==
          mk::let("x", mk::lit(1), mk::fix("f", "y", mk::app(mk::var("f"), mk::var("y")))));
    CHECK(parse("(lcase nil 0 (h t) h)") == mk::lcase(mk::nil(), mk::lit(0), "h", "t", mk::var("h")));
}

TEST_CASE("parse errors") {
    CHECK_THROWS_AS(parse("(reset 0 1)"), ParseError);
    CHECK_THROWS_AS(parse("(shift 0 (k) 1)"), ParseError);
    CHECK_THROWS_AS(parse("(succ 1"), ParseError);
    CHECK_THROWS_AS(parse("(lambda x x)"), ParseError);
    CHECK_THROWS_AS(parse("1 2"), ParseError);
    try {
        parse("(succ\n  (lambda))");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("2:") != std::string::npos);
    }
}

TEST_CASE("print examples") {
    CHECK(print_term(mk::lit(5)) == "5");
    CHECK(print_term(mk::succ(mk::lit(0))) == "(succ 0)");
}

TEST_CASE("round trip on the corpus") {
    for (const auto& e : corpus::load_dir(testing::corpus_dir())) {
        CAPTURE(e.name);
        CHECK(alpha_equal(parse(print_term(e.program)), e.program));
    }
}

TEST_CASE("round trip on random programs") {
    for (int n = 1; n <= 3; ++n)
        for (const auto& t : testing::random_programs(100 + static_cast<std::uint64_t>(n), n, 300)) {
            CAPTURE(print_term(t));
            CHECK(parse(print_term(t)) == t);
        }
}

TEST_CASE("free variables") {
    CHECK(free_vars(mk::var("x")) == std::set<Name>{"x"});
    CHECK(free_vars(mk::lam("x", mk::var("x"))).empty());
    CHECK(free_vars(mk::shift(1, "k", mk::app(mk::var("k"), mk::var("y")))) == std::set<Name>{"y"});
    CHECK(free_vars(parse("(lcase l h (h t) (cons h t))")) == std::set<Name>{"l", "h"});
    CHECK(free_vars(parse("(let (x x) x)")) == std::set<Name>{"x"});
    CHECK(free_vars(parse("(fix (f x) (f (g x)))")) == std::set<Name>{"g"});
}

TEST_CASE("substitution") {
    CHECK(substitute(mk::var("x"), "x", mk::lit(3)) == mk::lit(3));
    CHECK(substitute(mk::lam("x", mk::var("x")), "x", mk::lit(3)) == mk::lam("x", mk::var("x")));

    // The binder y would capture the free y of the replacement.
    Term v = mk::lam("z", mk::var("y"));
    Term r = substitute(mk::lam("y", mk::var("x")), "x", v);
    CHECK(r == mk::lam("y1", mk::lam("z", mk::var("y"))));
    CHECK(free_vars(r) == free_vars(v));

    CHECK_THROWS_AS(substitute(mk::var("x"), "x", mk::succ(mk::lit(1))), std::invalid_argument);
}

TEST_CASE("substitution properties on random terms") {
    gen::Rng rng(7);
    for (int i = 0; i < 300; ++i) {
        Term t = testing::random_reduct(rng, 1 + i % 3);
        // Open a lambda body: free_vars(body) is within {param} for closed t.
        if (const auto* l = t.as<term::Lam>()) {
            Term closed = substitute(l->body, l->param, mk::lit(4));
            CHECK(free_vars(closed).empty());
        }
        CHECK(substitute(t, "unused_name", mk::lit(1)) == t);
    }
    Term body = parse("(lambda (y) (add x (let (x 2) x)))");
    Term out = substitute(body, "x", parse("(lambda (q) y)"));
    CHECK(free_vars(out) == std::set<Name>{"y"});
    CHECK(out == parse("(lambda (y1) (add (lambda (q) y) (let (x 2) x)))"));
}

TEST_CASE("program validation") {
    CHECK_NOTHROW(validate_program(parse("(reset 2 1)"), 2));
    CHECK_THROWS_AS(validate_program(parse("(reset 2 1)"), 1), ValidationError);
    CHECK_THROWS_AS(validate_program(parse("x"), 1), ValidationError);
    CHECK_THROWS_AS(require_level(parse("(shift 3 (k) 1)"), 2), ValidationError);
    CHECK(max_level(parse("(reset 1 (shift 3 (k) 1))")) == 3);
}

TEST_CASE("integer lists") {
    CHECK(as_int_list(mk::int_list({1, 2})) == std::vector<std::int64_t>{1, 2});
    CHECK_FALSE(as_int_list(mk::cons(mk::lit(1), mk::lit(2))).has_value());
}

#include <doctest.h>

#include "cpsh/gen.hpp"
#include "cpsh/nbe.hpp"
#include "cpsh/syntax.hpp"

using namespace cpsh::nbe;

namespace {

Nf nf_var(const std::string& x) { return std::make_shared<const NfTerm>(NfTerm{NfTerm::Kind::Var, 0, x, {}, {}}); }
Nf nf_unit(int i) { return std::make_shared<const NfTerm>(NfTerm{NfTerm::Kind::Unit, i, {}, {}, {}}); }
Nf nf_prod(int i, Nf lower, Nf rest) {
    return std::make_shared<const NfTerm>(NfTerm{NfTerm::Kind::Prod, i, {}, std::move(lower), std::move(rest)});
}

Mon M(const std::string& s) { return parse_mon(s); }

}  // namespace

TEST_CASE("monoid examples") {
    CHECK(nf_equal(normalize_monoid(unit(1)), nf_unit(1)));
    auto a = normalize_monoid(M("(prod 1 (prod 1 x y) z)"));
    CHECK(nf_equal(a, nf_prod(1, nf_var("x"), nf_prod(1, nf_var("y"), nf_prod(1, nf_var("z"), nf_unit(1))))));
    auto b = normalize_monoid(M("(prod 1 x (prod 1 (unit 1) x))"));
    CHECK(nf_equal(b, nf_prod(1, nf_var("x"), nf_prod(1, nf_var("x"), nf_unit(1)))));
}

TEST_CASE("flatten oracle") {
    CHECK(oracle_flatten(unit(1)).empty());
    CHECK(oracle_flatten(M("(prod 1 (prod 1 x y) z)")) == std::vector<std::string>{"x", "y", "z"});
    CHECK(oracle_flatten(M("(prod 1 x (prod 1 (unit 1) x))")) == std::vector<std::string>{"x", "x"});
}

TEST_CASE("dnf examples") {
    CHECK(nf_equal(normalize_dnf(unit(2)), nf_unit(2)));
    CHECK(nf_equal(normalize_dnf(unit(1)), nf_prod(2, nf_unit(1), nf_unit(2))));
    auto u = normalize_dnf(M("(prod 1 x (prod 2 y z))"));
    auto conj = [](const char* a, const char* b) {
        return nf_prod(1, nf_var(a), nf_prod(1, nf_var(b), nf_unit(1)));
    };
    CHECK(nf_equal(u, nf_prod(2, conj("x", "y"), nf_prod(2, conj("x", "z"), nf_unit(2)))));
    CHECK(print_nf(u) ==
          "(prod 2 (prod 1 x (prod 1 y (unit 1))) (prod 2 (prod 1 x (prod 1 z (unit 1))) (unit 2)))");
    CHECK(nf_equal(normalize_hier(M("(prod 1 x (prod 2 y z))"), 2), u));
}

TEST_CASE("truth oracle") {
    CHECK(oracle_truth_equiv(unit(1), nf_prod(2, nf_unit(1), nf_unit(2)), {}));
    CHECK(oracle_truth_equiv(unit(2), nf_unit(2), {}));
    CHECK_FALSE(oracle_truth_equiv(var("x"), nf_unit(2), {"x"}));
}

TEST_CASE("grammar check") {
    for (int n = 1; n <= 5; ++n) CHECK(grammar_check_nf(nf_unit(n), n));
    // A level-1 chain directly under level 3.
    Nf bad = nf_prod(3, nf_prod(1, nf_var("x"), nf_unit(1)), nf_unit(3));
    CHECK_FALSE(grammar_check_nf(bad, 3));
    CHECK_FALSE(grammar_check_nf(nf_unit(2), 3));
}

TEST_CASE("top unit normalizes to itself") {
    for (int n = 1; n <= 6; ++n) CHECK(nf_equal(normalize_hier(unit(n), n), nf_unit(n)));
}

TEST_CASE("parse and print") {
    CHECK(print_mon(*M(" (prod 2 x\n (unit 1))")) == "(prod 2 x (unit 1))");
    CHECK_THROWS(parse_mon("(prod 0 x y)"));
    CHECK_THROWS(parse_mon("(unit)"));
}

TEST_CASE("monoid properties") {
    cpsh::gen::Rng rng(17);
    for (int i = 0; i < 1000; ++i) {
        Mon t = cpsh::gen::mon(rng, 1, 6, 4);
        CAPTURE(print_mon(*t));
        Nf u = normalize_monoid(t);
        CHECK(nf_flat_vars(u) == oracle_flatten(t));
        CHECK(nf_equal(normalize_hier(t, 1), u));
        CHECK(grammar_check_nf(u, 1));
    }
}

TEST_CASE("dnf properties") {
    cpsh::gen::Rng rng(19);
    for (int i = 0; i < 500; ++i) {
        Mon t = cpsh::gen::mon(rng, 2, 5, 6);
        CAPTURE(print_mon(*t));
        Nf u = normalize_dnf(t);
        CHECK(grammar_check_nf(u, 2));
        CHECK(oracle_truth_equiv(t, u, variables(*t)));
        CHECK(nf_equal(normalize_dnf(embed(u)), u));
        CHECK(nf_equal(normalize_hier(t, 2), u));
    }
}

TEST_CASE("hierarchy properties") {
    cpsh::gen::Rng rng(23);
    for (int n = 3; n <= 5; ++n)
        for (int i = 0; i < 500; ++i) {
            Mon t = cpsh::gen::mon(rng, n, 3, 4);
            CAPTURE(print_mon(*t));
            Stats st;
            Nf u = normalize_hier(t, n, &st);
            CHECK(grammar_check_nf(u, n));
            CHECK(nf_equal(normalize_hier(embed(u), n), u));
            CHECK(st.nodes >= 1);
        }
}

#include "cpsh/gen.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cpsh::gen {

namespace {

enum class Ty { Int, List, Fun };

struct KVar {
    Name name;
    Ty arg;
    Ty result;
};

struct Scope {
    std::vector<std::pair<Name, Ty>> vars;
    std::vector<KVar> kvars;
    /// Enclosing delimiters, innermost last: (level, answer type).
    std::vector<std::pair<int, Ty>> resets;
    Ty top = Ty::Int;
};

class ProgramGen {
public:
    ProgramGen(Rng& rng, const ProgramOptions& o) : rng_(rng), o_(o) {}

    Term run() {
        Scope s;
        s.top = pick_ty();
        return gen(s.top, o_.max_depth, s);
    }

private:
    Rng& rng_;
    const ProgramOptions& o_;
    int counter_ = 0;

    bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    Ty pick_ty() {
        int r = uniform(0, 9);
        return r < 6 ? Ty::Int : r < 8 ? Ty::List : Ty::Fun;
    }

    Ty other_ty(Ty t) {
        Ty u = t;
        while (u == t) u = static_cast<Ty>(uniform(0, 2));
        return u;
    }

    Name fresh(const Scope& s) {
        if (!s.vars.empty() && chance(0.1)) return s.vars[static_cast<std::size_t>(uniform(0, static_cast<int>(s.vars.size()) - 1))].first;
        return "x" + std::to_string(counter_++);
    }

    Ty answer(const Scope& s, int i) const {
        for (auto it = s.resets.rbegin(); it != s.resets.rend(); ++it)
            if (it->first >= i) return it->second;
        return s.top;
    }

    std::optional<Term> pick_var(const Scope& s, Ty t) {
        std::vector<Name> names;
        std::vector<Name> shadowed;
        for (auto it = s.vars.rbegin(); it != s.vars.rend(); ++it) {
            bool hidden = false;
            for (const auto& n : shadowed)
                if (n == it->first) hidden = true;
            shadowed.push_back(it->first);
            if (!hidden && it->second == t) names.push_back(it->first);
        }
        if (t == Ty::Fun)
            for (const auto& k : s.kvars)
                if (k.arg == Ty::Int && k.result == Ty::Int && !shadows(s, k.name)) names.push_back(k.name);
        if (names.empty()) return std::nullopt;
        return mk::var(names[static_cast<std::size_t>(uniform(0, static_cast<int>(names.size()) - 1))]);
    }

    static bool shadows(const Scope& s, const Name& n) {
        for (const auto& v : s.vars)
            if (v.first == n) return true;
        return false;
    }

    static Scope with_var(Scope s, const Name& n, Ty t) {
        std::erase_if(s.kvars, [&](const KVar& k) { return k.name == n; });
        s.vars.emplace_back(n, t);
        return s;
    }

    Term leaf(Ty t, const Scope& s) {
        if (chance(0.4))
            if (auto v = pick_var(s, t)) return *v;
        switch (t) {
            case Ty::Int: return mk::lit(uniform(-2, 9));
            case Ty::List: return chance(0.5) ? mk::nil() : mk::cons(mk::lit(uniform(0, 9)), mk::nil());
            case Ty::Fun: {
                Name x = "x" + std::to_string(counter_++);
                return chance(0.5) ? mk::lam(x, mk::var(x)) : mk::lam(x, mk::succ(mk::var(x)));
            }
        }
        return mk::lit(0);
    }

    Term diverging() {
        return mk::app(mk::fix("loop", "x", mk::app(mk::var("loop"), mk::var("x"))), mk::lit(0));
    }

    Term gen(Ty t, int depth, const Scope& s) {
        if (chance(o_.wrong_type)) t = other_ty(t);
        if (chance(o_.diverge)) return diverging();
        if (depth <= 0) return leaf(t, s);
        switch (t) {
            case Ty::Int: return gen_int(depth, s);
            case Ty::List: return gen_list(depth, s);
            case Ty::Fun: return gen_fun(depth, s);
        }
        return leaf(t, s);
    }

    // Shared forms usable at any type.
    std::optional<Term> gen_common(Ty t, int depth, const Scope& s) {
        const int d = depth - 1;
        switch (uniform(0, 7)) {
            case 0: return mk::if0(gen(Ty::Int, d, s), gen(t, d, s), gen(t, d, s));
            case 1: {
                Ty bt = pick_ty();
                Name x = fresh(s);
                Term bound = gen(bt, d, s);
                return mk::let(x, bound, gen(t, d, with_var(s, x, bt)));
            }
            case 2: {
                Name h = fresh(s);
                Name tl = "x" + std::to_string(counter_++);
                Scope inner = with_var(with_var(s, h, Ty::Int), tl, Ty::List);
                return mk::lcase(gen(Ty::List, d, s), gen(t, d, s), h, tl, gen(t, d, inner));
            }
            case 3: {
                int i = uniform(1, o_.level);
                Scope inner = s;
                inner.resets.emplace_back(i, t);
                return mk::reset(i, gen(t, d, inner));
            }
            case 4: return gen_shift(t, depth, s);
            case 5: {
                for (const auto& k : s.kvars)
                    if (k.result == t && !shadows(s, k.name) && chance(0.7))
                        return mk::app(mk::var(k.name), gen(k.arg, d, s));
                return std::nullopt;
            }
            case 6: return mk::app(gen(Ty::Fun, d, s), gen(Ty::Int, d, s));
            default: return std::nullopt;
        }
    }

    Term gen_shift(Ty t, int depth, const Scope& s) {
        const int d = depth - 1;
        int i = uniform(1, o_.level);
        Ty a = answer(s, i);
        Name k = "k" + std::to_string(counter_++);
        if (o_.apply_captured && chance(o_.escape)) return mk::shift(i, k, mk::var(k));
        Scope inner = s;
        std::erase_if(inner.vars, [&](const auto& v) { return v.first == k; });
        if (o_.apply_captured) inner.kvars.push_back(KVar{k, t, a});
        inner.resets.emplace_back(i, a);
        return mk::shift(i, k, gen(a, d, inner));
    }

    Term gen_int(int depth, const Scope& s) {
        const int d = depth - 1;
        if (chance(0.45))
            if (auto c = gen_common(Ty::Int, depth, s)) return *c;
        switch (uniform(0, 6)) {
            case 0: return mk::succ(gen(Ty::Int, d, s));
            case 1: return mk::add(gen(Ty::Int, d, s), gen(Ty::Int, d, s));
            case 2: return mk::gt(gen(Ty::Int, d, s), gen(Ty::Int, d, s));
            case 3: {
                // Countdown with a non-tail recursive call.
                Name f = "f" + std::to_string(counter_++);
                Name n = "x" + std::to_string(counter_++);
                Scope inner = with_var(s, n, Ty::Int);
                Term body = mk::if0(mk::gt(mk::var(n), mk::lit(0)), gen(Ty::Int, d - 1, inner),
                                    mk::add(gen(Ty::Int, d - 1, inner),
                                            mk::app(mk::var(f), mk::add(mk::var(n), mk::lit(-1)))));
                return mk::app(mk::fix(f, n, body), mk::lit(uniform(0, 4)));
            }
            case 4: {
                Name f = "f" + std::to_string(counter_++);
                Name ys = "x" + std::to_string(counter_++);
                Name h = "x" + std::to_string(counter_++);
                Name tl = "x" + std::to_string(counter_++);
                Term body = mk::lcase(mk::var(ys), gen(Ty::Int, d - 1, s), h, tl,
                                      mk::add(mk::var(h), mk::app(mk::var(f), mk::var(tl))));
                return mk::app(mk::fix(f, ys, body), gen(Ty::List, d, s));
            }
            case 5:
                if (o_.apply_captured && chance(o_.escape * 4)) {
                    int i = uniform(1, o_.level);
                    Name c = "x" + std::to_string(counter_++);
                    Name k = "k" + std::to_string(counter_++);
                    Term escaped = mk::reset(i, mk::add(gen(Ty::Int, d - 1, s), mk::shift(i, k, mk::var(k))));
                    return mk::let(c, escaped, mk::app(mk::var(c), gen(Ty::Int, d - 1, s)));
                }
                return leaf(Ty::Int, s);
            default: return leaf(Ty::Int, s);
        }
    }

    Term gen_list(int depth, const Scope& s) {
        const int d = depth - 1;
        if (chance(0.35))
            if (auto c = gen_common(Ty::List, depth, s)) return *c;
        if (chance(0.6)) return mk::cons(gen(Ty::Int, d, s), gen(Ty::List, d, s));
        return leaf(Ty::List, s);
    }

    Term gen_fun(int depth, const Scope& s) {
        const int d = depth - 1;
        if (chance(0.25))
            if (auto c = gen_common(Ty::Fun, depth, s)) return *c;
        if (chance(0.2)) {
            Name f = "f" + std::to_string(counter_++);
            Name n = "x" + std::to_string(counter_++);
            Scope inner = with_var(s, n, Ty::Int);
            Term body = mk::if0(mk::gt(mk::var(n), mk::lit(0)), gen(Ty::Int, d - 1, inner),
                                mk::add(mk::var(n), mk::app(mk::var(f), mk::add(mk::var(n), mk::lit(-1)))));
            return mk::fix(f, n, body);
        }
        if (chance(0.75)) {
            Name x = fresh(s);
            Scope inner = with_var(s, x, Ty::Int);
            inner.resets.clear();
            inner.top = Ty::Int;
            return mk::lam(x, gen(Ty::Int, d, inner));
        }
        return leaf(Ty::Fun, s);
    }
};

}  // namespace

Term program(Rng& rng, const ProgramOptions& options) { return ProgramGen(rng, options).run(); }

arith::AExpPtr aexp(Rng& rng, int max_depth) {
    if (max_depth > 6) max_depth = 6;
    std::uniform_int_distribution<arith::Nat> leaf(0, 999);
    std::bernoulli_distribution stop(0.3);
    auto go = [&](auto&& self, int depth) -> arith::AExpPtr {
        if (depth <= 0 || stop(rng)) return arith::num(leaf(rng));
        auto lhs = self(self, depth - 1);
        return arith::plus(lhs, self(self, depth - 1));
    };
    return go(go, max_depth);
}

nbe::Mon mon(Rng& rng, int n, int max_depth, int nvars) {
    std::uniform_int_distribution<int> index(1, n);
    std::uniform_int_distribution<int> v(0, nvars - 1);
    std::bernoulli_distribution stop(0.25);
    std::bernoulli_distribution unit_leaf(0.25);
    auto go = [&](auto&& self, int depth) -> nbe::Mon {
        if (depth <= 0 || stop(rng)) {
            if (nvars == 0 || unit_leaf(rng)) return nbe::unit(index(rng));
            return nbe::var("v" + std::to_string(v(rng)));
        }
        int i = index(rng);
        auto lhs = self(self, depth - 1);
        return nbe::prod(i, lhs, self(self, depth - 1));
    };
    return go(go, max_depth);
}

}  // namespace cpsh::gen

#include "cpsh/arith.hpp"

#include <stdexcept>

#include "cpsh/sexpr.hpp"
#include "cpsh/syntax.hpp"

namespace cpsh::arith {

AExpPtr num(Nat m) { return std::make_shared<const AExp>(AExp{Num{m}}); }

AExpPtr plus(AExpPtr a, AExpPtr b) {
    return std::make_shared<const AExp>(AExp{Plus{std::move(a), std::move(b)}});
}

bool operator==(const AExp& a, const AExp& b) {
    if (&a == &b) return true;
    if (const auto* x = std::get_if<Num>(&a.v)) {
        const auto* y = std::get_if<Num>(&b.v);
        return y != nullptr && x->value == y->value;
    }
    const auto* x = std::get_if<Plus>(&a.v);
    const auto* y = std::get_if<Plus>(&b.v);
    return y != nullptr && *x->lhs == *y->lhs && *x->rhs == *y->rhs;
}

bool ctx_equal(const ACtxPtr& a, const ACtxPtr& b) {
    const ACtx* x = a.get();
    const ACtx* y = b.get();
    while (x != nullptr && y != nullptr) {
        if (x == y) return true;
        if (x->v.index() != y->v.index()) return false;
        if (const auto* f = std::get_if<AAdd1>(&x->v)) {
            const auto& g = std::get<AAdd1>(y->v);
            if (!(*f->rhs == *g.rhs)) return false;
            x = f->next.get();
            y = g.next.get();
        } else {
            const auto& f2 = std::get<AAdd2>(x->v);
            const auto& g2 = std::get<AAdd2>(y->v);
            if (f2.lhs != g2.lhs) return false;
            x = f2.next.get();
            y = g2.next.get();
        }
    }
    return x == y;
}

Nat eval_direct(const AExp& e) {
    if (const auto* n = std::get_if<Num>(&e.v)) return n->value;
    const auto& p = std::get<Plus>(e.v);
    return eval_direct(*p.lhs) + eval_direct(*p.rhs);
}

namespace {

using Kont = std::function<Nat(Nat)>;

Nat eval_c(const AExp& e, const Kont& k) {
    if (const auto* n = std::get_if<Num>(&e.v)) return k(n->value);
    const auto& p = std::get<Plus>(e.v);
    return eval_c(*p.lhs, [&p, &k](Nat m1) { return eval_c(*p.rhs, [m1, &k](Nat m2) { return k(m1 + m2); }); });
}

ACtxPtr push1(AExpPtr rhs, ACtxPtr next) {
    return std::make_shared<const ACtx>(ACtx{AAdd1{std::move(rhs), std::move(next)}});
}

ACtxPtr push2(Nat lhs, ACtxPtr next) {
    return std::make_shared<const ACtx>(ACtx{AAdd2{lhs, std::move(next)}});
}

}  // namespace

Nat eval_cps(const AExp& e) {
    return eval_c(e, [](Nat m) { return m; });
}

MachineRun run_machine(const AExpPtr& e) {
    MachineRun run;
    std::variant<MEval, MApply> c = MEval{e, kEnd};
    run.transitions = 1;
    for (;;) {
        if (auto* ev = std::get_if<MEval>(&c)) {
            if (const auto* n = std::get_if<Num>(&ev->exp->v)) {
                c = MApply{ev->ctx, n->value};
            } else {
                const auto& p = std::get<Plus>(ev->exp->v);
                c = MEval{p.lhs, push1(p.rhs, ev->ctx)};
            }
            ++run.transitions;
            continue;
        }
        auto& ap = std::get<MApply>(c);
        ++run.transitions;
        if (!ap.ctx) {
            run.value = ap.value;
            run.configurations = run.transitions - 1;
            return run;
        }
        if (const auto* f = std::get_if<AAdd1>(&ap.ctx->v)) {
            c = MEval{f->rhs, push2(ap.value, f->next)};
        } else {
            const auto& f2 = std::get<AAdd2>(ap.ctx->v);
            run.contractions.push_back(Decomposition{f2.next, f2.lhs, ap.value});
            c = MApply{f2.next, f2.lhs + ap.value};
        }
    }
}

DecomposeResult decompose(const AExpPtr& e) {
    // The machine's decomposition transitions, stopping at the first redex.
    std::variant<MEval, MApply> c = MEval{e, kEnd};
    for (;;) {
        if (auto* ev = std::get_if<MEval>(&c)) {
            if (const auto* n = std::get_if<Num>(&ev->exp->v)) {
                c = MApply{ev->ctx, n->value};
            } else {
                const auto& p = std::get<Plus>(ev->exp->v);
                c = MEval{p.lhs, push1(p.rhs, ev->ctx)};
            }
            continue;
        }
        auto& ap = std::get<MApply>(c);
        if (!ap.ctx) return ap.value;
        if (const auto* f = std::get_if<AAdd1>(&ap.ctx->v)) {
            c = MEval{f->rhs, push2(ap.value, f->next)};
        } else {
            const auto& f2 = std::get<AAdd2>(ap.ctx->v);
            return Decomposition{f2.next, f2.lhs, ap.value};
        }
    }
}

AExpPtr plug(const ACtxPtr& ctx, AExpPtr e) {
    for (const ACtx* k = ctx.get(); k != nullptr;) {
        if (const auto* f = std::get_if<AAdd1>(&k->v)) {
            e = plus(std::move(e), f->rhs);
            k = f->next.get();
        } else {
            const auto& f2 = std::get<AAdd2>(k->v);
            e = plus(num(f2.lhs), std::move(e));
            k = f2.next.get();
        }
    }
    return e;
}

AExpPtr plug(const Decomposition& d) { return plug(d.ctx, plus(num(d.lhs), num(d.rhs))); }

StepResult reduce_step(const AExpPtr& e) {
    auto d = decompose(e);
    if (const auto* m = std::get_if<Nat>(&d)) return Done{*m};
    const auto& dec = std::get<Decomposition>(d);
    return plug(dec.ctx, num(dec.lhs + dec.rhs));
}

ReductionRun reduce_all(const AExpPtr& e) {
    ReductionRun run;
    AExpPtr cur = e;
    for (;;) {
        auto d = decompose(cur);
        if (const auto* m = std::get_if<Nat>(&d)) {
            run.value = *m;
            return run;
        }
        const auto& dec = std::get<Decomposition>(d);
        run.contractions.push_back(dec);
        ++run.reductions;
        cur = plug(dec.ctx, num(dec.lhs + dec.rhs));
    }
}

namespace {

constexpr Nat kLimit = Nat{1} << 31;

AExpPtr from_sexpr(const SExpr& s) {
    if (!s.is_list) {
        if (!is_integer_atom(s.atom) || s.atom[0] == '-')
            throw ParseError("expected a natural number, got '" + s.atom + "'", s.line, s.column);
        if (s.atom.size() > 10 || std::stoull(s.atom) >= kLimit)
            throw ParseError("number out of range: " + s.atom, s.line, s.column);
        return num(std::stoull(s.atom));
    }
    if (s.items.size() != 3 || s.items[0].is_list || s.items[0].atom != "+")
        throw ParseError("expected (+ e e)", s.line, s.column);
    return plus(from_sexpr(s.items[1]), from_sexpr(s.items[2]));
}

}  // namespace

AExpPtr parse(const std::string& text) {
    SExpr s = read_single_sexpr(text);
    AExpPtr e = from_sexpr(s);
    if (eval_direct(*e) >= kLimit) throw ParseError("sum must stay below 2^31", s.line, s.column);
    return e;
}

std::string print(const AExp& e) {
    if (const auto* n = std::get_if<Num>(&e.v)) return std::to_string(n->value);
    const auto& p = std::get<Plus>(e.v);
    return "(+ " + print(*p.lhs) + " " + print(*p.rhs) + ")";
}

}  // namespace cpsh::arith

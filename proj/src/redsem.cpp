#include "cpsh/redsem.hpp"

#include "cpsh/machine_subst.hpp"
#include "cpsh/overload.hpp"

namespace cpsh {

std::optional<RedexKind> redex_kind(const Term& t) {
    if (is_value(t)) return std::nullopt;
    return std::visit(
        Overload{
            [](const term::Var&) -> std::optional<RedexKind> { return RedexKind::FreeVar; },
            [](const term::Succ& a) -> std::optional<RedexKind> {
                if (is_value(a.arg)) return RedexKind::Succ;
                return std::nullopt;
            },
            [](const term::App& a) -> std::optional<RedexKind> {
                if (is_value(a.fn) && is_value(a.arg)) return RedexKind::App;
                return std::nullopt;
            },
            [](const term::Shift&) -> std::optional<RedexKind> { return RedexKind::Shift; },
            [](const term::Reset& a) -> std::optional<RedexKind> {
                if (is_value(a.body)) return RedexKind::Reset;
                return std::nullopt;
            },
            [](const term::Add& a) -> std::optional<RedexKind> {
                if (is_value(a.lhs) && is_value(a.rhs)) return RedexKind::Add;
                return std::nullopt;
            },
            [](const term::Gt& a) -> std::optional<RedexKind> {
                if (is_value(a.lhs) && is_value(a.rhs)) return RedexKind::Gt;
                return std::nullopt;
            },
            [](const term::If0& a) -> std::optional<RedexKind> {
                if (is_value(a.cond)) return RedexKind::If0;
                return std::nullopt;
            },
            [](const term::LCase& a) -> std::optional<RedexKind> {
                if (is_value(a.scrutinee)) return RedexKind::LCase;
                return std::nullopt;
            },
            [](const term::Let& a) -> std::optional<RedexKind> {
                if (is_value(a.bound)) return RedexKind::Let;
                return std::nullopt;
            },
            [](const auto&) -> std::optional<RedexKind> { return std::nullopt; },
        },
        t.node().v);
}

bool is_actual_redex(const Term& t) {
    auto k = redex_kind(t);
    if (!k) return false;
    auto is_int = [](const Term& v) { return v.is<term::Lit>(); };
    switch (*k) {
        case RedexKind::Succ: return is_int(t.as<term::Succ>()->arg);
        case RedexKind::App: {
            const Term& f = t.as<term::App>()->fn;
            return f.is<term::Lam>() || f.is<term::Fix>() || f.is<term::Captured>();
        }
        case RedexKind::Shift:
        case RedexKind::Reset:
        case RedexKind::Let: return true;
        case RedexKind::Add: return is_int(t.as<term::Add>()->lhs) && is_int(t.as<term::Add>()->rhs);
        case RedexKind::Gt: return is_int(t.as<term::Gt>()->lhs) && is_int(t.as<term::Gt>()->rhs);
        case RedexKind::If0: return is_int(t.as<term::If0>()->cond);
        case RedexKind::LCase: {
            const Term& s = t.as<term::LCase>()->scrutinee;
            return s.is<term::Nil>() || s.is<term::Cons>();
        }
        case RedexKind::FreeVar: return false;
    }
    return false;
}

// The decomposition function is the substitution machine with its
// contracting transitions replaced by "found": eval transitions that only
// move the focus push frames, and a value meeting an empty C_1 climbs to the
// first non-empty stack, whose top marks a reset boundary.
Refocused refocus(Mode start, const Term& t0, const SubstTower& tower, int n) {
    using F = SubstFrame;
    Mode mode = start;
    Term t = t0;
    SubstTower T = tower;
    std::size_t level = 1;
    std::uint64_t count = 0;
    auto found = [&](SubstTower at, Term focus) {
        return Refocused{Decomposition{std::move(at), std::move(focus)}, count};
    };
    for (;;) {
        if (mode == Mode::Eval) {
            if (is_value(t)) {
                mode = Mode::Cont;
                level = 1;
                ++count;
                continue;
            }
            auto push = [&](const Term& sub, F f) {
                T = T.push_frame(std::move(f));
                t = sub;
                ++count;
            };
            const auto& v = t.node().v;
            if (const auto* a = std::get_if<term::App>(&v)) push(a->fn, F{frame::Arg<Term>{a->arg}});
            else if (const auto* a = std::get_if<term::Succ>(&v)) push(a->arg, F{frame::Succ{}});
            else if (const auto* a = std::get_if<term::Cons>(&v)) push(a->head, F{frame::ConsHead<Term>{a->tail}});
            else if (const auto* a = std::get_if<term::Add>(&v)) push(a->lhs, F{frame::AddLeft<Term>{a->rhs}});
            else if (const auto* a = std::get_if<term::Gt>(&v)) push(a->lhs, F{frame::GtLeft<Term>{a->rhs}});
            else if (const auto* a = std::get_if<term::If0>(&v))
                push(a->cond, F{frame::If0<Term>{a->zero_branch, a->other_branch}});
            else if (const auto* a = std::get_if<term::LCase>(&v))
                push(a->scrutinee, F{frame::LCase<Term>{a->nil_branch, a->head, a->tail, a->cons_branch}});
            else if (const auto* a = std::get_if<term::Let>(&v))
                push(a->bound, F{frame::Let<Term>{a->name, a->body}});
            else if (const auto* a = std::get_if<term::Reset>(&v)) {
                T = T.delimit(static_cast<std::size_t>(a->level));
                t = a->body;
                ++count;
            } else {
                // Shift, or a free variable.
                return found(T, t);
            }
            continue;
        }
        if (level >= 2) {
            if (!T.stack(level).empty())
                return found(T.pop_level(level), mk::reset(static_cast<int>(level) - 1, t));
            if (level == static_cast<std::size_t>(n) + 1) return Refocused{ValueFound{t}, count};
            ++level;
            ++count;
            continue;
        }
        if (T.frames.empty()) {
            level = 2;
            ++count;
            continue;
        }
        // Keeps the frame alive while T is reassigned below.
        const PList<F> frames = T.frames;
        const F& top = frames.head();
        SubstTower rest = T.with_frames(frames.tail());
        const Term v = t;
        bool done = false;
        Refocused out;
        std::visit(Overload{
                       [&](const frame::Arg<Term>& a) {
                           T = rest.push_frame(F{frame::Fun<Term>{v}});
                           t = a.arg;
                           mode = Mode::Eval;
                           ++count;
                       },
                       [&](const frame::ConsHead<Term>& a) {
                           T = rest.push_frame(F{frame::ConsTail<Term>{v}});
                           t = a.tail;
                           mode = Mode::Eval;
                           ++count;
                       },
                       [&](const frame::AddLeft<Term>& a) {
                           T = rest.push_frame(F{frame::AddRight<Term>{v}});
                           t = a.rhs;
                           mode = Mode::Eval;
                           ++count;
                       },
                       [&](const frame::GtLeft<Term>& a) {
                           T = rest.push_frame(F{frame::GtRight<Term>{v}});
                           t = a.rhs;
                           mode = Mode::Eval;
                           ++count;
                       },
                       [&](const frame::ConsTail<Term>& a) {
                           T = rest;
                           t = mk::cons(a.head, v);
                           ++count;
                       },
                       [&](const frame::Fun<Term>& a) {
                           out = found(rest, mk::app(a.fn, v));
                           done = true;
                       },
                       [&](const frame::Succ&) {
                           out = found(rest, mk::succ(v));
                           done = true;
                       },
                       [&](const frame::AddRight<Term>& a) {
                           out = found(rest, mk::add(a.lhs, v));
                           done = true;
                       },
                       [&](const frame::GtRight<Term>& a) {
                           out = found(rest, mk::gt(a.lhs, v));
                           done = true;
                       },
                       [&](const frame::If0<Term>& a) {
                           out = found(rest, mk::if0(v, a.zero_branch, a.other_branch));
                           done = true;
                       },
                       [&](const frame::LCase<Term>& a) {
                           out = found(rest, mk::lcase(v, a.nil_branch, a.head, a.tail, a.cons_branch));
                           done = true;
                       },
                       [&](const frame::Let<Term>& a) {
                           out = found(rest, mk::let(a.name, v, a.body));
                           done = true;
                       },
                   },
                   top.kind);
        if (done) return out;
    }
}

DecomposeResult decompose(const Term& t, int n) {
    return refocus(Mode::Eval, t, SubstTower::empty(static_cast<std::size_t>(n) + 1), n).result;
}

Term plug(const SubstTower& tower, const Term& focus) {
    Term t = focus;
    SubstTower T = tower;
    for (;;) {
        for (const auto& f : T.frames) {
            t = std::visit(Overload{
                               [&](const frame::Arg<Term>& a) { return mk::app(t, a.arg); },
                               [&](const frame::Succ&) { return mk::succ(t); },
                               [&](const frame::Fun<Term>& a) { return mk::app(a.fn, t); },
                               [&](const frame::ConsHead<Term>& a) { return mk::cons(t, a.tail); },
                               [&](const frame::ConsTail<Term>& a) { return mk::cons(a.head, t); },
                               [&](const frame::AddLeft<Term>& a) { return mk::add(t, a.rhs); },
                               [&](const frame::AddRight<Term>& a) { return mk::add(a.lhs, t); },
                               [&](const frame::GtLeft<Term>& a) { return mk::gt(t, a.rhs); },
                               [&](const frame::GtRight<Term>& a) { return mk::gt(a.lhs, t); },
                               [&](const frame::If0<Term>& a) { return mk::if0(t, a.zero_branch, a.other_branch); },
                               [&](const frame::LCase<Term>& a) {
                                   return mk::lcase(t, a.nil_branch, a.head, a.tail, a.cons_branch);
                               },
                               [&](const frame::Let<Term>& a) { return mk::let(a.name, t, a.body); },
                           },
                           f.kind);
        }
        T.frames = PList<SubstFrame>();
        std::size_t j = T.lowest_nonempty_stack();
        if (j == 0) return t;
        T = T.pop_level(j);
        t = mk::reset(static_cast<int>(j) - 1, t);
    }
}

Term plug(const Decomposition& d) { return plug(d.tower, d.focus); }

ContractResult contract(const Decomposition& d) {
    const Term& r = d.focus;
    const SubstTower& T = d.tower;
    try {
        return std::visit(
            Overload{
                [&](const term::Succ& a) -> ContractResult {
                    auto m = subst_rules::expect_int(a.arg, StuckKind::SuccNonInteger);
                    return Contracted{Mode::Cont, mk::lit(wrap_add(m, 1)), T};
                },
                [&](const term::App& a) -> ContractResult {
                    if (const auto* cap = a.fn.as<term::Captured>())
                        return Contracted{Mode::Cont, a.arg, T.reinstate(*cap->tower)};
                    return Contracted{Mode::Eval, subst_rules::apply_function(a.fn, a.arg), T};
                },
                [&](const term::Shift& a) -> ContractResult {
                    auto i = static_cast<std::size_t>(a.level);
                    return Contracted{Mode::Eval, substitute(a.body, a.k, mk::captured(T.prefix(i))),
                                      T.clear_below(i)};
                },
                [&](const term::Reset& a) -> ContractResult { return Contracted{Mode::Cont, a.body, T}; },
                [&](const term::Add& a) -> ContractResult {
                    auto l = subst_rules::expect_int(a.lhs, StuckKind::AddNonInteger);
                    auto m = subst_rules::expect_int(a.rhs, StuckKind::AddNonInteger);
                    return Contracted{Mode::Cont, mk::lit(wrap_add(l, m)), T};
                },
                [&](const term::Gt& a) -> ContractResult {
                    auto l = subst_rules::expect_int(a.lhs, StuckKind::GtNonInteger);
                    auto m = subst_rules::expect_int(a.rhs, StuckKind::GtNonInteger);
                    return Contracted{Mode::Cont, mk::lit(l > m ? 1 : 0), T};
                },
                [&](const term::If0& a) -> ContractResult {
                    return Contracted{Mode::Eval, subst_rules::if0_branch(a.cond, a.zero_branch, a.other_branch), T};
                },
                [&](const term::LCase& a) -> ContractResult {
                    return Contracted{Mode::Eval,
                                      subst_rules::lcase_branch(a.scrutinee, a.nil_branch, a.head, a.tail,
                                                                a.cons_branch),
                                      T};
                },
                [&](const term::Let& a) -> ContractResult {
                    return Contracted{Mode::Eval, substitute(a.body, a.name, a.bound), T};
                },
                [&](const term::Var& a) -> ContractResult {
                    return StuckInfo{StuckKind::FreeVariable, "unbound " + a.name};
                },
                [&](const auto&) -> ContractResult { throw std::logic_error("contract: not a potential redex"); },
            },
            r.node().v);
    } catch (const StuckSignal& s) {
        return s.info;
    }
}

ReduceResult reduce_step(const Term& t, int n) {
    auto d = decompose(t, n);
    if (auto* v = std::get_if<ValueFound>(&d)) return ReduceDone{v->value};
    auto& dec = std::get<Decomposition>(d);
    auto c = contract(dec);
    if (auto* s = std::get_if<StuckInfo>(&c)) return ReduceStuck{dec, *s};
    const auto& k = std::get<Contracted>(c);
    return ReduceNext{plug(k.tower, k.term)};
}

Outcome RRunResult::outcome() const {
    switch (kind) {
        case OutcomeKind::Value: {
            std::optional<std::int64_t> m;
            if (const auto* l = value->as<term::Lit>()) m = l->value;
            return value_outcome(observe(*value), m, steps);
        }
        case OutcomeKind::Stuck: return stuck_outcome(*stuck, steps);
        case OutcomeKind::Timeout: break;
    }
    return timeout_outcome(steps);
}

RRunResult evaluate_by_reduction(const Term& program, int n, std::uint64_t fuel, const ReductionOptions& options) {
    require_level(program, n);
    RRunResult out;
    if (options.observer) options.observer(0, program);
    Refocused r = refocus(Mode::Eval, program, SubstTower::empty(static_cast<std::size_t>(n) + 1), n);
    std::uint64_t cost = r.transitions;
    DecomposeResult current = std::move(r.result);
    auto timeout = [&]() {
        out.kind = OutcomeKind::Timeout;
        out.steps = fuel;
        return out;
    };
    for (;;) {
        if (cost > fuel) return timeout();
        if (auto* v = std::get_if<ValueFound>(&current)) {
            out.kind = OutcomeKind::Value;
            out.value = v->value;
            out.steps = cost;
            return out;
        }
        if (cost == fuel) return timeout();
        const auto& d = std::get<Decomposition>(current);
        auto c = contract(d);
        if (auto* s = std::get_if<StuckInfo>(&c)) {
            out.kind = OutcomeKind::Stuck;
            out.stuck = *s;
            out.stuck_at = d;
            out.steps = cost;
            return out;
        }
        auto& k = std::get<Contracted>(c);
        ++cost;
        ++out.reductions;
        Term next = plug(k.tower, k.term);
        if (options.observer) options.observer(out.reductions, next);
        DecomposeResult scratch = decompose(next, n);
        Refocused shortcut = refocus(k.mode, k.term, k.tower, n);
        cost += shortcut.transitions;
        if (options.check_refocus) {
            ++out.refocus_checks;
            if (!(scratch == shortcut.result)) ++out.refocus_violations;
        }
        current = std::move(scratch);
    }
}

}  // namespace cpsh

#include "cpsh/machine_subst.hpp"

#include "cpsh/overload.hpp"

namespace cpsh {

namespace {
[[noreturn]] void stuck(StuckKind kind, std::string detail) { throw StuckSignal{{kind, std::move(detail)}}; }
}  // namespace

namespace subst_rules {

Term apply_function(const Term& fn, const Term& arg) {
    if (const auto* l = fn.as<term::Lam>()) return substitute(l->body, l->param, arg);
    if (const auto* f = fn.as<term::Fix>()) {
        Term body = f->body;
        if (f->self != f->param) body = substitute(body, f->self, fn);
        return substitute(body, f->param, arg);
    }
    stuck(StuckKind::ApplyNonFunction, "applying " + print_term(fn));
}

std::int64_t expect_int(const Term& v, StuckKind kind) {
    if (const auto* m = v.as<term::Lit>()) return m->value;
    stuck(kind, "operand " + print_term(v));
}

Term lcase_branch(const Term& scrutinee, const Term& nil_branch, const Name& head, const Name& tail,
                  const Term& cons_branch) {
    if (scrutinee.is<term::Nil>()) return nil_branch;
    if (const auto* c = scrutinee.as<term::Cons>()) {
        Term b = cons_branch;
        if (head != tail) b = substitute(b, head, c->head);
        return substitute(b, tail, c->tail);
    }
    stuck(StuckKind::LCaseNonList, "scrutinee " + print_term(scrutinee));
}

Term if0_branch(const Term& cond, const Term& zero_branch, const Term& other_branch) {
    return expect_int(cond, StuckKind::If0NonInteger) == 0 ? zero_branch : other_branch;
}

}  // namespace subst_rules

SConfig subst_initial(const Term& program, int n) {
    return SEval{program, SubstTower::empty(static_cast<std::size_t>(n) + 1)};
}

bool subst_is_final_ready(const SConfig& c, int n) {
    const auto* k = std::get_if<SCont>(&c);
    return k != nullptr && k->level == static_cast<std::size_t>(n) + 1 &&
           k->tower.stack(k->level).empty();
}

namespace {

using F = SubstFrame;

SConfig step_eval(const SEval& c) {
    const Term& t = c.term;
    const SubstTower& T = c.tower;
    if (is_value(t)) return SCont{1, t, T};
    auto push = [&](const Term& next, F f) -> SConfig { return SEval{next, T.push_frame(std::move(f))}; };
    return std::visit(
        Overload{
            [&](const term::Var& a) -> SConfig { stuck(StuckKind::FreeVariable, "unbound " + a.name); },
            [&](const term::App& a) { return push(a.fn, F{frame::Arg<Term>{a.arg}}); },
            [&](const term::Succ& a) { return push(a.arg, F{frame::Succ{}}); },
            [&](const term::Cons& a) { return push(a.head, F{frame::ConsHead<Term>{a.tail}}); },
            [&](const term::Add& a) { return push(a.lhs, F{frame::AddLeft<Term>{a.rhs}}); },
            [&](const term::Gt& a) { return push(a.lhs, F{frame::GtLeft<Term>{a.rhs}}); },
            [&](const term::If0& a) {
                return push(a.cond, F{frame::If0<Term>{a.zero_branch, a.other_branch}});
            },
            [&](const term::LCase& a) {
                return push(a.scrutinee, F{frame::LCase<Term>{a.nil_branch, a.head, a.tail, a.cons_branch}});
            },
            [&](const term::Let& a) { return push(a.bound, F{frame::Let<Term>{a.name, a.body}}); },
            [&](const term::Reset& a) -> SConfig {
                return SEval{a.body, T.delimit(static_cast<std::size_t>(a.level))};
            },
            [&](const term::Shift& a) -> SConfig {
                auto i = static_cast<std::size_t>(a.level);
                Term k = mk::captured(T.prefix(i));
                return SEval{substitute(a.body, a.k, k), T.clear_below(i)};
            },
            [&](const auto&) -> SConfig { throw std::logic_error("value form reached eval dispatch"); },
        },
        t.node().v);
}

SConfig step_cont1(const SCont& c, Control control) {
    const Term& v = c.value;
    const SubstTower& T = c.tower;
    if (T.frames.empty()) return SCont{2, v, T};
    const F& top = T.frames.head();
    const SubstTower rest = T.with_frames(T.frames.tail());
    auto eval_with = [&](const Term& next, F f) -> SConfig {
        return SEval{next, rest.push_frame(std::move(f))};
    };
    return std::visit(
        Overload{
            [&](const frame::Arg<Term>& a) { return eval_with(a.arg, F{frame::Fun<Term>{v}}); },
            [&](const frame::Fun<Term>& a) -> SConfig {
                if (const auto* cap = a.fn.as<term::Captured>()) {
                    if (control == Control::Dynamic) {
                        if (cap->tower->height() != 1)
                            throw std::logic_error("dynamic control is defined at level 1 only");
                        return SCont{1, v, rest.with_frames(concat_ctx(cap->tower->frames, rest.frames))};
                    }
                    return SCont{1, v, rest.reinstate(*cap->tower)};
                }
                return SEval{subst_rules::apply_function(a.fn, v), rest};
            },
            [&](const frame::Succ&) -> SConfig {
                auto m = subst_rules::expect_int(v, StuckKind::SuccNonInteger);
                return SCont{1, mk::lit(wrap_add(m, 1)), rest};
            },
            [&](const frame::ConsHead<Term>& a) { return eval_with(a.tail, F{frame::ConsTail<Term>{v}}); },
            [&](const frame::ConsTail<Term>& a) -> SConfig { return SCont{1, mk::cons(a.head, v), rest}; },
            [&](const frame::AddLeft<Term>& a) { return eval_with(a.rhs, F{frame::AddRight<Term>{v}}); },
            [&](const frame::AddRight<Term>& a) -> SConfig {
                auto l = subst_rules::expect_int(a.lhs, StuckKind::AddNonInteger);
                auto r = subst_rules::expect_int(v, StuckKind::AddNonInteger);
                return SCont{1, mk::lit(wrap_add(l, r)), rest};
            },
            [&](const frame::GtLeft<Term>& a) { return eval_with(a.rhs, F{frame::GtRight<Term>{v}}); },
            [&](const frame::GtRight<Term>& a) -> SConfig {
                auto l = subst_rules::expect_int(a.lhs, StuckKind::GtNonInteger);
                auto r = subst_rules::expect_int(v, StuckKind::GtNonInteger);
                return SCont{1, mk::lit(l > r ? 1 : 0), rest};
            },
            [&](const frame::If0<Term>& a) -> SConfig {
                return SEval{subst_rules::if0_branch(v, a.zero_branch, a.other_branch), rest};
            },
            [&](const frame::LCase<Term>& a) -> SConfig {
                return SEval{subst_rules::lcase_branch(v, a.nil_branch, a.head, a.tail, a.cons_branch), rest};
            },
            [&](const frame::Let<Term>& a) -> SConfig { return SEval{substitute(a.body, a.name, v), rest}; },
        },
        top.kind);
}

}  // namespace

SStepResult step_subst(const SConfig& c, int n, Control control) {
    try {
        return std::visit(
            Overload{
                [&](const SEval& e) -> SStepResult { return step_eval(e); },
                [&](const SCont& k) -> SStepResult {
                    if (k.level == 1) return step_cont1(k, control);
                    const auto& stack = k.tower.stack(k.level);
                    if (!stack.empty()) return SConfig{SCont{1, k.value, k.tower.pop_level(k.level)}};
                    if (k.level == static_cast<std::size_t>(n) + 1) return SConfig{SFinal{k.value}};
                    return SConfig{SCont{k.level + 1, k.value, k.tower}};
                },
                [&](const SFinal&) -> SStepResult { throw std::logic_error("step from a final configuration"); },
            },
            c);
    } catch (const StuckSignal& s) {
        return s.info;
    }
}

Outcome SRunResult::outcome() const {
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

SRunResult run_subst(const Term& program, int n, std::uint64_t fuel, const SObserver& observer,
                     Control control) {
    require_level(program, n);
    SConfig c = subst_initial(program, n);
    std::uint64_t k = 0;
    if (observer) observer(0, c);
    SRunResult out;
    for (;;) {
        if (subst_is_final_ready(c, n)) {
            const auto& cont = std::get<SCont>(c);
            if (observer) observer(k + 1, SFinal{cont.value});
            out.kind = OutcomeKind::Value;
            out.value = cont.value;
            out.steps = k;
            return out;
        }
        if (k == fuel) {
            out.kind = OutcomeKind::Timeout;
            out.steps = k;
            return out;
        }
        auto r = step_subst(c, n, control);
        if (auto* s = std::get_if<StuckInfo>(&r)) {
            out.kind = OutcomeKind::Stuck;
            out.stuck = std::move(*s);
            out.steps = k;
            return out;
        }
        c = std::move(std::get<SConfig>(r));
        ++k;
        if (observer) observer(k, c);
    }
}

PList<SubstFrame> concat_ctx(const PList<SubstFrame>& c, const PList<SubstFrame>& c2) { return append(c, c2); }

SRunResult run_dynamic(const Term& program, std::uint64_t fuel, const SObserver& observer) {
    return run_subst(program, 1, fuel, observer, Control::Dynamic);
}

std::string trace_line(std::uint64_t k, const SConfig& c) {
    std::string out = std::to_string(k) + ": ";
    std::visit(Overload{
                   [&](const SEval& e) {
                       out += "eval | " + print_tower(e.tower, " | ") + " [ " + print_term(e.term) + " ]";
                   },
                   [&](const SCont& e) {
                       out += "cont" + std::to_string(e.level) + " | " + print_tower(e.tower, " | ") + " [ " +
                              print_term(e.value) + " ]";
                   },
                   [&](const SFinal& e) { out += "final [ " + print_term(e.value) + " ]"; },
               },
               c);
    return out;
}

}  // namespace cpsh

#include "cpsh/machine_env.hpp"

#include "cpsh/overload.hpp"

namespace cpsh {

namespace {
[[noreturn]] void stuck(StuckKind kind, std::string detail) { throw StuckSignal{{kind, std::move(detail)}}; }

MValue int_value(std::int64_t m) { return MValue{mv::Int{m}}; }

std::string show(const MValue& v) { return print_term(realize(v)); }

std::int64_t expect_int(const MValue& v, StuckKind kind) {
    if (const auto* m = std::get_if<mv::Int>(&v.v)) return m->value;
    stuck(kind, "operand " + show(v));
}

Env extend(const Env& env, const Name& x, MValue v) { return env.push(EnvBinding{x, std::move(v)}); }

// Terms that evaluate to a value in a single transition.
bool value_shaped(const Term& t) {
    const auto& v = t.node().v;
    if (std::holds_alternative<term::Lit>(v) || std::holds_alternative<term::Var>(v) ||
        std::holds_alternative<term::Lam>(v) || std::holds_alternative<term::Fix>(v) ||
        std::holds_alternative<term::Nil>(v))
        return true;
    if (const auto* c = std::get_if<term::Cons>(&v)) return value_shaped(c->head) && value_shaped(c->tail);
    return false;
}

MValue immediate(const Term& t, const Env& env) {
    return std::visit(
        Overload{
            [&](const term::Lit& a) { return int_value(a.value); },
            [&](const term::Var& a) {
                const MValue* v = lookup(env, a.name);
                if (v == nullptr) stuck(StuckKind::FreeVariable, "unbound " + a.name);
                return *v;
            },
            [&](const term::Lam&) { return MValue{mv::Closure{t, env}}; },
            [&](const term::Fix&) { return MValue{mv::FixClosure{t, env}}; },
            [&](const term::Nil&) { return MValue{mv::Nil{}}; },
            [&](const term::Cons& a) {
                auto h = std::make_shared<const MValue>(immediate(a.head, env));
                auto tl = std::make_shared<const MValue>(immediate(a.tail, env));
                return MValue{mv::Cons{h, tl}};
            },
            [&](const auto&) -> MValue { throw std::logic_error("not value-shaped"); },
        },
        t.node().v);
}

using F = EnvFrame;

EConfig step_eval(const EEval& c) {
    const Term& t = c.term;
    const Env& e = c.env;
    const EnvTower& T = c.tower;
    if (value_shaped(t)) return ECont{1, immediate(t, e), T};
    auto code = [&](const Term& s) { return EnvCode{s, e}; };
    auto push = [&](const Term& next, F f) -> EConfig { return EEval{next, e, T.push_frame(std::move(f))}; };
    return std::visit(
        Overload{
            [&](const term::App& a) { return push(a.fn, F{frame::Arg<EnvCode>{code(a.arg)}}); },
            [&](const term::Succ& a) { return push(a.arg, F{frame::Succ{}}); },
            [&](const term::Cons& a) { return push(a.head, F{frame::ConsHead<EnvCode>{code(a.tail)}}); },
            [&](const term::Add& a) { return push(a.lhs, F{frame::AddLeft<EnvCode>{code(a.rhs)}}); },
            [&](const term::Gt& a) { return push(a.lhs, F{frame::GtLeft<EnvCode>{code(a.rhs)}}); },
            [&](const term::If0& a) {
                return push(a.cond, F{frame::If0<EnvCode>{code(a.zero_branch), code(a.other_branch)}});
            },
            [&](const term::LCase& a) {
                return push(a.scrutinee,
                            F{frame::LCase<EnvCode>{code(a.nil_branch), a.head, a.tail, code(a.cons_branch)}});
            },
            [&](const term::Let& a) { return push(a.bound, F{frame::Let<EnvCode>{a.name, code(a.body)}}); },
            [&](const term::Reset& a) -> EConfig {
                return EEval{a.body, e, T.delimit(static_cast<std::size_t>(a.level))};
            },
            [&](const term::Shift& a) -> EConfig {
                auto i = static_cast<std::size_t>(a.level);
                MValue k{mv::Captured{std::make_shared<const EnvTower>(T.prefix(i))}};
                return EEval{a.body, extend(e, a.k, std::move(k)), T.clear_below(i)};
            },
            [&](const term::Captured&) -> EConfig {
                throw std::logic_error("captured context in environment-machine code");
            },
            [&](const auto&) -> EConfig { throw std::logic_error("value form reached eval dispatch"); },
        },
        t.node().v);
}

EConfig apply(const MValue& fn, const MValue& arg, const EnvTower& rest) {
    return std::visit(
        Overload{
            [&](const mv::Closure& c) -> EConfig {
                const auto& lam = *c.lam.as<term::Lam>();
                return EEval{lam.body, extend(c.env, lam.param, arg), rest};
            },
            [&](const mv::FixClosure& c) -> EConfig {
                const auto& fx = *c.fix.as<term::Fix>();
                Env env = extend(extend(c.env, fx.self, fn), fx.param, arg);
                return EEval{fx.body, env, rest};
            },
            [&](const mv::Captured& c) -> EConfig { return ECont{1, arg, rest.reinstate(*c.tower)}; },
            [&](const auto&) -> EConfig { stuck(StuckKind::ApplyNonFunction, "applying " + show(fn)); },
        },
        fn.v);
}

EConfig step_cont1(const ECont& c) {
    const MValue& v = c.value;
    const EnvTower& T = c.tower;
    if (T.frames.empty()) return ECont{2, v, T};
    const F& top = T.frames.head();
    const EnvTower rest = T.with_frames(T.frames.tail());
    auto eval_with = [&](const EnvCode& next, F f) -> EConfig {
        return EEval{next.term, next.env, rest.push_frame(std::move(f))};
    };
    return std::visit(
        Overload{
            [&](const frame::Arg<EnvCode>& a) { return eval_with(a.arg, F{frame::Fun<MValue>{v}}); },
            [&](const frame::Fun<MValue>& a) { return apply(a.fn, v, rest); },
            [&](const frame::Succ&) -> EConfig {
                return ECont{1, int_value(wrap_add(expect_int(v, StuckKind::SuccNonInteger), 1)), rest};
            },
            [&](const frame::ConsHead<EnvCode>& a) { return eval_with(a.tail, F{frame::ConsTail<MValue>{v}}); },
            [&](const frame::ConsTail<MValue>& a) -> EConfig {
                auto h = std::make_shared<const MValue>(a.head);
                auto tl = std::make_shared<const MValue>(v);
                return ECont{1, MValue{mv::Cons{h, tl}}, rest};
            },
            [&](const frame::AddLeft<EnvCode>& a) { return eval_with(a.rhs, F{frame::AddRight<MValue>{v}}); },
            [&](const frame::AddRight<MValue>& a) -> EConfig {
                auto l = expect_int(a.lhs, StuckKind::AddNonInteger);
                auto r = expect_int(v, StuckKind::AddNonInteger);
                return ECont{1, int_value(wrap_add(l, r)), rest};
            },
            [&](const frame::GtLeft<EnvCode>& a) { return eval_with(a.rhs, F{frame::GtRight<MValue>{v}}); },
            [&](const frame::GtRight<MValue>& a) -> EConfig {
                auto l = expect_int(a.lhs, StuckKind::GtNonInteger);
                auto r = expect_int(v, StuckKind::GtNonInteger);
                return ECont{1, int_value(l > r ? 1 : 0), rest};
            },
            [&](const frame::If0<EnvCode>& a) -> EConfig {
                const EnvCode& b = expect_int(v, StuckKind::If0NonInteger) == 0 ? a.zero_branch : a.other_branch;
                return EEval{b.term, b.env, rest};
            },
            [&](const frame::LCase<EnvCode>& a) -> EConfig {
                if (std::holds_alternative<mv::Nil>(v.v)) return EEval{a.nil_branch.term, a.nil_branch.env, rest};
                if (const auto* cell = std::get_if<mv::Cons>(&v.v)) {
                    Env env = extend(extend(a.cons_branch.env, a.head, *cell->head), a.tail, *cell->tail);
                    return EEval{a.cons_branch.term, env, rest};
                }
                stuck(StuckKind::LCaseNonList, "scrutinee " + show(v));
            },
            [&](const frame::Let<EnvCode>& a) -> EConfig {
                return EEval{a.body.term, extend(a.body.env, a.name, v), rest};
            },
        },
        top.kind);
}

}  // namespace

const MValue* lookup(const Env& env, const Name& x) {
    for (const auto& b : env)
        if (b.name == x) return &b.value;
    return nullptr;
}

EConfig env_initial(const Term& program, int n) {
    return EEval{program, Env{}, EnvTower::empty(static_cast<std::size_t>(n) + 1)};
}

bool env_is_final_ready(const EConfig& c, int n) {
    const auto* k = std::get_if<ECont>(&c);
    return k != nullptr && k->level == static_cast<std::size_t>(n) + 1 && k->tower.stack(k->level).empty();
}

EStepResult step_env(const EConfig& c, int n) {
    try {
        return std::visit(
            Overload{
                [&](const EEval& e) -> EStepResult { return step_eval(e); },
                [&](const ECont& k) -> EStepResult {
                    if (k.level == 1) return step_cont1(k);
                    if (!k.tower.stack(k.level).empty())
                        return EConfig{ECont{1, k.value, k.tower.pop_level(k.level)}};
                    if (k.level == static_cast<std::size_t>(n) + 1) return EConfig{EFinal{k.value}};
                    return EConfig{ECont{k.level + 1, k.value, k.tower}};
                },
                [&](const EFinal&) -> EStepResult { throw std::logic_error("step from a final configuration"); },
            },
            c);
    } catch (const StuckSignal& s) {
        return s.info;
    }
}

Outcome ERunResult::outcome() const {
    switch (kind) {
        case OutcomeKind::Value: {
            std::optional<std::int64_t> m;
            if (const auto* i = std::get_if<mv::Int>(&value->v)) m = i->value;
            return value_outcome(observe(*value), m, steps);
        }
        case OutcomeKind::Stuck: return stuck_outcome(*stuck, steps);
        case OutcomeKind::Timeout: break;
    }
    return timeout_outcome(steps);
}

ERunResult run_env(const Term& program, int n, std::uint64_t fuel, const EObserver& observer, bool check_shapes) {
    require_level(program, n);
    EConfig c = env_initial(program, n);
    std::uint64_t k = 0;
    if (observer) observer(0, c);
    ERunResult out;
    for (;;) {
        if (env_is_final_ready(c, n)) {
            const auto& cont = std::get<ECont>(c);
            if (observer) observer(k + 1, EFinal{cont.value});
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
        auto r = step_env(c, n);
        if (auto* s = std::get_if<StuckInfo>(&r)) {
            out.kind = OutcomeKind::Stuck;
            out.stuck = std::move(*s);
            out.steps = k;
            return out;
        }
        c = std::move(std::get<EConfig>(r));
        ++k;
        if (check_shapes) {
            const EnvTower* t = nullptr;
            if (const auto* e = std::get_if<EEval>(&c)) t = &e->tower;
            if (const auto* e = std::get_if<ECont>(&c)) t = &e->tower;
            if (t != nullptr && !top_entries_well_shaped(*t))
                throw std::logic_error("ill-shaped stack entry at step " + std::to_string(k));
        }
        if (observer) observer(k, c);
    }
}

// ---------------------------------------------------------------------------
// Realize
// ---------------------------------------------------------------------------

Term Realizer::close(const Term& t, const Env& env, std::initializer_list<const Name*> bound) {
    Key key{t.id(), env.id(), static_cast<int>(bound.size())};
    if (auto it = codes_.find(key); it != codes_.end()) return it->second.result;
    Term out = t;
    for (const Name& x : free_vars(t)) {
        bool skip = false;
        for (const Name* b : bound)
            if (*b == x) skip = true;
        if (skip) continue;
        const MValue* v = lookup(env, x);
        if (v == nullptr) throw std::logic_error("realize: unbound variable " + x);
        out = substitute(out, x, value(*v));
    }
    codes_.emplace(key, CodeEntry{t, env, out});
    return out;
}

Term Realizer::value(const MValue& v) {
    return std::visit(Overload{
                          [&](const mv::Int& a) { return mk::lit(a.value); },
                          [&](const mv::Closure& a) { return close(a.lam, a.env); },
                          [&](const mv::FixClosure& a) { return close(a.fix, a.env); },
                          [&](const mv::Nil&) { return mk::nil(); },
                          [&](const mv::Cons& a) { return mk::cons(value(*a.head), value(*a.tail)); },
                          [&](const mv::Captured& a) {
                              if (auto it = captured_.find(a.tower.get()); it != captured_.end())
                                  return it->second.second;
                              Term out = mk::captured(tower(*a.tower));
                              captured_.emplace(a.tower.get(), std::make_pair(a.tower, out));
                              return out;
                          },
                      },
                      v.v);
}

SubstFrame Realizer::frame(const EnvFrame& f) {
    auto c = [&](const EnvCode& code) { return close(code.term, code.env); };
    return std::visit(
        Overload{
            [&](const frame::Arg<EnvCode>& a) { return SubstFrame{frame::Arg<Term>{c(a.arg)}}; },
            [&](const frame::Succ&) { return SubstFrame{frame::Succ{}}; },
            [&](const frame::Fun<MValue>& a) { return SubstFrame{frame::Fun<Term>{value(a.fn)}}; },
            [&](const frame::ConsHead<EnvCode>& a) { return SubstFrame{frame::ConsHead<Term>{c(a.tail)}}; },
            [&](const frame::ConsTail<MValue>& a) { return SubstFrame{frame::ConsTail<Term>{value(a.head)}}; },
            [&](const frame::AddLeft<EnvCode>& a) { return SubstFrame{frame::AddLeft<Term>{c(a.rhs)}}; },
            [&](const frame::AddRight<MValue>& a) { return SubstFrame{frame::AddRight<Term>{value(a.lhs)}}; },
            [&](const frame::GtLeft<EnvCode>& a) { return SubstFrame{frame::GtLeft<Term>{c(a.rhs)}}; },
            [&](const frame::GtRight<MValue>& a) { return SubstFrame{frame::GtRight<Term>{value(a.lhs)}}; },
            [&](const frame::If0<EnvCode>& a) {
                return SubstFrame{frame::If0<Term>{c(a.zero_branch), c(a.other_branch)}};
            },
            [&](const frame::LCase<EnvCode>& a) {
                Term cb = close(a.cons_branch.term, a.cons_branch.env, {&a.head, &a.tail});
                return SubstFrame{frame::LCase<Term>{c(a.nil_branch), a.head, a.tail, cb}};
            },
            [&](const frame::Let<EnvCode>& a) {
                return SubstFrame{frame::Let<Term>{a.name, close(a.body.term, a.body.env, {&a.name})}};
            },
        },
        f.kind);
}

PList<SubstFrame> Realizer::frames(const PList<EnvFrame>& fs) {
    // Realize the uncached prefix, then rebuild it on top of the cached tail.
    std::vector<PList<EnvFrame>> pending;
    PList<SubstFrame> base;
    for (PList<EnvFrame> cur = fs;; cur = cur.tail()) {
        if (cur.empty()) break;
        if (auto it = frame_lists_.find(cur.id()); it != frame_lists_.end()) {
            base = it->second.second;
            break;
        }
        pending.push_back(cur);
    }
    for (auto it = pending.rbegin(); it != pending.rend(); ++it) {
        base = base.push(frame(it->head()));
        frame_lists_.emplace(it->id(), std::make_pair(*it, base));
    }
    return base;
}

PList<SubstTower> Realizer::stack(const PList<EnvTower>& s) {
    std::vector<PList<EnvTower>> pending;
    PList<SubstTower> base;
    for (PList<EnvTower> cur = s;; cur = cur.tail()) {
        if (cur.empty()) break;
        if (auto it = stacks_.find(cur.id()); it != stacks_.end()) {
            base = it->second.second;
            break;
        }
        pending.push_back(cur);
    }
    for (auto it = pending.rbegin(); it != pending.rend(); ++it) {
        base = base.push(tower(it->head()));
        stacks_.emplace(it->id(), std::make_pair(*it, base));
    }
    return base;
}

SubstTower Realizer::tower(const EnvTower& t) {
    SubstTower out;
    out.frames = frames(t.frames);
    for (const auto& s : t.stacks) out.stacks.push_back(stack(s));
    return out;
}

SConfig Realizer::config(const EConfig& c) {
    return std::visit(Overload{
                          [&](const EEval& e) -> SConfig { return SEval{close(e.term, e.env), tower(e.tower)}; },
                          [&](const ECont& e) -> SConfig { return SCont{e.level, value(e.value), tower(e.tower)}; },
                          [&](const EFinal& e) -> SConfig { return SFinal{value(e.value)}; },
                      },
                      c);
}

Term realize(const MValue& v) { return Realizer().value(v); }

SConfig realize(const EConfig& c) { return Realizer().config(c); }

std::string observe(const MValue& v) { return observe(realize(v)); }

std::string trace_line(std::uint64_t k, const EConfig& c) { return trace_line(k, realize(c)); }

}  // namespace cpsh

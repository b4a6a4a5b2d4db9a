#include "cpsh/eval_cps.hpp"

#include "cpsh/overload.hpp"

namespace cpsh {

namespace {

using Ctx = std::shared_ptr<CpsContext>;

[[noreturn]] void stuck(StuckKind kind, std::string detail) { throw StuckSignal{{kind, std::move(detail)}}; }

Cont cont(std::function<Bounce(const HostValue&, const ContSeq&)> f) {
    return std::make_shared<const ContFn>(ContFn{std::move(f)});
}

/// One thunk: invoking k with v and the outer continuations.
Bounce invoke(const Cont& k, HostValue v, ContSeq rest) {
    return Bounce{[k, v = std::move(v), rest = std::move(rest)]() { return k->fn(v, rest); }, std::nullopt};
}

ContSeq slice(const ContSeq& ks, std::size_t from, std::size_t to) {
    return ContSeq(ks.begin() + static_cast<std::ptrdiff_t>(from), ks.begin() + static_cast<std::ptrdiff_t>(to));
}

ContSeq tail(const ContSeq& ks) { return slice(ks, 1, ks.size()); }

ContSeq with_head(Cont k1, const ContSeq& rest) {
    ContSeq out;
    out.reserve(rest.size() + 1);
    out.push_back(std::move(k1));
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
}

void append_to(ContSeq& out, const ContSeq& more) { out.insert(out.end(), more.begin(), more.end()); }

HostEnv extend(const HostEnv& e, const Name& x, HostValue v) { return e.push(HostBinding{x, std::move(v)}); }

HostValue int_value(std::int64_t m) { return HostValue{hv::Int{m}}; }

std::int64_t expect_int(const HostValue& v, StuckKind kind) {
    if (const auto* m = std::get_if<hv::Int>(&v.v)) return m->value;
    stuck(kind, "operand " + observe(v));
}

bool value_shaped(const Term& t) {
    const auto& v = t.node().v;
    if (std::holds_alternative<term::Lit>(v) || std::holds_alternative<term::Var>(v) ||
        std::holds_alternative<term::Lam>(v) || std::holds_alternative<term::Fix>(v) ||
        std::holds_alternative<term::Nil>(v))
        return true;
    if (const auto* c = std::get_if<term::Cons>(&v)) return value_shaped(c->head) && value_shaped(c->tail);
    return false;
}

HostValue make_fix(const Ctx& ctx, const Term& fix, const HostEnv& env);

HostValue immediate(const Ctx& ctx, const Term& t, const HostEnv& e) {
    return std::visit(
        Overload{
            [&](const term::Lit& a) { return int_value(a.value); },
            [&](const term::Var& a) {
                for (const auto& b : e)
                    if (b.name == a.name) return b.value;
                stuck(StuckKind::FreeVariable, "unbound " + a.name);
            },
            [&](const term::Lam& a) {
                auto f = std::make_shared<const FunFn>(
                    [ctx, x = a.param, body = a.body, e](const HostValue& v, const ContSeq& ks) {
                        return eval_cps(ctx, body, extend(e, x, v), ks);
                    });
                return HostValue{hv::Fun{f}};
            },
            [&](const term::Fix&) { return make_fix(ctx, t, e); },
            [&](const term::Nil&) { return HostValue{hv::Nil{}}; },
            [&](const term::Cons& a) {
                auto h = std::make_shared<const HostValue>(immediate(ctx, a.head, e));
                auto tl = std::make_shared<const HostValue>(immediate(ctx, a.tail, e));
                return HostValue{hv::Pair{h, tl}};
            },
            [&](const auto&) -> HostValue { throw std::logic_error("not value-shaped"); },
        },
        t.node().v);
}

// The recursive function value is rebuilt on every call instead of tying a
// knot, so no reference cycle is ever created.
HostValue make_fix(const Ctx& ctx, const Term& fix, const HostEnv& env) {
    auto f = std::make_shared<const FunFn>([ctx, fix, env](const HostValue& v, const ContSeq& ks) {
        const auto& fx = *fix.as<term::Fix>();
        HostEnv e = extend(extend(env, fx.self, make_fix(ctx, fix, env)), fx.param, v);
        return eval_cps(ctx, fx.body, e, ks);
    });
    return HostValue{hv::Fun{f}};
}

/// v0 applied to v1 with continuations ks: calling a function is not a step
/// of its own.
Bounce apply(const HostValue& v0, const HostValue& v1, const ContSeq& ks) {
    if (const auto* f = std::get_if<hv::Fun>(&v0.v)) return (*f->fn)(v1, ks);
    stuck(StuckKind::ApplyNonFunction, "applying " + observe(v0));
}

Bounce eval_body(const Ctx& ctx, const Term& t, const HostEnv& e, const ContSeq& ks) {
    for (std::size_t j = 1; j < ks.size(); ++j)
        if (ks[j] != ctx->thetas[j]) ctx->meta_untouched = false;
    const Cont& k1 = ks[0];
    if (value_shaped(t)) return invoke(k1, immediate(ctx, t, e), tail(ks));
    // The continuation for a subterm, with k_2.. of the current call passed through.
    auto sub = [&](const Term& s, std::function<Bounce(const HostValue&, const ContSeq&)> f) {
        return eval_cps(ctx, s, e, with_head(cont(std::move(f)), tail(ks)));
    };
    return std::visit(
        Overload{
            [&](const term::App& a) {
                return sub(a.fn, [ctx, arg = a.arg, e, k1](const HostValue& v0, const ContSeq& r) {
                    return eval_cps(ctx, arg, e, with_head(cont([v0, k1](const HostValue& v1, const ContSeq& r2) {
                                                               return apply(v0, v1, with_head(k1, r2));
                                                           }),
                                                           r));
                });
            },
            [&](const term::Succ& a) {
                return sub(a.arg, [k1](const HostValue& v, const ContSeq& r) {
                    return invoke(k1, int_value(wrap_add(expect_int(v, StuckKind::SuccNonInteger), 1)), r);
                });
            },
            [&](const term::Cons& a) {
                return sub(a.head, [ctx, tl = a.tail, e, k1](const HostValue& vh, const ContSeq& r) {
                    return eval_cps(ctx, tl, e, with_head(cont([vh, k1](const HostValue& vt, const ContSeq& r2) {
                                                              auto h = std::make_shared<const HostValue>(vh);
                                                              auto t2 = std::make_shared<const HostValue>(vt);
                                                              return invoke(k1, HostValue{hv::Pair{h, t2}}, r2);
                                                          }),
                                                          r));
                });
            },
            [&](const term::Add& a) {
                return sub(a.lhs, [ctx, rhs = a.rhs, e, k1](const HostValue& vl, const ContSeq& r) {
                    return eval_cps(ctx, rhs, e, with_head(cont([vl, k1](const HostValue& vr, const ContSeq& r2) {
                                                               auto l = expect_int(vl, StuckKind::AddNonInteger);
                                                               auto m = expect_int(vr, StuckKind::AddNonInteger);
                                                               return invoke(k1, int_value(wrap_add(l, m)), r2);
                                                           }),
                                                           r));
                });
            },
            [&](const term::Gt& a) {
                return sub(a.lhs, [ctx, rhs = a.rhs, e, k1](const HostValue& vl, const ContSeq& r) {
                    return eval_cps(ctx, rhs, e, with_head(cont([vl, k1](const HostValue& vr, const ContSeq& r2) {
                                                               auto l = expect_int(vl, StuckKind::GtNonInteger);
                                                               auto m = expect_int(vr, StuckKind::GtNonInteger);
                                                               return invoke(k1, int_value(l > m ? 1 : 0), r2);
                                                           }),
                                                           r));
                });
            },
            [&](const term::If0& a) {
                return sub(a.cond, [ctx, z = a.zero_branch, o = a.other_branch, e, k1](const HostValue& v,
                                                                                         const ContSeq& r) {
                    const Term& b = expect_int(v, StuckKind::If0NonInteger) == 0 ? z : o;
                    return eval_cps(ctx, b, e, with_head(k1, r));
                });
            },
            [&](const term::LCase& a) {
                return sub(a.scrutinee, [ctx, a, e, k1](const HostValue& v, const ContSeq& r) {
                    if (std::holds_alternative<hv::Nil>(v.v)) return eval_cps(ctx, a.nil_branch, e, with_head(k1, r));
                    if (const auto* p = std::get_if<hv::Pair>(&v.v)) {
                        HostEnv e2 = extend(extend(e, a.head, *p->head), a.tail, *p->tail);
                        return eval_cps(ctx, a.cons_branch, e2, with_head(k1, r));
                    }
                    stuck(StuckKind::LCaseNonList, "scrutinee " + observe(v));
                });
            },
            [&](const term::Let& a) {
                return sub(a.bound, [ctx, x = a.name, body = a.body, e, k1](const HostValue& v, const ContSeq& r) {
                    return eval_cps(ctx, body, extend(e, x, v), with_head(k1, r));
                });
            },
            [&](const term::Reset& a) {
                // eval(t, e, θ_1..θ_i, k'_{i+1}, k_{i+2}..) where
                // k'_{i+1}(v, k''_{i+2}..) = k_1(v, k_2..k_{i+1}, k''_{i+2}..).
                const auto i = static_cast<std::size_t>(a.level);
                ContSeq saved = slice(ks, 1, i + 1);
                Cont k_next = cont([k1, saved](const HostValue& v, const ContSeq& r) {
                    ContSeq rest = saved;
                    append_to(rest, r);
                    return invoke(k1, v, std::move(rest));
                });
                ContSeq inner = slice(ctx->thetas, 0, i);
                inner.push_back(k_next);
                append_to(inner, slice(ks, i + 1, ks.size()));
                return eval_cps(ctx, a.body, e, inner);
            },
            [&](const term::Shift& a) {
                // c_i(v, k'_1..k'_{n+1}) = k_1(v, k_2..k_i,
                //   λ(v', k''_{i+2}..). k'_1(v', k'_2..k'_{i+1}, k''_{i+2}..), k'_{i+2}..)
                const auto i = static_cast<std::size_t>(a.level);
                ContSeq captured = slice(ks, 0, i);
                auto c = std::make_shared<const FunFn>([captured, i](const HostValue& v, const ContSeq& kp) {
                    ContSeq saved = slice(kp, 1, i + 1);
                    Cont kp1 = kp[0];
                    Cont resume = cont([kp1, saved](const HostValue& v2, const ContSeq& r) {
                        ContSeq rest = saved;
                        append_to(rest, r);
                        return invoke(kp1, v2, std::move(rest));
                    });
                    ContSeq rest = slice(captured, 1, i);
                    rest.push_back(resume);
                    append_to(rest, slice(kp, i + 1, kp.size()));
                    return invoke(captured[0], v, std::move(rest));
                });
                ContSeq inner = slice(ctx->thetas, 0, i);
                append_to(inner, slice(ks, i, ks.size()));
                return eval_cps(ctx, a.body, extend(e, a.k, HostValue{hv::Fun{c}}), inner);
            },
            [&](const term::Captured&) -> Bounce {
                throw std::logic_error("captured context in evaluator input");
            },
            [&](const auto&) -> Bounce { throw std::logic_error("value form reached eval dispatch"); },
        },
        t.node().v);
}

}  // namespace

Bounce eval_cps(const std::shared_ptr<CpsContext>& ctx, const Term& t, const HostEnv& e, const ContSeq& ks) {
    return Bounce{[ctx, t, e, ks]() { return eval_body(ctx, t, e, ks); }, std::nullopt};
}

ContSeq initial_continuations(int n) {
    ContSeq thetas;
    for (int i = 1; i <= n; ++i)
        thetas.push_back(cont([](const HostValue& v, const ContSeq& r) { return invoke(r[0], v, tail(r)); }));
    thetas.push_back(cont([](const HostValue& v, const ContSeq&) { return Bounce{{}, v}; }));
    return thetas;
}

Outcome CRunResult::outcome() const {
    switch (kind) {
        case OutcomeKind::Value: {
            std::optional<std::int64_t> m;
            if (const auto* i = std::get_if<hv::Int>(&value->v)) m = i->value;
            return value_outcome(observe(*value), m, steps);
        }
        case OutcomeKind::Stuck: return stuck_outcome(*stuck, steps);
        case OutcomeKind::Timeout: break;
    }
    return timeout_outcome(steps);
}

CRunResult run_cps(const Term& program, int n, std::uint64_t fuel) {
    require_level(program, n);
    auto ctx = std::make_shared<CpsContext>();
    ctx->n = n;
    ctx->thetas = initial_continuations(n);
    CRunResult out;
    Bounce b = eval_cps(ctx, program, HostEnv{}, ctx->thetas);
    // Thunk c corresponds to machine configuration c; the thunk that yields
    // the answer is the configuration whose transition is the final unloading.
    std::uint64_t c = 0;
    for (;;) {
        Bounce next;
        try {
            next = b.next();
        } catch (const StuckSignal& s) {
            out.kind = c < fuel ? OutcomeKind::Stuck : OutcomeKind::Timeout;
            if (c < fuel) out.stuck = s.info;
            out.steps = c;
            break;
        }
        if (next.done) {
            out.kind = OutcomeKind::Value;
            out.value = std::move(next.done);
            out.steps = c;
            break;
        }
        if (c == fuel) {
            out.kind = OutcomeKind::Timeout;
            out.steps = c;
            break;
        }
        ++c;
        b = std::move(next);
    }
    out.meta_untouched = ctx->meta_untouched;
    return out;
}

namespace {
void observe_to(std::string& out, const HostValue& v) {
    std::visit(Overload{
                   [&](const hv::Int& a) { out += std::to_string(a.value); },
                   [&](const hv::Fun&) { out += "<fun>"; },
                   [&](const hv::Nil&) { out += "[]"; },
                   [&](const hv::Pair&) {
                       std::vector<const HostValue*> items;
                       const HostValue* cur = &v;
                       while (const auto* p = std::get_if<hv::Pair>(&cur->v)) {
                           items.push_back(p->head.get());
                           cur = p->tail.get();
                       }
                       bool proper = std::holds_alternative<hv::Nil>(cur->v);
                       out += proper ? "[" : "(";
                       for (std::size_t i = 0; i < items.size(); ++i) {
                           if (i) out += ", ";
                           observe_to(out, *items[i]);
                       }
                       if (!proper) {
                           out += " . ";
                           observe_to(out, *cur);
                       }
                       out += proper ? "]" : ")";
                   },
               },
               v.v);
}
}  // namespace

std::string observe(const HostValue& v) {
    std::string out;
    observe_to(out, v);
    return out;
}

}  // namespace cpsh

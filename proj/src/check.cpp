#include "cpsh/check.hpp"

#include <omp.h>

#include <sstream>

#include "cpsh/eval_cps.hpp"
#include "cpsh/overload.hpp"
#include "cpsh/redsem.hpp"

namespace cpsh::check {

bool config_equal(const SConfig& a, const SConfig& b) {
    if (a.index() != b.index()) return false;
    return std::visit(Overload{
                          [&](const SEval& x) {
                              const auto& y = std::get<SEval>(b);
                              return x.term == y.term && x.tower == y.tower;
                          },
                          [&](const SCont& x) {
                              const auto& y = std::get<SCont>(b);
                              return x.level == y.level && x.value == y.value && x.tower == y.tower;
                          },
                          [&](const SFinal& x) { return x.value == std::get<SFinal>(b).value; },
                      },
                      a);
}

LockstepReport lockstep(const Term& program, int n, std::uint64_t fuel, const SubstStepper& subst_step) {
    require_level(program, n);
    LockstepReport rep;
    EConfig ec = env_initial(program, n);
    SConfig sc = subst_initial(program, n);
    Realizer realizer;
    std::uint64_t k = 0;

    auto diverge = [&](std::uint64_t at) {
        rep.ok = false;
        rep.divergence_step = at;
        rep.env_config = trace_line(at, ec);
        rep.subst_config = trace_line(at, sc);
    };
    auto step_s = [&](const SConfig& c) { return subst_step ? subst_step(c, n) : step_subst(c, n); };

    for (;;) {
        if (!config_equal(realizer.config(ec), sc)) {
            diverge(k);
            break;
        }
        const bool ef = env_is_final_ready(ec, n);
        const bool sf = subst_is_final_ready(sc, n);
        if (ef != sf) {
            diverge(k);
            break;
        }
        if (ef) {
            auto er = step_env(ec, n);
            auto sr = step_s(sc);
            const auto* ecf = std::get_if<EConfig>(&er);
            const auto* scf = std::get_if<SConfig>(&sr);
            if (ecf == nullptr || scf == nullptr || !std::holds_alternative<EFinal>(*ecf) ||
                !std::holds_alternative<SFinal>(*scf)) {
                diverge(k);
                break;
            }
            ERunResult e{OutcomeKind::Value, std::get<EFinal>(*ecf).value, std::nullopt, k};
            SRunResult s{OutcomeKind::Value, std::get<SFinal>(*scf).value, std::nullopt, k};
            rep.env = e.outcome();
            rep.subst = s.outcome();
            rep.steps = k;
            if (!(realizer.value(*e.value) == *s.value)) diverge(k + 1);
            return rep;
        }
        if (k == fuel) {
            rep.env = timeout_outcome(k);
            rep.subst = timeout_outcome(k);
            rep.steps = k;
            return rep;
        }
        auto er = step_env(ec, n);
        auto sr = step_s(sc);
        const auto* est = std::get_if<StuckInfo>(&er);
        const auto* sst = std::get_if<StuckInfo>(&sr);
        if (est != nullptr || sst != nullptr) {
            if (est != nullptr) rep.env = stuck_outcome(*est, k);
            if (sst != nullptr) rep.subst = stuck_outcome(*sst, k);
            rep.steps = k;
            if (est == nullptr || sst == nullptr || est->kind != sst->kind) diverge(k);
            return rep;
        }
        ec = std::get<EConfig>(er);
        sc = std::get<SConfig>(sr);
        ++k;
    }
    // Divergence: finish each machine on its own for the outcome fields.
    rep.steps = k;
    rep.env = run_env(program, n, fuel).outcome();
    SConfig c = subst_initial(program, n);
    for (std::uint64_t j = 0;; ++j) {
        if (subst_is_final_ready(c, n)) {
            auto r = step_s(c);
            if (const auto* f = std::get_if<SConfig>(&r); f != nullptr && std::holds_alternative<SFinal>(*f))
                rep.subst = SRunResult{OutcomeKind::Value, std::get<SFinal>(*f).value, std::nullopt, j}.outcome();
            else
                rep.subst = timeout_outcome(j);
            break;
        }
        if (j == fuel) {
            rep.subst = timeout_outcome(j);
            break;
        }
        auto r = step_s(c);
        if (const auto* st = std::get_if<StuckInfo>(&r)) {
            rep.subst = stuck_outcome(*st, j);
            break;
        }
        c = std::get<SConfig>(r);
    }
    return rep;
}

std::string CompareReport::describe() const {
    std::ostringstream out;
    auto line = [&](const char* name, const Outcome& o) {
        out << name << ": " << cpsh::describe(o) << " (" << o.steps << " steps)\n";
    };
    line("cps", cps);
    line("env", env);
    line("subst", subst);
    line("redsem", redsem);
    out << "refocus checks: " << refocus_checks << ", violations: " << refocus_violations << "\n";
    if (ok()) {
        out << "agree\n";
        return out.str();
    }
    out << "DISAGREE:";
    if (!outcomes_agree) out << " outcomes";
    if (!steps_agree) out << " step-counts";
    if (!lock.ok) out << " lock-step";
    if (refocus_violations != 0) out << " refocus";
    out << "\n";
    if (lock.divergence_step) {
        out << "first divergence at step " << *lock.divergence_step << "\n";
        out << "  env:   " << lock.env_config << "\n";
        out << "  subst: " << lock.subst_config << "\n";
    }
    return out.str();
}

CompareReport compare(const Term& program, int n, std::uint64_t fuel, const SubstStepper& subst_step) {
    CompareReport r;
    r.cps = run_cps(program, n, fuel).outcome();
    r.lock = lockstep(program, n, fuel, subst_step);
    r.env = r.lock.env;
    r.subst = r.lock.subst;
    ReductionOptions opts;
    opts.check_refocus = true;
    auto red = evaluate_by_reduction(program, n, fuel, opts);
    r.redsem = red.outcome();
    r.refocus_checks = red.refocus_checks;
    r.refocus_violations = red.refocus_violations;
    r.outcomes_agree = same_observable(r.cps, r.env) && same_observable(r.env, r.subst) &&
                       same_observable(r.subst, r.redsem);
    r.steps_agree = r.cps.steps == r.env.steps && r.env.steps == r.subst.steps && r.subst.steps == r.redsem.steps;
    return r;
}

namespace {

Summary summarize_program(const Term& p, int n, std::uint64_t fuel) {
    try {
        return summarize(compare(p, n, fuel));
    } catch (const std::exception& e) {
        Summary s;
        s.cps.detail = e.what();
        return s;
    }
}

bool outcome_equal(const Outcome& a, const Outcome& b) {
    return a.kind == b.kind && a.observable == b.observable && a.integer == b.integer && a.stuck == b.stuck &&
           a.steps == b.steps;
}

}  // namespace

bool Summary::operator==(const Summary& o) const {
    return outcome_equal(cps, o.cps) && outcome_equal(env, o.env) && outcome_equal(subst, o.subst) &&
           outcome_equal(redsem, o.redsem) && ok == o.ok && lock_steps == o.lock_steps &&
           refocus_violations == o.refocus_violations;
}

Summary summarize(const CompareReport& r) {
    return Summary{r.cps, r.env, r.subst, r.redsem, r.ok(), r.lock.steps, r.refocus_violations};
}

std::vector<Summary> run_batch_serial(const std::vector<Term>& programs, int n, std::uint64_t fuel) {
    std::vector<Summary> out;
    out.reserve(programs.size());
    for (const auto& p : programs) out.push_back(summarize_program(p, n, fuel));
    return out;
}

std::vector<Summary> run_batch_parallel(const std::vector<Term>& programs, int n, std::uint64_t fuel,
                                        int threads) {
    std::vector<Summary> out(programs.size());
    const auto count = static_cast<std::int64_t>(programs.size());
    if (threads <= 0) threads = omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::int64_t i = 0; i < count; ++i) {
        const auto j = static_cast<std::size_t>(i);
        out[j] = summarize_program(programs[j], n, fuel);
    }
    return out;
}

}  // namespace cpsh::check

#include "support.hpp"

#include <functional>

#include "cpsh/corpus.hpp"
#include "cpsh/redsem.hpp"

namespace cpsh::testing {

bool oracle_is_value(const Term& t) {
    if (t.is<term::Lit>() || t.is<term::Lam>() || t.is<term::Fix>() || t.is<term::Nil>() ||
        t.is<term::Captured>())
        return true;
    if (const auto* c = t.as<term::Cons>()) return oracle_is_value(c->head) && oracle_is_value(c->tail);
    return false;
}

namespace {

// Children of t in evaluation position, left to right: (index, subterm).
// A later child only counts once every earlier one is a value.
std::vector<std::pair<int, Term>> eval_children(const Term& t) {
    if (const auto* a = t.as<term::App>()) return {{0, a->fn}, {1, a->arg}};
    if (const auto* a = t.as<term::Succ>()) return {{0, a->arg}};
    if (const auto* a = t.as<term::Reset>()) return {{0, a->body}};
    if (const auto* a = t.as<term::Cons>()) return {{0, a->head}, {1, a->tail}};
    if (const auto* a = t.as<term::Add>()) return {{0, a->lhs}, {1, a->rhs}};
    if (const auto* a = t.as<term::Gt>()) return {{0, a->lhs}, {1, a->rhs}};
    if (const auto* a = t.as<term::If0>()) return {{0, a->cond}};
    if (const auto* a = t.as<term::LCase>()) return {{0, a->scrutinee}};
    if (const auto* a = t.as<term::Let>()) return {{0, a->bound}};
    return {};
}

// All immediate subterms, evaluated or not.
std::vector<Term> all_children(const Term& t) {
    if (const auto* a = t.as<term::Lam>()) return {a->body};
    if (const auto* a = t.as<term::Shift>()) return {a->body};
    if (const auto* a = t.as<term::Fix>()) return {a->body};
    if (const auto* a = t.as<term::LCase>()) return {a->scrutinee, a->nil_branch, a->cons_branch};
    if (const auto* a = t.as<term::If0>()) return {a->cond, a->zero_branch, a->other_branch};
    if (const auto* a = t.as<term::Let>()) return {a->bound, a->body};
    std::vector<Term> out;
    for (auto& [i, c] : eval_children(t)) out.push_back(c);
    return out;
}

bool is_eval_position(const Term& parent, int child) {
    auto kids = eval_children(parent);
    for (const auto& [i, c] : kids) {
        if (i == child) return true;
        if (!oracle_is_value(c)) return false;
    }
    return false;
}

bool potential_redex(const Term& t) {
    if (oracle_is_value(t)) return false;
    for (const auto& [i, c] : eval_children(t))
        if (!oracle_is_value(c)) return false;
    return true;
}

}  // namespace

std::vector<Path> redex_sites(const Term& t) {
    std::vector<Path> out;
    // Walk the whole tree; `live` tracks whether the path so far consists of
    // evaluation positions only.
    std::function<void(const Term&, Path&, bool)> walk = [&](const Term& s, Path& p, bool live) {
        if (live && potential_redex(s)) out.push_back(p);
        auto kids = all_children(s);
        for (std::size_t i = 0; i < kids.size(); ++i) {
            p.push_back(static_cast<int>(i));
            walk(kids[i], p, live && is_eval_position(s, static_cast<int>(i)));
            p.pop_back();
        }
    };
    Path p;
    walk(t, p, true);
    return out;
}

Term subterm_at(const Term& t, const Path& p) {
    Term cur = t;
    for (int i : p) cur = all_children(cur).at(static_cast<std::size_t>(i));
    return cur;
}

Term replace_at(const Term& t, const Path& p, const Term& with) {
    if (p.empty()) return with;
    Path rest(p.begin() + 1, p.end());
    const int i = p.front();
    auto sub = [&](const Term& c) { return replace_at(c, rest, with); };
    if (const auto* a = t.as<term::Lam>()) return mk::lam(a->param, sub(a->body));
    if (const auto* a = t.as<term::Shift>()) return mk::shift(a->level, a->k, sub(a->body));
    if (const auto* a = t.as<term::Fix>()) return mk::fix(a->self, a->param, sub(a->body));
    if (const auto* a = t.as<term::App>()) return i == 0 ? mk::app(sub(a->fn), a->arg) : mk::app(a->fn, sub(a->arg));
    if (const auto* a = t.as<term::Succ>()) return mk::succ(sub(a->arg));
    if (const auto* a = t.as<term::Reset>()) return mk::reset(a->level, sub(a->body));
    if (const auto* a = t.as<term::Cons>())
        return i == 0 ? mk::cons(sub(a->head), a->tail) : mk::cons(a->head, sub(a->tail));
    if (const auto* a = t.as<term::Add>()) return i == 0 ? mk::add(sub(a->lhs), a->rhs) : mk::add(a->lhs, sub(a->rhs));
    if (const auto* a = t.as<term::Gt>()) return i == 0 ? mk::gt(sub(a->lhs), a->rhs) : mk::gt(a->lhs, sub(a->rhs));
    if (const auto* a = t.as<term::If0>()) {
        if (i == 0) return mk::if0(sub(a->cond), a->zero_branch, a->other_branch);
        if (i == 1) return mk::if0(a->cond, sub(a->zero_branch), a->other_branch);
        return mk::if0(a->cond, a->zero_branch, sub(a->other_branch));
    }
    if (const auto* a = t.as<term::LCase>()) {
        if (i == 0) return mk::lcase(sub(a->scrutinee), a->nil_branch, a->head, a->tail, a->cons_branch);
        if (i == 1) return mk::lcase(a->scrutinee, sub(a->nil_branch), a->head, a->tail, a->cons_branch);
        return mk::lcase(a->scrutinee, a->nil_branch, a->head, a->tail, sub(a->cons_branch));
    }
    if (const auto* a = t.as<term::Let>())
        return i == 0 ? mk::let(a->name, sub(a->bound), a->body) : mk::let(a->name, a->bound, sub(a->body));
    throw std::logic_error("replace_at: no such position");
}

Term random_reduct(gen::Rng& rng, int n) {
    gen::ProgramOptions opts;
    opts.level = n;
    Term program = gen::program(rng, opts);
    const auto stop = std::uniform_int_distribution<std::uint64_t>(0, 40)(rng);
    Term last = program;
    ReductionOptions ro;
    ro.observer = [&](std::uint64_t k, const Term& t) {
        if (k <= stop) last = t;
    };
    evaluate_by_reduction(program, n, 2000, ro);
    return last;
}

std::vector<Term> random_programs(std::uint64_t seed, int n, std::size_t count, bool apply_captured) {
    gen::Rng rng(seed);
    gen::ProgramOptions opts;
    opts.level = n;
    opts.apply_captured = apply_captured;
    std::vector<Term> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(gen::program(rng, opts));
    return out;
}

TraverseShape traverse_shape(int len, Control control) {
    corpus::IntList xs;
    for (int i = 1; i <= len; ++i) xs.push_back(i);
    Term prog = parse(corpus::traverse_source(xs));
    TraverseShape s;
    SObserver obs = [&](std::uint64_t, const SConfig& c) {
        const SubstTower* T = nullptr;
        if (const auto* e = std::get_if<SEval>(&c)) {
            T = &e->tower;
            if (const auto* a = e->term.as<term::App>())
                if (const auto* cap = a->fn.as<term::Captured>())
                    s.max_captured = std::max(s.max_captured, cap->tower->frames.size());
        }
        if (const auto* k = std::get_if<SCont>(&c)) T = &k->tower;
        if (T == nullptr) return;
        const std::size_t meta = T->stack(2).size();
        s.max_meta = std::max(s.max_meta, meta);
        s.max_c1 = std::max(s.max_c1, T->frames.size());
        if (s.max_meta > 0) s.max_meta_after_reset = std::max(s.max_meta_after_reset, meta);
    };
    auto r = control == Control::Static ? run_subst(prog, 1, 100000, obs) : run_dynamic(prog, 100000, obs);
    s.result = r.outcome().observable;
    return s;
}

bool static_shape_ok(const TraverseShape& s, int len) {
    return s.max_meta == static_cast<std::size_t>(len) + 1 && s.max_captured == 1;
}

bool dynamic_shape_ok(const TraverseShape& s, int len) {
    return s.max_meta_after_reset <= 1 && s.max_c1 >= static_cast<std::size_t>(len);
}

std::string corpus_dir() { return CPSH_CORPUS_DIR; }

}  // namespace cpsh::testing

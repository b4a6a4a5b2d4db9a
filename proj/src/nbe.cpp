#include "cpsh/nbe.hpp"

#include <functional>
#include <stdexcept>

#include "cpsh/sexpr.hpp"
#include "cpsh/syntax.hpp"

namespace cpsh::nbe {

Mon var(std::string name) {
    return std::make_shared<const MonTerm>(MonTerm{MonTerm::Kind::Var, 0, std::move(name), nullptr, nullptr});
}

Mon unit(int i) { return std::make_shared<const MonTerm>(MonTerm{MonTerm::Kind::Unit, i, {}, nullptr, nullptr}); }

Mon prod(int i, Mon a, Mon b) {
    return std::make_shared<const MonTerm>(MonTerm{MonTerm::Kind::Prod, i, {}, std::move(a), std::move(b)});
}

int max_index(const MonTerm& t) {
    switch (t.kind) {
        case MonTerm::Kind::Var: return 0;
        case MonTerm::Kind::Unit: return t.index;
        case MonTerm::Kind::Prod: return std::max({t.index, max_index(*t.lhs), max_index(*t.rhs)});
    }
    return 0;
}

namespace {

void collect_vars(const MonTerm& t, std::set<std::string>& out) {
    if (t.kind == MonTerm::Kind::Var) out.insert(t.name);
    if (t.kind == MonTerm::Kind::Prod) {
        collect_vars(*t.lhs, out);
        collect_vars(*t.rhs, out);
    }
}

}  // namespace

std::set<std::string> variables(const MonTerm& t) {
    std::set<std::string> out;
    collect_vars(t, out);
    return out;
}

bool nf_equal(const Nf& a, const Nf& b) {
    const NfTerm* x = a.get();
    const NfTerm* y = b.get();
    while (x != y) {
        if (x == nullptr || y == nullptr) return false;
        if (x->kind != y->kind || x->level != y->level) return false;
        if (x->kind == NfTerm::Kind::Var) return x->name == y->name;
        if (x->kind == NfTerm::Kind::Unit) return true;
        if (!nf_equal(x->lower, y->lower)) return false;
        x = x->rest.get();
        y = y->rest.get();
    }
    return true;
}

std::uint64_t nf_size(const Nf& u) {
    std::uint64_t n = 0;
    for (const NfTerm* x = u.get(); x != nullptr; x = x->rest.get()) {
        ++n;
        if (x->kind == NfTerm::Kind::Prod) n += nf_size(x->lower);
    }
    return n;
}

namespace {

using Transformer = std::function<Nf(const Nf&)>;

struct Builder {
    Stats* stats;

    Nf make(NfTerm node) const {
        if (stats != nullptr) ++stats->nodes;
        return std::make_shared<const NfTerm>(std::move(node));
    }
    Nf var(const std::string& x) const { return make(NfTerm{NfTerm::Kind::Var, 0, x, nullptr, nullptr}); }
    Nf unit(int i) const { return make(NfTerm{NfTerm::Kind::Unit, i, {}, nullptr, nullptr}); }
    Nf prod(int i, Nf lower, Nf rest) const {
        return make(NfTerm{NfTerm::Kind::Prod, i, {}, std::move(lower), std::move(rest)});
    }
};

Transformer identity() {
    return [](const Nf& t) { return t; };
}

Transformer compose(Transformer f, Transformer g) {
    return [f = std::move(f), g = std::move(g)](const Nf& t) { return f(g(t)); };
}

void require_indices(const Mon& t, int n) {
    if (t->kind == MonTerm::Kind::Var) return;
    if (t->index < 1 || t->index > n)
        throw std::invalid_argument("index " + std::to_string(t->index) + " outside 1.." + std::to_string(n));
    if (t->kind == MonTerm::Kind::Prod) {
        require_indices(t->lhs, n);
        require_indices(t->rhs, n);
    }
}

// Free monoid: values are transformers on level-1 normal forms.

Transformer eval_monoid(const Mon& t, const Builder& b) {
    switch (t->kind) {
        case MonTerm::Kind::Var: {
            Nf x = b.var(t->name);
            return [x, b](const Nf& rest) { return b.prod(1, x, rest); };
        }
        case MonTerm::Kind::Unit: return identity();
        case MonTerm::Kind::Prod: return compose(eval_monoid(t->lhs, b), eval_monoid(t->rhs, b));
    }
    throw std::logic_error("bad term");
}

// Propositions: a continuation receiving a conjunction transformer and the
// disjunction accumulator.

using DnfKont = std::function<Nf(const Transformer&, const Nf&)>;

Nf eval_dnf(const Mon& t, const DnfKont& k, const Nf& d, const Builder& b) {
    switch (t->kind) {
        case MonTerm::Kind::Var: {
            Nf x = b.var(t->name);
            return k([x, b](const Nf& c) { return b.prod(1, x, c); }, d);
        }
        case MonTerm::Kind::Unit:
            if (t->index == 1) return k(identity(), d);
            return d;
        case MonTerm::Kind::Prod:
            if (t->index == 1) {
                const Mon& rhs = t->rhs;
                return eval_dnf(
                    t->lhs,
                    [&rhs, &k, &b](const Transformer& t1, const Nf& d1) {
                        return eval_dnf(
                            rhs, [&t1, &k](const Transformer& t1p, const Nf& d2) { return k(compose(t1, t1p), d2); },
                            d1, b);
                    },
                    d, b);
            }
            return eval_dnf(t->lhs, k, eval_dnf(t->rhs, k, d, b), b);
    }
    throw std::logic_error("bad term");
}

// Level n: continuations k_1 .. k_{n-1}; k_i receives a level-i transformer,
// the continuations k_{i+1} .. k_{n-1} and the level-n accumulator.

struct HKont;
using HKontPtr = std::shared_ptr<const HKont>;
using HKonts = std::vector<HKontPtr>;

struct HKont {
    std::function<Nf(const Transformer&, const HKonts&, const Nf&)> fn;
};

HKontPtr hkont(std::function<Nf(const Transformer&, const HKonts&, const Nf&)> fn) {
    return std::make_shared<const HKont>(HKont{std::move(fn)});
}

HKonts drop(const HKonts& ks, std::size_t m) { return HKonts(ks.begin() + static_cast<std::ptrdiff_t>(m), ks.end()); }

// Hands a level-i transformer to k_i, or applies it to the accumulator when
// i is the top level.
Nf deliver(std::size_t i, const Transformer& tr, const HKonts& ks, const Nf& acc) {
    if (ks.size() < i) return tr(acc);
    return ks[i - 1]->fn(tr, drop(ks, i), acc);
}

Nf eval_hier(const Mon& t, const HKonts& ks, const Nf& acc, const Builder& b) {
    const std::size_t top = ks.size() + 1;
    switch (t->kind) {
        case MonTerm::Kind::Var: {
            Nf x = b.var(t->name);
            return deliver(1, [x, b](const Nf& rest) { return b.prod(1, x, rest); }, ks, acc);
        }
        case MonTerm::Kind::Unit: {
            auto i = static_cast<std::size_t>(t->index);
            if (i == top) return acc;
            return ks[i - 1]->fn(identity(), drop(ks, i), acc);
        }
        case MonTerm::Kind::Prod: {
            auto i = static_cast<std::size_t>(t->index);
            if (i == top) return eval_hier(t->lhs, ks, eval_hier(t->rhs, ks, acc, b), b);
            Mon rhs = t->rhs;
            HKontPtr ki = ks[i - 1];
            HKonts below(ks.begin(), ks.begin() + static_cast<std::ptrdiff_t>(i - 1));
            HKonts first = ks;
            first[i - 1] = hkont([rhs, ki, below, b](const Transformer& tr, const HKonts& rest, const Nf& acc1) {
                HKonts second = below;
                second.push_back(hkont([tr, ki](const Transformer& tr2, const HKonts& rest2, const Nf& acc2) {
                    return ki->fn(compose(tr, tr2), rest2, acc2);
                }));
                second.insert(second.end(), rest.begin(), rest.end());
                return eval_hier(rhs, second, acc1, b);
            });
            return eval_hier(t->lhs, first, acc, b);
        }
    }
    throw std::logic_error("bad term");
}

}  // namespace

Nf normalize_monoid(const Mon& t, Stats* stats) {
    require_indices(t, 1);
    Builder b{stats};
    return eval_monoid(t, b)(b.unit(1));
}

Nf normalize_dnf(const Mon& t, Stats* stats) {
    require_indices(t, 2);
    Builder b{stats};
    DnfKont k = [&b](const Transformer& t1, const Nf& d) { return b.prod(2, t1(b.unit(1)), d); };
    return eval_dnf(t, k, b.unit(2), b);
}

Nf normalize_hier(const Mon& t, int n, Stats* stats) {
    if (n < 1) throw std::invalid_argument("level must be >= 1");
    require_indices(t, n);
    Builder b{stats};
    HKonts ks;
    for (int i = 1; i < n; ++i) {
        ks.push_back(hkont([i, b](const Transformer& tr, const HKonts& rest, const Nf& acc) {
            Nf lower = tr(b.unit(i));
            return deliver(
                1, [lower, i, b](const Nf& t2) { return b.prod(i + 1, lower, t2); }, rest, acc);
        }));
    }
    return eval_hier(t, ks, b.unit(n), b);
}

Mon embed(const Nf& u) {
    switch (u->kind) {
        case NfTerm::Kind::Var: return var(u->name);
        case NfTerm::Kind::Unit: return unit(u->level);
        case NfTerm::Kind::Prod: return prod(u->level, embed(u->lower), embed(u->rest));
    }
    throw std::logic_error("bad normal form");
}

namespace {

bool check_level(const NfTerm* u, int i) {
    for (;;) {
        if (u == nullptr) return false;
        if (i == 0) return u->kind == NfTerm::Kind::Var && u->level == 0;
        if (u->level != i) return false;
        if (u->kind == NfTerm::Kind::Unit) return true;
        if (u->kind != NfTerm::Kind::Prod) return false;
        if (!check_level(u->lower.get(), i - 1)) return false;
        u = u->rest.get();
    }
}

void flatten_into(const MonTerm& t, std::vector<std::string>& out) {
    if (t.kind == MonTerm::Kind::Var) out.push_back(t.name);
    if (t.kind == MonTerm::Kind::Prod) {
        flatten_into(*t.lhs, out);
        flatten_into(*t.rhs, out);
    }
}

}  // namespace

bool grammar_check_nf(const Nf& u, int n) { return n >= 1 && check_level(u.get(), n); }

std::vector<std::string> oracle_flatten(const Mon& t) {
    std::vector<std::string> out;
    flatten_into(*t, out);
    return out;
}

std::optional<std::vector<std::string>> nf_flat_vars(const Nf& u) {
    if (!grammar_check_nf(u, 1)) return std::nullopt;
    std::vector<std::string> out;
    for (const NfTerm* x = u.get(); x->kind == NfTerm::Kind::Prod; x = x->rest.get()) out.push_back(x->lower->name);
    return out;
}

bool truth_value(const MonTerm& t, const std::map<std::string, bool>& env) {
    switch (t.kind) {
        case MonTerm::Kind::Var: return env.at(t.name);
        case MonTerm::Kind::Unit:
            if (t.index == 1) return true;
            if (t.index == 2) return false;
            break;
        case MonTerm::Kind::Prod:
            if (t.index == 1) return truth_value(*t.lhs, env) && truth_value(*t.rhs, env);
            if (t.index == 2) return truth_value(*t.lhs, env) || truth_value(*t.rhs, env);
            break;
    }
    throw std::invalid_argument("boolean reading needs indices 1 and 2");
}

bool oracle_truth_equiv(const Mon& t, const Nf& u, const std::set<std::string>& vars) {
    if (vars.size() > 16) throw std::invalid_argument("too many variables for a truth table");
    std::vector<std::string> names(vars.begin(), vars.end());
    Mon e = embed(u);
    for (std::uint32_t bits = 0; bits < (1U << names.size()); ++bits) {
        std::map<std::string, bool> env;
        for (std::size_t j = 0; j < names.size(); ++j) env[names[j]] = ((bits >> j) & 1U) != 0;
        if (truth_value(*t, env) != truth_value(*e, env)) return false;
    }
    return true;
}

namespace {

int parse_index(const SExpr& s) {
    if (s.is_list || !is_integer_atom(s.atom)) throw ParseError("expected an index", s.line, s.column);
    int i = std::stoi(s.atom);
    if (i < 1) throw ParseError("index must be >= 1", s.line, s.column);
    return i;
}

Mon mon_from_sexpr(const SExpr& s) {
    if (!s.is_list) {
        if (s.atom.empty() || is_integer_atom(s.atom) || s.atom == "unit" || s.atom == "prod")
            throw ParseError("expected a variable name, got '" + s.atom + "'", s.line, s.column);
        return var(s.atom);
    }
    if (s.items.empty() || s.items[0].is_list) throw ParseError("expected (unit i) or (prod i t t)", s.line, s.column);
    const std::string& head = s.items[0].atom;
    if (head == "unit" && s.items.size() == 2) return unit(parse_index(s.items[1]));
    if (head == "prod" && s.items.size() == 4)
        return prod(parse_index(s.items[1]), mon_from_sexpr(s.items[2]), mon_from_sexpr(s.items[3]));
    throw ParseError("expected (unit i) or (prod i t t)", s.line, s.column);
}

}  // namespace

Mon parse_mon(const std::string& text) { return mon_from_sexpr(read_single_sexpr(text)); }

std::string print_mon(const MonTerm& t) {
    switch (t.kind) {
        case MonTerm::Kind::Var: return t.name;
        case MonTerm::Kind::Unit: return "(unit " + std::to_string(t.index) + ")";
        case MonTerm::Kind::Prod:
            return "(prod " + std::to_string(t.index) + " " + print_mon(*t.lhs) + " " + print_mon(*t.rhs) + ")";
    }
    return {};
}

std::string print_nf(const Nf& u) { return print_mon(*embed(u)); }

}  // namespace cpsh::nbe

#include "cpsh/syntax.hpp"

#include <algorithm>
#include <charconv>
#include <unordered_set>

#include "cpsh/overload.hpp"
#include "cpsh/sexpr.hpp"

namespace cpsh {

struct TermAccess {
    static std::shared_ptr<Term::Node>& node(Term& t) { return t.node_; }
    static const std::shared_ptr<Term::Node>& node(const Term& t) { return t.node_; }
};

// Terms produced by plugging deep contexts can be very deep; release them
// with an explicit worklist instead of recursive destructors.
Term::~Term() {
    if (!node_ || node_.use_count() != 1) return;
    std::vector<std::shared_ptr<Node>> work;
    work.push_back(std::move(node_));
    auto take = [&work](Term& child) {
        if (child.node_) work.push_back(std::move(child.node_));
    };
    while (!work.empty()) {
        std::shared_ptr<Node> n = std::move(work.back());
        work.pop_back();
        if (n.use_count() != 1) continue;
        std::visit(Overload{
                       [&](term::Lam& a) { take(a.body); },
                       [&](term::App& a) {
                           take(a.fn);
                           take(a.arg);
                       },
                       [&](term::Succ& a) { take(a.arg); },
                       [&](term::Reset& a) { take(a.body); },
                       [&](term::Shift& a) { take(a.body); },
                       [&](term::Cons& a) {
                           take(a.head);
                           take(a.tail);
                       },
                       [&](term::LCase& a) {
                           take(a.scrutinee);
                           take(a.nil_branch);
                           take(a.cons_branch);
                       },
                       [&](term::If0& a) {
                           take(a.cond);
                           take(a.zero_branch);
                           take(a.other_branch);
                       },
                       [&](term::Let& a) {
                           take(a.bound);
                           take(a.body);
                       },
                       [&](term::Fix& a) { take(a.body); },
                       [&](term::Add& a) {
                           take(a.lhs);
                           take(a.rhs);
                       },
                       [&](term::Gt& a) {
                           take(a.lhs);
                           take(a.rhs);
                       },
                       [](auto&) {},
                   },
                   n->v);
    }
}

const Term::Node& Term::node() const {
    if (!node_) throw std::logic_error("null term");
    return *node_;
}

namespace {
template <class Alt>
Term make(Alt alt) {
    return Term(std::make_shared<Term::Node>(Term::Node{std::move(alt)}));
}

const std::set<std::string>& keywords() {
    static const std::set<std::string> k{"lambda", "succ", "reset", "shift", "nil", "cons", "lcase",
                                         "if0",    "let",  "fix",   "add",   "gt"};
    return k;
}

bool valid_name(const std::string& s) {
    if (s.empty() || is_integer_atom(s) || keywords().count(s)) return false;
    if (std::isdigit(static_cast<unsigned char>(s[0]))) return false;
    for (char c : s) {
        bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
                  c == '\'' || c == '?' || c == '!' || c == '*' || c == '/' || c == '+' ||
                  c == '=';
        if (!ok) return false;
    }
    return true;
}
}  // namespace

namespace mk {
Term lit(std::int64_t m) { return make(term::Lit{m}); }
Term var(Name x) { return make(term::Var{std::move(x)}); }
Term lam(Name x, Term body) { return make(term::Lam{std::move(x), std::move(body)}); }
Term app(Term fn, Term arg) { return make(term::App{std::move(fn), std::move(arg)}); }
Term succ(Term t) { return make(term::Succ{std::move(t)}); }
Term reset(int level, Term t) { return make(term::Reset{level, std::move(t)}); }
Term shift(int level, Name k, Term t) { return make(term::Shift{level, std::move(k), std::move(t)}); }
Term captured(SubstTower tower) {
    auto p = std::make_shared<const SubstTower>(std::move(tower));
    term::Captured c{p, true};
    Term probe = make(term::Captured{p, false});
    c.closed = free_vars(probe).empty();
    return make(std::move(c));
}
Term nil() { return make(term::Nil{}); }
Term cons(Term head, Term tail) { return make(term::Cons{std::move(head), std::move(tail)}); }
Term lcase(Term scrutinee, Term nil_branch, Name head, Name tail, Term cons_branch) {
    return make(term::LCase{std::move(scrutinee), std::move(nil_branch), std::move(head),
                            std::move(tail), std::move(cons_branch)});
}
Term if0(Term cond, Term zero_branch, Term other_branch) {
    return make(term::If0{std::move(cond), std::move(zero_branch), std::move(other_branch)});
}
Term let(Name x, Term bound, Term body) {
    return make(term::Let{std::move(x), std::move(bound), std::move(body)});
}
Term fix(Name self, Name param, Term body) {
    return make(term::Fix{std::move(self), std::move(param), std::move(body)});
}
Term add(Term lhs, Term rhs) { return make(term::Add{std::move(lhs), std::move(rhs)}); }
Term gt(Term lhs, Term rhs) { return make(term::Gt{std::move(lhs), std::move(rhs)}); }
Term int_list(const std::vector<std::int64_t>& xs) {
    Term out = nil();
    for (auto it = xs.rbegin(); it != xs.rend(); ++it) out = cons(lit(*it), out);
    return out;
}
}  // namespace mk

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void fail(const SExpr& e, const std::string& msg) {
    throw ParseError(msg, e.line, e.column);
}

Name name_of(const SExpr& e) {
    if (e.is_list || !valid_name(e.atom)) fail(e, "expected a variable name");
    return e.atom;
}

int level_of(const SExpr& e) {
    if (e.is_list || !is_integer_atom(e.atom)) fail(e, "expected a level index");
    int i = 0;
    auto [p, ec] = std::from_chars(e.atom.data(), e.atom.data() + e.atom.size(), i);
    if (ec != std::errc() || i < 1) fail(e, "level index must be >= 1");
    return i;
}

void arity(const SExpr& e, std::size_t n, const char* form) {
    if (e.items.size() != n) fail(e, std::string("malformed ") + form);
}

const SExpr& binder_list(const SExpr& e, std::size_t n, const char* form) {
    if (!e.is_list || e.items.size() != n) fail(e, std::string("malformed binder in ") + form);
    return e;
}

Term convert(const SExpr& e) {
    if (!e.is_list) {
        if (is_integer_atom(e.atom)) {
            std::int64_t m = 0;
            auto [p, ec] = std::from_chars(e.atom.data(), e.atom.data() + e.atom.size(), m);
            if (ec != std::errc()) fail(e, "integer out of range");
            return mk::lit(m);
        }
        if (e.atom == "nil") return mk::nil();
        if (!e.atom.empty() && e.atom[0] == '#') fail(e, "captured contexts cannot be written in programs");
        return mk::var(name_of(e));
    }
    if (e.items.empty()) fail(e, "empty application");
    const SExpr& head = e.items[0];
    if (!head.is_list && head.atom != "nil" && keywords().count(head.atom)) {
        const std::string& k = head.atom;
        if (k == "lambda") {
            arity(e, 3, "lambda");
            return mk::lam(name_of(binder_list(e.items[1], 1, "lambda").items[0]), convert(e.items[2]));
        }
        if (k == "succ") {
            arity(e, 2, "succ");
            return mk::succ(convert(e.items[1]));
        }
        if (k == "reset") {
            arity(e, 3, "reset");
            return mk::reset(level_of(e.items[1]), convert(e.items[2]));
        }
        if (k == "shift") {
            arity(e, 4, "shift");
            return mk::shift(level_of(e.items[1]), name_of(binder_list(e.items[2], 1, "shift").items[0]),
                             convert(e.items[3]));
        }
        if (k == "cons") {
            arity(e, 3, "cons");
            return mk::cons(convert(e.items[1]), convert(e.items[2]));
        }
        if (k == "lcase") {
            arity(e, 5, "lcase");
            const SExpr& b = binder_list(e.items[3], 2, "lcase");
            return mk::lcase(convert(e.items[1]), convert(e.items[2]), name_of(b.items[0]),
                             name_of(b.items[1]), convert(e.items[4]));
        }
        if (k == "if0") {
            arity(e, 4, "if0");
            return mk::if0(convert(e.items[1]), convert(e.items[2]), convert(e.items[3]));
        }
        if (k == "let") {
            arity(e, 3, "let");
            const SExpr& b = binder_list(e.items[1], 2, "let");
            return mk::let(name_of(b.items[0]), convert(b.items[1]), convert(e.items[2]));
        }
        if (k == "fix") {
            arity(e, 3, "fix");
            const SExpr& b = binder_list(e.items[1], 2, "fix");
            return mk::fix(name_of(b.items[0]), name_of(b.items[1]), convert(e.items[2]));
        }
        if (k == "add") {
            arity(e, 3, "add");
            return mk::add(convert(e.items[1]), convert(e.items[2]));
        }
        if (k == "gt") {
            arity(e, 3, "gt");
            return mk::gt(convert(e.items[1]), convert(e.items[2]));
        }
        fail(head, "'" + k + "' is not a function");
    }
    arity(e, 2, "application");
    return mk::app(convert(e.items[0]), convert(e.items[1]));
}

}  // namespace

Term parse(std::string_view text) { return convert(read_single_sexpr(text)); }

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace {

void print_to(std::string& out, const Term& t);
void print_tower_to(std::string& out, const SubstTower& tower, std::string_view sep);

void print_frame_to(std::string& out, const SubstFrame& f) {
    auto wrap = [&](const char* tag, const Term& t) {
        out += tag;
        out += '(';
        print_to(out, t);
        out += ')';
    };
    std::visit(Overload{
                   [&](const frame::Arg<Term>& a) { wrap("ARG", a.arg); },
                   [&](const frame::Succ&) { out += "SUCC"; },
                   [&](const frame::Fun<Term>& a) { wrap("FUN", a.fn); },
                   [&](const frame::ConsHead<Term>& a) { wrap("CONSARG", a.tail); },
                   [&](const frame::ConsTail<Term>& a) { wrap("CONS", a.head); },
                   [&](const frame::AddLeft<Term>& a) { wrap("ADDARG", a.rhs); },
                   [&](const frame::AddRight<Term>& a) { wrap("ADD", a.lhs); },
                   [&](const frame::GtLeft<Term>& a) { wrap("GTARG", a.rhs); },
                   [&](const frame::GtRight<Term>& a) { wrap("GT", a.lhs); },
                   [&](const frame::If0<Term>& a) {
                       out += "IF0(";
                       print_to(out, a.zero_branch);
                       out += ", ";
                       print_to(out, a.other_branch);
                       out += ')';
                   },
                   [&](const frame::LCase<Term>& a) {
                       out += "LCASE(";
                       print_to(out, a.nil_branch);
                       out += ", (" + a.head + " " + a.tail + ") ";
                       print_to(out, a.cons_branch);
                       out += ')';
                   },
                   [&](const frame::Let<Term>& a) {
                       out += "LET(" + a.name + ", ";
                       print_to(out, a.body);
                       out += ')';
                   },
               },
               f.kind);
}

void print_frames_to(std::string& out, const PList<SubstFrame>& frames) {
    for (const auto& f : frames) {
        print_frame_to(out, f);
        out += " . ";
    }
    out += "[]";
}

void print_stack_to(std::string& out, const PList<SubstTower>& stack) {
    for (const auto& entry : stack) {
        out += '<';
        print_tower_to(out, entry, " ; ");
        out += "> : ";
    }
    out += "•";
}

void print_tower_to(std::string& out, const SubstTower& tower, std::string_view sep) {
    for (std::size_t j = tower.height(); j >= 2; --j) {
        print_stack_to(out, tower.stack(j));
        out += sep;
    }
    print_frames_to(out, tower.frames);
}

void print_to(std::string& out, const Term& t) {
    std::visit(Overload{
                   [&](const term::Lit& a) { out += std::to_string(a.value); },
                   [&](const term::Var& a) { out += a.name; },
                   [&](const term::Lam& a) {
                       out += "(lambda (" + a.param + ") ";
                       print_to(out, a.body);
                       out += ')';
                   },
                   [&](const term::App& a) {
                       out += '(';
                       print_to(out, a.fn);
                       out += ' ';
                       print_to(out, a.arg);
                       out += ')';
                   },
                   [&](const term::Succ& a) {
                       out += "(succ ";
                       print_to(out, a.arg);
                       out += ')';
                   },
                   [&](const term::Reset& a) {
                       out += "(reset " + std::to_string(a.level) + " ";
                       print_to(out, a.body);
                       out += ')';
                   },
                   [&](const term::Shift& a) {
                       out += "(shift " + std::to_string(a.level) + " (" + a.k + ") ";
                       print_to(out, a.body);
                       out += ')';
                   },
                   [&](const term::Captured& a) {
                       out += "#ctx<" + std::to_string(a.tower->height()) + ">{";
                       print_tower_to(out, *a.tower, " ; ");
                       out += '}';
                   },
                   [&](const term::Nil&) { out += "nil"; },
                   [&](const term::Cons& a) {
                       out += "(cons ";
                       print_to(out, a.head);
                       out += ' ';
                       print_to(out, a.tail);
                       out += ')';
                   },
                   [&](const term::LCase& a) {
                       out += "(lcase ";
                       print_to(out, a.scrutinee);
                       out += ' ';
                       print_to(out, a.nil_branch);
                       out += " (" + a.head + " " + a.tail + ") ";
                       print_to(out, a.cons_branch);
                       out += ')';
                   },
                   [&](const term::If0& a) {
                       out += "(if0 ";
                       print_to(out, a.cond);
                       out += ' ';
                       print_to(out, a.zero_branch);
                       out += ' ';
                       print_to(out, a.other_branch);
                       out += ')';
                   },
                   [&](const term::Let& a) {
                       out += "(let (" + a.name + " ";
                       print_to(out, a.bound);
                       out += ") ";
                       print_to(out, a.body);
                       out += ')';
                   },
                   [&](const term::Fix& a) {
                       out += "(fix (" + a.self + " " + a.param + ") ";
                       print_to(out, a.body);
                       out += ')';
                   },
                   [&](const term::Add& a) {
                       out += "(add ";
                       print_to(out, a.lhs);
                       out += ' ';
                       print_to(out, a.rhs);
                       out += ')';
                   },
                   [&](const term::Gt& a) {
                       out += "(gt ";
                       print_to(out, a.lhs);
                       out += ' ';
                       print_to(out, a.rhs);
                       out += ')';
                   },
               },
               t.node().v);
}

}  // namespace

std::string print_term(const Term& t) {
    std::string out;
    print_to(out, t);
    return out;
}

std::string print_frame(const SubstFrame& f) {
    std::string out;
    print_frame_to(out, f);
    return out;
}

std::string print_frames(const PList<SubstFrame>& frames) {
    std::string out;
    print_frames_to(out, frames);
    return out;
}

std::string print_tower(const SubstTower& tower, std::string_view sep) {
    std::string out;
    print_tower_to(out, tower, sep);
    return out;
}

// ---------------------------------------------------------------------------
// Free variables, names
// ---------------------------------------------------------------------------

namespace {

using Bound = std::vector<const Name*>;

bool is_bound(const Bound& bound, const Name& x) {
    for (const Name* b : bound)
        if (*b == x) return true;
    return false;
}

void fv_term(const Term& t, Bound& bound, std::set<Name>& out);

void fv_under(const Term& t, Bound& bound, std::set<Name>& out, std::initializer_list<const Name*> names) {
    for (const Name* n : names) bound.push_back(n);
    fv_term(t, bound, out);
    bound.resize(bound.size() - names.size());
}

void fv_frame(const SubstFrame& f, Bound& bound, std::set<Name>& out) {
    std::visit(Overload{
                   [&](const frame::Arg<Term>& a) { fv_term(a.arg, bound, out); },
                   [&](const frame::Succ&) {},
                   [&](const frame::Fun<Term>& a) { fv_term(a.fn, bound, out); },
                   [&](const frame::ConsHead<Term>& a) { fv_term(a.tail, bound, out); },
                   [&](const frame::ConsTail<Term>& a) { fv_term(a.head, bound, out); },
                   [&](const frame::AddLeft<Term>& a) { fv_term(a.rhs, bound, out); },
                   [&](const frame::AddRight<Term>& a) { fv_term(a.lhs, bound, out); },
                   [&](const frame::GtLeft<Term>& a) { fv_term(a.rhs, bound, out); },
                   [&](const frame::GtRight<Term>& a) { fv_term(a.lhs, bound, out); },
                   [&](const frame::If0<Term>& a) {
                       fv_term(a.zero_branch, bound, out);
                       fv_term(a.other_branch, bound, out);
                   },
                   [&](const frame::LCase<Term>& a) {
                       fv_term(a.nil_branch, bound, out);
                       fv_under(a.cons_branch, bound, out, {&a.head, &a.tail});
                   },
                   [&](const frame::Let<Term>& a) { fv_under(a.body, bound, out, {&a.name}); },
               },
               f.kind);
}

void fv_tower(const SubstTower& tower, Bound& bound, std::set<Name>& out) {
    for (const auto& f : tower.frames) fv_frame(f, bound, out);
    for (const auto& s : tower.stacks)
        for (const auto& entry : s) fv_tower(entry, bound, out);
}

void fv_term(const Term& t, Bound& bound, std::set<Name>& out) {
    std::visit(Overload{
                   [&](const term::Lit&) {},
                   [&](const term::Var& a) {
                       if (!is_bound(bound, a.name)) out.insert(a.name);
                   },
                   [&](const term::Lam& a) { fv_under(a.body, bound, out, {&a.param}); },
                   [&](const term::App& a) {
                       fv_term(a.fn, bound, out);
                       fv_term(a.arg, bound, out);
                   },
                   [&](const term::Succ& a) { fv_term(a.arg, bound, out); },
                   [&](const term::Reset& a) { fv_term(a.body, bound, out); },
                   [&](const term::Shift& a) { fv_under(a.body, bound, out, {&a.k}); },
                   [&](const term::Captured& a) {
                       if (!a.closed) fv_tower(*a.tower, bound, out);
                   },
                   [&](const term::Nil&) {},
                   [&](const term::Cons& a) {
                       fv_term(a.head, bound, out);
                       fv_term(a.tail, bound, out);
                   },
                   [&](const term::LCase& a) {
                       fv_term(a.scrutinee, bound, out);
                       fv_term(a.nil_branch, bound, out);
                       fv_under(a.cons_branch, bound, out, {&a.head, &a.tail});
                   },
                   [&](const term::If0& a) {
                       fv_term(a.cond, bound, out);
                       fv_term(a.zero_branch, bound, out);
                       fv_term(a.other_branch, bound, out);
                   },
                   [&](const term::Let& a) {
                       fv_term(a.bound, bound, out);
                       fv_under(a.body, bound, out, {&a.name});
                   },
                   [&](const term::Fix& a) { fv_under(a.body, bound, out, {&a.self, &a.param}); },
                   [&](const term::Add& a) {
                       fv_term(a.lhs, bound, out);
                       fv_term(a.rhs, bound, out);
                   },
                   [&](const term::Gt& a) {
                       fv_term(a.lhs, bound, out);
                       fv_term(a.rhs, bound, out);
                   },
               },
               t.node().v);
}

void names_term(const Term& t, std::unordered_set<Name>& out);

void names_frame(const SubstFrame& f, std::unordered_set<Name>& out) {
    std::visit(Overload{
                   [&](const frame::Succ&) {},
                   [&](const frame::If0<Term>& a) {
                       names_term(a.zero_branch, out);
                       names_term(a.other_branch, out);
                   },
                   [&](const frame::LCase<Term>& a) {
                       out.insert(a.head);
                       out.insert(a.tail);
                       names_term(a.nil_branch, out);
                       names_term(a.cons_branch, out);
                   },
                   [&](const frame::Let<Term>& a) {
                       out.insert(a.name);
                       names_term(a.body, out);
                   },
                   [&](const auto& a) {
                       // single-term frames
                       if constexpr (requires { a.arg; }) names_term(a.arg, out);
                       if constexpr (requires { a.fn; }) names_term(a.fn, out);
                       if constexpr (requires { a.tail; }) names_term(a.tail, out);
                       if constexpr (requires { a.head; }) names_term(a.head, out);
                       if constexpr (requires { a.rhs; }) names_term(a.rhs, out);
                       if constexpr (requires { a.lhs; }) names_term(a.lhs, out);
                   },
               },
               f.kind);
}

void names_tower(const SubstTower& tower, std::unordered_set<Name>& out) {
    for (const auto& f : tower.frames) names_frame(f, out);
    for (const auto& s : tower.stacks)
        for (const auto& entry : s) names_tower(entry, out);
}

void names_term(const Term& t, std::unordered_set<Name>& out) {
    std::visit(Overload{
                   [&](const term::Lit&) {},
                   [&](const term::Nil&) {},
                   [&](const term::Var& a) { out.insert(a.name); },
                   [&](const term::Lam& a) {
                       out.insert(a.param);
                       names_term(a.body, out);
                   },
                   [&](const term::App& a) {
                       names_term(a.fn, out);
                       names_term(a.arg, out);
                   },
                   [&](const term::Succ& a) { names_term(a.arg, out); },
                   [&](const term::Reset& a) { names_term(a.body, out); },
                   [&](const term::Shift& a) {
                       out.insert(a.k);
                       names_term(a.body, out);
                   },
                   [&](const term::Captured& a) { names_tower(*a.tower, out); },
                   [&](const term::Cons& a) {
                       names_term(a.head, out);
                       names_term(a.tail, out);
                   },
                   [&](const term::LCase& a) {
                       out.insert(a.head);
                       out.insert(a.tail);
                       names_term(a.scrutinee, out);
                       names_term(a.nil_branch, out);
                       names_term(a.cons_branch, out);
                   },
                   [&](const term::If0& a) {
                       names_term(a.cond, out);
                       names_term(a.zero_branch, out);
                       names_term(a.other_branch, out);
                   },
                   [&](const term::Let& a) {
                       out.insert(a.name);
                       names_term(a.bound, out);
                       names_term(a.body, out);
                   },
                   [&](const term::Fix& a) {
                       out.insert(a.self);
                       out.insert(a.param);
                       names_term(a.body, out);
                   },
                   [&](const term::Add& a) {
                       names_term(a.lhs, out);
                       names_term(a.rhs, out);
                   },
                   [&](const term::Gt& a) {
                       names_term(a.lhs, out);
                       names_term(a.rhs, out);
                   },
               },
               t.node().v);
}

}  // namespace

std::set<Name> free_vars(const Term& t) {
    std::set<Name> out;
    Bound bound;
    fv_term(t, bound, out);
    return out;
}

bool is_closed(const Term& t) { return free_vars(t).empty(); }

bool is_value(const Term& t) {
    const Term* cur = &t;
    for (;;) {
        const auto& v = cur->node().v;
        if (std::holds_alternative<term::Lit>(v) || std::holds_alternative<term::Lam>(v) ||
            std::holds_alternative<term::Fix>(v) || std::holds_alternative<term::Nil>(v) ||
            std::holds_alternative<term::Captured>(v))
            return true;
        const auto* c = std::get_if<term::Cons>(&v);
        if (c == nullptr || !is_value(c->head)) return false;
        cur = &c->tail;
    }
}

// ---------------------------------------------------------------------------
// Substitution
// ---------------------------------------------------------------------------

namespace {

class Substituter {
public:
    Substituter(const Term& root, const Term& v) : root_(root), v_(v) {}

    Term term(const Term& t, const Name& x, const Term& r, const std::set<Name>& fvr);

private:
    const Term& root_;
    const Term& v_;
    std::optional<std::unordered_set<Name>> used_;

    Name fresh(const Name& base) {
        if (!used_) {
            used_.emplace();
            names_term(root_, *used_);
            names_term(v_, *used_);
        }
        for (std::size_t k = 1;; ++k) {
            Name cand = base + std::to_string(k);
            if (used_->insert(cand).second) return cand;
        }
    }

    // Substitutes under binders `names` (in order); renames any binder that
    // would capture a free variable of the replacement.
    Term under(const Term& body, std::vector<Name>& names, const Name& x, const Term& r,
               const std::set<Name>& fvr) {
        for (const Name& n : names)
            if (n == x) return body;
        Term b = body;
        bool need_check = false;
        for (const Name& n : names)
            if (fvr.count(n)) need_check = true;
        if (need_check && free_vars(b).count(x)) {
            for (Name& n : names) {
                if (!fvr.count(n)) continue;
                Name y = fresh(n);
                b = term(b, n, mk::var(y), {y});
                n = y;
            }
        }
        return term(b, x, r, fvr);
    }

    SubstFrame frame(const SubstFrame& f, const Name& x, const Term& r, const std::set<Name>& fvr) {
        auto sub = [&](const Term& t) { return term(t, x, r, fvr); };
        return std::visit(
            Overload{
                [&](const frame::Arg<Term>& a) { return SubstFrame{frame::Arg<Term>{sub(a.arg)}}; },
                [&](const frame::Succ&) { return SubstFrame{frame::Succ{}}; },
                [&](const frame::Fun<Term>& a) { return SubstFrame{frame::Fun<Term>{sub(a.fn)}}; },
                [&](const frame::ConsHead<Term>& a) {
                    return SubstFrame{frame::ConsHead<Term>{sub(a.tail)}};
                },
                [&](const frame::ConsTail<Term>& a) {
                    return SubstFrame{frame::ConsTail<Term>{sub(a.head)}};
                },
                [&](const frame::AddLeft<Term>& a) {
                    return SubstFrame{frame::AddLeft<Term>{sub(a.rhs)}};
                },
                [&](const frame::AddRight<Term>& a) {
                    return SubstFrame{frame::AddRight<Term>{sub(a.lhs)}};
                },
                [&](const frame::GtLeft<Term>& a) { return SubstFrame{frame::GtLeft<Term>{sub(a.rhs)}}; },
                [&](const frame::GtRight<Term>& a) {
                    return SubstFrame{frame::GtRight<Term>{sub(a.lhs)}};
                },
                [&](const frame::If0<Term>& a) {
                    return SubstFrame{frame::If0<Term>{sub(a.zero_branch), sub(a.other_branch)}};
                },
                [&](const frame::LCase<Term>& a) {
                    std::vector<Name> names{a.head, a.tail};
                    Term cb = under(a.cons_branch, names, x, r, fvr);
                    return SubstFrame{frame::LCase<Term>{sub(a.nil_branch), names[0], names[1], cb}};
                },
                [&](const frame::Let<Term>& a) {
                    std::vector<Name> names{a.name};
                    Term b = under(a.body, names, x, r, fvr);
                    return SubstFrame{frame::Let<Term>{names[0], b}};
                },
            },
            f.kind);
    }

    SubstTower tower(const SubstTower& t, const Name& x, const Term& r, const std::set<Name>& fvr) {
        SubstTower out;
        std::vector<SubstFrame> fs;
        for (const auto& f : t.frames) fs.push_back(frame(f, x, r, fvr));
        out.frames = PList<SubstFrame>::from_range(fs.begin(), fs.end());
        for (const auto& s : t.stacks) {
            std::vector<SubstTower> entries;
            for (const auto& e : s) entries.push_back(tower(e, x, r, fvr));
            out.stacks.push_back(PList<SubstTower>::from_range(entries.begin(), entries.end()));
        }
        return out;
    }
};

Term Substituter::term(const Term& t, const Name& x, const Term& r, const std::set<Name>& fvr) {
    auto sub = [&](const Term& s) { return term(s, x, r, fvr); };
    auto same = [](const Term& a, const Term& b) { return a.id() == b.id(); };
    return std::visit(
        Overload{
            [&](const term::Lit&) { return t; },
            [&](const term::Nil&) { return t; },
            [&](const term::Var& a) { return a.name == x ? r : t; },
            [&](const term::Lam& a) {
                std::vector<Name> names{a.param};
                Term b = under(a.body, names, x, r, fvr);
                return same(b, a.body) && names[0] == a.param ? t : mk::lam(names[0], b);
            },
            [&](const term::App& a) {
                Term f = sub(a.fn), g = sub(a.arg);
                return same(f, a.fn) && same(g, a.arg) ? t : mk::app(f, g);
            },
            [&](const term::Succ& a) {
                Term s = sub(a.arg);
                return same(s, a.arg) ? t : mk::succ(s);
            },
            [&](const term::Reset& a) {
                Term s = sub(a.body);
                return same(s, a.body) ? t : mk::reset(a.level, s);
            },
            [&](const term::Shift& a) {
                std::vector<Name> names{a.k};
                Term b = under(a.body, names, x, r, fvr);
                return same(b, a.body) && names[0] == a.k ? t : mk::shift(a.level, names[0], b);
            },
            [&](const term::Captured& a) {
                if (a.closed) return t;
                std::set<Name> fv = free_vars(t);
                if (!fv.count(x)) return t;
                return mk::captured(tower(*a.tower, x, r, fvr));
            },
            [&](const term::Cons& a) {
                Term h = sub(a.head), tl = sub(a.tail);
                return same(h, a.head) && same(tl, a.tail) ? t : mk::cons(h, tl);
            },
            [&](const term::LCase& a) {
                Term s = sub(a.scrutinee), nb = sub(a.nil_branch);
                std::vector<Name> names{a.head, a.tail};
                Term cb = under(a.cons_branch, names, x, r, fvr);
                if (same(s, a.scrutinee) && same(nb, a.nil_branch) && same(cb, a.cons_branch) &&
                    names[0] == a.head && names[1] == a.tail)
                    return t;
                return mk::lcase(s, nb, names[0], names[1], cb);
            },
            [&](const term::If0& a) {
                Term c = sub(a.cond), z = sub(a.zero_branch), o = sub(a.other_branch);
                return same(c, a.cond) && same(z, a.zero_branch) && same(o, a.other_branch)
                           ? t
                           : mk::if0(c, z, o);
            },
            [&](const term::Let& a) {
                Term bd = sub(a.bound);
                std::vector<Name> names{a.name};
                Term b = under(a.body, names, x, r, fvr);
                return same(bd, a.bound) && same(b, a.body) && names[0] == a.name
                           ? t
                           : mk::let(names[0], bd, b);
            },
            [&](const term::Fix& a) {
                std::vector<Name> names{a.self, a.param};
                Term b = under(a.body, names, x, r, fvr);
                return same(b, a.body) && names[0] == a.self && names[1] == a.param
                           ? t
                           : mk::fix(names[0], names[1], b);
            },
            [&](const term::Add& a) {
                Term l = sub(a.lhs), rr = sub(a.rhs);
                return same(l, a.lhs) && same(rr, a.rhs) ? t : mk::add(l, rr);
            },
            [&](const term::Gt& a) {
                Term l = sub(a.lhs), rr = sub(a.rhs);
                return same(l, a.lhs) && same(rr, a.rhs) ? t : mk::gt(l, rr);
            },
        },
        t.node().v);
}

}  // namespace

Term substitute(const Term& t, const Name& x, const Term& v) {
    if (!is_value(v)) throw std::invalid_argument("substitute: replacement is not a value");
    Substituter s(t, v);
    return s.term(t, x, v, free_vars(v));
}

// ---------------------------------------------------------------------------
// Levels and validation
// ---------------------------------------------------------------------------

namespace {

template <class Fn>
void walk_children(const Term& t, Fn&& fn) {
    std::visit(Overload{
                   [&](const term::Lam& a) { fn(a.body); },
                   [&](const term::App& a) {
                       fn(a.fn);
                       fn(a.arg);
                   },
                   [&](const term::Succ& a) { fn(a.arg); },
                   [&](const term::Reset& a) { fn(a.body); },
                   [&](const term::Shift& a) { fn(a.body); },
                   [&](const term::Cons& a) {
                       fn(a.head);
                       fn(a.tail);
                   },
                   [&](const term::LCase& a) {
                       fn(a.scrutinee);
                       fn(a.nil_branch);
                       fn(a.cons_branch);
                   },
                   [&](const term::If0& a) {
                       fn(a.cond);
                       fn(a.zero_branch);
                       fn(a.other_branch);
                   },
                   [&](const term::Let& a) {
                       fn(a.bound);
                       fn(a.body);
                   },
                   [&](const term::Fix& a) { fn(a.body); },
                   [&](const term::Add& a) {
                       fn(a.lhs);
                       fn(a.rhs);
                   },
                   [&](const term::Gt& a) {
                       fn(a.lhs);
                       fn(a.rhs);
                   },
                   [](const auto&) {},
               },
               t.node().v);
}

}  // namespace

int max_level(const Term& t) {
    int best = 0;
    std::vector<const Term*> work{&t};
    while (!work.empty()) {
        const Term* cur = work.back();
        work.pop_back();
        if (const auto* r = cur->as<term::Reset>()) best = std::max(best, r->level);
        if (const auto* s = cur->as<term::Shift>()) best = std::max(best, s->level);
        if (const auto* c = cur->as<term::Captured>())
            best = std::max(best, static_cast<int>(c->tower->height()));
        walk_children(*cur, [&](const Term& child) { work.push_back(&child); });
    }
    return best;
}

bool contains_captured(const Term& t) {
    std::vector<const Term*> work{&t};
    while (!work.empty()) {
        const Term* cur = work.back();
        work.pop_back();
        if (cur->is<term::Captured>()) return true;
        walk_children(*cur, [&](const Term& child) { work.push_back(&child); });
    }
    return false;
}

void require_level(const Term& t, int level) {
    if (level < 1) throw ValidationError("level must be >= 1");
    int m = max_level(t);
    if (m > level)
        throw ValidationError("operator index " + std::to_string(m) + " exceeds level " +
                              std::to_string(level));
}

void validate_program(const Term& t, int level) {
    if (level < 1) throw ValidationError("level must be >= 1");
    if (contains_captured(t)) throw ValidationError("program contains a captured context");
    auto fv = free_vars(t);
    if (!fv.empty()) throw ValidationError("program has free variable '" + *fv.begin() + "'");
    int m = max_level(t);
    if (m > level)
        throw ValidationError("operator index " + std::to_string(m) + " exceeds level " +
                              std::to_string(level));
}

// ---------------------------------------------------------------------------
// Equality
// ---------------------------------------------------------------------------

bool operator==(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return true;
    if (!a.node_ || !b.node_) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const T* y = std::get_if<T>(&b.node_->v);
            if (y == nullptr) return false;
            if constexpr (std::is_same_v<T, term::Lit>) return x.value == y->value;
            else if constexpr (std::is_same_v<T, term::Var>) return x.name == y->name;
            else if constexpr (std::is_same_v<T, term::Lam>) return x.param == y->param && x.body == y->body;
            else if constexpr (std::is_same_v<T, term::App>) return x.fn == y->fn && x.arg == y->arg;
            else if constexpr (std::is_same_v<T, term::Succ>) return x.arg == y->arg;
            else if constexpr (std::is_same_v<T, term::Reset>) return x.level == y->level && x.body == y->body;
            else if constexpr (std::is_same_v<T, term::Shift>)
                return x.level == y->level && x.k == y->k && x.body == y->body;
            else if constexpr (std::is_same_v<T, term::Captured>)
                return x.tower == y->tower || *x.tower == *y->tower;
            else if constexpr (std::is_same_v<T, term::Nil>) return true;
            else if constexpr (std::is_same_v<T, term::Cons>) return x.head == y->head && x.tail == y->tail;
            else if constexpr (std::is_same_v<T, term::LCase>)
                return x.head == y->head && x.tail == y->tail && x.scrutinee == y->scrutinee &&
                       x.nil_branch == y->nil_branch && x.cons_branch == y->cons_branch;
            else if constexpr (std::is_same_v<T, term::If0>)
                return x.cond == y->cond && x.zero_branch == y->zero_branch &&
                       x.other_branch == y->other_branch;
            else if constexpr (std::is_same_v<T, term::Let>)
                return x.name == y->name && x.bound == y->bound && x.body == y->body;
            else if constexpr (std::is_same_v<T, term::Fix>)
                return x.self == y->self && x.param == y->param && x.body == y->body;
            else
                return x.lhs == y->lhs && x.rhs == y->rhs;
        },
        a.node_->v);
}

bool operator==(const SubstFrame& a, const SubstFrame& b) { return a.kind == b.kind; }

bool operator==(const PList<SubstFrame>& a, const PList<SubstFrame>& b) {
    auto i = a.begin(), j = b.begin();
    for (; i != a.end() && j != b.end(); ++i, ++j)
        if (!(*i == *j)) return false;
    return i == a.end() && j == b.end();
}

bool operator==(const PList<SubstTower>& a, const PList<SubstTower>& b) {
    auto i = a.begin(), j = b.begin();
    for (; i != a.end() && j != b.end(); ++i, ++j)
        if (!(*i == *j)) return false;
    return i == a.end() && j == b.end();
}

bool operator==(const SubstTower& a, const SubstTower& b) {
    if (a.height() != b.height() || !(a.frames == b.frames)) return false;
    for (std::size_t k = 0; k < a.stacks.size(); ++k)
        if (!(a.stacks[k] == b.stacks[k])) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Alpha equivalence
// ---------------------------------------------------------------------------

namespace {

using AlphaEnv = std::vector<std::pair<const Name*, const Name*>>;

bool alpha(const Term& a, const Term& b, AlphaEnv& env);

bool alpha_under(const Term& a, const Term& b, AlphaEnv& env,
                 std::initializer_list<std::pair<const Name*, const Name*>> binders) {
    for (const auto& p : binders) env.push_back(p);
    bool ok = alpha(a, b, env);
    env.resize(env.size() - binders.size());
    return ok;
}

bool alpha_frame(const SubstFrame& a, const SubstFrame& b, AlphaEnv& env);

bool alpha_tower(const SubstTower& a, const SubstTower& b, AlphaEnv& env) {
    if (a.height() != b.height() || a.frames.size() != b.frames.size()) return false;
    for (auto i = a.frames.begin(), j = b.frames.begin(); i != a.frames.end(); ++i, ++j)
        if (!alpha_frame(*i, *j, env)) return false;
    for (std::size_t k = 0; k < a.stacks.size(); ++k) {
        if (a.stacks[k].size() != b.stacks[k].size()) return false;
        for (auto i = a.stacks[k].begin(), j = b.stacks[k].begin(); i != a.stacks[k].end(); ++i, ++j)
            if (!alpha_tower(*i, *j, env)) return false;
    }
    return true;
}

bool alpha_frame(const SubstFrame& a, const SubstFrame& b, AlphaEnv& env) {
    if (a.kind.index() != b.kind.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const T& y = std::get<T>(b.kind);
            if constexpr (std::is_same_v<T, frame::Succ>) return true;
            else if constexpr (std::is_same_v<T, frame::If0<Term>>)
                return alpha(x.zero_branch, y.zero_branch, env) && alpha(x.other_branch, y.other_branch, env);
            else if constexpr (std::is_same_v<T, frame::LCase<Term>>)
                return alpha(x.nil_branch, y.nil_branch, env) &&
                       alpha_under(x.cons_branch, y.cons_branch, env, {{&x.head, &y.head}, {&x.tail, &y.tail}});
            else if constexpr (std::is_same_v<T, frame::Let<Term>>)
                return alpha_under(x.body, y.body, env, {{&x.name, &y.name}});
            else if constexpr (std::is_same_v<T, frame::Arg<Term>>) return alpha(x.arg, y.arg, env);
            else if constexpr (std::is_same_v<T, frame::Fun<Term>>) return alpha(x.fn, y.fn, env);
            else if constexpr (std::is_same_v<T, frame::ConsHead<Term>>) return alpha(x.tail, y.tail, env);
            else if constexpr (std::is_same_v<T, frame::ConsTail<Term>>) return alpha(x.head, y.head, env);
            else if constexpr (requires { x.rhs; }) return alpha(x.rhs, y.rhs, env);
            else return alpha(x.lhs, y.lhs, env);
        },
        a.kind);
}

bool alpha(const Term& a, const Term& b, AlphaEnv& env) {
    if (a.id() == b.id() && env.empty()) return true;
    const auto& av = a.node().v;
    const auto& bv = b.node().v;
    if (av.index() != bv.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const T& y = std::get<T>(bv);
            if constexpr (std::is_same_v<T, term::Lit>) return x.value == y.value;
            else if constexpr (std::is_same_v<T, term::Var>) {
                for (auto it = env.rbegin(); it != env.rend(); ++it) {
                    bool l = *it->first == x.name, r = *it->second == y.name;
                    if (l || r) return l && r;
                }
                return x.name == y.name;
            } else if constexpr (std::is_same_v<T, term::Lam>)
                return alpha_under(x.body, y.body, env, {{&x.param, &y.param}});
            else if constexpr (std::is_same_v<T, term::App>)
                return alpha(x.fn, y.fn, env) && alpha(x.arg, y.arg, env);
            else if constexpr (std::is_same_v<T, term::Succ>) return alpha(x.arg, y.arg, env);
            else if constexpr (std::is_same_v<T, term::Reset>)
                return x.level == y.level && alpha(x.body, y.body, env);
            else if constexpr (std::is_same_v<T, term::Shift>)
                return x.level == y.level && alpha_under(x.body, y.body, env, {{&x.k, &y.k}});
            else if constexpr (std::is_same_v<T, term::Captured>)
                return alpha_tower(*x.tower, *y.tower, env);
            else if constexpr (std::is_same_v<T, term::Nil>) return true;
            else if constexpr (std::is_same_v<T, term::Cons>)
                return alpha(x.head, y.head, env) && alpha(x.tail, y.tail, env);
            else if constexpr (std::is_same_v<T, term::LCase>)
                return alpha(x.scrutinee, y.scrutinee, env) && alpha(x.nil_branch, y.nil_branch, env) &&
                       alpha_under(x.cons_branch, y.cons_branch, env, {{&x.head, &y.head}, {&x.tail, &y.tail}});
            else if constexpr (std::is_same_v<T, term::If0>)
                return alpha(x.cond, y.cond, env) && alpha(x.zero_branch, y.zero_branch, env) &&
                       alpha(x.other_branch, y.other_branch, env);
            else if constexpr (std::is_same_v<T, term::Let>)
                return alpha(x.bound, y.bound, env) && alpha_under(x.body, y.body, env, {{&x.name, &y.name}});
            else if constexpr (std::is_same_v<T, term::Fix>)
                return alpha_under(x.body, y.body, env, {{&x.self, &y.self}, {&x.param, &y.param}});
            else
                return alpha(x.lhs, y.lhs, env) && alpha(x.rhs, y.rhs, env);
        },
        av);
}

}  // namespace

bool alpha_equal(const Term& a, const Term& b) {
    AlphaEnv env;
    return alpha(a, b, env);
}

std::optional<std::vector<std::int64_t>> as_int_list(const Term& t) {
    std::vector<std::int64_t> out;
    const Term* cur = &t;
    for (;;) {
        if (cur->is<term::Nil>()) return out;
        const auto* c = cur->as<term::Cons>();
        if (c == nullptr) return std::nullopt;
        const auto* m = c->head.as<term::Lit>();
        if (m == nullptr) return std::nullopt;
        out.push_back(m->value);
        cur = &c->tail;
    }
}

}  // namespace cpsh

#pragma once

// Object language: call-by-value lambda-calculus with integers, lists and the
// indexed control operators shift_i / reset_i.

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cpsh/plist.hpp"

namespace cpsh {

using Name = std::string;

struct SubstFrame;
template <class Frame>
struct Tower;
using SubstTower = Tower<SubstFrame>;

/// Immutable, shared term.  A default-constructed Term is null and only used
/// as a placeholder.
class Term {
public:
    struct Node;

    Term() = default;
    explicit Term(std::shared_ptr<Node> node) : node_(std::move(node)) {}
    Term(const Term&) = default;
    Term(Term&&) noexcept = default;
    Term& operator=(const Term&) = default;
    Term& operator=(Term&&) noexcept = default;
    ~Term();

    [[nodiscard]] bool is_null() const noexcept { return !node_; }
    [[nodiscard]] const Node& node() const;
    [[nodiscard]] const void* id() const noexcept { return node_.get(); }

    template <class Alt>
    [[nodiscard]] const Alt* as() const;

    template <class Alt>
    [[nodiscard]] bool is() const {
        return as<Alt>() != nullptr;
    }

    friend bool operator==(const Term& a, const Term& b);

private:
    std::shared_ptr<Node> node_;
    friend struct TermAccess;
};

namespace term {
struct Lit {
    std::int64_t value;
};
struct Var {
    Name name;
};
struct Lam {
    Name param;
    Term body;
};
struct App {
    Term fn;
    Term arg;
};
struct Succ {
    Term arg;
};
struct Reset {
    int level;
    Term body;
};
struct Shift {
    int level;
    Name k;
    Term body;
};
/// A captured context tower embedded in a term.  Only produced by the
/// substitution-based semantics; never written by a user.
struct Captured {
    std::shared_ptr<const SubstTower> tower;
    bool closed = true;  // no free variables in any frame; computed by mk::captured
};
struct Nil {};
struct Cons {
    Term head;
    Term tail;
};
struct LCase {
    Term scrutinee;
    Term nil_branch;
    Name head;
    Name tail;
    Term cons_branch;
};
struct If0 {
    Term cond;
    Term zero_branch;
    Term other_branch;
};
struct Let {
    Name name;
    Term bound;
    Term body;
};
struct Fix {
    Name self;
    Name param;
    Term body;
};
struct Add {
    Term lhs;
    Term rhs;
};
struct Gt {
    Term lhs;
    Term rhs;
};
}  // namespace term

struct Term::Node {
    std::variant<term::Lit, term::Var, term::Lam, term::App, term::Succ, term::Reset, term::Shift,
                 term::Captured, term::Nil, term::Cons, term::LCase, term::If0, term::Let, term::Fix,
                 term::Add, term::Gt>
        v;
};

template <class Alt>
const Alt* Term::as() const {
    return node_ ? std::get_if<Alt>(&node_->v) : nullptr;
}

// ---------------------------------------------------------------------------
// Evaluation-context frames, shared by the substitution machine (Code = Term,
// Value = Term) and the environment machine (Code = term + environment,
// Value = machine value).
// ---------------------------------------------------------------------------

namespace frame {
template <class Code>
struct Arg {
    Code arg;
    bool operator==(const Arg&) const = default;
};
struct Succ {
    bool operator==(const Succ&) const = default;
};
template <class Value>
struct Fun {
    Value fn;
    bool operator==(const Fun&) const = default;
};
template <class Code>
struct ConsHead {
    Code tail;
    bool operator==(const ConsHead&) const = default;
};
template <class Value>
struct ConsTail {
    Value head;
    bool operator==(const ConsTail&) const = default;
};
template <class Code>
struct AddLeft {
    Code rhs;
    bool operator==(const AddLeft&) const = default;
};
template <class Value>
struct AddRight {
    Value lhs;
    bool operator==(const AddRight&) const = default;
};
template <class Code>
struct GtLeft {
    Code rhs;
    bool operator==(const GtLeft&) const = default;
};
template <class Value>
struct GtRight {
    Value lhs;
    bool operator==(const GtRight&) const = default;
};
template <class Code>
struct If0 {
    Code zero_branch;
    Code other_branch;
    bool operator==(const If0&) const = default;
};
template <class Code>
struct LCase {
    Code nil_branch;
    Name head;
    Name tail;
    Code cons_branch;
    bool operator==(const LCase&) const = default;
};
template <class Code>
struct Let {
    Name name;
    Code body;
    bool operator==(const Let&) const = default;
};
}  // namespace frame

template <class Code, class Value>
using FrameKind =
    std::variant<frame::Arg<Code>, frame::Succ, frame::Fun<Value>, frame::ConsHead<Code>,
                 frame::ConsTail<Value>, frame::AddLeft<Code>, frame::AddRight<Value>,
                 frame::GtLeft<Code>, frame::GtRight<Value>, frame::If0<Code>,
                 frame::LCase<Code>, frame::Let<Code>>;

struct SubstFrame {
    FrameKind<Term, Term> kind;
};

/// A context tower [C_1, ..., C_h].  C_1 is a frame list (innermost frame
/// first); each C_j for j >= 2 is a stack whose entries are towers of height
/// j - 1.  Machine configurations carry a tower of height n + 1; shift_i
/// captures a tower of height i.
template <class Frame>
struct Tower {
    PList<Frame> frames;
    std::vector<PList<Tower>> stacks;  // stacks[j - 2] is C_j

    static Tower empty(std::size_t height) {
        Tower t;
        t.stacks.resize(height == 0 ? 0 : height - 1);
        return t;
    }

    [[nodiscard]] std::size_t height() const noexcept { return stacks.size() + 1; }

    [[nodiscard]] const PList<Tower>& stack(std::size_t j) const { return stacks.at(j - 2); }

    [[nodiscard]] bool all_empty() const {
        if (!frames.empty()) return false;
        for (const auto& s : stacks)
            if (!s.empty()) return false;
        return true;
    }

    [[nodiscard]] Tower with_frames(PList<Frame> f) const {
        Tower t = *this;
        t.frames = std::move(f);
        return t;
    }

    [[nodiscard]] Tower push_frame(Frame f) const { return with_frames(frames.push(std::move(f))); }

    /// [C_1, ..., C_i] as a tower of height i.
    [[nodiscard]] Tower prefix(std::size_t i) const {
        Tower t;
        t.frames = frames;
        t.stacks.assign(stacks.begin(), stacks.begin() + static_cast<std::ptrdiff_t>(i - 1));
        return t;
    }

    /// Replace levels 1..h of this tower by `lower` (of height h).
    [[nodiscard]] Tower overlay(const Tower& lower) const {
        Tower t = *this;
        t.frames = lower.frames;
        for (std::size_t k = 0; k < lower.stacks.size(); ++k) t.stacks[k] = lower.stacks[k];
        return t;
    }

    /// Levels 1..i emptied; C_{i+1} gets [C_1..C_i] pushed on it.
    [[nodiscard]] Tower delimit(std::size_t i) const {
        Tower t = overlay(Tower::empty(i));
        t.stacks[i - 1] = stacks[i - 1].push(prefix(i));
        return t;
    }

    /// Levels 1..i emptied.
    [[nodiscard]] Tower clear_below(std::size_t i) const { return overlay(Tower::empty(i)); }

    /// Levels 1..i taken from `captured`; the current [C_1..C_i] is pushed on
    /// C_{i+1}.
    [[nodiscard]] Tower reinstate(const Tower& captured) const {
        const std::size_t i = captured.height();
        Tower t = overlay(captured);
        t.stacks[i - 1] = stacks[i - 1].push(prefix(i));
        return t;
    }

    /// Smallest j >= 2 with C_j non-empty, or 0 if all stacks are empty.
    [[nodiscard]] std::size_t lowest_nonempty_stack() const {
        for (std::size_t k = 0; k < stacks.size(); ++k)
            if (!stacks[k].empty()) return k + 2;
        return 0;
    }

    /// Pop the top of C_j (j >= 2) back into levels 1..j-1.
    [[nodiscard]] Tower pop_level(std::size_t j) const {
        const auto& s = stacks.at(j - 2);
        Tower t = overlay(s.head());
        t.stacks[j - 2] = s.tail();
        return t;
    }
};

/// Thrown by parse() on malformed input.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line, int column)
        : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                             std::to_string(column) + ": " + msg),
          line_(line),
          column_(column) {}
    [[nodiscard]] int line() const noexcept { return line_; }
    [[nodiscard]] int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

/// Thrown when a term is not a valid program for the requested level.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace mk {
Term lit(std::int64_t m);
Term var(Name x);
Term lam(Name x, Term body);
Term app(Term fn, Term arg);
Term succ(Term t);
Term reset(int level, Term t);
Term shift(int level, Name k, Term t);
Term captured(SubstTower tower);
Term nil();
Term cons(Term head, Term tail);
Term lcase(Term scrutinee, Term nil_branch, Name head, Name tail, Term cons_branch);
Term if0(Term cond, Term zero_branch, Term other_branch);
Term let(Name x, Term bound, Term body);
Term fix(Name self, Name param, Term body);
Term add(Term lhs, Term rhs);
Term gt(Term lhs, Term rhs);
/// Proper list of integer literals.
Term int_list(const std::vector<std::int64_t>& xs);
}  // namespace mk

Term parse(std::string_view text);
std::string print_term(const Term& t);
std::string print_frame(const SubstFrame& f);
/// Frame list, innermost first: `F1 . F2 . []`.
std::string print_frames(const PList<SubstFrame>& frames);
/// Tower levels from outermost to innermost separated by `sep`.
std::string print_tower(const SubstTower& tower, std::string_view sep = " ; ");

std::set<Name> free_vars(const Term& t);
bool is_closed(const Term& t);

/// Syntactic values: literals, abstractions, fix, nil, captured contexts and
/// cons cells of values.
bool is_value(const Term& t);

/// t{x := v}, capture-avoiding.  Colliding binders y are renamed to the
/// least y1, y2, ... not occurring in either operand.
Term substitute(const Term& t, const Name& x, const Term& v);

/// Largest shift/reset index in t (captured towers count by height); 0 if none.
int max_level(const Term& t);
bool contains_captured(const Term& t);

/// Throws ValidationError unless t is closed, free of captured contexts, and
/// every operator index is in [1, level].
void validate_program(const Term& t, int level);
/// Throws ValidationError unless level >= 1 and every operator index is <= level.
void require_level(const Term& t, int level);

bool alpha_equal(const Term& a, const Term& b);

bool operator==(const SubstFrame& a, const SubstFrame& b);
bool operator==(const PList<SubstFrame>& a, const PList<SubstFrame>& b);
bool operator==(const SubstTower& a, const SubstTower& b);
bool operator==(const PList<SubstTower>& a, const PList<SubstTower>& b);

/// Extracts a proper list of integers, if t is one.
std::optional<std::vector<std::int64_t>> as_int_list(const Term& t);

}  // namespace cpsh

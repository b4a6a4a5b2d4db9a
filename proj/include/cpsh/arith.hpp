#pragma once

// Arithmetic expressions built from naturals and additions: a direct
// evaluator, its CPS counterpart, the term-based abstract machine, and the
// reduction semantics read off that machine.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace cpsh::arith {

using Nat = std::uint64_t;

struct AExp;
using AExpPtr = std::shared_ptr<const AExp>;

struct Num {
    Nat value;
};
struct Plus {
    AExpPtr lhs;
    AExpPtr rhs;
};

struct AExp {
    std::variant<Num, Plus> v;
};

AExpPtr num(Nat m);
AExpPtr plus(AExpPtr a, AExpPtr b);

bool operator==(const AExp& a, const AExp& b);

/// Evaluation contexts, innermost frame first.
struct ACtx;
using ACtxPtr = std::shared_ptr<const ACtx>;

/// [ ] + e
struct AAdd1 {
    AExpPtr rhs;
    ACtxPtr next;
};
/// m + [ ]
struct AAdd2 {
    Nat lhs;
    ACtxPtr next;
};

struct ACtx {
    std::variant<AAdd1, AAdd2> v;
};

/// nullptr is the empty context.
inline const ACtxPtr kEnd = nullptr;

bool ctx_equal(const ACtxPtr& a, const ACtxPtr& b);

Nat eval_direct(const AExp& e);
Nat eval_cps(const AExp& e);

/// eval <e, k> or apply <k, m>.
struct MEval {
    AExpPtr exp;
    ACtxPtr ctx;
};
struct MApply {
    ACtxPtr ctx;
    Nat value;
};

/// A potential redex m1 + m2 in its context.
struct Decomposition {
    ACtxPtr ctx;
    Nat lhs;
    Nat rhs;

    bool operator==(const Decomposition& o) const {
        return lhs == o.lhs && rhs == o.rhs && ctx_equal(ctx, o.ctx);
    }
};

struct MachineRun {
    Nat value = 0;
    /// Rule applications, the initial transition from e and the final one
    /// to the value included.
    std::uint64_t transitions = 0;
    /// eval and apply configurations visited.
    std::uint64_t configurations = 0;
    /// The decomposition in force at every (add) transition, in order.
    std::vector<Decomposition> contractions;
};

MachineRun run_machine(const AExpPtr& e);

/// Either the value of e or its leftmost-innermost redex.
using DecomposeResult = std::variant<Nat, Decomposition>;
DecomposeResult decompose(const AExpPtr& e);
AExpPtr plug(const ACtxPtr& ctx, AExpPtr e);
AExpPtr plug(const Decomposition& d);

struct Done {
    Nat value;
};
using StepResult = std::variant<AExpPtr, Done>;
StepResult reduce_step(const AExpPtr& e);

struct ReductionRun {
    Nat value = 0;
    std::uint64_t reductions = 0;
    /// The decomposition of each intermediate term, in order.
    std::vector<Decomposition> contractions;
};

/// Iterates decompose, contract and plug from scratch.
ReductionRun reduce_all(const AExpPtr& e);

/// `(+ e e)` or a natural literal.  Throws ParseError, also when the sum
/// reaches 2^31.
AExpPtr parse(const std::string& text);
std::string print(const AExp& e);

}  // namespace cpsh::arith

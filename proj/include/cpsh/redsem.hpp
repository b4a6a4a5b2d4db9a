#pragma once

// Reduction semantics for the CPS hierarchy at level n: decomposition into a
// context tower and a potential redex, plugging, contraction, one-step
// reduction, and evaluation by iterated reduction.

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>

#include "cpsh/outcome.hpp"
#include "cpsh/syntax.hpp"

namespace cpsh {

enum class RedexKind { Succ, App, Shift, Reset, Add, Gt, If0, LCase, Let, FreeVar };

/// Classifies a focus term as a potential redex (its operands being values).
std::optional<RedexKind> redex_kind(const Term& t);
/// Potential redex to which a contraction rule applies.
bool is_actual_redex(const Term& t);

struct Decomposition {
    SubstTower tower;
    Term focus;

    bool operator==(const Decomposition& o) const { return focus == o.focus && tower == o.tower; }
};

struct ValueFound {
    Term value;

    bool operator==(const ValueFound& o) const { return value == o.value; }
};

using DecomposeResult = std::variant<ValueFound, Decomposition>;

/// Where decomposition resumes: evaluating a term, or returning a value to C_1.
enum class Mode { Eval, Cont };

struct Refocused {
    DecomposeResult result;
    /// Machine transitions taken, none of them a contraction.
    std::uint64_t transitions = 0;
};

/// dec started from focus `t` inside `tower` (height n + 1).
Refocused refocus(Mode mode, const Term& t, const SubstTower& tower, int n);

/// decompose(t) = refocus from t in the empty tower.
DecomposeResult decompose(const Term& t, int n);

Term plug(const SubstTower& tower, const Term& t);
Term plug(const Decomposition& d);

struct Contracted {
    Mode mode;
    Term term;
    SubstTower tower;
};
using ContractResult = std::variant<Contracted, StuckInfo>;

/// Applies the reduction rule for the focused redex.  Values returned to a
/// context (delta, beta_ctx, Reset) resume in Cont mode; the rest in Eval.
ContractResult contract(const Decomposition& d);

struct ReduceNext {
    Term term;
};
struct ReduceDone {
    Term value;
};
struct ReduceStuck {
    Decomposition at;
    StuckInfo info;
};
using ReduceResult = std::variant<ReduceNext, ReduceDone, ReduceStuck>;

/// plug . contract . decompose
ReduceResult reduce_step(const Term& t, int n);

struct ReductionOptions {
    /// Check dec(t, tower) = decompose(plug(tower[t])) after every contraction.
    bool check_refocus = false;
    /// Sees each reduct with its reduction index (the program is index 0).
    std::function<void(std::uint64_t, const Term&)> observer;
};

struct RRunResult {
    OutcomeKind kind = OutcomeKind::Timeout;
    std::optional<Term> value;
    std::optional<StuckInfo> stuck;
    std::optional<Decomposition> stuck_at;
    /// Cost in machine transitions: refocusing transitions plus one per
    /// contraction.  Fuel is measured in the same unit.
    std::uint64_t steps = 0;
    std::uint64_t reductions = 0;
    std::uint64_t refocus_checks = 0;
    std::uint64_t refocus_violations = 0;

    [[nodiscard]] Outcome outcome() const;
};

/// Iterates reduce_step.  Each next decomposition is computed from scratch
/// on the plugged term; the refocused decomposition supplies the cost.
RRunResult evaluate_by_reduction(const Term& program, int n, std::uint64_t fuel,
                                 const ReductionOptions& options = {});

}  // namespace cpsh

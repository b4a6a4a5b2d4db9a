#pragma once

// Substitution-based abstract machine for the CPS hierarchy at level n.
// Frames hold closed terms; shift substitutes the captured tower (as a
// term::Captured value) for its variable.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>

#include "cpsh/outcome.hpp"
#include "cpsh/syntax.hpp"

namespace cpsh {

struct SEval {
    Term term;
    SubstTower tower;
};
/// Returning `value` to level `level` of the tower; levels below are empty.
struct SCont {
    std::size_t level;
    Term value;
    SubstTower tower;
};
struct SFinal {
    Term value;
};
using SConfig = std::variant<SEval, SCont, SFinal>;

/// Static: shift/reset.  Dynamic: the captured-context application rule
/// concatenates contexts instead of pushing on the meta-context (F/#).
enum class Control { Static, Dynamic };

using SStepResult = std::variant<SConfig, StuckInfo>;

SConfig subst_initial(const Term& program, int n);
SStepResult step_subst(const SConfig& c, int n, Control control = Control::Static);
/// True for the configuration whose only transition unloads the final value.
bool subst_is_final_ready(const SConfig& c, int n);

using SObserver = std::function<void(std::uint64_t, const SConfig&)>;

struct SRunResult {
    OutcomeKind kind = OutcomeKind::Timeout;
    std::optional<Term> value;
    std::optional<StuckInfo> stuck;
    std::uint64_t steps = 0;

    [[nodiscard]] Outcome outcome() const;
};

/// Iterates step_subst from the initial configuration.  The step count
/// excludes the final unloading transition.  `observer`, if set, sees every
/// configuration with its index, the final one included.
SRunResult run_subst(const Term& program, int n, std::uint64_t fuel, const SObserver& observer = {},
                     Control control = Control::Static);

/// `[] * c2 = c2`, `(f : rest) * c2 = f : (rest * c2)`.
PList<SubstFrame> concat_ctx(const PList<SubstFrame>& c, const PList<SubstFrame>& c2);

/// The level-1 F/# machine: run_subst at n = 1 with the dynamic rule.
SRunResult run_dynamic(const Term& program, std::uint64_t fuel, const SObserver& observer = {});

// Contraction rules for the non-control redexes; the reduction semantics
// shares them with the machine.
namespace subst_rules {
/// Lam or Fix applied to a value: the instantiated body.  Throws StuckSignal
/// for anything else (captured contexts are handled by the caller).
Term apply_function(const Term& fn, const Term& arg);
std::int64_t expect_int(const Term& v, StuckKind kind);
Term lcase_branch(const Term& scrutinee, const Term& nil_branch, const Name& head, const Name& tail,
                  const Term& cons_branch);
Term if0_branch(const Term& cond, const Term& zero_branch, const Term& other_branch);
}  // namespace subst_rules

/// `k: <tag> | C_{n+1} | ... | C_2 | C_1 [ focus ]`.
std::string trace_line(std::uint64_t k, const SConfig& c);

}  // namespace cpsh

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "cpsh/syntax.hpp"

namespace cpsh {

enum class OutcomeKind { Value, Stuck, Timeout };

enum class StuckKind {
    ApplyNonFunction,
    SuccNonInteger,
    AddNonInteger,
    GtNonInteger,
    If0NonInteger,
    LCaseNonList,
    FreeVariable,
};

std::string_view to_string(OutcomeKind k);
std::string_view to_string(StuckKind k);

struct StuckInfo {
    StuckKind kind = StuckKind::ApplyNonFunction;
    std::string detail;
};

/// Thrown inside evaluators to abandon a run on a stuck redex.
struct StuckSignal {
    StuckInfo info;
};

/// Backend-independent summary of a run.  `observable` is the canonical text
/// of the final value (integers verbatim, functions and contexts as `<fun>`,
/// lists as `[a, b]`), so that values from different backends can be compared
/// without translating between representations.
struct Outcome {
    OutcomeKind kind = OutcomeKind::Timeout;
    std::string observable;
    std::optional<std::int64_t> integer;
    std::optional<StuckKind> stuck;
    std::string detail;
    std::uint64_t steps = 0;
};

/// Observable text of a syntactic value.
std::string observe(const Term& v);

Outcome value_outcome(std::string observable, std::optional<std::int64_t> integer, std::uint64_t steps);
Outcome stuck_outcome(const StuckInfo& info, std::uint64_t steps);
Outcome timeout_outcome(std::uint64_t steps);

/// Same outcome class, same observable, same stuck kind.  Step counts are not
/// compared.
bool same_observable(const Outcome& a, const Outcome& b);

std::string describe(const Outcome& o);

/// Process exit code for an outcome: 0 value, 1 stuck, 2 timeout.
int exit_code(const Outcome& o);

constexpr int kExitParse = 3;
constexpr int kExitDisagree = 4;

/// Integer arithmetic of the object language wraps around.
inline std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}

}  // namespace cpsh

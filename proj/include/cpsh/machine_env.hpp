#pragma once

// Environment-based abstract machine for the CPS hierarchy at level n, and
// the realize translation from its values and configurations to the
// substitution machine's.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <tuple>
#include <variant>

#include "cpsh/machine_subst.hpp"
#include "cpsh/outcome.hpp"
#include "cpsh/syntax.hpp"

namespace cpsh {

struct MValue;
struct EnvBinding;
struct EnvFrame;
using Env = PList<EnvBinding>;
using EnvTower = Tower<EnvFrame>;

namespace mv {
struct Int {
    std::int64_t value;
};
/// `lam` is the term::Lam node the closure was built from.
struct Closure {
    Term lam;
    Env env;
};
/// `fix` is the term::Fix node; applying it rebinds the function name.
struct FixClosure {
    Term fix;
    Env env;
};
struct Nil {};
struct Cons {
    std::shared_ptr<const MValue> head;
    std::shared_ptr<const MValue> tail;
};
struct Captured {
    std::shared_ptr<const EnvTower> tower;
};
}  // namespace mv

struct MValue {
    std::variant<mv::Int, mv::Closure, mv::FixClosure, mv::Nil, mv::Cons, mv::Captured> v;
};

struct EnvBinding {
    Name name;
    MValue value;
};

struct EnvCode {
    Term term;
    Env env;
};

struct EnvFrame {
    FrameKind<EnvCode, MValue> kind;
};

const MValue* lookup(const Env& env, const Name& x);

struct EEval {
    Term term;
    Env env;
    EnvTower tower;
};
struct ECont {
    std::size_t level;
    MValue value;
    EnvTower tower;
};
struct EFinal {
    MValue value;
};
using EConfig = std::variant<EEval, ECont, EFinal>;

using EStepResult = std::variant<EConfig, StuckInfo>;

EConfig env_initial(const Term& program, int n);
EStepResult step_env(const EConfig& c, int n);
bool env_is_final_ready(const EConfig& c, int n);

using EObserver = std::function<void(std::uint64_t, const EConfig&)>;

struct ERunResult {
    OutcomeKind kind = OutcomeKind::Timeout;
    std::optional<MValue> value;
    std::optional<StuckInfo> stuck;
    std::uint64_t steps = 0;

    [[nodiscard]] Outcome outcome() const;
};

/// Iterates step_env.  The step count excludes the final unloading.  With
/// `check_shapes`, every stack entry on top of a level-j stack is checked to
/// be a tower of height j - 1 after each transition (throws logic_error).
ERunResult run_env(const Term& program, int n, std::uint64_t fuel, const EObserver& observer = {},
                   bool check_shapes = false);

/// Checks the reachable-shape invariant on the top entries of every stack.
template <class Frame>
bool top_entries_well_shaped(const Tower<Frame>& t) {
    for (std::size_t j = 2; j <= t.height(); ++j) {
        const auto& s = t.stack(j);
        if (!s.empty() && s.head().height() != j - 1) return false;
    }
    return true;
}

/// The translation R from environment-machine objects to substitution
/// machine syntax: integers to literals, closures to abstractions with their
/// free variables replaced by the realized environment entries, and
/// homomorphically on frames and towers.
///
/// Results are memoized on node identity (the keyed objects are kept alive
/// by the cache), so realizing the configuration of every step of a run costs
/// time proportional to what changed.
class Realizer {
public:
    Term value(const MValue& v);
    SubstFrame frame(const EnvFrame& f);
    PList<SubstFrame> frames(const PList<EnvFrame>& fs);
    SubstTower tower(const EnvTower& t);
    SConfig config(const EConfig& c);
    /// `t` with every free variable outside `bound` replaced by its
    /// realized value from `env`.
    Term close(const Term& t, const Env& env, std::initializer_list<const Name*> bound = {});

private:
    using Key = std::tuple<const void*, const void*, int>;
    struct CodeEntry {
        Term term;
        Env env;
        Term result;
    };
    std::map<Key, CodeEntry> codes_;
    std::map<const void*, std::pair<std::shared_ptr<const EnvTower>, Term>> captured_;
    std::map<const void*, std::pair<PList<EnvFrame>, PList<SubstFrame>>> frame_lists_;
    std::map<const void*, std::pair<PList<EnvTower>, PList<SubstTower>>> stacks_;

    PList<SubstTower> stack(const PList<EnvTower>& s);
};

Term realize(const MValue& v);
SConfig realize(const EConfig& c);

/// Observable text of a machine value (same format as observe on terms).
std::string observe(const MValue& v);

std::string trace_line(std::uint64_t k, const EConfig& c);

}  // namespace cpsh

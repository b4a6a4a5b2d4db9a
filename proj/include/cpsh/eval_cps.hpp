#pragma once

// The definitional evaluator with n + 1 layers of continuations.
//
// Continuation k_i receives a value and the outer continuations
// [k_{i+1}, ..., k_{n+1}].  Every call to eval and every continuation
// invocation is returned to a driver loop as a thunk instead of being called,
// which keeps the native stack flat and gives one thunk per machine
// configuration.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "cpsh/outcome.hpp"
#include "cpsh/syntax.hpp"

namespace cpsh {

struct HostValue;
struct Bounce;
struct ContFn;
using Cont = std::shared_ptr<const ContFn>;
using ContSeq = std::vector<Cont>;
using FunFn = std::function<Bounce(const HostValue&, const ContSeq&)>;

/// k_i: called with a value and [k_{i+1}, ..., k_{n+1}].
struct ContFn {
    std::function<Bounce(const HostValue&, const ContSeq&)> fn;
};

namespace hv {
struct Int {
    std::int64_t value;
};
/// Object-language functions and captured continuations: called with the
/// argument and the full continuation sequence [k_1, ..., k_{n+1}].
struct Fun {
    std::shared_ptr<const FunFn> fn;
};
struct Nil {};
struct Pair {
    std::shared_ptr<const HostValue> head;
    std::shared_ptr<const HostValue> tail;
};
}  // namespace hv

struct HostValue {
    std::variant<hv::Int, hv::Fun, hv::Nil, hv::Pair> v;
};

/// Either a finished answer or the next suspended step.
struct Bounce {
    std::function<Bounce()> next;
    std::optional<HostValue> done;
};

struct HostBinding {
    Name name;
    HostValue value;
};
using HostEnv = PList<HostBinding>;

/// Shared state of one evaluation: the initial continuations and the
/// instrumentation flag recording whether an eval call ever saw slots
/// 2..n+1 differ from them.
struct CpsContext {
    int n = 1;
    ContSeq thetas;
    bool meta_untouched = true;
};

/// The eval function: one thunk for evaluating t under e with continuations ks.
Bounce eval_cps(const std::shared_ptr<CpsContext>& ctx, const Term& t, const HostEnv& e, const ContSeq& ks);

/// θ_1, ..., θ_{n+1}: θ_i passes its value to k_{i+1}; θ_{n+1} is the identity answer.
ContSeq initial_continuations(int n);

struct CRunResult {
    OutcomeKind kind = OutcomeKind::Timeout;
    std::optional<HostValue> value;
    std::optional<StuckInfo> stuck;
    std::uint64_t steps = 0;
    /// False if k_2..k_{n+1} were ever replaced during the run.
    bool meta_untouched = true;

    [[nodiscard]] Outcome outcome() const;
};

/// evaluate(t) = eval(t, empty, θ_1, ..., θ_{n+1}), driven for at most
/// `fuel` thunks.  The thunk count equals the machine step count.
CRunResult run_cps(const Term& program, int n, std::uint64_t fuel);

std::string observe(const HostValue& v);

}  // namespace cpsh

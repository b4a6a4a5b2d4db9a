#pragma once

// Cross-backend checks: lock-step comparison of the two machines, full
// four-way comparison of one program, and batch runners over many programs
// (a serial reference and an OpenMP version that must agree with it).

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cpsh/machine_env.hpp"
#include "cpsh/machine_subst.hpp"
#include "cpsh/outcome.hpp"
#include "cpsh/syntax.hpp"

namespace cpsh::check {

bool config_equal(const SConfig& a, const SConfig& b);

/// Replaces the substitution machine's transition function, so the harness
/// can be tested against a deliberately broken backend.
using SubstStepper = std::function<SStepResult(const SConfig&, int)>;

struct LockstepReport {
    bool ok = true;
    /// Transitions both machines took (excluding the final unloading).
    std::uint64_t steps = 0;
    Outcome env;
    Outcome subst;
    std::optional<std::uint64_t> divergence_step;
    std::string env_config;
    std::string subst_config;
};

/// Runs both machines side by side and compares the realized environment
/// configuration with the substitution configuration after every transition.
LockstepReport lockstep(const Term& program, int n, std::uint64_t fuel, const SubstStepper& subst_step = {});

struct CompareReport {
    Outcome cps;
    Outcome env;
    Outcome subst;
    Outcome redsem;
    LockstepReport lock;
    std::uint64_t refocus_checks = 0;
    std::uint64_t refocus_violations = 0;
    bool outcomes_agree = false;
    bool steps_agree = false;

    [[nodiscard]] bool ok() const {
        return outcomes_agree && steps_agree && lock.ok && refocus_violations == 0;
    }
    /// One line per backend followed by the verdict and, on failure, the
    /// first divergence.
    [[nodiscard]] std::string describe() const;
};

CompareReport compare(const Term& program, int n, std::uint64_t fuel, const SubstStepper& subst_step = {});

/// Per-program digest kept by the batch runners.
struct Summary {
    Outcome cps;
    Outcome env;
    Outcome subst;
    Outcome redsem;
    bool ok = false;
    std::uint64_t lock_steps = 0;
    std::uint64_t refocus_violations = 0;

    bool operator==(const Summary& o) const;
};

Summary summarize(const CompareReport& r);

std::vector<Summary> run_batch_serial(const std::vector<Term>& programs, int n, std::uint64_t fuel);
/// Same results as run_batch_serial, computed with one program per OpenMP
/// task (dynamic schedule).  `threads` <= 0 uses the OpenMP default.
std::vector<Summary> run_batch_parallel(const std::vector<Term>& programs, int n, std::uint64_t fuel,
                                        int threads = 0);

}  // namespace cpsh::check

#pragma once

// Seeded random generators for closed object-language programs, arithmetic
// expressions and unit/product terms.

#include <cstdint>
#include <random>

#include "cpsh/arith.hpp"
#include "cpsh/nbe.hpp"
#include "cpsh/syntax.hpp"

namespace cpsh::gen {

using Rng = std::mt19937_64;

struct ProgramOptions {
    int level = 1;
    int max_depth = 6;
    /// Chance that a subterm is generated at a different type than asked.
    double wrong_type = 0.03;
    /// Chance of `(shift i (k) k)`, which lets a captured context escape.
    double escape = 0.03;
    /// Chance of a `(loop 0)` subterm that runs in constant context forever.
    double diverge = 0.005;
    /// When false, no shift body mentions its continuation variable, so no
    /// captured context is ever applied.
    bool apply_captured = true;
};

/// A closed program whose operator indices are within options.level.
Term program(Rng& rng, const ProgramOptions& options);

/// Leaves below 1000 and at most 64 of them, so sums stay below 2^31.
arith::AExpPtr aexp(Rng& rng, int max_depth);

/// A term with indices in 1..n over variables v0 .. v{nvars-1}.
nbe::Mon mon(Rng& rng, int n, int max_depth, int nvars);

}  // namespace cpsh::gen

#pragma once

// Independent oracles and sampling helpers shared by the unit tests and the
// acceptance binary.

#include <cstdint>
#include <string>
#include <vector>

#include "cpsh/gen.hpp"
#include "cpsh/machine_subst.hpp"
#include "cpsh/syntax.hpp"

namespace cpsh::testing {

using Path = std::vector<int>;

/// Value grammar, written out independently of syntax::is_value.
bool oracle_is_value(const Term& t);

/// Every position of `t` holding a non-value whose evaluated subterms are all
/// values, reached only through evaluation positions.  Found by visiting
/// every subterm, not by following the evaluation order.
std::vector<Path> redex_sites(const Term& t);

Term subterm_at(const Term& t, const Path& p);
Term replace_at(const Term& t, const Path& p, const Term& with);

/// A closed term reached by evaluating a random level-n program for a random
/// number of reduction steps.  Covers captured contexts and mid-run shapes.
Term random_reduct(gen::Rng& rng, int n);

/// Random level-n programs.  apply_captured as in gen::ProgramOptions.
std::vector<Term> random_programs(std::uint64_t seed, int n, std::size_t count, bool apply_captured = true);

/// What the traversal program's run looks like on the list [1..len].
struct TraverseShape {
    std::string result;
    std::size_t max_meta = 0;      // deepest C_2
    std::size_t max_c1 = 0;        // longest C_1
    std::size_t max_captured = 0;  // longest C_1 of an applied captured context
    std::size_t max_meta_after_reset = 0;
};
TraverseShape traverse_shape(int len, Control control);

/// Static: C_2 reaches len + 1 and captured contexts stay one frame long.
/// Dynamic: C_2 never exceeds one entry while C_1 reaches len.
bool static_shape_ok(const TraverseShape& s, int len);
bool dynamic_shape_ok(const TraverseShape& s, int len);

std::string corpus_dir();

}  // namespace cpsh::testing

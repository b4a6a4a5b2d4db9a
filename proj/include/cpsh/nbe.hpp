#pragma once

// Normalization by evaluation for the hierarchical language of units and
// products: t ::= x | (unit i) | (prod i t t'), 1 <= i <= n.
//
// normalize_monoid (n = 1) and normalize_dnf (n = 2) are written separately
// from the level-n normalizer normalize_hier so that the latter can be
// checked against them.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace cpsh::nbe {

struct MonTerm;
using Mon = std::shared_ptr<const MonTerm>;

struct MonTerm {
    enum class Kind { Var, Unit, Prod };
    Kind kind;
    int index = 0;  // Unit and Prod
    std::string name;  // Var
    Mon lhs;
    Mon rhs;
};

Mon var(std::string name);
Mon unit(int i);
Mon prod(int i, Mon a, Mon b);

/// Largest unit or product index, 0 for a bare variable.
int max_index(const MonTerm& t);
std::set<std::string> variables(const MonTerm& t);

/// Normal forms.  A level-i form is (unit i) or (prod i lower rest) with
/// `lower` at level i - 1 and `rest` at level i; a level-0 form is a variable.
struct NfTerm;
using Nf = std::shared_ptr<const NfTerm>;

struct NfTerm {
    enum class Kind { Var, Unit, Prod };
    Kind kind;
    int level = 0;
    std::string name;
    Nf lower;
    Nf rest;
};

bool nf_equal(const Nf& a, const Nf& b);
std::uint64_t nf_size(const Nf& u);

/// Counts normal-form nodes built by one normalization.
struct Stats {
    std::uint64_t nodes = 0;
};

Nf normalize_monoid(const Mon& t, Stats* stats = nullptr);
Nf normalize_dnf(const Mon& t, Stats* stats = nullptr);
/// Level-n normalizer with n - 1 layers of delimited continuations.
Nf normalize_hier(const Mon& t, int n, Stats* stats = nullptr);

/// Erases the normal-form markers.
Mon embed(const Nf& u);

/// u is a level-n normal form.
bool grammar_check_nf(const Nf& u, int n);

/// Variables of an n = 1 term in order, units dropped.
std::vector<std::string> oracle_flatten(const Mon& t);
/// The variables of a level-1 normal form in order.
std::optional<std::vector<std::string>> nf_flat_vars(const Nf& u);

/// Boolean reading of an n = 2 term: unit 1 true, prod 1 and, unit 2 false,
/// prod 2 or.
bool truth_value(const MonTerm& t, const std::map<std::string, bool>& env);
/// t and embed(u) agree under every assignment to `vars` (at most 16).
bool oracle_truth_equiv(const Mon& t, const Nf& u, const std::set<std::string>& vars);

/// NAME, (unit i) or (prod i t t).  Throws ParseError.
Mon parse_mon(const std::string& text);
std::string print_mon(const MonTerm& t);
std::string print_nf(const Nf& u);

}  // namespace cpsh::nbe

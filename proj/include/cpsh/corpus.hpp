#pragma once

// Shipped object-language programs, their parameterized sources, and host
// reference implementations used as expected outputs.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cpsh/outcome.hpp"
#include "cpsh/syntax.hpp"

namespace cpsh::corpus {

/// A corpus file.  Header comments carry `; level: N`, `; expect: OBS` and
/// optionally `; expect-dynamic: OBS`, where OBS is an observable, `stuck`
/// or `timeout`.
struct Entry {
    std::string name;
    std::string path;
    std::string source;
    Term program;
    int level = 1;
    std::string expect;
    std::optional<std::string> expect_dynamic;
};

Entry load_file(const std::string& path);
/// Every *.cps file in `dir`, sorted by name.
std::vector<Entry> load_dir(const std::string& dir);

/// Outcome matches an `expect` annotation.
bool matches(const Outcome& o, const std::string& expect);

using IntList = std::vector<std::int64_t>;

std::string list_literal(const IntList& xs);
/// `(lambda (m) (gt m THRESHOLD))` applied to every element.
std::string prefix_first_source(std::int64_t threshold, const IntList& xs);
std::string prefix_all_source(std::int64_t threshold, const IntList& xs);
std::string traverse_source(const IntList& xs);

using Pred = std::function<bool(std::int64_t)>;

/// First prefix whose last element satisfies p, by accumulating the prefix
/// in reverse; empty if none.
IntList ref_find_first_prefix(const Pred& p, const IntList& xs);
/// Every prefix whose last element satisfies p.
std::vector<IntList> ref_find_all_prefixes(const Pred& p, const IntList& xs);

/// Observable text of an integer list and of a list of integer lists.
std::string observable(const IntList& xs);
std::string observable(const std::vector<IntList>& xss);

}  // namespace cpsh::corpus

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cpsh {

/// Raw S-expression with source position, shared by the term, arithmetic and
/// monoid readers.
struct SExpr {
    bool is_list = false;
    std::string atom;
    std::vector<SExpr> items;
    int line = 1;
    int column = 1;
};

/// Reads every top-level S-expression in `text`.  `;` starts a comment.
/// Throws ParseError on unbalanced parentheses.
std::vector<SExpr> read_sexprs(std::string_view text);

/// Exactly one top-level S-expression.
SExpr read_single_sexpr(std::string_view text);

bool is_integer_atom(const std::string& s);

}  // namespace cpsh

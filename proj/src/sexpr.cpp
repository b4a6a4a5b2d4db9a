#include "cpsh/sexpr.hpp"

#include <cctype>

#include "cpsh/syntax.hpp"

namespace cpsh {

namespace {

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    std::vector<SExpr> read_all() {
        std::vector<SExpr> out;
        skip_space();
        while (pos_ < text_.size()) {
            out.push_back(read_one());
            skip_space();
        }
        return out;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_space() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == ';') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    SExpr read_one() {
        // Explicit stack: nesting depth of generated programs is unbounded.
        std::vector<SExpr> open;
        for (;;) {
            skip_space();
            if (pos_ >= text_.size()) {
                if (open.empty()) throw ParseError("unexpected end of input", line_, col_);
                throw ParseError("missing ')'", open.back().line, open.back().column);
            }
            char c = text_[pos_];
            SExpr done;
            if (c == '(') {
                SExpr list;
                list.is_list = true;
                list.line = line_;
                list.column = col_;
                advance();
                open.push_back(std::move(list));
                continue;
            }
            if (c == ')') {
                if (open.empty()) throw ParseError("unexpected ')'", line_, col_);
                advance();
                done = std::move(open.back());
                open.pop_back();
            } else {
                done.line = line_;
                done.column = col_;
                while (pos_ < text_.size()) {
                    char d = text_[pos_];
                    if (d == '(' || d == ')' || d == ';' || std::isspace(static_cast<unsigned char>(d)))
                        break;
                    done.atom.push_back(d);
                    advance();
                }
            }
            if (open.empty()) return done;
            open.back().items.push_back(std::move(done));
        }
    }
};

}  // namespace

std::vector<SExpr> read_sexprs(std::string_view text) { return Reader(text).read_all(); }

SExpr read_single_sexpr(std::string_view text) {
    auto all = read_sexprs(text);
    if (all.empty()) throw ParseError("empty input", 1, 1);
    if (all.size() > 1)
        throw ParseError("trailing input after expression", all[1].line, all[1].column);
    return std::move(all.front());
}

bool is_integer_atom(const std::string& s) {
    std::size_t i = (!s.empty() && s[0] == '-') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

}  // namespace cpsh

#include "cpsh/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cpsh::corpus {

namespace {

std::string trim(std::string s) {
    auto not_space = [](unsigned char c) { return std::isspace(c) == 0; };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::optional<std::string> header(const std::string& line, const std::string& key) {
    std::string prefix = "; " + key + ":";
    if (line.rfind(prefix, 0) != 0) return std::nullopt;
    return trim(line.substr(prefix.size()));
}

}  // namespace

Entry load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    Entry e;
    e.path = path;
    e.name = std::filesystem::path(path).stem().string();
    e.source = buf.str();
    std::istringstream lines(e.source);
    std::string line;
    while (std::getline(lines, line)) {
        if (auto v = header(line, "level")) e.level = std::stoi(*v);
        if (auto v = header(line, "expect")) e.expect = *v;
        if (auto v = header(line, "expect-dynamic")) e.expect_dynamic = *v;
    }
    e.program = parse(e.source);
    return e;
}

std::vector<Entry> load_dir(const std::string& dir) {
    std::vector<std::string> paths;
    for (const auto& f : std::filesystem::directory_iterator(dir))
        if (f.is_regular_file() && f.path().extension() == ".cps") paths.push_back(f.path().string());
    std::sort(paths.begin(), paths.end());
    std::vector<Entry> out;
    out.reserve(paths.size());
    for (const auto& p : paths) out.push_back(load_file(p));
    return out;
}

bool matches(const Outcome& o, const std::string& expect) {
    if (expect == "stuck") return o.kind == OutcomeKind::Stuck;
    if (expect == "timeout") return o.kind == OutcomeKind::Timeout;
    return o.kind == OutcomeKind::Value && o.observable == expect;
}

std::string list_literal(const IntList& xs) {
    std::string out;
    for (auto x : xs) out += "(cons " + std::to_string(x) + " ";
    out += "nil";
    out += std::string(xs.size(), ')');
    return out;
}

std::string prefix_first_source(std::int64_t threshold, const IntList& xs) {
    return "(let (p (lambda (m) (gt m " + std::to_string(threshold) +
           ")))"
           " (reset 1 ((fix (visit ys) (lcase ys (shift 1 (k) nil)"
           " (x rest) (cons x (if0 (p x) (visit rest) nil)))) " +
           list_literal(xs) + ")))";
}

std::string prefix_all_source(std::int64_t threshold, const IntList& xs) {
    return "(let (p (lambda (m) (gt m " + std::to_string(threshold) +
           ")))"
           " (reset 1 ((fix (visit ys) (lcase ys (shift 1 (k) nil)"
           " (x rest) (cons x (if0 (p x) (visit rest)"
           " (shift 1 (kk) (cons (reset 1 (kk nil)) (reset 1 (kk (visit rest))))))))) " +
           list_literal(xs) + ")))";
}

std::string traverse_source(const IntList& xs) {
    return "(reset 1 ((fix (visit ys) (lcase ys nil (x rest) (visit (shift 1 (k) (cons x (k rest)))))) " +
           list_literal(xs) + "))";
}

namespace {

IntList reverse(IntList a) {
    std::reverse(a.begin(), a.end());
    return a;
}

}  // namespace

IntList ref_find_first_prefix(const Pred& p, const IntList& xs) {
    IntList acc;
    for (auto x : xs) {
        acc.push_back(x);
        if (p(x)) return acc;
    }
    return {};
}

std::vector<IntList> ref_find_all_prefixes(const Pred& p, const IntList& xs) {
    std::vector<IntList> out;
    IntList a;  // reversed prefix
    for (auto x : xs) {
        a.insert(a.begin(), x);
        if (p(x)) out.push_back(reverse(a));
    }
    return out;
}

std::string observable(const IntList& xs) {
    std::string out = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i > 0) out += ", ";
        out += std::to_string(xs[i]);
    }
    return out + "]";
}

std::string observable(const std::vector<IntList>& xss) {
    std::string out = "[";
    for (std::size_t i = 0; i < xss.size(); ++i) {
        if (i > 0) out += ", ";
        out += observable(xss[i]);
    }
    return out + "]";
}

}  // namespace cpsh::corpus

#include "cpsh/outcome.hpp"

namespace cpsh {

std::string_view to_string(OutcomeKind k) {
    switch (k) {
        case OutcomeKind::Value: return "value";
        case OutcomeKind::Stuck: return "stuck";
        case OutcomeKind::Timeout: return "timeout";
    }
    return "?";
}

std::string_view to_string(StuckKind k) {
    switch (k) {
        case StuckKind::ApplyNonFunction: return "apply-non-function";
        case StuckKind::SuccNonInteger: return "succ-non-integer";
        case StuckKind::AddNonInteger: return "add-non-integer";
        case StuckKind::GtNonInteger: return "gt-non-integer";
        case StuckKind::If0NonInteger: return "if0-non-integer";
        case StuckKind::LCaseNonList: return "lcase-non-list";
        case StuckKind::FreeVariable: return "free-variable";
    }
    return "?";
}

namespace {
void observe_to(std::string& out, const Term& v) {
    if (const auto* m = v.as<term::Lit>()) {
        out += std::to_string(m->value);
        return;
    }
    if (v.is<term::Nil>()) {
        out += "[]";
        return;
    }
    if (v.is<term::Cons>()) {
        // Walk the spine; a non-nil tail makes the list improper.
        std::vector<const Term*> items;
        const Term* cur = &v;
        while (const auto* c = cur->as<term::Cons>()) {
            items.push_back(&c->head);
            cur = &c->tail;
        }
        bool proper = cur->is<term::Nil>();
        out += proper ? "[" : "(";
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (i) out += ", ";
            observe_to(out, *items[i]);
        }
        if (!proper) {
            out += " . ";
            observe_to(out, *cur);
        }
        out += proper ? "]" : ")";
        return;
    }
    out += "<fun>";
}
}  // namespace

std::string observe(const Term& v) {
    std::string out;
    observe_to(out, v);
    return out;
}

Outcome value_outcome(std::string observable, std::optional<std::int64_t> integer, std::uint64_t steps) {
    Outcome o;
    o.kind = OutcomeKind::Value;
    o.observable = std::move(observable);
    o.integer = integer;
    o.steps = steps;
    return o;
}

Outcome stuck_outcome(const StuckInfo& info, std::uint64_t steps) {
    Outcome o;
    o.kind = OutcomeKind::Stuck;
    o.stuck = info.kind;
    o.detail = info.detail;
    o.steps = steps;
    return o;
}

Outcome timeout_outcome(std::uint64_t steps) {
    Outcome o;
    o.kind = OutcomeKind::Timeout;
    o.steps = steps;
    return o;
}

bool same_observable(const Outcome& a, const Outcome& b) {
    return a.kind == b.kind && a.observable == b.observable && a.stuck == b.stuck;
}

std::string describe(const Outcome& o) {
    switch (o.kind) {
        case OutcomeKind::Value: return o.observable;
        case OutcomeKind::Stuck:
            return "stuck: " + std::string(to_string(*o.stuck)) + (o.detail.empty() ? "" : " (" + o.detail + ")");
        case OutcomeKind::Timeout: return "timeout after " + std::to_string(o.steps) + " steps";
    }
    return "?";
}

int exit_code(const Outcome& o) {
    switch (o.kind) {
        case OutcomeKind::Value: return 0;
        case OutcomeKind::Stuck: return 1;
        case OutcomeKind::Timeout: return 2;
    }
    return 2;
}

}  // namespace cpsh

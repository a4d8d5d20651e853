#include "sxq/xpath.hpp"

#include <algorithm>

namespace sxq {

namespace {

// Collapse whitespace runs to single spaces outside quoted strings, trim ends.
std::string normalizeWs(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    char quote = 0;
    bool pendingSpace = false;
    for (char c : s) {
        if (quote) {
            out.push_back(c);
            if (c == quote) quote = 0;
            continue;
        }
        if (c == '"' || c == '\'') {
            if (pendingSpace && !out.empty()) out.push_back(' ');
            pendingSpace = false;
            quote = c;
            out.push_back(c);
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            pendingSpace = true;
            continue;
        }
        if (pendingSpace && !out.empty()) out.push_back(' ');
        pendingSpace = false;
        out.push_back(c);
    }
    return out;
}

// Split a predicate body on top-level '|' (outside quotes/brackets/parens).
std::vector<std::string> splitAlternatives(const std::string& body) {
    std::vector<std::string> alts;
    std::string cur;
    int depth = 0;
    char quote = 0;
    for (char c : body) {
        if (quote) {
            cur.push_back(c);
            if (c == quote) quote = 0;
            continue;
        }
        switch (c) {
        case '"': case '\'': quote = c; cur.push_back(c); break;
        case '[': case '(': depth++; cur.push_back(c); break;
        case ']': case ')': depth--; cur.push_back(c); break;
        case '|':
            if (depth == 0) {
                alts.push_back(normalizeWs(cur));
                cur.clear();
            } else {
                cur.push_back(c);
            }
            break;
        default: cur.push_back(c); break;
        }
    }
    alts.push_back(normalizeWs(cur));
    return alts;
}

} // namespace

std::string Predicate::text() const {
    std::string out;
    for (size_t i = 0; i < alts.size(); i++) {
        if (i) out += " | ";
        out += alts[i];
    }
    return out;
}

std::string Step::text() const {
    std::string out;
    if (axis == Axis::Attribute) {
        out = "@" + name;
        return out;
    }
    out = wildcard ? "*" : name;
    for (const auto& p : preds) out += "[" + p.text() + "]";
    return out;
}

bool Step::looselyEqual(const Step& o) const {
    if (axis != o.axis) return false;
    if (wildcard || o.wildcard) return true;
    return name == o.name;
}

XPath XPath::parse(std::string_view text) {
    std::vector<Step> steps;
    size_t i = 0;
    auto fail = [&](const std::string& msg) { throw syntaxError("path: " + msg, i); };

    if (text.empty() || text[0] != '/') throw syntaxError("path: expected leading '/'", 0);
    while (i < text.size()) {
        if (text[i] != '/') fail("expected '/'");
        i++;
        if (i >= text.size()) fail("trailing '/'");
        Step st;
        if (text[i] == '@') {
            i++;
            size_t start = i;
            while (i < text.size() && text[i] != '/' && text[i] != '[') i++;
            if (i == start) fail("empty attribute name");
            if (i < text.size()) fail("attribute step must be final and bare");
            st.axis = Step::Axis::Attribute;
            st.name = std::string(text.substr(start, i - start));
            steps.push_back(std::move(st));
            break;
        }
        if (text[i] == '*') {
            st.wildcard = true;
            i++;
        } else {
            size_t start = i;
            while (i < text.size() && text[i] != '/' && text[i] != '[' && text[i] != ']' &&
                   text[i] != '@' && text[i] != '*')
                i++;
            if (i == start) fail("empty step name");
            std::string name(text.substr(start, i - start));
            while (!name.empty() && (name.back() == ' ' || name.back() == '\t')) name.pop_back();
            st.name = name;
        }
        while (i < text.size() && text[i] == '[') {
            int depth = 1;
            char quote = 0;
            size_t start = ++i;
            while (i < text.size() && depth > 0) {
                char c = text[i];
                if (quote) {
                    if (c == quote) quote = 0;
                } else if (c == '"' || c == '\'') {
                    quote = c;
                } else if (c == '[') {
                    depth++;
                } else if (c == ']') {
                    depth--;
                }
                i++;
            }
            if (depth != 0) fail("unbalanced '['");
            std::string body(text.substr(start, i - 1 - start));
            Predicate p;
            p.alts = splitAlternatives(body);
            st.preds.push_back(std::move(p));
        }
        steps.push_back(std::move(st));
    }
    if (steps.empty()) throw syntaxError("path: empty", 0);
    return XPath(std::move(steps));
}

std::string XPath::text() const {
    std::string out;
    for (const auto& s : steps_) {
        out += "/";
        out += s.text();
    }
    return out;
}

bool XPath::looselyEqual(const XPath& y) const {
    if (length() != y.length()) return false;
    for (size_t i = 0; i < steps_.size(); i++)
        if (!steps_[i].looselyEqual(y.steps_[i])) return false;
    return true;
}

bool XPath::isKPrefixOf(const XPath& y, size_t k) const {
    if (k == 0 || k > length()) throw Error(Error::Kind::Internal, "k out of range");
    if (k > y.length()) return false;
    for (size_t i = 0; i < k; i++)
        if (!steps_[i].looselyEqual(y.steps()[i])) return false;
    return true;
}

bool XPath::isPrefixOf(const XPath& y) const {
    if (length() > y.length()) return false;
    return isKPrefixOf(y, length());
}

XPath XPath::suffixFrom(size_t k) const {
    std::vector<Step> out(steps_.begin() + static_cast<long>(k), steps_.end());
    return XPath(std::move(out));
}

XPath XPath::prefixTo(size_t k) const {
    std::vector<Step> out(steps_.begin(), steps_.begin() + static_cast<long>(k));
    return XPath(std::move(out));
}

XPath XPath::concat(const XPath& tail) const {
    std::vector<Step> out = steps_;
    out.insert(out.end(), tail.steps_.begin(), tail.steps_.end());
    return XPath(std::move(out));
}

XPath XPath::parent() const {
    if (length() < 2) throw Error(Error::Kind::Internal, "parent of single-step path");
    return prefixTo(length() - 1);
}

PathSet::PathSet(std::initializer_list<const char*> texts) {
    for (const char* t : texts) add(XPath::parse(t));
}

void PathSet::add(XPath p) {
    std::string key = p.text();
    if (std::find(keys_.begin(), keys_.end(), key) != keys_.end()) return;
    keys_.push_back(std::move(key));
    paths_.push_back(std::move(p));
}

void PathSet::addAll(const PathSet& other) {
    for (const auto& p : other) add(p);
}

bool PathSet::contains(const std::string& canonicalText) const {
    return std::find(keys_.begin(), keys_.end(), canonicalText) != keys_.end();
}

std::string PathSet::text() const {
    std::string out = "{";
    for (size_t i = 0; i < paths_.size(); i++) {
        if (i) out += ", ";
        out += paths_[i].text();
    }
    return out + "}";
}

bool PathSet::setEquals(const PathSet& o) const {
    if (size() != o.size()) return false;
    for (const auto& k : keys_)
        if (!o.contains(k)) return false;
    return true;
}

PathSet commonAncestors(const PathSet& x, const PathSet& y) {
    PathSet out;
    for (const auto& p : x)
        for (const auto& q : y)
            if (p.isPrefixOf(q)) {
                out.add(p);
                break;
            }
    return out;
}

PathSet descendants(const PathSet& x, const PathSet& y) {
    PathSet out;
    for (const auto& q : y)
        for (const auto& p : x)
            if (p.isPrefixOf(q)) {
                out.add(q);
                break;
            }
    return out;
}

PathSet suffixes(const PathSet& x, const PathSet& y) {
    PathSet out;
    for (const auto& q : y) {
        size_t best = 0;
        for (const auto& p : x)
            if (p.length() < q.length() && p.isPrefixOf(q)) best = std::max(best, p.length());
        if (best > 0) out.add(q.suffixFrom(best));
    }
    return out;
}

namespace {

// Merge the predicate lists of two loosely-equal steps for the union case:
// identical lists stay, an empty list wins (plain name is more general),
// otherwise the conjunction texts are joined into one disjunction.
std::vector<Predicate> unionPreds(const std::vector<Predicate>& a, const std::vector<Predicate>& b) {
    auto render = [](const std::vector<Predicate>& ps) {
        std::string out;
        for (size_t i = 0; i < ps.size(); i++) {
            if (i) out += " and ";
            out += ps[i].text();
        }
        return out;
    };
    if (a.empty() || b.empty()) return {};
    if (render(a) == render(b)) return a;
    Predicate merged;
    auto contribute = [&](const std::vector<Predicate>& ps) {
        if (ps.size() == 1) {
            for (const auto& alt : ps[0].alts)
                if (std::find(merged.alts.begin(), merged.alts.end(), alt) == merged.alts.end())
                    merged.alts.push_back(alt);
        } else {
            std::string conj = render(ps);
            if (std::find(merged.alts.begin(), merged.alts.end(), conj) == merged.alts.end())
                merged.alts.push_back(conj);
        }
    };
    contribute(a);
    contribute(b);
    return {merged};
}

Step nodeUnion(const Step& a, const Step& b) {
    Step out;
    out.axis = a.axis;
    if (a.wildcard != b.wildcard) {
        out.wildcard = true; // wildcard absorbs, predicates dropped
        return out;
    }
    out.wildcard = a.wildcard;
    out.name = a.name;
    out.preds = unionPreds(a.preds, b.preds);
    return out;
}

Step nodeIntersection(const Step& a, const Step& b) {
    Step out;
    out.axis = a.axis;
    if (a.wildcard && b.wildcard) {
        out.wildcard = true;
    } else {
        out.name = a.wildcard ? b.name : a.name; // concrete name beats wildcard
    }
    out.preds = a.preds;
    for (const auto& p : b.preds) {
        bool dup = false;
        for (const auto& q : out.preds)
            if (q.text() == p.text()) { dup = true; break; }
        if (!dup) out.preds.push_back(p);
    }
    return out;
}

XPath mergePaths(const XPath& a, const XPath& b, Step (*merge)(const Step&, const Step&)) {
    std::vector<Step> steps;
    steps.reserve(a.length());
    for (size_t i = 0; i < a.length(); i++) steps.push_back(merge(a.steps()[i], b.steps()[i]));
    return XPath(std::move(steps));
}

} // namespace

PathSet setUnion(const PathSet& x, const PathSet& y) {
    PathSet out;
    std::vector<bool> used(y.size(), false);
    for (const auto& p : x) {
        bool merged = false;
        for (size_t j = 0; j < y.size(); j++) {
            if (used[j]) continue;
            if (p.looselyEqual(y.paths()[j])) {
                out.add(mergePaths(p, y.paths()[j], nodeUnion));
                used[j] = true;
                merged = true;
                break;
            }
        }
        if (!merged) out.add(p);
    }
    for (size_t j = 0; j < y.size(); j++)
        if (!used[j]) out.add(y.paths()[j]);
    return out;
}

PathSet setIntersection(const PathSet& x, const PathSet& y) {
    PathSet out;
    std::vector<bool> used(y.size(), false);
    for (const auto& p : x) {
        for (size_t j = 0; j < y.size(); j++) {
            if (used[j]) continue;
            if (p.looselyEqual(y.paths()[j])) {
                out.add(mergePaths(p, y.paths()[j], nodeIntersection));
                used[j] = true;
                break;
            }
        }
    }
    return out;
}

PathSet concatenation(const PathSet& x, const PathSet& y) {
    PathSet out;
    for (const auto& p : x)
        for (const auto& q : y) out.add(p.concat(q));
    return out;
}

const PathSet& Binding::paths() const {
    if (state_ != State::Set)
        throw Error(Error::Kind::Internal, "binding has no path set (" + text() + ")");
    return set_;
}

std::string Binding::text() const {
    switch (state_) {
    case State::Theta: return "Theta";
    case State::NonDeterminable: return "NonDeterminable";
    case State::Set: return set_.text();
    }
    return "?";
}

namespace {

void rejectND(const Binding& x, const Binding& y, const char* op) {
    if (x.isND() || y.isND())
        throw Error(Error::Kind::Internal,
                    std::string("non-determinable operand for operator ") + op);
}

void rejectTheta(const Binding& x, const Binding& y, const char* op) {
    if (x.isTheta() || y.isTheta())
        throw Error(Error::Kind::Internal,
                    std::string("not-initialized operand for operator ") + op);
}

} // namespace

Binding commonAncestors(const Binding& x, const Binding& y) {
    rejectND(x, y, "<");
    if (x.isTheta()) return Binding::theta();   // Theta < A = Theta; Theta < Theta = Theta
    if (y.isTheta()) return x;                  // A < Theta = A
    return Binding::of(commonAncestors(x.paths(), y.paths()));
}

Binding descendants(const Binding& x, const Binding& y) {
    rejectND(x, y, ">");
    if (y.isTheta()) return Binding::theta();   // A > Theta = Theta; Theta > Theta = Theta
    if (x.isTheta()) return y;                  // Theta > A = A
    return Binding::of(descendants(x.paths(), y.paths()));
}

Binding setIntersection(const Binding& x, const Binding& y) {
    rejectND(x, y, "intersection");
    if (x.isTheta() && y.isTheta()) return Binding::theta();
    if (x.isTheta()) return y;
    if (y.isTheta()) return x;
    return Binding::of(setIntersection(x.paths(), y.paths()));
}

Binding setUnion(const Binding& x, const Binding& y) {
    rejectND(x, y, "union");
    rejectTheta(x, y, "union");
    return Binding::of(setUnion(x.paths(), y.paths()));
}

Binding suffixes(const Binding& x, const Binding& y) {
    rejectND(x, y, "suffixes");
    rejectTheta(x, y, "suffixes");
    return Binding::of(suffixes(x.paths(), y.paths()));
}

Binding concatenation(const Binding& x, const Binding& y) {
    rejectND(x, y, "concatenation");
    rejectTheta(x, y, "concatenation");
    return Binding::of(concatenation(x.paths(), y.paths()));
}

} // namespace sxq

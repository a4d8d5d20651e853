#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "sxq/error.hpp"

namespace sxq {

// A predicate attached to a path step. Predicates stay opaque strings; the
// only structure kept is the disjunction produced when two predicated steps
// are merged by the set-union operator ("[a | b]").
struct Predicate {
    std::vector<std::string> alts; // one entry = plain predicate

    std::string text() const;
    bool operator==(const Predicate& o) const { return alts == o.alts; }
};

struct Step {
    enum class Axis { Child, Attribute };

    Axis axis = Axis::Child;
    bool wildcard = false;
    std::string name; // empty iff wildcard
    std::vector<Predicate> preds;

    std::string text() const;
    // Name-part equality ignoring predicates; wildcard matches anything.
    bool looselyEqual(const Step& o) const;
};

// An absolute path in the child/attribute fragment: /a/b[pred]/@c
class XPath {
public:
    XPath() = default;
    explicit XPath(std::vector<Step> steps) : steps_(std::move(steps)) {}

    static XPath parse(std::string_view text);

    const std::vector<Step>& steps() const { return steps_; }
    size_t length() const { return steps_.size(); }
    const Step& step(size_t i1) const { return steps_.at(i1 - 1); } // 1-based
    const Step& last() const { return steps_.back(); }

    std::string text() const;

    bool looselyEqual(const XPath& y) const;
    // First k steps of *this loosely equal the first k steps of y.
    bool isKPrefixOf(const XPath& y, size_t k) const;
    bool isPrefixOf(const XPath& y) const; // k = length(), needs length() <= length(y)

    XPath suffixFrom(size_t k) const; // steps k+1..end as a rooted path
    XPath prefixTo(size_t k) const;   // steps 1..k
    XPath concat(const XPath& tail) const;
    XPath parent() const; // drop the last step; error on length 1

    bool operator==(const XPath& o) const { return text() == o.text(); }

private:
    std::vector<Step> steps_;
};

// Finite set of XPaths, deduplicated by canonical text, insertion-ordered.
class PathSet {
public:
    PathSet() = default;
    PathSet(std::initializer_list<const char*> texts);

    void add(XPath p);
    void addAll(const PathSet& other);
    bool contains(const std::string& canonicalText) const;

    size_t size() const { return paths_.size(); }
    bool empty() const { return paths_.empty(); }
    const std::vector<XPath>& paths() const { return paths_; }
    auto begin() const { return paths_.begin(); }
    auto end() const { return paths_.end(); }

    std::string text() const; // "{/a, /b}" in insertion order
    bool setEquals(const PathSet& o) const;

private:
    std::vector<XPath> paths_;
    std::vector<std::string> keys_;
};

// The six set operators.
PathSet commonAncestors(const PathSet& x, const PathSet& y);   // <
PathSet descendants(const PathSet& x, const PathSet& y);       // >
PathSet suffixes(const PathSet& x, const PathSet& y);          // >>
PathSet setUnion(const PathSet& x, const PathSet& y);          // merging union
PathSet setIntersection(const PathSet& x, const PathSet& y);   // merging intersection
PathSet concatenation(const PathSet& x, const PathSet& y);     // path append

// A binding value: a path set, the not-initialized marker, or non-determinable.
class Binding {
public:
    enum class State { Theta, NonDeterminable, Set };

    Binding() : state_(State::Theta) {}
    static Binding theta() { return Binding(); }
    static Binding nonDeterminable() { Binding b; b.state_ = State::NonDeterminable; return b; }
    static Binding of(PathSet s) { Binding b; b.state_ = State::Set; b.set_ = std::move(s); return b; }

    State state() const { return state_; }
    bool isTheta() const { return state_ == State::Theta; }
    bool isND() const { return state_ == State::NonDeterminable; }
    bool isSet() const { return state_ == State::Set; }
    const PathSet& paths() const;

    std::string text() const; // "Theta", "NonDeterminable", or the set text

private:
    State state_;
    PathSet set_;
};

// Operators with the not-initialized special cases. Only <, > and the merging
// intersection accept Theta; every operator rejects NonDeterminable.
Binding commonAncestors(const Binding& x, const Binding& y);
Binding descendants(const Binding& x, const Binding& y);
Binding setIntersection(const Binding& x, const Binding& y);
Binding setUnion(const Binding& x, const Binding& y);
Binding suffixes(const Binding& x, const Binding& y);
Binding concatenation(const Binding& x, const Binding& y);

} // namespace sxq

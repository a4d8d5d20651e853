#include "sxq/rewrite.hpp"

#include <algorithm>
#include <functional>
#include <optional>

namespace sxq {

namespace {

using K = XExpr::Kind;
using R = XExpr::Root;

Step toStep(const XqStep& s) {
    Step st;
    st.axis = s.attribute ? Step::Axis::Attribute : Step::Axis::Child;
    if (s.name == "*") st.wildcard = true;
    else st.name = s.name;
    return st;
}

bool hasPredicates(const XExpr& path) {
    if (!path.rootPredicates.empty()) return true;
    for (const auto& s : path.steps)
        if (!s.predicates.empty()) return true;
    return false;
}

// ---- variable scope bookkeeping --------------------------------------------

struct VarInfo {
    bool singleNode = false; // one node at a time (For-bound, or a doc root)
    bool optional = false;   // may be absent (a converted at-most-one Let)
    std::vector<XPath> bases;
};
using Env = std::map<std::string, VarInfo>;

// Absolute context paths of a path's root, when the root is statically known.
std::optional<VarInfo> rootInfo(const XExpr& path, const Env& env) {
    if (path.root == R::Collection || path.root == R::DocFn)
        return VarInfo{true, false, {XPath()}};
    if (path.root == R::Var) {
        auto it = env.find(path.rootArg);
        if (it != env.end() && it->second.singleNode) return it->second;
    }
    return std::nullopt;
}

// Paths the nodes bound by this expression can live at.
std::optional<std::vector<XPath>> basesOf(const XExpr& e, const Env& env) {
    if (e.kind == K::Path) {
        auto root = rootInfo(e, env);
        if (!root) return std::nullopt;
        std::vector<XPath> out;
        for (const auto& base : root->bases) {
            std::vector<Step> steps = base.steps();
            for (const auto& s : e.steps) steps.push_back(toStep(s));
            out.push_back(XPath(std::move(steps)));
        }
        return out;
    }
    if (e.kind == K::Union) {
        std::vector<XPath> out;
        for (const auto& kid : e.kids) {
            auto part = basesOf(kid, env);
            if (!part) return std::nullopt;
            out.insert(out.end(), part->begin(), part->end());
        }
        return out;
    }
    return std::nullopt;
}

void bindClause(Env& env, const XClause& c, bool asSingleOptional) {
    switch (c.kind) {
        case XClause::Kind::For: {
            auto bases = basesOf(c.expr, env);
            if (bases) env[c.var] = VarInfo{true, asSingleOptional, *bases};
            else env[c.var] = VarInfo{};
            if (!c.posVar.empty()) env[c.posVar] = VarInfo{};
            break;
        }
        case XClause::Kind::Let:
            if (c.expr.kind == K::Path && c.expr.steps.empty() &&
                (c.expr.root == R::Collection || c.expr.root == R::DocFn))
                env[c.var] = VarInfo{true, false, {XPath()}};
            else if (asSingleOptional) {
                auto bases = basesOf(c.expr, env);
                env[c.var] = bases ? VarInfo{true, true, *bases} : VarInfo{};
            } else
                env[c.var] = VarInfo{};
            break;
        default:
            break;
    }
}

// ---- use counting and substitution (shadow-aware) --------------------------

bool isVarRef(const XExpr& e, const std::string& v) {
    return e.kind == K::Path && e.root == R::Var && e.rootArg == v;
}

bool isExistsOf(const XExpr& e, const std::string& v) {
    return e.kind == K::Call && e.text == "exists" && e.kids.size() == 1 &&
           isVarRef(e.kids[0], v) && e.kids[0].steps.empty();
}

bool clauseBinds(const XClause& c, const std::string& v) {
    return (c.kind == XClause::Kind::For || c.kind == XClause::Kind::Let) &&
           (c.var == v || c.posVar == v);
}

void walkClauseExprs(const XClause& c, const std::function<void(const XExpr&)>& f) {
    switch (c.kind) {
        case XClause::Kind::For:
        case XClause::Kind::Let:
        case XClause::Kind::Where:
            f(c.expr);
            break;
        case XClause::Kind::OrderBy:
            for (const auto& k : c.keys) f(k.expr);
            break;
    }
}

void countUses(const XExpr& e, const std::string& v, int& n) {
    if (isVarRef(e, v)) ++n;
    for (const auto& p : e.rootPredicates) countUses(p, v, n);
    for (const auto& s : e.steps)
        for (const auto& p : s.predicates) countUses(p, v, n);
    if (e.kind == K::Flwor) {
        for (const auto& c : e.clauses) {
            walkClauseExprs(c, [&](const XExpr& x) { countUses(x, v, n); });
            if (clauseBinds(c, v)) return; // rest of the scope sees a new v
        }
        for (const auto& r : e.ret) countUses(r, v, n);
        return;
    }
    if (e.kind == K::Quantified) {
        countUses(e.kids[0], v, n);
        if (e.quantVar != v) countUses(e.kids[1], v, n);
        return;
    }
    if (e.kind == K::If) {
        // branches are exclusive: what counts is the worst single evaluation
        countUses(e.kids[0], v, n);
        int thenN = 0, elseN = 0;
        countUses(e.kids[1], v, thenN);
        countUses(e.kids[2], v, elseN);
        n += std::max(thenN, elseN);
        return;
    }
    for (const auto& kid : e.kids) countUses(kid, v, n);
}

// Uses of v everywhere in the clause list and return, except clause `skip`.
int usesInFlwor(const XExpr& f, size_t skip, const std::string& v) {
    int n = 0;
    for (size_t j = 0; j < f.clauses.size(); ++j) {
        if (j != skip)
            walkClauseExprs(f.clauses[j],
                            [&](const XExpr& x) { countUses(x, v, n); });
        if (j != skip && clauseBinds(f.clauses[j], v)) return n;
    }
    for (const auto& r : f.ret) countUses(r, v, n);
    return n;
}

// $v[p1]/rest -> base[p1]/rest with base's own steps in front.
XExpr splice(const XExpr& base, const XExpr& use) {
    XExpr out = base;
    out.explicitDot = false;
    if (!use.rootPredicates.empty()) {
        if (out.steps.empty())
            out.rootPredicates.insert(out.rootPredicates.end(),
                                      use.rootPredicates.begin(),
                                      use.rootPredicates.end());
        else
            out.steps.back().predicates.insert(out.steps.back().predicates.end(),
                                               use.rootPredicates.begin(),
                                               use.rootPredicates.end());
    }
    out.steps.insert(out.steps.end(), use.steps.begin(), use.steps.end());
    return out;
}

void substUses(XExpr& e, const std::string& v, const XExpr& base) {
    for (auto& p : e.rootPredicates) substUses(p, v, base);
    for (auto& s : e.steps)
        for (auto& p : s.predicates) substUses(p, v, base);
    if (isVarRef(e, v)) {
        e = splice(base, e);
        return;
    }
    if (e.kind == K::Flwor) {
        for (auto& c : e.clauses) {
            switch (c.kind) {
                case XClause::Kind::For:
                case XClause::Kind::Let:
                case XClause::Kind::Where:
                    substUses(c.expr, v, base);
                    break;
                case XClause::Kind::OrderBy:
                    for (auto& k : c.keys) substUses(k.expr, v, base);
                    break;
            }
            if (clauseBinds(c, v)) return;
        }
        for (auto& r : e.ret) substUses(r, v, base);
        return;
    }
    if (e.kind == K::Quantified) {
        substUses(e.kids[0], v, base);
        if (e.quantVar != v) substUses(e.kids[1], v, base);
        return;
    }
    for (auto& kid : e.kids) substUses(kid, v, base);
}

void substInFlwor(XExpr& f, size_t skip, const std::string& v, const XExpr& base) {
    for (size_t j = 0; j < f.clauses.size(); ++j) {
        if (j != skip) {
            XClause& c = f.clauses[j];
            switch (c.kind) {
                case XClause::Kind::For:
                case XClause::Kind::Let:
                case XClause::Kind::Where:
                    substUses(c.expr, v, base);
                    break;
                case XClause::Kind::OrderBy:
                    for (auto& k : c.keys) substUses(k.expr, v, base);
                    break;
            }
            if (clauseBinds(c, v)) return;
        }
    }
    for (auto& r : f.ret) substUses(r, v, base);
}

// ---- generic child traversal ----------------------------------------------

void forEachChild(XExpr& e, const std::function<void(XExpr&)>& f) {
    for (auto& p : e.rootPredicates) f(p);
    for (auto& s : e.steps)
        for (auto& p : s.predicates) f(p);
    for (auto& c : e.clauses) {
        switch (c.kind) {
            case XClause::Kind::For:
            case XClause::Kind::Let:
            case XClause::Kind::Where:
                f(c.expr);
                break;
            case XClause::Kind::OrderBy:
                for (auto& k : c.keys) f(k.expr);
                break;
        }
    }
    for (auto& kid : e.kids) f(kid);
}

// ---- Rule 1: changing For clauses to Let -----------------------------------

bool existsGuardFollows(const XExpr& f, size_t i, const std::string& v) {
    for (size_t j = i + 1; j < f.clauses.size(); ++j) {
        const XClause& c = f.clauses[j];
        if (clauseBinds(c, v)) break;
        if (c.kind != XClause::Kind::Where) continue;
        if (isExistsOf(c.expr, v)) return true;
        if (c.expr.kind == K::And)
            for (const auto& kid : c.expr.kids)
                if (isExistsOf(kid, v)) return true;
    }
    return false;
}

void rule1Walk(XExpr& e, Env env, const CardinalityOracle& oracle) {
    if (e.kind != K::Flwor) {
        forEachChild(e, [&](XExpr& kid) { rule1Walk(kid, env, oracle); });
        return;
    }
    for (size_t i = 0; i < e.clauses.size(); ++i) {
        XClause& c = e.clauses[i];
        switch (c.kind) {
            case XClause::Kind::For:
            case XClause::Kind::Let:
                rule1Walk(c.expr, env, oracle);
                break;
            case XClause::Kind::Where:
                rule1Walk(c.expr, env, oracle);
                break;
            case XClause::Kind::OrderBy:
                for (auto& k : c.keys) rule1Walk(k.expr, env, oracle);
                break;
        }
        bool converted = false;
        if (c.kind == XClause::Kind::For && c.posVar.empty() &&
            c.expr.kind == K::Path && !c.expr.steps.empty()) {
            auto root = rootInfo(c.expr, env);
            if (root) {
                Cardinality card = oracle.of(root->bases, c.expr.steps);
                if (card == Cardinality::ExactlyOne &&
                    (root->optional || hasPredicates(c.expr)))
                    card = Cardinality::AtMostOne;
                bool attrFinal = c.expr.steps.back().attribute;
                if (card == Cardinality::ExactlyOne ||
                    (card == Cardinality::AtMostOne &&
                     (attrFinal || existsGuardFollows(e, i, c.var)))) {
                    c.kind = XClause::Kind::Let;
                    converted = true;
                }
            }
        }
        bindClause(env, c, converted);
    }
    for (auto& r : e.ret) rule1Walk(r, env, oracle);
}

// ---- Rule 2: reducing Let clauses ------------------------------------------

// Append a relative predicate to the final step of a path (or of every union
// member).
bool pushPredInto(XExpr& target, const XExpr& pred) {
    if (target.kind == K::Union) {
        bool ok = true;
        for (auto& kid : target.kids) ok = pushPredInto(kid, pred) && ok;
        return ok;
    }
    if (target.kind != K::Path || target.steps.empty()) return false;
    target.steps.back().predicates.push_back(pred);
    return true;
}

// Find the conjunct `exists($v)` in a Where clause; (-1,-1) when absent.
std::pair<int, int> findExistsConjunct(const XExpr& f, const std::string& v) {
    for (size_t j = 0; j < f.clauses.size(); ++j) {
        const XClause& c = f.clauses[j];
        if (c.kind != XClause::Kind::Where) continue;
        if (isExistsOf(c.expr, v)) return {static_cast<int>(j), -1};
        if (c.expr.kind == K::And)
            for (size_t k = 0; k < c.expr.kids.size(); ++k)
                if (isExistsOf(c.expr.kids[k], v))
                    return {static_cast<int>(j), static_cast<int>(k)};
    }
    return {-1, -1};
}

void removeWhereConjunct(XExpr& f, int wIdx, int cIdx) {
    XClause& w = f.clauses[static_cast<size_t>(wIdx)];
    if (cIdx < 0) {
        f.clauses.erase(f.clauses.begin() + wIdx);
        return;
    }
    w.expr.kids.erase(w.expr.kids.begin() + cIdx);
    if (w.expr.kids.size() == 1) {
        XExpr only = w.expr.kids[0];
        w.expr = only;
    }
}

int findDefiningClause(const XExpr& f, size_t before, const std::string& v) {
    for (int j = static_cast<int>(before) - 1; j >= 0; --j)
        if (clauseBinds(f.clauses[static_cast<size_t>(j)], v)) return j;
    return -1;
}

bool rule2Once(XExpr& f) {
    for (int i = static_cast<int>(f.clauses.size()) - 1; i >= 0; --i) {
        XClause& c = f.clauses[static_cast<size_t>(i)];
        if (c.kind != XClause::Kind::Let || c.expr.kind != K::Path) continue;
        const std::string v = c.var;
        const size_t ui = static_cast<size_t>(i);
        int uses = usesInFlwor(f, ui, v);

        // document-root assignments are inlined but the clause is kept; later
        // stages still read better with the source named once at the top
        if (c.expr.root == R::Collection || c.expr.root == R::DocFn) {
            if (uses == 0) continue;
            XExpr base = c.expr;
            substInFlwor(f, ui, v, base);
            return true;
        }

        // binding assurance pushdown: where(exists($v)) becomes a predicate on
        // the defining clause of the path root
        if (uses == 1 && c.expr.root == R::Var && !c.expr.steps.empty() &&
            c.expr.rootPredicates.empty()) {
            auto [wIdx, cIdx] = findExistsConjunct(f, v);
            if (wIdx >= 0) {
                int def = findDefiningClause(f, ui, c.expr.rootArg);
                if (def >= 0) {
                    XExpr rel;
                    rel.kind = K::Path;
                    rel.root = R::Context;
                    rel.steps = c.expr.steps;
                    rel.explicitDot = !hasPredicates(c.expr);
                    if (pushPredInto(f.clauses[static_cast<size_t>(def)].expr, rel)) {
                        removeWhereConjunct(f, wIdx, cIdx);
                        f.clauses.erase(f.clauses.begin() + i);
                        return true;
                    }
                }
            }
        }

        // a single remaining reference: inline the path and drop the clause
        if (uses == 1) {
            XExpr base = c.expr;
            substInFlwor(f, ui, v, base);
            f.clauses.erase(f.clauses.begin() + i);
            return true;
        }
    }
    return false;
}

void rule2Walk(XExpr& e) {
    if (e.kind == K::Flwor)
        while (rule2Once(e)) {
        }
    forEachChild(e, rule2Walk);
}

// ---- Rule 3: unnesting For clauses -----------------------------------------

bool rule3Once(XExpr& f) {
    for (size_t i = 0; i + 1 < f.clauses.size(); ++i) {
        XClause& a = f.clauses[i];
        XClause& b = f.clauses[i + 1];
        if (a.kind != XClause::Kind::For || b.kind != XClause::Kind::For) continue;
        if (!a.posVar.empty() || !b.posVar.empty()) continue;
        if (a.expr.kind != K::Path || b.expr.kind != K::Path) continue;
        if (b.expr.root != R::Var || b.expr.rootArg != a.var) continue;
        if (!b.expr.rootPredicates.empty()) continue;
        if (usesInFlwor(f, i, a.var) != 1) continue; // only b's root may use it
        XExpr merged = a.expr;
        merged.steps.insert(merged.steps.end(), b.expr.steps.begin(),
                            b.expr.steps.end());
        b.expr = std::move(merged);
        b.posVar.clear();
        f.clauses.erase(f.clauses.begin() + static_cast<long>(i));
        return true;
    }
    return false;
}

void rule3Walk(XExpr& e) {
    if (e.kind == K::Flwor)
        while (rule3Once(e)) {
        }
    forEachChild(e, rule3Walk);
}

Env envFromOuter(const OuterRoots& outer) {
    Env env;
    for (const auto& [name, bases] : outer) env[name] = VarInfo{true, false, bases};
    return env;
}

} // namespace

Cardinality CardinalityOracle::of(const std::vector<XPath>& bases,
                                  const std::vector<XqStep>& steps) const {
    if (!xsd_ || bases.empty() || steps.empty()) return Cardinality::Unknown;
    Cardinality worst = Cardinality::ExactlyOne;
    for (const XPath& base : bases) {
        long mn = 1, mx = 1;
        bool unbounded = false;
        std::vector<Step> walk = base.steps();
        for (const auto& xs : steps) {
            Step st = toStep(xs);
            if (st.wildcard) return Cardinality::Unknown;
            walk.push_back(std::move(st));
            auto occ = xsd_->occurrence(XPath(walk));
            if (!occ) return Cardinality::Unknown;
            mn = mn * occ->min;
            if (occ->max == -1) unbounded = true;
            else mx = mx * occ->max;
        }
        if (steps.back().attribute) mn = 0; // presence is never promised
        Cardinality c = (unbounded || mx > 1)
                            ? Cardinality::Many
                            : (mn >= 1 ? Cardinality::ExactlyOne
                                       : Cardinality::AtMostOne);
        if (static_cast<int>(c) > static_cast<int>(worst)) worst = c;
    }
    return worst;
}

XExpr rule1ForToLet(const XExpr& e, const CardinalityOracle& oracle,
                    const OuterRoots& outer) {
    XExpr out = e;
    rule1Walk(out, envFromOuter(outer), oracle);
    return out;
}

XExpr rule2ReduceLet(const XExpr& e) {
    XExpr out = e;
    rule2Walk(out);
    return out;
}

XExpr rule3UnnestFor(const XExpr& e) {
    XExpr out = e;
    rule3Walk(out);
    return out;
}

XExpr rewriteExpr(const XExpr& e, const CardinalityOracle& oracle,
                  const OuterRoots& outer) {
    XExpr out = e;
    rule1Walk(out, envFromOuter(outer), oracle);
    rule2Walk(out);
    rule3Walk(out);
    return out;
}

XQueryProgram rewrite(const XQueryProgram& p, const CardinalityOracle& oracle) {
    XQueryProgram out = p;
    for (auto& fn : out.functions)
        if (fn.body) *fn.body = rewriteExpr(*fn.body, oracle);
    out.body = rewriteExpr(out.body, oracle);
    return out;
}

} // namespace sxq

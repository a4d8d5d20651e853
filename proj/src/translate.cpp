#include "sxq/translate.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <utility>

namespace sxq {

std::string xqName(const std::string& sparqlVar) {
    std::string out;
    for (char c : sparqlVar)
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_') ? c : '_';
    if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0]))) out = "v_" + out;
    return out;
}

namespace {

std::string sane(const std::string& v) { return xqName(v); }

bool isNumericDatatype(const std::string& dt) {
    static const char* names[] = {"integer", "decimal", "float",   "double",
                                  "int",     "long",    "short",   "byte",
                                  "nonNegativeInteger", "positiveInteger"};
    std::string local = iriLocalName(dt);
    for (const char* n : names)
        if (local == n) return true;
    return false;
}

XExpr literalExpr(const Term& t) { return literalToXQuery(t); }

XExpr pathsUnion(const std::string& rootVar, const PathSet& ps) {
    if (ps.empty()) return xSeq({});
    std::vector<XExpr> kids;
    for (const XPath& p : ps) kids.push_back(xVarPath(rootVar, p, 0));
    return xUnion(std::move(kids));
}

// Attach an XPredicate to every alternative of a clause expression.
void pushPredInto(XExpr& e, const XExpr& pred) {
    if (e.kind == XExpr::Kind::Union) {
        for (auto& k : e.kids) pushPredInto(k, pred);
        return;
    }
    if (e.kind == XExpr::Kind::Path) {
        if (e.steps.empty()) e.rootPredicates.push_back(pred);
        else e.steps.back().predicates.push_back(pred);
    }
}

std::vector<std::string> tripleVars(const std::vector<TriplePattern>& triples) {
    std::vector<std::string> out;
    auto push = [&](const Term& t) {
        if (t.varLike() &&
            std::find(out.begin(), out.end(), t.value) == out.end())
            out.push_back(t.value);
    };
    for (const auto& t : triples) {
        push(t.s);
        push(t.p);
        push(t.o);
    }
    return out;
}

void splitConjuncts(const Expr& e, std::vector<Expr>& out) {
    if (e.kind == Expr::Kind::And) {
        for (const auto& k : e.args) splitConjuncts(k, out);
        return;
    }
    out.push_back(e);
}

struct Ctx {
    const MappingCatalog& cat;
    const OntologyModel& onto;
    const TranslateOptions& opt;
    SparqlQuery::Form form = SparqlQuery::Form::Select;
    std::vector<std::string> rv;
    std::vector<std::string> orderVars;
    VarTypeMap varTypes;
    std::map<std::string, std::vector<std::string>> ext;
    SchemaBindings schemaBind;
    GpTranslation* out = nullptr;
    int bgpCounter = 1; // the base BGP of a union-free GP counts as 1
    int nwdCounter = 0;
};

// Filter condition to XQuery; VarRef maps a SPARQL variable reference.
template <class VarRef>
XExpr translateCond(const Expr& c, const VarRef& varRef) {
    using K = Expr::Kind;
    switch (c.kind) {
        case K::Or: {
            std::vector<XExpr> kids;
            for (const auto& a : c.args) kids.push_back(translateCond(a, varRef));
            return xOr(std::move(kids));
        }
        case K::And: {
            std::vector<XExpr> kids;
            for (const auto& a : c.args) kids.push_back(translateCond(a, varRef));
            return xAnd(std::move(kids));
        }
        case K::Not:
            return xCall("not", {translateCond(c.args[0], varRef)});
        case K::Compare:
            return xCmp(c.op, translateCond(c.args[0], varRef),
                        translateCond(c.args[1], varRef));
        case K::Arith:
            return xArith(c.op, translateCond(c.args[0], varRef),
                          translateCond(c.args[1], varRef));
        case K::Call: {
            const std::string& f = c.op;
            if (f == "regex") {
                std::vector<XExpr> args;
                for (const auto& a : c.args) args.push_back(translateCond(a, varRef));
                return xCall("matches", std::move(args));
            }
            if (f == "bound") return xCall("exists", {translateCond(c.args[0], varRef)});
            if (f == "str") return xCall("string", {translateCond(c.args[0], varRef)});
            if (f == "sameTerm")
                return xCmp("=", translateCond(c.args[0], varRef),
                            translateCond(c.args[1], varRef));
            if (f == "isBlank" || f == "isIRI" || f == "isURI" || f == "isLiteral" ||
                f == "datatype" || f == "lang" || f == "langMatches")
                throw Error(Error::Kind::Unsupported,
                            "the SPARQL operator '" + f +
                                "' cannot be evaluated over XML data");
            throw Error(Error::Kind::Unsupported, "filter function '" + f + "'");
        }
        case K::Atom:
            if (c.atom.varLike()) return varRef(c.atom.value);
            return literalExpr(c.atom);
    }
    return xSeq({});
}

// Single-variable conjunct that can move into an XPredicate: a comparison
// against a literal or a two-argument regex. Returns the context-relative
// predicate, with the variable replaced by ".".
struct Pushable {
    std::string var;
    XExpr pred;
};
std::optional<Pushable> pushableConjunct(const Expr& c) {
    auto isVar = [](const Expr& e) {
        return e.kind == Expr::Kind::Atom && e.atom.varLike();
    };
    auto isLit = [](const Expr& e) {
        return e.kind == Expr::Kind::Atom && e.atom.isLiteral();
    };
    if (c.kind == Expr::Kind::Compare) {
        if (isVar(c.args[0]) && isLit(c.args[1]))
            return Pushable{c.args[0].atom.value,
                            xCmp(c.op, xDot(), literalExpr(c.args[1].atom))};
        if (isLit(c.args[0]) && isVar(c.args[1]))
            return Pushable{c.args[1].atom.value,
                            xCmp(c.op, literalExpr(c.args[0].atom), xDot())};
    }
    if (c.kind == Expr::Kind::Call && c.op == "regex" && c.args.size() == 2 &&
        isVar(c.args[0]) && isLit(c.args[1]))
        return Pushable{c.args[0].atom.value,
                        xCall("matches", {xDot(), literalExpr(c.args[1].atom)})};
    return std::nullopt;
}

struct BgpOut {
    std::vector<XClause> clauses;
    std::map<std::string, size_t> clauseOf; // raw variable name -> clause index
    std::vector<XExpr> assurances;
    std::vector<XExpr> whereConds;
    std::vector<std::string> newVars;
    bool unsat = false;
    std::map<std::string, Binding> finals;
};

BgpOut translateBgpCore(Ctx& ctx, const GraphPattern& bgp,
                        const std::map<std::string, Binding>& carried,
                        const std::set<std::string>& bound, bool independent,
                        const std::vector<std::string>& rvEff,
                        SparqlQuery::Form formEff, std::vector<Expr>* deferred) {
    BgpOut out;

    SchemaBindings sb = ctx.schemaBind;
    for (const auto& [v, b] : carried) sb.paths[v] = b;

    BindingResult br = bindVariables(bgp, sb, ctx.varTypes, ctx.cat);
    if (!br.satisfiable) {
        out.unsat = true;
        return out;
    }

    auto bindingOf = [&](const std::string& v) -> Binding {
        auto it = br.vars.find(v);
        if (it != br.vars.end()) return it->second;
        auto st = sb.paths.find(v);
        if (st != sb.paths.end()) return st->second;
        return Binding::theta();
    };
    auto hasClause = [&](const std::string& v) {
        return out.clauseOf.count(v) > 0 || bound.count(v) > 0;
    };
    auto addClause = [&](const std::string& v, XClause::Kind kind, XExpr expr) {
        XClause c;
        c.kind = kind;
        c.var = sane(v);
        c.expr = std::move(expr);
        out.clauses.push_back(std::move(c));
        out.clauseOf[v] = out.clauses.size() - 1;
        out.newVars.push_back(v);
        if (kind == XClause::Kind::Let)
            out.assurances.push_back(xCall("exists", {xVar(sane(v))}));
    };
    auto kindFor = [&](const std::string& v) {
        return selectClauseKind(formEff, rvEff, v, ctx.ext);
    };
    auto setPaths = [&](const std::string& v) -> PathSet {
        Binding b = bindingOf(v);
        if (!b.isSet())
            throw Error(Error::Kind::Internal,
                        "no determined binding for variable ?" + v);
        return b.paths();
    };
    auto makeSubjectClause = [&](const std::string& v) {
        addClause(v, kindFor(v), pathsUnion(ctx.opt.docVar, setPaths(v)));
    };
    auto ensureSubject = [&](const Term& s) {
        if (!s.varLike())
            throw Error(Error::Kind::Unsupported,
                        "triple patterns with a constant subject are not supported");
        if (!hasClause(s.value)) makeSubjectClause(s.value);
    };

    std::vector<TriplePattern> data;
    for (const auto& t : bgp.triples)
        if (!isSchemaTriple(t)) data.push_back(t);

    auto isDataObject = [&](const std::string& v) {
        for (const auto& t : data)
            if (t.o.varLike() && t.o.value == v) return true;
        return false;
    };

    // subjects (variables driven through another triple's object wait for the
    // object phase so their clause chains off the producing variable)
    for (const auto& t : data)
        if (t.s.varLike() && !hasClause(t.s.value) && !isDataObject(t.s.value))
            makeSubjectClause(t.s.value);

    // predicates
    for (const auto& t : data) {
        if (!t.p.varLike() || hasClause(t.p.value)) continue;
        ensureSubject(t.s);
        PathSet rel = suffixes(setPaths(t.s.value), setPaths(t.p.value));
        std::vector<XExpr> kids;
        for (const XPath& y : rel) kids.push_back(xVarPath(sane(t.s.value), y, 0));
        addClause(t.p.value, kindFor(t.p.value),
                  kids.empty() ? xSeq({}) : xUnion(std::move(kids)));
    }

    // objects
    for (const auto& t : data) {
        ensureSubject(t.s);
        const std::string sv = sane(t.s.value);
        if (!t.o.varLike()) { // constant object: an XPredicate
            XExpr lit = literalExpr(t.o);
            if (t.p.varLike()) {
                XExpr pred = xCmp("=", xDot(), lit);
                auto it = out.clauseOf.find(t.p.value);
                if (it != out.clauseOf.end())
                    pushPredInto(out.clauses[it->second].expr, pred);
                else // predicate bound in an enclosing scope
                    out.whereConds.push_back(xCmp("=", xVar(sane(t.p.value)), lit));
                continue;
            }
            const PathSet& mu = predicateWholes(t.p, ctx.cat);
            auto memberPred = [&](const XPath& xi) -> XExpr {
                PathSet one;
                one.add(xi);
                PathSet ys = suffixes(one, mu);
                std::vector<XExpr> alts;
                for (const XPath& y : ys) {
                    XExpr rel = xPath(XExpr::Root::Context, "", {});
                    rel.explicitDot = true;
                    appendSteps(rel.steps, y, 0);
                    alts.push_back(xCmp("=", std::move(rel), lit));
                }
                if (alts.empty()) return xCall("false", {});
                return xOr(std::move(alts));
            };
            auto it = out.clauseOf.find(t.s.value);
            if (it != out.clauseOf.end()) {
                XExpr& expr = out.clauses[it->second].expr;
                PathSet xs = setPaths(t.s.value);
                if (expr.kind == XExpr::Kind::Union) {
                    size_t i = 0;
                    for (auto& member : expr.kids) {
                        if (i < xs.size()) pushPredInto(member, memberPred(xs.paths()[i]));
                        i++;
                    }
                } else if (!xs.empty()) {
                    pushPredInto(expr, memberPred(xs.paths()[0]));
                }
            } else { // subject bound outside: restrict through a Where condition
                PathSet ys = suffixes(setPaths(t.s.value), mu);
                std::vector<XExpr> alts;
                for (const XPath& y : ys)
                    alts.push_back(xCmp("=", xVarPath(sv, y, 0), lit));
                out.whereConds.push_back(alts.empty() ? xCall("false", {})
                                                      : xOr(std::move(alts)));
            }
            continue;
        }
        // variable object
        const std::string& ov = t.o.value;
        if (hasClause(ov)) { // repeated use: value join through Where
            XExpr rhs;
            if (t.p.varLike()) {
                rhs = xVar(sane(t.p.value));
            } else {
                PathSet rel = suffixes(setPaths(t.s.value), predicateWholes(t.p, ctx.cat));
                std::vector<XExpr> kids;
                for (const XPath& y : rel) kids.push_back(xVarPath(sv, y, 0));
                rhs = kids.empty() ? xSeq({}) : xUnion(std::move(kids));
            }
            out.whereConds.push_back(xCmp("=", xVar(sane(ov)), std::move(rhs)));
            continue;
        }
        if (t.p.varLike()) { // object rides on the predicate variable
            addClause(ov, XClause::Kind::Let, xVar(sane(t.p.value)));
            continue;
        }
        PathSet rel = suffixes(setPaths(t.s.value), predicateWholes(t.p, ctx.cat));
        std::vector<XExpr> kids;
        for (const XPath& y : rel) kids.push_back(xVarPath(sv, y, 0));
        addClause(ov, kindFor(ov), kids.empty() ? xSeq({}) : xUnion(std::move(kids)));
    }

    // variables that only occur in schema triples still need a binding when
    // they are used later (returned, filtered, ordered); purely structural
    // schema variables get no clause
    auto inData = [&](const std::string& v) {
        for (const auto& t : data)
            if ((t.s.varLike() && t.s.value == v) || (t.p.varLike() && t.p.value == v) ||
                (t.o.varLike() && t.o.value == v))
                return true;
        return false;
    };
    auto usedLater = [&](const std::string& v) {
        if (std::find(rvEff.begin(), rvEff.end(), v) != rvEff.end()) return true;
        if (std::find(ctx.orderVars.begin(), ctx.orderVars.end(), v) !=
            ctx.orderVars.end())
            return true;
        for (const auto& f : bgp.filters)
            for (const auto& fv : f.variables())
                if (fv == v) return true;
        return false;
    };
    for (const auto& t : bgp.triples) {
        if (!isSchemaTriple(t)) continue;
        for (const Term* term : {&t.s, &t.o}) {
            if (!term->varLike() || hasClause(term->value) || inData(term->value) ||
                !usedLater(term->value))
                continue;
            auto it = sb.paths.find(term->value);
            if (it == sb.paths.end() || !it->second.isSet()) continue;
            addClause(term->value, kindFor(term->value),
                      pathsUnion(ctx.opt.docVar, it->second.paths()));
        }
    }

    // filters
    std::vector<std::string> ownVars = tripleVars(bgp.triples);
    auto inScope = [&](const std::vector<std::string>& vars) {
        for (const auto& v : vars)
            if (std::find(ownVars.begin(), ownVars.end(), v) == ownVars.end() &&
                bound.count(v) == 0)
                return false;
        return true;
    };
    auto scopeRef = [](const std::string& v) { return xVar(sane(v)); };
    for (const Expr& f : bgp.filters) {
        if (!filterIsSafe(f, bgp)) {
            if (inScope(f.variables())) {
                out.whereConds.push_back(translateCond(f, scopeRef));
            } else if (independent && deferred) {
                deferred->push_back(f);
            } else {
                throw Error(Error::Kind::Unsupported,
                            "filter references variables outside its scope: " + f.text());
            }
            continue;
        }
        std::vector<Expr> conjuncts;
        splitConjuncts(f, conjuncts);
        for (const Expr& c : conjuncts) {
            auto p = pushableConjunct(c);
            if (p && out.clauseOf.count(p->var)) {
                pushPredInto(out.clauses[out.clauseOf[p->var]].expr, p->pred);
            } else {
                out.whereConds.push_back(translateCond(c, scopeRef));
            }
        }
    }

    out.finals = carried;
    for (const auto& [v, b] : br.vars) out.finals[v] = b;
    for (const auto& [v, b] : ctx.schemaBind.paths)
        if (!out.finals.count(v)) out.finals[v] = b;
    return out;
}

std::vector<XExpr> buildReturnItems(Ctx& ctx, const std::vector<std::string>& rvEff,
                                    const BgpOut& b) {
    std::vector<XExpr> items;
    for (const std::string& v : rvEff) {
        if (!b.clauseOf.count(v)) continue;
        XExpr var = xVar(sane(v));
        XExpr value;
        if (!ctx.varTypes.types.count(v)) {
            // bound by a schema triple only: the value is a schema construct
            ctx.out->usesSchemaPath = true;
            items.push_back(xElem(sane(v), {xCall("local:schema-path", {var})}));
            continue;
        }
        switch (ctx.varTypes.of(v)) {
            case VarType::LVT:
                value = xCall("string", {var});
                break;
            case VarType::CIVT:
                ctx.out->usesCivt = true;
                value = xCall("local:civt", {var});
                break;
            case VarType::DTPVT:
            case VarType::OPVT:
            case VarType::UPVT:
                ctx.out->usesSchemaPath = true;
                value = xCall("local:schema-path", {var});
                break;
            case VarType::UVT: {
                ctx.out->usesCivt = true;
                XExpr kids = var;
                kids.steps.push_back(XqStep{false, "*", {}});
                value = xIf(xCall("exists", {kids}), xCall("local:civt", {var}),
                            xCall("string", {var}));
                break;
            }
        }
        items.push_back(xElem(sane(v), {std::move(value)}));
    }
    return items;
}

// --- well-designed spine ----------------------------------------------------

struct Spine {
    GraphPattern base; // merged BGP
    std::vector<const GraphPattern*> optionals;
    std::vector<Expr> lifted; // operator-level filter conditions
};

void flattenWd(const GraphPattern& g, Spine& s) {
    switch (g.kind) {
        case GraphPattern::Kind::Bgp:
            for (const auto& t : g.triples) s.base.triples.push_back(t);
            for (const auto& f : g.filters) s.base.filters.push_back(f);
            break;
        case GraphPattern::Kind::And:
            flattenWd(g.kids[0], s);
            flattenWd(g.kids[1], s);
            break;
        case GraphPattern::Kind::Opt:
            flattenWd(g.kids[0], s);
            s.optionals.push_back(&g.kids[1]);
            break;
        case GraphPattern::Kind::Filter:
            flattenWd(g.kids[0], s);
            for (const auto& c : g.conds) s.lifted.push_back(c);
            break;
        case GraphPattern::Kind::Union:
            throw Error(Error::Kind::Internal, "union inside a union-free pattern");
    }
}

struct OptEntry {
    std::string letVar, itVar;
    XExpr expr;
};

XExpr mergeReturn(const std::vector<XExpr>& items, const std::vector<OptEntry>& opts,
                  size_t i) {
    if (i == opts.size()) return xElem("Result", items);
    XExpr star = xVar(opts[i].itVar);
    star.steps.push_back(XqStep{false, "*", {}});
    std::vector<XExpr> extended = items;
    extended.push_back(std::move(star));
    XExpr thenE = xFlwor({xFor(opts[i].itVar, xVar(opts[i].letVar))},
                         {mergeReturn(extended, opts, i + 1)});
    XExpr elseE = xSeq({mergeReturn(items, opts, i + 1)});
    return xIf(xCall("exists", {xVar(opts[i].letVar)}), std::move(thenE),
               std::move(elseE));
}

XExpr wdSpine(Ctx& ctx, const GraphPattern& node,
              const std::map<std::string, Binding>& carried,
              const std::set<std::string>& bound, bool& unsat) {
    Spine s;
    s.base.kind = GraphPattern::Kind::Bgp;
    flattenWd(node, s);
    for (const auto& c : s.lifted) s.base.filters.push_back(c);

    BgpOut b = translateBgpCore(ctx, s.base, carried, bound, false, ctx.rv, ctx.form,
                                nullptr);
    if (b.unsat) {
        unsat = true;
        return xSeq({});
    }

    auto carried2 = carried;
    for (const auto& [v, bind] : b.finals) carried2[v] = bind;
    auto bound2 = bound;
    for (const auto& v : b.newVars) bound2.insert(v);

    std::vector<OptEntry> opts;
    for (const GraphPattern* o : s.optionals) {
        int k = ++ctx.bgpCounter;
        OptEntry oe;
        oe.letVar = "BGP_" + std::to_string(k);
        oe.itVar = "bgp" + std::to_string(k) + "_it";
        bool subUnsat = false;
        oe.expr = wdSpine(ctx, *o, carried2, bound2, subUnsat);
        if (subUnsat) oe.expr = xSeq({});
        opts.push_back(std::move(oe));
    }

    std::vector<XClause> clauses = b.clauses;
    for (const auto& oe : opts) clauses.push_back(xLet(oe.letVar, oe.expr));
    std::vector<XExpr> conds = b.assurances;
    for (auto& c : b.whereConds) conds.push_back(std::move(c));
    if (!conds.empty()) clauses.push_back(xWhere(xAnd(std::move(conds))));

    XExpr ret;
    if (ctx.form == SparqlQuery::Form::Ask) {
        ret = xCall("true", {});
    } else {
        ret = mergeReturn(buildReturnItems(ctx, ctx.rv, b), opts, 0);
    }
    return xFlwor(std::move(clauses), {std::move(ret)});
}

// --- non-well-designed composition ------------------------------------------

void collectBgpLeaves(const GraphPattern& g, std::vector<const GraphPattern*>& out) {
    if (g.isBgp()) {
        out.push_back(&g);
        return;
    }
    for (const auto& k : g.kids) collectBgpLeaves(k, out);
}

XExpr nwdTranslate(Ctx& ctx, const GraphPattern& g, const std::vector<std::string>& rowRv,
                   std::vector<Expr>& deferred) {
    auto rowRef = [](const std::string& rowVar) {
        return [rowVar](const std::string& v) {
            XExpr p = xVar(rowVar);
            p.steps.push_back(XqStep{false, sane(v), {}});
            return p;
        };
    };
    switch (g.kind) {
        case GraphPattern::Kind::Bgp: {
            BgpOut b = translateBgpCore(ctx, g, {}, {}, true, rowRv,
                                        SparqlQuery::Form::Select, &deferred);
            if (b.unsat) return xSeq({});
            std::vector<XClause> clauses = b.clauses;
            std::vector<XExpr> conds = b.assurances;
            for (auto& c : b.whereConds) conds.push_back(std::move(c));
            if (!conds.empty()) clauses.push_back(xWhere(xAnd(std::move(conds))));
            return xFlwor(std::move(clauses),
                          {xElem("Result", buildReturnItems(ctx, rowRv, b))});
        }
        case GraphPattern::Kind::And: {
            XExpr l = nwdTranslate(ctx, g.kids[0], rowRv, deferred);
            XExpr r = nwdTranslate(ctx, g.kids[1], rowRv, deferred);
            int k = ++ctx.nwdCounter;
            std::string a = "j" + std::to_string(k) + "_a";
            std::string b2 = "j" + std::to_string(k) + "_b";
            ctx.out->usesCompatible = ctx.out->usesMerge = true;
            return xFlwor({xFor(a, std::move(l)), xFor(b2, std::move(r)),
                           xWhere(xCall("local:compatible", {xVar(a), xVar(b2)}))},
                          {xCall("local:merge", {xVar(a), xVar(b2)})});
        }
        case GraphPattern::Kind::Opt: {
            XExpr l = nwdTranslate(ctx, g.kids[0], rowRv, deferred);
            XExpr r = nwdTranslate(ctx, g.kids[1], rowRv, deferred);
            int k = ++ctx.nwdCounter;
            std::string lv = "o" + std::to_string(k) + "_l";
            std::string rv2 = "o" + std::to_string(k) + "_r";
            std::string m = "o" + std::to_string(k) + "_m";
            std::string it = "o" + std::to_string(k) + "_it";
            ctx.out->usesCompatible = ctx.out->usesMerge = true;
            XExpr matches = xFlwor(
                {xFor(rv2, std::move(r)),
                 xWhere(xCall("local:compatible", {xVar(lv), xVar(rv2)}))},
                {xVar(rv2)});
            XExpr body = xFlwor(
                {xLet(m, std::move(matches))},
                {xIf(xCall("exists", {xVar(m)}),
                     xFlwor({xFor(it, xVar(m))},
                            {xCall("local:merge", {xVar(lv), xVar(it)})}),
                     xSeq({xVar(lv)}))});
            return xFlwor({xFor(lv, std::move(l))}, {std::move(body)});
        }
        case GraphPattern::Kind::Filter: {
            XExpr sub = nwdTranslate(ctx, g.kids[0], rowRv, deferred);
            int k = ++ctx.nwdCounter;
            std::string row = "f" + std::to_string(k) + "_row";
            std::vector<XExpr> conds;
            for (const auto& c : g.conds) conds.push_back(translateCond(c, rowRef(row)));
            return xFlwor({xFor(row, std::move(sub)), xWhere(xAnd(std::move(conds)))},
                          {xVar(row)});
        }
        case GraphPattern::Kind::Union:
            throw Error(Error::Kind::Internal, "union inside a union-free pattern");
    }
    return xSeq({});
}

XExpr nwdUfgp(Ctx& ctx, const GraphPattern& ufgp) {
    std::vector<const GraphPattern*> leaves;
    collectBgpLeaves(ufgp, leaves);
    std::map<std::string, int> occurrences;
    for (const auto* leaf : leaves)
        for (const auto& v : tripleVars(leaf->triples)) occurrences[v]++;

    std::vector<std::string> rowRv = ctx.rv;
    auto addVar = [&](const std::string& v) {
        if (std::find(rowRv.begin(), rowRv.end(), v) == rowRv.end()) rowRv.push_back(v);
    };
    for (const auto& [v, n] : occurrences)
        if (n > 1) addVar(v);
    std::vector<std::string> condVars;
    auto collectConds = [&](const GraphPattern& g, auto&& self) -> void {
        for (const auto& c : g.conds) c.collectVariables(condVars);
        for (const auto& f : g.filters) f.collectVariables(condVars);
        for (const auto& k : g.kids) self(k, self);
    };
    collectConds(ufgp, collectConds);
    for (const auto& v : condVars) addVar(v);

    std::vector<Expr> deferred;
    XExpr frag = nwdTranslate(ctx, ufgp, rowRv, deferred);
    if (!deferred.empty()) {
        int k = ++ctx.nwdCounter;
        std::string row = "f" + std::to_string(k) + "_row";
        std::vector<XExpr> conds;
        for (const auto& c : deferred) {
            conds.push_back(translateCond(c, [&row](const std::string& v) {
                XExpr p = xVar(row);
                p.steps.push_back(XqStep{false, sane(v), {}});
                return p;
            }));
        }
        frag = xFlwor({xFor(row, std::move(frag)), xWhere(xAnd(std::move(conds)))},
                      {xVar(row)});
    }
    return frag;
}

bool emptyFragment(const XExpr& e) {
    return e.kind == XExpr::Kind::Seq && e.kids.empty();
}

} // namespace

// --- public API -------------------------------------------------------------

XExpr literalToXQuery(const Term& t) {
    if (t.isLiteral() && !t.datatype.empty() && isNumericDatatype(t.datatype))
        return xNum(t.value);
    return xStr(t.value);
}

std::vector<std::string> returnVariables(const SparqlQuery& q) {
    if (q.form == SparqlQuery::Form::Construct) {
        std::vector<std::string> rv;
        for (const auto& t : q.constructTemplate)
            for (const Term* term : {&t.s, &t.p, &t.o})
                if (term->isVariable() && term->value.rfind("_b", 0) != 0 &&
                    std::find(rv.begin(), rv.end(), term->value) == rv.end())
                    rv.push_back(term->value); // template blanks get fresh labels
        return rv;
    }
    return q.returnVars;
}

std::map<std::string, std::vector<std::string>>
extensionClosure(const std::vector<TriplePattern>& triples) {
    std::map<std::string, std::set<std::string>> edges;
    auto addEdge = [&](const Term& a, const Term& b) {
        if (a.varLike() && b.varLike() && a.value != b.value)
            edges[a.value].insert(b.value);
    };
    for (const auto& t : triples) {
        addEdge(t.s, t.o);
        addEdge(t.s, t.p);
        addEdge(t.p, t.o);
    }
    std::map<std::string, std::vector<std::string>> out;
    for (const auto& [start, _] : edges) {
        std::set<std::string> seen;
        std::vector<std::string> stack{start};
        while (!stack.empty()) {
            std::string v = stack.back();
            stack.pop_back();
            auto it = edges.find(v);
            if (it == edges.end()) continue;
            for (const auto& n : it->second)
                if (n != start && seen.insert(n).second) stack.push_back(n);
        }
        out[start].assign(seen.begin(), seen.end());
    }
    return out;
}

XClause::Kind selectClauseKind(SparqlQuery::Form form, const std::vector<std::string>& rv,
                               const std::string& var,
                               const std::map<std::string, std::vector<std::string>>& ext) {
    if (form == SparqlQuery::Form::Ask) return XClause::Kind::Let;
    if (std::find(rv.begin(), rv.end(), var) != rv.end()) return XClause::Kind::For;
    auto it = ext.find(var);
    if (it != ext.end())
        for (const auto& k : it->second)
            if (std::find(rv.begin(), rv.end(), k) != rv.end()) return XClause::Kind::For;
    return XClause::Kind::Let;
}

bool filterIsSafe(const Expr& filter, const GraphPattern& bgp) {
    std::vector<std::string> pv = tripleVars(bgp.triples);
    for (const auto& v : filter.variables())
        if (std::find(pv.begin(), pv.end(), v) == pv.end()) return false;
    return true;
}

GpTranslation translateGraphPattern(const SparqlQuery& q, const MappingCatalog& cat,
                                    const OntologyModel& onto,
                                    const TranslateOptions& opt) {
    GpTranslation out;
    std::vector<GraphPattern> ufgps = normalize(q.pattern);
    std::vector<XExpr> frags;
    for (const GraphPattern& ufgp : ufgps) {
        Ctx ctx{cat, onto, opt};
        ctx.form = q.form;
        ctx.rv = returnVariables(q);
        for (const auto& k : q.orderKeys) ctx.orderVars.push_back(k.var);
        ctx.out = &out;
        ctx.varTypes = determineVariableTypes(ufgp, cat);
        if (ctx.varTypes.conflict) continue; // unmatchable against any dataset
        ctx.ext = extensionClosure(dataTriples(ufgp));
        try {
            ctx.schemaBind = processSchemaTriples(ufgp, onto, cat, ctx.varTypes,
                                                 opt.transitiveSchema);
        } catch (const Error& e) {
            if (e.kind() == Error::Kind::Conflict) continue;
            throw;
        }

        XExpr frag;
        bool unsat = false;
        bool wd = isWellDesigned(ufgp);
        if (wd) {
            // operator-level filters must restrict the mandatory part, else the
            // pattern needs the row-materializing strategy
            Spine probe;
            probe.base.kind = GraphPattern::Kind::Bgp;
            flattenWd(ufgp, probe);
            std::vector<std::string> baseVars = tripleVars(probe.base.triples);
            auto attachable = [&](const Expr& c) {
                for (const auto& v : c.variables())
                    if (std::find(baseVars.begin(), baseVars.end(), v) == baseVars.end())
                        return false;
                return true;
            };
            for (const auto& c : probe.lifted)
                if (!attachable(c)) wd = false;
            for (const auto& f : probe.base.filters)
                if (wd && !filterIsSafe(f, probe.base) && !attachable(f)) wd = false;
        }
        frag = wd ? wdSpine(ctx, ufgp, {}, {}, unsat) : nwdUfgp(ctx, ufgp);
        if (!unsat && !emptyFragment(frag)) frags.push_back(std::move(frag));
    }
    if (frags.empty()) {
        out.fragment = xSeq({});
    } else if (frags.size() == 1) {
        out.fragment = std::move(frags[0]);
    } else {
        out.fragment = xSeq(std::move(frags));
    }
    return out;
}

GpTranslation translateBgpFragment(const GraphPattern& bgp, const SparqlQuery& q,
                                   const MappingCatalog& cat, const OntologyModel& onto,
                                   const TranslateOptions& opt, const BgpScope& scope) {
    GpTranslation out;
    Ctx ctx{cat, onto, opt};
    ctx.form = q.form;
    ctx.rv = returnVariables(q);
    for (const auto& k : q.orderKeys) ctx.orderVars.push_back(k.var);
    ctx.out = &out;
    ctx.varTypes = determineVariableTypes(bgp, cat);
    if (ctx.varTypes.conflict) {
        out.fragment = xSeq({});
        return out;
    }
    ctx.ext = extensionClosure(dataTriples(bgp));
    ctx.schemaBind =
        processSchemaTriples(bgp, onto, cat, ctx.varTypes, opt.transitiveSchema);

    std::set<std::string> bound(scope.boundVars.begin(), scope.boundVars.end());
    BgpOut b = translateBgpCore(ctx, bgp, scope.carried, bound, false, ctx.rv, ctx.form,
                                nullptr);
    if (b.unsat) {
        out.fragment = xSeq({});
        return out;
    }
    std::vector<XClause> clauses = b.clauses;
    std::vector<XExpr> conds = b.assurances;
    for (auto& c : b.whereConds) conds.push_back(std::move(c));
    if (!conds.empty()) clauses.push_back(xWhere(xAnd(std::move(conds))));
    XExpr ret = ctx.form == SparqlQuery::Form::Ask
                    ? xCall("true", {})
                    : xElem("Result", buildReturnItems(ctx, ctx.rv, b));
    out.fragment = xFlwor(std::move(clauses), {std::move(ret)});
    return out;
}

BgpClauses translateBgpClauses(const GraphPattern& bgp, const SparqlQuery& q,
                               const MappingCatalog& cat, const OntologyModel& onto,
                               const TranslateOptions& opt) {
    BgpClauses out;
    GpTranslation sink;
    Ctx ctx{cat, onto, opt};
    ctx.form = q.form;
    ctx.rv = returnVariables(q);
    ctx.out = &sink;
    ctx.varTypes = determineVariableTypes(bgp, cat);
    if (ctx.varTypes.conflict) {
        out.unsat = true;
        return out;
    }
    ctx.ext = extensionClosure(dataTriples(bgp));
    ctx.schemaBind =
        processSchemaTriples(bgp, onto, cat, ctx.varTypes, opt.transitiveSchema);

    BgpOut b = translateBgpCore(ctx, bgp, {}, {}, false, ctx.rv, ctx.form, nullptr);
    if (b.unsat) {
        out.unsat = true;
        return out;
    }
    out.clauses = b.clauses;
    std::vector<XExpr> conds = b.assurances;
    for (auto& c : b.whereConds) conds.push_back(std::move(c));
    if (!conds.empty()) out.clauses.push_back(xWhere(xAnd(std::move(conds))));
    for (const auto& [v, idx] : b.clauseOf) out.varNames[v] = b.clauses[idx].var;
    out.bindings = b.finals;
    return out;
}

} // namespace sxq

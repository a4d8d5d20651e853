#include "sxq/finalize.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace sxq {

namespace {

const char* kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

XExpr varStep(const std::string& var, const std::string& step) {
    XExpr p = xVar(var);
    p.steps.push_back(XqStep{false, step, {}});
    return p;
}

XExpr varStar(const std::string& var) { return varStep(var, "*"); }

// --- solution sequence modifiers (Table 8 pipeline) -------------------------

XExpr orderFlwor(const SparqlQuery& q, const std::string& cur) {
    std::vector<XOrderKey> keys;
    for (const auto& k : q.orderKeys) {
        XOrderKey key;
        key.expr = varStep("iter", xqName(k.var));
        key.descending = k.descending;
        keys.push_back(std::move(key));
    }
    return xFlwor({xFor("iter", xVar(cur)), xOrderBy(std::move(keys))}, {xVar("iter")});
}

// keep-first duplicate elimination over deep-equal rows
XExpr dedupFlwor(const std::string& cur) {
    XExpr earlier = xVar(cur);
    earlier.rootPredicates.push_back(xCmp("<", xCall("position", {}), xVar("i")));
    earlier.rootPredicates.push_back(xCall("deep-equal", {xDot(), xVar("iter")}));
    return xFlwor({xForAt("iter", "i", xVar(cur)), xWhere(xCall("empty", {earlier}))},
                  {xVar("iter")});
}

XExpr positionWindow(const std::string& cur, const std::optional<long long>& limit,
                     const std::optional<long long>& offset) {
    if (!limit && !offset) return xVar(cur);
    std::vector<XExpr> conds;
    if (offset)
        conds.push_back(xCmp(">", xCall("position", {}), xNum(std::to_string(*offset))));
    if (limit) {
        long long hi = *limit + (offset ? *offset : 0);
        conds.push_back(xCmp("<=", xCall("position", {}), xNum(std::to_string(hi))));
    }
    XExpr out = xVar(cur);
    out.rootPredicates.push_back(xAnd(std::move(conds)));
    return out;
}

// let $Results := ( fragment ) return ( let $Ordered_Results := (...) ... )
XExpr modifiedResults(const SparqlQuery& q, XExpr fragment) {
    struct NamedLet {
        std::string name;
        XExpr expr;
    };
    std::vector<NamedLet> lets;
    std::string cur = "Results";
    if (!q.orderKeys.empty()) {
        lets.push_back({"Ordered_Results", orderFlwor(q, cur)});
        cur = "Ordered_Results";
    }
    if (q.distinct || q.reduced) {
        lets.push_back({"Distinct_Results", dedupFlwor(cur)});
        cur = "Distinct_Results";
    }
    XExpr body = positionWindow(cur, q.limit, q.offset);
    for (auto it = lets.rbegin(); it != lets.rend(); ++it)
        body = xFlwor({xLet(it->name, std::move(it->expr))}, {std::move(body)});
    return xFlwor({xLet("Results", std::move(fragment))}, {std::move(body)});
}

// --- construct serialization -------------------------------------------------

bool isTemplateBlank(const Term& t) {
    return t.varLike() && t.value.rfind("_b", 0) == 0;
}

XExpr constructTermPart(const Term& t) {
    if (isTemplateBlank(t))
        return xCall("concat", {xStr("_:" + t.value + "_"), xVar("iter")});
    if (t.varLike()) return xCall("string", {varStep("res", xqName(t.value))});
    if (t.isIri()) return xStr(t.value);
    return xStr(t.value); // literal lexical form
}

XExpr constructTripleExpr(const TriplePattern& t) {
    XExpr body = xCall("concat", {constructTermPart(t.s), xStr(" "),
                                  constructTermPart(t.p), xStr(" "),
                                  constructTermPart(t.o), xStr(" .")});
    std::vector<XExpr> guards;
    for (const Term* term : {&t.s, &t.p, &t.o})
        if (term->varLike() && !isTemplateBlank(*term))
            guards.push_back(xCall("exists", {varStep("res", xqName(term->value))}));
    if (guards.empty()) return body;
    return xIf(xAnd(std::move(guards)), std::move(body), xSeq({}));
}

// --- helper declarations -----------------------------------------------------

void declareHelpers(XQueryProgram& prog, const GpTranslation& gp) {
    if (gp.usesCivt) prog.functions.push_back({"local:civt", {"n"}, std::nullopt});
    if (gp.usesSchemaPath)
        prog.functions.push_back({"local:schema-path", {"n"}, std::nullopt});
    if (gp.usesCompatible) {
        // rows agree on every shared column
        XExpr bMatch = varStar("b");
        bMatch.steps.back().predicates.push_back(
            xCmp("=", xCall("local-name", {xDot()}), xCall("local-name", {xVar("x")})));
        XExpr inner = xEvery(
            "y", std::move(bMatch),
            xCmp("=", xCall("string", {xVar("y")}), xCall("string", {xVar("x")})));
        prog.functions.push_back(
            {"local:compatible", {"a", "b"}, xEvery("x", varStar("a"), std::move(inner))});
    }
    if (gp.usesMerge) {
        XExpr bOnly = varStar("b");
        bOnly.steps.back().predicates.push_back(xCall(
            "not", {xCmp("=", xCall("local-name", {xDot()}), xCall("local-name", {varStar("a")}))}));
        prog.functions.push_back(
            {"local:merge", {"a", "b"}, xElem("Result", {varStar("a"), std::move(bOnly)})});
    }
}

// --- update helpers ----------------------------------------------------------

XExpr mkDelete(XExpr target) {
    XExpr d;
    d.kind = XExpr::Kind::DeleteNodes;
    d.kids.push_back(std::move(target));
    return d;
}

XExpr mkInsert(XExpr data, XExpr into) {
    XExpr d;
    d.kind = XExpr::Kind::InsertNodes;
    d.kids.push_back(std::move(data));
    d.kids.push_back(std::move(into));
    return d;
}

XPath instancePath(const Term& s) {
    if (!s.isIri())
        throw Error(Error::Kind::Unsupported,
                    "data blocks must name instances by IRI: " + s.text());
    auto hash = s.value.find('#');
    std::string frag = hash == std::string::npos ? "" : s.value.substr(hash + 1);
    if (frag.empty() || frag[0] != '/')
        throw Error(Error::Kind::Mapping,
                    "cannot locate the XML node for <" + s.value +
                        ">: expected a document#/xpath instance IRI");
    return XPath::parse(frag);
}

XPath withoutPredicates(const XPath& p) {
    std::vector<Step> steps = p.steps();
    for (auto& st : steps) st.preds.clear();
    return XPath(std::move(steps));
}

XExpr collectionPath(const std::string& uri, const XPath& a) {
    XExpr e = xPath(XExpr::Root::Collection, uri, {});
    appendSteps(e.steps, a, 0);
    return e;
}

// Property step under the instance's class path; single-step element only.
XPath propertySuffix(const Term& p, const PathSet& classPaths, const MappingCatalog& cat,
                     bool allowAttribute) {
    const PathSet& mu = predicateWholes(p, cat);
    PathSet ys = suffixes(classPaths, mu);
    if (ys.empty())
        throw Error(Error::Kind::Mapping, "no mapping for property '" +
                                              iriLocalName(p.value) + "' at " +
                                              classPaths.text());
    std::set<std::string> names;
    for (const XPath& y : ys) names.insert(y.text());
    if (names.size() > 1)
        throw Error(Error::Kind::Mapping, "ambiguous paths for property '" +
                                              iriLocalName(p.value) + "': " + ys.text());
    const XPath& y = *ys.begin();
    if (y.length() != 1)
        throw Error(Error::Kind::Unsupported,
                    "nested property paths in update data blocks");
    if (!allowAttribute && y.last().axis == Step::Axis::Attribute)
        throw Error(Error::Kind::Unsupported,
                    "attribute construction in INSERT DATA");
    return y;
}

XQueryProgram deleteDataProgram(const UpdateRequest& u, const MappingCatalog& cat,
                                const TranslateOptions& opt) {
    std::vector<XExpr> stmts;
    for (const auto& t : u.deleteTriples) {
        XPath inst = instancePath(t.s);
        if (t.p.value == kRdfType) { // drop the whole instance element
            stmts.push_back(mkDelete(collectionPath(opt.docUri, inst)));
            continue;
        }
        if (!t.o.isLiteral())
            throw Error(Error::Kind::Unsupported,
                        "object property updates are not supported");
        PathSet cls;
        cls.add(withoutPredicates(inst));
        XPath y = propertySuffix(t.p, cls, cat, /*allowAttribute=*/true);
        XExpr target = collectionPath(opt.docUri, inst);
        appendSteps(target.steps, y, 0);
        target.steps.back().predicates.push_back(xCmp("=", xDot(), literalToXQuery(t.o)));
        stmts.push_back(mkDelete(std::move(target)));
    }
    XQueryProgram prog;
    prog.body = stmts.size() == 1 ? std::move(stmts[0]) : xSeq(std::move(stmts));
    return prog;
}

XQueryProgram insertDataProgram(const UpdateRequest& u, const MappingCatalog& cat,
                                const TranslateOptions& opt) {
    // group by subject, keeping first-appearance order
    std::vector<std::pair<std::string, std::vector<const TriplePattern*>>> groups;
    for (const auto& t : u.insertTriples) {
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const auto& g) { return g.first == t.s.value; });
        if (it == groups.end()) {
            groups.push_back({t.s.value, {}});
            it = std::prev(groups.end());
        }
        it->second.push_back(&t);
    }

    std::vector<XClause> clauses;
    std::vector<XExpr> inserts;
    int nodeCounter = 0, groupCounter = 0;
    for (const auto& [subject, triples] : groups) {
        const TriplePattern* type = nullptr;
        for (const auto* t : triples)
            if (t->p.value == kRdfType) type = t;

        std::vector<XExpr> nodeVars;
        XExpr location;
        if (type) { // a fresh instance assembled from the sibling triples
            std::string cls = iriLocalName(type->o.value);
            const PathSet& paths = cat.lookup(ConstructKind::Class, cls);
            if (paths.empty())
                throw Error(Error::Kind::Mapping, "unknown class '" + cls + "'");
            if (paths.size() > 1)
                throw Error(Error::Kind::Mapping,
                            "ambiguous insert location for class '" + cls +
                                "': " + paths.text());
            const XPath& clsPath = *paths.begin();
            if (clsPath.length() < 2)
                throw Error(Error::Kind::Mapping,
                            "class '" + cls + "' maps to a document root");
            std::vector<XExpr> kids;
            for (const auto* t : triples) {
                if (t == type) continue;
                if (!t->o.isLiteral())
                    throw Error(Error::Kind::Unsupported,
                                "object property updates are not supported");
                XPath y = propertySuffix(t->p, paths, cat, /*allowAttribute=*/false);
                kids.push_back(xElem(y.last().name, {xStr(t->o.value)}));
            }
            std::string n = "n" + std::to_string(++nodeCounter);
            clauses.push_back(xLet(n, xElem(clsPath.last().name, std::move(kids))));
            nodeVars.push_back(xVar(n));
            location = collectionPath(opt.docUri, clsPath.parent());
        } else { // new property values on an existing instance
            XPath inst = instancePath(Term::iri(subject));
            PathSet cls;
            cls.add(withoutPredicates(inst));
            for (const auto* t : triples) {
                if (!t->o.isLiteral())
                    throw Error(Error::Kind::Unsupported,
                                "object property updates are not supported");
                XPath y = propertySuffix(t->p, cls, cat, /*allowAttribute=*/false);
                std::string n = "n" + std::to_string(++nodeCounter);
                clauses.push_back(xLet(n, xElem(y.last().name, {xStr(t->o.value)})));
                nodeVars.push_back(xVar(n));
            }
            location = collectionPath(opt.docUri, inst);
        }
        std::string g = std::to_string(++groupCounter);
        clauses.push_back(xLet("data" + g, xSeq(std::move(nodeVars))));
        clauses.push_back(xLet("insert_location" + g, std::move(location)));
        inserts.push_back(
            mkInsert(xVar("data" + g), xVar("insert_location" + g)));
    }
    XQueryProgram prog;
    prog.body = xFlwor(std::move(clauses), std::move(inserts));
    return prog;
}

XQueryProgram modifyProgram(const UpdateRequest& u, const MappingCatalog& cat,
                            const OntologyModel& onto, const TranslateOptions& opt) {
    auto ufgps = normalize(u.where);
    if (ufgps.size() != 1 || !ufgps[0].isBgp())
        throw Error(Error::Kind::Unsupported,
                    "update WHERE patterns must be a single basic graph pattern");
    const GraphPattern& bgp = ufgps[0];

    SparqlQuery synth;
    synth.form = SparqlQuery::Form::Select;
    auto addVar = [&](const Term& t) {
        if (t.varLike() && std::find(synth.returnVars.begin(), synth.returnVars.end(),
                                     t.value) == synth.returnVars.end())
            synth.returnVars.push_back(t.value);
    };
    for (const auto& t : u.deleteTriples) {
        addVar(t.s);
        addVar(t.o);
    }
    for (const auto& t : u.insertTriples) {
        addVar(t.s);
        addVar(t.o);
    }
    synth.pattern = bgp;

    BgpClauses wc = translateBgpClauses(bgp, synth, cat, onto, opt);
    XQueryProgram prog;
    if (wc.unsat) {
        prog.body = xSeq({}); // matches nothing; the update is a no-op
        return prog;
    }
    auto boundName = [&](const Term& t) -> std::string {
        auto it = wc.varNames.find(t.value);
        if (it == wc.varNames.end())
            throw Error(Error::Kind::Unsupported,
                        "update template variable ?" + t.value +
                            " is not bound by the WHERE pattern");
        return it->second;
    };

    // delete targets: property value nodes, or whole instances for type triples
    std::vector<XExpr> targets;
    std::set<std::string> seen;
    auto addTarget = [&](XExpr e) {
        if (seen.insert(renderExpr(e)).second) targets.push_back(std::move(e));
    };
    std::set<std::string> wholeInstances; // subjects whose instance node goes away
    for (const auto& t : u.deleteTriples)
        if (isSchemaTriple(t) || t.p.value == kRdfType)
            if (t.s.varLike()) wholeInstances.insert(t.s.value);
    for (const auto& t : u.deleteTriples) {
        if (!t.s.varLike())
            throw Error(Error::Kind::Unsupported,
                        "delete templates must use pattern variables");
        if (isSchemaTriple(t) || t.p.value == kRdfType) {
            addTarget(xVar(boundName(t.s)));
            continue;
        }
        std::string sv = boundName(t.s);
        if (t.o.varLike()) {
            addTarget(xVar(boundName(t.o)));
            continue;
        }
        // a literal value: drop the matching nodes, unless the instance itself
        // is already being deleted
        if (wholeInstances.count(t.s.value)) continue;
        if (!t.o.isLiteral())
            throw Error(Error::Kind::Unsupported,
                        "object property updates are not supported");
        Binding sb = wc.bindings.count(t.s.value) ? wc.bindings.at(t.s.value)
                                                  : Binding::theta();
        if (!sb.isSet())
            throw Error(Error::Kind::Mapping,
                        "no determined binding for ?" + t.s.value);
        XPath y = propertySuffix(t.p, sb.paths(), cat, /*allowAttribute=*/true);
        XExpr target = xVar(sv);
        appendSteps(target.steps, y, 0);
        target.steps.back().predicates.push_back(xCmp("=", xDot(), literalToXQuery(t.o)));
        addTarget(std::move(target));
    }

    // insert statements pair row variables through the shared clause prefix
    std::vector<XExpr> rowInserts;
    for (const auto& t : u.insertTriples) {
        if (t.p.varLike() || t.p.value == kRdfType)
            throw Error(Error::Kind::Unsupported,
                        "insert templates must use datatype property IRIs");
        if (!t.s.varLike())
            throw Error(Error::Kind::Unsupported,
                        "insert templates must target pattern variables");
        std::string sv = boundName(t.s);
        Binding sb = wc.bindings.count(t.s.value) ? wc.bindings.at(t.s.value)
                                                  : Binding::theta();
        if (!sb.isSet())
            throw Error(Error::Kind::Mapping,
                        "no determined binding for ?" + t.s.value);
        XPath y = propertySuffix(t.p, sb.paths(), cat, /*allowAttribute=*/false);
        XExpr value = t.o.varLike() ? xCall("string", {xVar(boundName(t.o))})
                                    : xStr(t.o.value);
        rowInserts.push_back(
            mkInsert(xElem(y.last().name, {std::move(value)}), xVar(sv)));
    }

    std::vector<XClause> top;
    top.push_back(xLet(opt.docVar, xCollection(opt.docUri)));
    std::vector<XExpr> effects;
    if (!targets.empty()) {
        top.push_back(xLet("where_gp", xFlwor(wc.clauses, std::move(targets))));
        top.push_back(xLet("delete_gp", xVar("where_gp")));
        effects.push_back(mkDelete(xVar("delete_gp")));
    }
    if (!rowInserts.empty())
        effects.push_back(xFlwor(wc.clauses, std::move(rowInserts)));
    if (effects.empty())
        throw Error(Error::Kind::Unsupported, "update request changes nothing");
    prog.body = xFlwor(std::move(top), std::move(effects));
    return prog;
}

} // namespace

XQueryProgram finalizeQuery(const SparqlQuery& q, const GpTranslation& gp,
                            const TranslateOptions& opt) {
    XQueryProgram prog;
    declareHelpers(prog, gp);
    std::vector<XClause> top;
    top.push_back(xLet(opt.docVar, xCollection(opt.docUri)));
    switch (q.form) {
        case SparqlQuery::Form::Select:
        case SparqlQuery::Form::Describe:
            top.push_back(xLet("Modified_Results", modifiedResults(q, gp.fragment)));
            prog.body = xFlwor(std::move(top),
                               {xElem("Results", {xVar("Modified_Results")})});
            break;
        case SparqlQuery::Form::Ask:
            top.push_back(xLet("Results", gp.fragment));
            prog.body = xFlwor(std::move(top), {xIf(xCall("empty", {xVar("Results")}),
                                                    xStr("no"), xStr("yes"))});
            break;
        case SparqlQuery::Form::Construct: {
            top.push_back(xLet("Modified_Results", modifiedResults(q, gp.fragment)));
            std::vector<XExpr> triples;
            for (const auto& t : q.constructTemplate)
                triples.push_back(constructTripleExpr(t));
            XExpr rows = xFlwor({xForAt("res", "iter", xVar("Modified_Results"))},
                                {xSeq(std::move(triples))});
            prog.body = xFlwor(std::move(top), {std::move(rows)});
            break;
        }
    }
    return prog;
}

XQueryProgram translateUpdate(const UpdateRequest& u, const MappingCatalog& cat,
                              const OntologyModel& onto, const TranslateOptions& opt) {
    switch (u.kind) {
        case UpdateRequest::Kind::DeleteData: return deleteDataProgram(u, cat, opt);
        case UpdateRequest::Kind::InsertData: return insertDataProgram(u, cat, opt);
        case UpdateRequest::Kind::Modify: return modifyProgram(u, cat, onto, opt);
    }
    throw Error(Error::Kind::Internal, "unreachable update kind");
}

} // namespace sxq

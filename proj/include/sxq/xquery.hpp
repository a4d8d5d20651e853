#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sxq/xpath.hpp"

namespace sxq {

// Abstract syntax for the XQuery subset we emit and evaluate.  One variant
// struct instead of a class hierarchy: the shapes are small and the
// serializer/evaluator switch on kind anyway.

struct XExpr;

// One step of a path expression: /name, /@name, optional predicates.
struct XqStep {
    bool attribute = false;
    std::string name;                // "*" allowed
    std::vector<XExpr> predicates;   // rendered [p1][p2]
};

struct XClause;
struct XOrderKey;

struct XExpr {
    enum class Kind {
        String,      // "text"
        Number,      // text verbatim (numeric literal)
        Raw,         // text verbatim, uninterpreted
        Path,        // root (+ rootPredicates) + steps
        Compare,     // text=op, kids[0] op kids[1]
        Arith,       // text=op, kids[0] op kids[1]
        And,         // kids joined " and "
        Or,          // kids joined " or "
        Call,        // text=function name, kids=args
        Seq,         // ( k1 , k2 , ... )  -- self-parenthesizing
        If,          // if (k0) then (k1) else (k2)
        Flwor,       // clauses + return ret
        Element,     // <text>{ kids joined " , " }</text>
        Union,       // kids joined " union "
        Quantified,  // text="every"|"some", $quantVar in kids[0] satisfies kids[1]
        DeleteNodes, // delete nodes kids[0]
        InsertNodes, // insert nodes kids[0] into kids[1]
    };

    enum class Root { Context, Var, Collection, DocFn };

    Kind kind = Kind::Seq;
    std::string text;     // literal / op / callee / tag, depending on kind

    // Path payload
    Root root = Root::Context;
    std::string rootArg;  // variable name (no '$') or collection/doc uri
    bool explicitDot = false;          // render context root as "./..."
    std::vector<XExpr> rootPredicates; // e.g. $v[position()>5]
    std::vector<XqStep> steps;

    std::string quantVar;
    std::vector<XExpr> kids;

    // Flwor payload
    std::vector<XClause> clauses;
    std::vector<XExpr> ret;
};

struct XOrderKey {
    XExpr expr;
    bool descending = false;  // rendered "expr descending empty least"
};

struct XClause {
    enum class Kind { For, Let, Where, OrderBy };
    Kind kind = Kind::For;
    std::string var;     // no '$'
    std::string posVar;  // "at $posVar" when nonempty (For only)
    XExpr expr;          // For: in-expr, Let: bound expr, Where: condition
    std::vector<XOrderKey> keys;  // OrderBy
};

// declare function local:name($p1, $p2) { body };  -- body absent => external
struct XQueryFunction {
    std::string name;
    std::vector<std::string> params;  // no '$'
    std::optional<XExpr> body;
};

struct XQueryProgram {
    std::vector<XQueryFunction> functions;
    XExpr body;
};

// ---- builders ------------------------------------------------------------

XExpr xStr(std::string s);
XExpr xNum(std::string n);
XExpr xRaw(std::string s);
XExpr xVar(std::string name);
XExpr xCollection(std::string uri);
XExpr xDot();  // bare "."
XExpr xPath(XExpr::Root root, std::string rootArg, std::vector<XqStep> steps);
XExpr xCall(std::string name, std::vector<XExpr> args);
XExpr xCmp(std::string op, XExpr l, XExpr r);
XExpr xArith(std::string op, XExpr l, XExpr r);
XExpr xAnd(std::vector<XExpr> kids);   // single kid collapses to the kid
XExpr xOr(std::vector<XExpr> kids);
XExpr xSeq(std::vector<XExpr> kids);
XExpr xIf(XExpr c, XExpr t, XExpr e);
XExpr xElem(std::string tag, std::vector<XExpr> content);
XExpr xUnion(std::vector<XExpr> kids); // single kid collapses to the kid
XExpr xFlwor(std::vector<XClause> clauses, std::vector<XExpr> ret);
XExpr xEvery(std::string var, XExpr in, XExpr satisfies);

XClause xFor(std::string var, XExpr in);
XClause xForAt(std::string var, std::string posVar, XExpr in);
XClause xLet(std::string var, XExpr e);
XClause xWhere(XExpr e);
XClause xOrderBy(std::vector<XOrderKey> keys);

// Append the steps of an algebra path (from index `from`) to `out`.
void appendSteps(std::vector<XqStep>& out, const XPath& path, size_t from = 0);

// Path rooted at $var carrying the steps of `path` starting at `from`.
XExpr xVarPath(const std::string& var, const XPath& path, size_t from);

// ---- rendering -----------------------------------------------------------

std::string renderExpr(const XExpr& e, int indent = 0);
std::string renderXQuery(const XQueryProgram& p);

// Lexes rendered XQuery into tokens so that tests can compare programs
// ignoring whitespace/layout.  Both sides of a comparison must go through
// this; the token rules are consistent rather than spec-perfect.
std::vector<std::string> xqueryTokens(const std::string& text);

}  // namespace sxq

#include "sxq/xquery.hpp"

#include <cctype>
#include <utility>

namespace sxq {

// ---- builders ------------------------------------------------------------

XExpr xStr(std::string s) {
    XExpr e;
    e.kind = XExpr::Kind::String;
    e.text = std::move(s);
    return e;
}

XExpr xNum(std::string n) {
    XExpr e;
    e.kind = XExpr::Kind::Number;
    e.text = std::move(n);
    return e;
}

XExpr xRaw(std::string s) {
    XExpr e;
    e.kind = XExpr::Kind::Raw;
    e.text = std::move(s);
    return e;
}

XExpr xVar(std::string name) {
    XExpr e;
    e.kind = XExpr::Kind::Path;
    e.root = XExpr::Root::Var;
    e.rootArg = std::move(name);
    return e;
}

XExpr xCollection(std::string uri) {
    XExpr e;
    e.kind = XExpr::Kind::Path;
    e.root = XExpr::Root::Collection;
    e.rootArg = std::move(uri);
    return e;
}

XExpr xDot() {
    XExpr e;
    e.kind = XExpr::Kind::Path;
    e.root = XExpr::Root::Context;
    e.explicitDot = true;
    return e;
}

XExpr xPath(XExpr::Root root, std::string rootArg, std::vector<XqStep> steps) {
    XExpr e;
    e.kind = XExpr::Kind::Path;
    e.root = root;
    e.rootArg = std::move(rootArg);
    e.steps = std::move(steps);
    return e;
}

XExpr xCall(std::string name, std::vector<XExpr> args) {
    XExpr e;
    e.kind = XExpr::Kind::Call;
    e.text = std::move(name);
    e.kids = std::move(args);
    return e;
}

XExpr xCmp(std::string op, XExpr l, XExpr r) {
    XExpr e;
    e.kind = XExpr::Kind::Compare;
    e.text = std::move(op);
    e.kids.push_back(std::move(l));
    e.kids.push_back(std::move(r));
    return e;
}

XExpr xArith(std::string op, XExpr l, XExpr r) {
    XExpr e;
    e.kind = XExpr::Kind::Arith;
    e.text = std::move(op);
    e.kids.push_back(std::move(l));
    e.kids.push_back(std::move(r));
    return e;
}

static XExpr nary(XExpr::Kind kind, std::vector<XExpr> kids) {
    if (kids.size() == 1) return std::move(kids[0]);
    XExpr e;
    e.kind = kind;
    e.kids = std::move(kids);
    return e;
}

XExpr xAnd(std::vector<XExpr> kids) { return nary(XExpr::Kind::And, std::move(kids)); }
XExpr xOr(std::vector<XExpr> kids) { return nary(XExpr::Kind::Or, std::move(kids)); }
XExpr xUnion(std::vector<XExpr> kids) { return nary(XExpr::Kind::Union, std::move(kids)); }

XExpr xSeq(std::vector<XExpr> kids) {
    XExpr e;
    e.kind = XExpr::Kind::Seq;
    e.kids = std::move(kids);
    return e;
}

XExpr xIf(XExpr c, XExpr t, XExpr e2) {
    XExpr e;
    e.kind = XExpr::Kind::If;
    e.kids.push_back(std::move(c));
    e.kids.push_back(std::move(t));
    e.kids.push_back(std::move(e2));
    return e;
}

XExpr xElem(std::string tag, std::vector<XExpr> content) {
    XExpr e;
    e.kind = XExpr::Kind::Element;
    e.text = std::move(tag);
    e.kids = std::move(content);
    return e;
}

XExpr xFlwor(std::vector<XClause> clauses, std::vector<XExpr> ret) {
    XExpr e;
    e.kind = XExpr::Kind::Flwor;
    e.clauses = std::move(clauses);
    e.ret = std::move(ret);
    return e;
}

XExpr xEvery(std::string var, XExpr in, XExpr satisfies) {
    XExpr e;
    e.kind = XExpr::Kind::Quantified;
    e.text = "every";
    e.quantVar = std::move(var);
    e.kids.push_back(std::move(in));
    e.kids.push_back(std::move(satisfies));
    return e;
}

XClause xFor(std::string var, XExpr in) {
    XClause c;
    c.kind = XClause::Kind::For;
    c.var = std::move(var);
    c.expr = std::move(in);
    return c;
}

XClause xForAt(std::string var, std::string posVar, XExpr in) {
    XClause c = xFor(std::move(var), std::move(in));
    c.posVar = std::move(posVar);
    return c;
}

XClause xLet(std::string var, XExpr e) {
    XClause c;
    c.kind = XClause::Kind::Let;
    c.var = std::move(var);
    c.expr = std::move(e);
    return c;
}

XClause xWhere(XExpr e) {
    XClause c;
    c.kind = XClause::Kind::Where;
    c.expr = std::move(e);
    return c;
}

XClause xOrderBy(std::vector<XOrderKey> keys) {
    XClause c;
    c.kind = XClause::Kind::OrderBy;
    c.keys = std::move(keys);
    return c;
}

void appendSteps(std::vector<XqStep>& out, const XPath& path, size_t from) {
    const auto& steps = path.steps();
    for (size_t i = from; i < steps.size(); i++) {
        XqStep st;
        st.attribute = steps[i].axis == Step::Axis::Attribute;
        st.name = steps[i].wildcard ? "*" : steps[i].name;
        for (const auto& p : steps[i].preds) st.predicates.push_back(xRaw(p.text()));
        out.push_back(std::move(st));
    }
}

XExpr xVarPath(const std::string& var, const XPath& path, size_t from) {
    XExpr e = xVar(var);
    appendSteps(e.steps, path, from);
    return e;
}

// ---- rendering -----------------------------------------------------------

namespace {

std::string ind(int n) { return std::string(2 * static_cast<size_t>(n), ' '); }

bool isMultiline(const std::string& s) { return s.find('\n') != std::string::npos; }

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

std::string render(const XExpr& e, int indent);

std::string joinExprs(const std::vector<XExpr>& kids, const std::string& sep, int indent) {
    std::string out;
    for (size_t i = 0; i < kids.size(); i++) {
        if (i) out += sep;
        out += render(kids[i], indent);
    }
    return out;
}

// "kw ( X )" on one line, or a block when X spans lines.
std::string branch(const std::string& kw, const std::string& body, int indent) {
    if (!isMultiline(body)) return kw + " ( " + body + " )";
    return kw + " (\n" + ind(indent + 1) + body + "\n" + ind(indent) + ")";
}

std::string renderClause(const XClause& c, int indent) {
    switch (c.kind) {
        case XClause::Kind::For: {
            std::string head = "for $" + c.var;
            if (!c.posVar.empty()) head += " at $" + c.posVar;
            std::string body = render(c.expr, indent);
            if (c.expr.kind == XExpr::Kind::Flwor || isMultiline(body))
                return head + " in (\n" + ind(indent + 1) + render(c.expr, indent + 1) + "\n" +
                       ind(indent) + ")";
            return head + " in " + body;
        }
        case XClause::Kind::Let: {
            std::string head = "let $" + c.var + " :=";
            if (c.expr.kind == XExpr::Kind::Flwor || c.expr.kind == XExpr::Kind::If)
                return head + "(\n" + ind(indent + 1) + render(c.expr, indent + 1) + "\n" +
                       ind(indent) + ")";
            return head + " " + render(c.expr, indent);
        }
        case XClause::Kind::Where:
            return "where ( " + render(c.expr, indent) + " )";
        case XClause::Kind::OrderBy: {
            std::string out = "order by ";
            for (size_t i = 0; i < c.keys.size(); i++) {
                if (i) out += " , ";
                out += render(c.keys[i].expr, indent);
                if (c.keys[i].descending) out += " descending";
                out += " empty least";
            }
            return out;
        }
    }
    return "";
}

std::string render(const XExpr& e, int indent) {
    using K = XExpr::Kind;
    switch (e.kind) {
        case K::String:
            return quote(e.text);
        case K::Number:
        case K::Raw:
            return e.text;
        case K::Path: {
            std::string out;
            bool rootless = false;  // relative path with no leading "./"
            switch (e.root) {
                case XExpr::Root::Context:
                    if (e.explicitDot || e.steps.empty()) out = ".";
                    else rootless = true;
                    break;
                case XExpr::Root::Var: out = "$" + e.rootArg; break;
                case XExpr::Root::Collection: out = "collection(" + quote(e.rootArg) + ")"; break;
                case XExpr::Root::DocFn: out = "doc(" + quote(e.rootArg) + ")"; break;
            }
            for (const auto& p : e.rootPredicates) out += "[" + render(p, indent) + "]";
            for (size_t i = 0; i < e.steps.size(); i++) {
                if (!(rootless && i == 0)) out += "/";
                if (e.steps[i].attribute) out += "@";
                out += e.steps[i].name;
                for (const auto& p : e.steps[i].predicates) out += "[" + render(p, indent) + "]";
            }
            return out;
        }
        case K::Compare:
        case K::Arith:
            return render(e.kids[0], indent) + " " + e.text + " " + render(e.kids[1], indent);
        case K::And:
            return joinExprs(e.kids, " and ", indent);
        case K::Or:
            return joinExprs(e.kids, " or ", indent);
        case K::Call:
            return e.text + "(" + joinExprs(e.kids, " , ", indent) + ")";
        case K::Seq: {
            if (e.kids.empty()) return "()";
            std::string body = joinExprs(e.kids, " , ", indent + 1);
            if (!isMultiline(body)) return "( " + body + " )";
            std::string out = "(\n" + ind(indent + 1);
            for (size_t i = 0; i < e.kids.size(); i++) {
                if (i) out += " ,\n" + ind(indent + 1);
                out += render(e.kids[i], indent + 1);
            }
            out += "\n" + ind(indent) + ")";
            return out;
        }
        case K::If: {
            std::string out = "if ( " + render(e.kids[0], indent) + " )";
            out += "\n" + ind(indent) + branch("then", render(e.kids[1], indent + 1), indent);
            out += "\n" + ind(indent) + branch("else", render(e.kids[2], indent + 1), indent);
            return out;
        }
        case K::Flwor: {
            std::string out;
            for (const auto& c : e.clauses) out += renderClause(c, indent) + "\n" + ind(indent);
            std::string r = joinExprs(e.ret, " , ", indent + 1);
            out += branch("return", r, indent);
            return out;
        }
        case K::Element: {
            std::string open = "<" + e.text + ">";
            std::string close = "</" + e.text + ">";
            if (e.kids.empty()) return open + close;
            // nested constructors appear bare, everything else in { }
            std::string body;
            for (size_t i = 0; i < e.kids.size(); i++) {
                if (i) body += " , ";
                std::string k = render(e.kids[i], indent + 1);
                body += e.kids[i].kind == K::Element ? k : "{ " + k + " }";
            }
            if (!isMultiline(body)) return open + body + close;
            return open + "\n" + ind(indent + 1) + body + "\n" + ind(indent) + close;
        }
        case K::Union:
            return joinExprs(e.kids, " union ", indent);
        case K::Quantified:
            return e.text + " $" + e.quantVar + " in " + render(e.kids[0], indent) +
                   " satisfies ( " + render(e.kids[1], indent) + " )";
        case K::DeleteNodes:
            return "delete nodes " + render(e.kids[0], indent);
        case K::InsertNodes:
            return "insert nodes " + render(e.kids[0], indent) + " into " +
                   render(e.kids[1], indent);
    }
    return "";
}

}  // namespace

std::string renderExpr(const XExpr& e, int indent) { return render(e, indent); }

std::string renderXQuery(const XQueryProgram& p) {
    std::string out;
    for (const auto& f : p.functions) {
        out += "declare function " + f.name + "(";
        for (size_t i = 0; i < f.params.size(); i++) {
            if (i) out += ", ";
            out += "$" + f.params[i];
        }
        out += ")";
        if (f.body) {
            out += " {\n" + ind(1) + render(*f.body, 1) + "\n};\n";
        } else {
            out += " external;\n";
        }
    }
    if (!p.functions.empty()) out += "\n";
    out += render(p.body, 0);
    out += "\n";
    return out;
}

std::vector<std::string> xqueryTokens(const std::string& text) {
    std::vector<std::string> out;
    size_t i = 0, n = text.size();
    auto isNameChar = [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    };
    while (i < n) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            i++;
            continue;
        }
        if (c == '"') {
            size_t j = i + 1;
            while (j < n && text[j] != '"') j++;
            size_t end = j < n ? j + 1 : j;
            out.push_back(text.substr(i, end - i));
            i = end;
            continue;
        }
        if (c == ':' && i + 1 < n && text[i + 1] == '=') {
            out.push_back(":=");
            i += 2;
            continue;
        }
        if ((c == '<' || c == '>' || c == '!') && i + 1 < n && text[i + 1] == '=') {
            out.push_back(std::string(1, c) + "=");
            i += 2;
            continue;
        }
        if (c == '$') {
            size_t j = i + 1;
            while (j < n && isNameChar(text[j])) j++;
            out.push_back(text.substr(i, j - i));
            i = j;
            continue;
        }
        if (isNameChar(c)) {
            size_t j = i;
            while (j < n) {
                char d = text[j];
                if (isNameChar(d)) {
                    j++;
                    continue;
                }
                // keep qualified names (local:civt) and hyphenated builtins
                // (ends-with) as one token; ":=" stays an operator
                if ((d == ':' || d == '-') && j + 1 < n && isNameChar(text[j + 1])) {
                    j++;
                    continue;
                }
                break;
            }
            out.push_back(text.substr(i, j - i));
            i = j;
            continue;
        }
        out.push_back(std::string(1, c));
        i++;
    }
    return out;
}

}  // namespace sxq

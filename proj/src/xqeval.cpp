#include "sxq/xqeval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <regex>
#include <set>

namespace sxq {

namespace {

[[noreturn]] void evalFail(const std::string& msg) {
    throw Error(Error::Kind::Eval, msg);
}

std::string numToString(double v) {
    if (std::isnan(v)) return "NaN";
    if (std::isinf(v)) return v > 0 ? "INF" : "-INF";
    if (v == std::floor(v) && std::fabs(v) < 1e15)
        return std::to_string(static_cast<long long>(v));
    std::string s = std::to_string(v); // 6 decimals; trim trailing zeros
    while (s.size() > 1 && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

// Typed atomic for comparisons; node values atomize to Untyped.
struct Atom {
    enum class K { Untyped, Str, Num, Bool };
    K k = K::Str;
    std::string s;
    double d = 0;
    bool b = false;
};

double parseNumber(const std::string& text, const char* what) {
    size_t i = 0, j = text.size();
    while (i < j && std::isspace(static_cast<unsigned char>(text[i]))) i++;
    while (j > i && std::isspace(static_cast<unsigned char>(text[j - 1]))) j--;
    std::string t = text.substr(i, j - i);
    if (t.empty()) evalFail(std::string("cannot convert \"") + text + "\" to a number in " + what);
    char* end = nullptr;
    double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size())
        evalFail(std::string("cannot convert \"") + text + "\" to a number in " + what);
    return v;
}

double atomNumber(const Atom& a, const char* what) {
    switch (a.k) {
        case Atom::K::Num: return a.d;
        case Atom::K::Untyped: return parseNumber(a.s, what);
        default: evalFail(std::string("non-numeric operand in ") + what);
    }
}

bool compareAtoms(const Atom& a, const Atom& b, const std::string& op) {
    if (a.k == Atom::K::Num || b.k == Atom::K::Num) {
        double x = atomNumber(a, "comparison"), y = atomNumber(b, "comparison");
        if (op == "=") return x == y;
        if (op == "!=") return x != y;
        if (op == "<") return x < y;
        if (op == "<=") return x <= y;
        if (op == ">") return x > y;
        if (op == ">=") return x >= y;
        evalFail("unknown comparison operator: " + op);
    }
    if (a.k == Atom::K::Bool || b.k == Atom::K::Bool) {
        if (a.k != Atom::K::Bool || b.k != Atom::K::Bool)
            evalFail("boolean compared with a non-boolean");
        if (op == "=") return a.b == b.b;
        if (op == "!=") return a.b != b.b;
        evalFail("booleans only support = and !=");
    }
    int c = a.s.compare(b.s);
    if (op == "=") return c == 0;
    if (op == "!=") return c != 0;
    if (op == "<") return c < 0;
    if (op == "<=") return c <= 0;
    if (op == ">") return c > 0;
    if (op == ">=") return c >= 0;
    evalFail("unknown comparison operator: " + op);
}

// -1 / 0 / 1 ordering for order-by keys; empty sorts lowest.
int orderCompare(const std::optional<Atom>& a, const std::optional<Atom>& b) {
    if (!a && !b) return 0;
    if (!a) return -1;
    if (!b) return 1;
    if (a->k == Atom::K::Num || b->k == Atom::K::Num) {
        double x = atomNumber(*a, "order by"), y = atomNumber(*b, "order by");
        return x < y ? -1 : (x > y ? 1 : 0);
    }
    int c = a->s.compare(b->s);
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

bool isWhitespace(const std::string& s) {
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    return true;
}

std::string localPart(const std::string& name) {
    auto p = name.rfind(':');
    return p == std::string::npos ? name : name.substr(p + 1);
}

} // namespace

XqItem XqItem::ofStr(std::string s) {
    XqItem it;
    it.kind = Kind::Str;
    it.str = std::move(s);
    return it;
}

XqItem XqItem::ofNum(double v) {
    XqItem it;
    it.kind = Kind::Num;
    it.num = v;
    return it;
}

XqItem XqItem::ofBool(bool b) {
    XqItem it;
    it.kind = Kind::Bool;
    it.flag = b;
    return it;
}

XQueryEvaluator::XQueryEvaluator(std::vector<XmlDoc*> docs) : docs_(std::move(docs)) {
    for (XmlDoc* d : docs_) indexTree(&d->root, nullptr, d);
}

void XQueryEvaluator::indexTree(const XmlNode* n, const XmlNode* par, const XmlDoc* d) {
    parent_[n] = par;
    docOf_[n] = d;
    for (const XmlNode& kid : n->kids)
        if (kid.isElement()) indexTree(&kid, n, d);
}

const XmlNode* XQueryEvaluator::intern(XmlNode tree) {
    arena_.push_back(std::move(tree));
    const XmlNode* root = &arena_.back();
    indexTree(root, nullptr, nullptr);
    return root;
}

std::vector<const XmlNode*> XQueryEvaluator::chainOf(const XmlNode* n) const {
    std::vector<const XmlNode*> chain;
    for (const XmlNode* cur = n; cur; cur = parent_.at(cur)) chain.push_back(cur);
    std::reverse(chain.begin(), chain.end());
    return chain;
}

std::string XQueryEvaluator::itemString(const XqItem& it) const {
    switch (it.kind) {
        case XqItem::Kind::Doc: return it.doc->root.content();
        case XqItem::Kind::Elem: return it.node->content();
        case XqItem::Kind::Attr: {
            const std::string* v = it.node->attr(it.attr);
            return v ? *v : "";
        }
        case XqItem::Kind::Str: return it.str;
        case XqItem::Kind::Num: return numToString(it.num);
        case XqItem::Kind::Bool: return it.flag ? "true" : "false";
    }
    return "";
}

std::string XQueryEvaluator::positionalPathOf(const XqItem& it) const {
    if (!it.isNode()) evalFail("positional path of an atomic value");
    const XmlDoc* d = it.kind == XqItem::Kind::Doc ? it.doc : docOf_.at(it.node);
    if (!d) evalFail("constructed node has no document identity");
    if (it.kind == XqItem::Kind::Doc) return positionalPath(*d, {&d->root});
    return positionalPath(*d, chainOf(it.node),
                          it.kind == XqItem::Kind::Attr ? it.attr : std::string());
}

std::string XQueryEvaluator::schemaPathOf(const XqItem& it) const {
    if (!it.isNode()) evalFail("schema path of an atomic value");
    const XmlNode* n = it.kind == XqItem::Kind::Doc ? &it.doc->root : it.node;
    std::string out;
    if (it.kind != XqItem::Kind::Doc && docOf_.at(n) == nullptr)
        evalFail("constructed node has no schema path");
    for (const XmlNode* link : chainOf(n)) out += "/" + link->name;
    if (it.kind == XqItem::Kind::Attr) out += "/@" + it.attr;
    return out;
}

std::string XQueryEvaluator::serializeValue(const XqValue& v) const {
    std::string out;
    bool prevAtomic = false;
    for (const XqItem& it : v) {
        if (it.isNode()) {
            const XmlNode* n = it.kind == XqItem::Kind::Doc ? &it.doc->root : it.node;
            if (it.kind == XqItem::Kind::Attr) {
                out += it.attr + "=\"" + itemString(it) + "\"";
            } else {
                out += serializeXml(*n, false);
            }
            prevAtomic = false;
        } else {
            if (prevAtomic) out += " ";
            out += itemString(it);
            prevAtomic = true;
        }
    }
    return out;
}

bool XQueryEvaluator::ebv(const XqValue& v) const {
    if (v.empty()) return false;
    if (v[0].isNode()) return true;
    if (v.size() > 1) evalFail("effective boolean value of a multi-item atomic sequence");
    switch (v[0].kind) {
        case XqItem::Kind::Str: return !v[0].str.empty();
        case XqItem::Kind::Num: return v[0].num != 0 && !std::isnan(v[0].num);
        case XqItem::Kind::Bool: return v[0].flag;
        default: return true;
    }
}

namespace {

Atom atomizeItem(const XqItem& it, const std::string& (*)(const XqItem&) = nullptr);

} // namespace

// Atomization: nodes yield untyped atomics carrying their string value.
static Atom toAtom(const XQueryEvaluator& ev, const XqItem& it) {
    Atom a;
    if (it.isNode()) {
        a.k = Atom::K::Untyped;
        a.s = ev.itemString(it);
        return a;
    }
    switch (it.kind) {
        case XqItem::Kind::Str: a.k = Atom::K::Str; a.s = it.str; break;
        case XqItem::Kind::Num: a.k = Atom::K::Num; a.d = it.num; break;
        case XqItem::Kind::Bool: a.k = Atom::K::Bool; a.b = it.flag; break;
        default: break;
    }
    return a;
}

static std::vector<Atom> atomizeValue(const XQueryEvaluator& ev, const XqValue& v) {
    std::vector<Atom> out;
    out.reserve(v.size());
    for (const XqItem& it : v) out.push_back(toAtom(ev, it));
    return out;
}

// ---- axes and predicates ---------------------------------------------------

XqValue XQueryEvaluator::childAxis(const XqItem& base, const XqStep& step) const {
    XqValue out;
    if (base.kind == XqItem::Kind::Doc) {
        if (step.attribute) return out;
        const XmlNode& root = base.doc->root;
        if (step.name == "*" || root.name == step.name) {
            XqItem it;
            it.kind = XqItem::Kind::Elem;
            it.doc = base.doc;
            it.node = &root;
            out.push_back(it);
        }
        return out;
    }
    if (base.kind == XqItem::Kind::Attr) return out;
    if (base.kind != XqItem::Kind::Elem) evalFail("path step over an atomic value");
    if (step.attribute) {
        for (const auto& [n, v] : base.node->attrs) {
            if (step.name != "*" && n != step.name) continue;
            XqItem it;
            it.kind = XqItem::Kind::Attr;
            it.doc = base.doc;
            it.node = base.node;
            it.attr = n;
            out.push_back(it);
        }
        return out;
    }
    for (const XmlNode& kid : base.node->kids) {
        if (!kid.isElement()) continue;
        if (step.name != "*" && kid.name != step.name) continue;
        XqItem it;
        it.kind = XqItem::Kind::Elem;
        it.doc = docOf_.at(&kid);
        it.node = &kid;
        out.push_back(it);
    }
    return out;
}

XqValue XQueryEvaluator::applyPredicates(XqValue group, const std::vector<XExpr>& preds,
                                         XqEnv& env) {
    for (const XExpr& pred : preds) {
        XqValue kept;
        size_t n = group.size();
        for (size_t i = 0; i < n; i++) {
            Focus f{&group[i], i + 1, n};
            XqValue pv;
            if (pred.kind == XExpr::Kind::Raw) {
                // Opaque predicates only occur as positional selectors carried
                // over from instance paths.
                pv = {XqItem::ofNum(parseNumber(pred.text, "positional predicate"))};
            } else {
                pv = eval(pred, env, &f);
            }
            bool keep;
            if (pv.size() == 1 && pv[0].kind == XqItem::Kind::Num)
                keep = pv[0].num == static_cast<double>(i + 1);
            else
                keep = ebv(pv);
            if (keep) kept.push_back(group[i]);
        }
        group = std::move(kept);
    }
    return group;
}

// ---- expression evaluation -------------------------------------------------

XqValue XQueryEvaluator::evalPath(const XExpr& e, XqEnv& env, const Focus* focus) {
    XqValue base;
    switch (e.root) {
        case XExpr::Root::Context:
            if (!focus || !focus->item) evalFail("no context item for \".\"");
            base = {*focus->item};
            break;
        case XExpr::Root::Var: {
            auto it = env.find(e.rootArg);
            if (it == env.end()) evalFail("unbound variable $" + e.rootArg);
            base = it->second;
            break;
        }
        case XExpr::Root::Collection:
        case XExpr::Root::DocFn: {
            for (XmlDoc* d : docs_) {
                if (d->uri != e.rootArg) continue;
                XqItem it;
                it.kind = XqItem::Kind::Doc;
                it.doc = d;
                it.node = &d->root;
                base.push_back(it);
            }
            if (base.empty())
                evalFail("no document bound for \"" + e.rootArg + "\"");
            break;
        }
    }
    if (!e.rootPredicates.empty()) base = applyPredicates(std::move(base), e.rootPredicates, env);
    for (const XqStep& step : e.steps) {
        XqValue next;
        for (const XqItem& b : base) {
            XqValue group = childAxis(b, step);
            if (!step.predicates.empty())
                group = applyPredicates(std::move(group), step.predicates, env);
            next.insert(next.end(), group.begin(), group.end());
        }
        base = std::move(next);
    }
    return base;
}

XqValue XQueryEvaluator::evalFlwor(const XExpr& e, XqEnv& env, const Focus* focus) {
    std::vector<XqEnv> tuples{env};
    for (const XClause& c : e.clauses) {
        switch (c.kind) {
            case XClause::Kind::For: {
                std::vector<XqEnv> next;
                for (XqEnv& t : tuples) {
                    XqValue seq = eval(c.expr, t, focus);
                    for (size_t i = 0; i < seq.size(); i++) {
                        XqEnv t2 = t;
                        t2[c.var] = {seq[i]};
                        if (!c.posVar.empty())
                            t2[c.posVar] = {XqItem::ofNum(static_cast<double>(i + 1))};
                        next.push_back(std::move(t2));
                    }
                }
                tuples = std::move(next);
                break;
            }
            case XClause::Kind::Let:
                for (XqEnv& t : tuples) t[c.var] = eval(c.expr, t, focus);
                break;
            case XClause::Kind::Where: {
                std::vector<XqEnv> next;
                for (XqEnv& t : tuples)
                    if (ebv(eval(c.expr, t, focus))) next.push_back(std::move(t));
                tuples = std::move(next);
                break;
            }
            case XClause::Kind::OrderBy: {
                struct Keyed {
                    XqEnv env;
                    std::vector<std::optional<Atom>> keys;
                };
                std::vector<Keyed> keyed;
                keyed.reserve(tuples.size());
                for (XqEnv& t : tuples) {
                    Keyed k;
                    for (const XOrderKey& key : c.keys) {
                        XqValue kv = eval(key.expr, t, focus);
                        auto atoms = atomizeValue(*this, kv);
                        if (atoms.size() > 1) evalFail("order-by key is not a singleton");
                        k.keys.push_back(atoms.empty() ? std::nullopt
                                                       : std::optional<Atom>(atoms[0]));
                    }
                    k.env = std::move(t);
                    keyed.push_back(std::move(k));
                }
                std::stable_sort(keyed.begin(), keyed.end(),
                                 [&](const Keyed& a, const Keyed& b) {
                                     for (size_t i = 0; i < c.keys.size(); i++) {
                                         int cv = orderCompare(a.keys[i], b.keys[i]);
                                         if (c.keys[i].descending) cv = -cv;
                                         if (cv != 0) return cv < 0;
                                     }
                                     return false;
                                 });
                tuples.clear();
                for (Keyed& k : keyed) tuples.push_back(std::move(k.env));
                break;
            }
        }
    }
    XqValue out;
    for (XqEnv& t : tuples) {
        XqValue row = evalSeq(e.ret, t, focus);
        out.insert(out.end(), row.begin(), row.end());
    }
    return out;
}

XqValue XQueryEvaluator::evalElement(const XExpr& e, XqEnv& env, const Focus* focus) {
    XmlNode el;
    el.name = e.text;
    std::string textRun;
    bool haveRun = false, prevAtomic = false;
    auto flush = [&] {
        if (haveRun && !textRun.empty()) {
            XmlNode t;
            t.text = textRun;
            el.kids.push_back(std::move(t));
        }
        textRun.clear();
        haveRun = false;
    };
    for (const XExpr& kid : e.kids) {
        XqValue v = eval(kid, env, focus);
        for (const XqItem& it : v) {
            if (!it.isNode()) {
                if (prevAtomic) textRun += " ";
                textRun += itemString(it);
                haveRun = true;
                prevAtomic = true;
                continue;
            }
            prevAtomic = false;
            flush();
            if (it.kind == XqItem::Kind::Attr) {
                el.attrs.emplace_back(it.attr, itemString(it));
            } else {
                el.kids.push_back(it.kind == XqItem::Kind::Doc ? it.doc->root : *it.node);
            }
        }
        prevAtomic = false; // items of separate enclosed expressions are not joined
    }
    flush();
    XqItem out;
    out.kind = XqItem::Kind::Elem;
    out.node = intern(std::move(el));
    out.doc = nullptr;
    return {out};
}

// Structural node equality; whitespace-only text runs are ignored.
static bool deepEqualNodes(const XmlNode& a, const XmlNode& b) {
    if (a.name != b.name) return false;
    auto attrs = [](const XmlNode& n) {
        auto v = n.attrs;
        std::sort(v.begin(), v.end());
        return v;
    };
    if (attrs(a) != attrs(b)) return false;
    auto significant = [](const XmlNode& n) {
        std::vector<const XmlNode*> out;
        for (const XmlNode& k : n.kids)
            if (k.isElement() || !isWhitespace(k.text)) out.push_back(&k);
        return out;
    };
    auto ka = significant(a), kb = significant(b);
    if (ka.size() != kb.size()) return false;
    for (size_t i = 0; i < ka.size(); i++) {
        if (ka[i]->isElement() != kb[i]->isElement()) return false;
        if (ka[i]->isElement()) {
            if (!deepEqualNodes(*ka[i], *kb[i])) return false;
        } else if (ka[i]->text != kb[i]->text) {
            return false;
        }
    }
    return true;
}

bool XQueryEvaluator::deepEqualValues(const XqValue& a, const XqValue& b) const {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); i++) {
        const XqItem& x = a[i];
        const XqItem& y = b[i];
        if (x.isNode() != y.isNode()) return false;
        if (!x.isNode()) {
            Atom ax = toAtom(*this, x), ay = toAtom(*this, y);
            if (ax.k == Atom::K::Num || ay.k == Atom::K::Num) {
                if (ax.k != ay.k || ax.d != ay.d) return false;
            } else if (ax.k == Atom::K::Bool || ay.k == Atom::K::Bool) {
                if (ax.k != ay.k || ax.b != ay.b) return false;
            } else if (ax.s != ay.s) {
                return false;
            }
            continue;
        }
        if ((x.kind == XqItem::Kind::Attr) != (y.kind == XqItem::Kind::Attr)) return false;
        if (x.kind == XqItem::Kind::Attr) {
            if (x.attr != y.attr || itemString(x) != itemString(y)) return false;
            continue;
        }
        const XmlNode* nx = x.kind == XqItem::Kind::Doc ? &x.doc->root : x.node;
        const XmlNode* ny = y.kind == XqItem::Kind::Doc ? &y.doc->root : y.node;
        if (!deepEqualNodes(*nx, *ny)) return false;
    }
    return true;
}

XqValue XQueryEvaluator::evalCall(const XExpr& e, XqEnv& env, const Focus* focus) {
    const std::string& name = e.text;

    // declared functions with bodies shadow builtins
    if (functions_) {
        for (const XQueryFunction& f : *functions_) {
            if (f.name != name || !f.body) continue;
            if (f.params.size() != e.kids.size())
                evalFail("wrong argument count for " + name);
            XqEnv callEnv;
            for (size_t i = 0; i < f.params.size(); i++)
                callEnv[f.params[i]] = eval(e.kids[i], env, focus);
            return eval(*f.body, callEnv, nullptr);
        }
    }

    std::vector<XqValue> args;
    args.reserve(e.kids.size());
    for (const XExpr& k : e.kids) args.push_back(eval(k, env, focus));

    auto arity = [&](size_t lo, size_t hi) {
        if (args.size() < lo || args.size() > hi)
            evalFail("wrong argument count for " + name + "()");
    };
    auto single = [&](const XqValue& v, const char* what) -> const XqItem& {
        if (v.size() != 1) evalFail(std::string(what) + " expects a single item");
        return v[0];
    };
    auto stringArg = [&](const XqValue& v) -> std::string {
        if (v.empty()) return "";
        if (v.size() > 1) evalFail(name + "() expects at most one item per argument");
        return itemString(v[0]);
    };

    if (name == "string") {
        arity(0, 1);
        if (args.empty()) {
            if (!focus || !focus->item) evalFail("string() without a context item");
            return {XqItem::ofStr(itemString(*focus->item))};
        }
        return {XqItem::ofStr(stringArg(args[0]))};
    }
    if (name == "concat") {
        arity(2, 64);
        std::string out;
        for (const XqValue& a : args) out += stringArg(a);
        return {XqItem::ofStr(out)};
    }
    if (name == "exists") {
        arity(1, 1);
        return {XqItem::ofBool(!args[0].empty())};
    }
    if (name == "empty") {
        arity(1, 1);
        return {XqItem::ofBool(args[0].empty())};
    }
    if (name == "count") {
        arity(1, 1);
        return {XqItem::ofNum(static_cast<double>(args[0].size()))};
    }
    if (name == "not") {
        arity(1, 1);
        return {XqItem::ofBool(!ebv(args[0]))};
    }
    if (name == "true") {
        arity(0, 0);
        return {XqItem::ofBool(true)};
    }
    if (name == "false") {
        arity(0, 0);
        return {XqItem::ofBool(false)};
    }
    if (name == "position") {
        arity(0, 0);
        if (!focus) evalFail("position() outside a predicate");
        return {XqItem::ofNum(static_cast<double>(focus->pos))};
    }
    if (name == "last") {
        arity(0, 0);
        if (!focus) evalFail("last() outside a predicate");
        return {XqItem::ofNum(static_cast<double>(focus->size))};
    }
    if (name == "matches") {
        arity(2, 3);
        std::string s = stringArg(args[0]);
        std::string pat = stringArg(args[1]);
        auto flags = std::regex::ECMAScript;
        if (args.size() == 3 && stringArg(args[2]).find('i') != std::string::npos)
            flags |= std::regex::icase;
        try {
            return {XqItem::ofBool(std::regex_search(s, std::regex(pat, flags)))};
        } catch (const std::regex_error&) {
            evalFail("invalid regular expression: " + pat);
        }
    }
    if (name == "starts-with") {
        arity(2, 2);
        std::string s = stringArg(args[0]), p = stringArg(args[1]);
        return {XqItem::ofBool(s.rfind(p, 0) == 0)};
    }
    if (name == "ends-with") {
        arity(2, 2);
        std::string s = stringArg(args[0]), p = stringArg(args[1]);
        return {XqItem::ofBool(s.size() >= p.size() && s.compare(s.size() - p.size(), p.size(), p) == 0)};
    }
    if (name == "contains") {
        arity(2, 2);
        return {XqItem::ofBool(stringArg(args[0]).find(stringArg(args[1])) != std::string::npos)};
    }
    if (name == "lower-case" || name == "upper-case") {
        arity(1, 1);
        std::string s = stringArg(args[0]);
        for (char& c : s)
            c = name[0] == 'l' ? static_cast<char>(std::tolower(static_cast<unsigned char>(c)))
                               : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        return {XqItem::ofStr(s)};
    }
    if (name == "string-length") {
        arity(1, 1);
        return {XqItem::ofNum(static_cast<double>(stringArg(args[0]).size()))};
    }
    if (name == "local-name") {
        // Sequence-mapped (nonstandard): yields the local name of every node,
        // so that the merge helper's general comparison means set exclusion.
        arity(0, 1);
        XqValue in;
        if (args.empty()) {
            if (!focus || !focus->item) evalFail("local-name() without a context item");
            in = {*focus->item};
        } else {
            in = args[0];
        }
        XqValue out;
        for (const XqItem& it : in) {
            if (!it.isNode()) evalFail("local-name() of an atomic value");
            if (it.kind == XqItem::Kind::Attr)
                out.push_back(XqItem::ofStr(localPart(it.attr)));
            else
                out.push_back(XqItem::ofStr(localPart(
                    it.kind == XqItem::Kind::Doc ? it.doc->root.name : it.node->name)));
        }
        return out;
    }
    if (name == "deep-equal") {
        arity(2, 2);
        return {XqItem::ofBool(deepEqualValues(args[0], args[1]))};
    }
    if (name == "local:civt") {
        arity(1, 1);
        const XqItem& it = single(args[0], "local:civt");
        if (!it.isNode()) evalFail("local:civt of an atomic value");
        const XmlDoc* d = it.kind == XqItem::Kind::Doc ? it.doc : docOf_.at(it.node);
        if (!d) evalFail("local:civt of a constructed node");
        return {XqItem::ofStr(d->uri + "#" + positionalPathOf(it))};
    }
    if (name == "local:schema-path") {
        arity(1, 1);
        return {XqItem::ofStr(schemaPathOf(single(args[0], "local:schema-path")))};
    }
    evalFail("unknown function: " + name + "()");
}

XqValue XQueryEvaluator::evalSeq(const std::vector<XExpr>& es, XqEnv& env, const Focus* focus) {
    XqValue out;
    for (const XExpr& e : es) {
        XqValue v = eval(e, env, focus);
        out.insert(out.end(), v.begin(), v.end());
    }
    return out;
}

XqValue XQueryEvaluator::eval(const XExpr& e, XqEnv& env, const Focus* focus) {
    switch (e.kind) {
        case XExpr::Kind::String:
            return {XqItem::ofStr(e.text)};
        case XExpr::Kind::Number:
            return {XqItem::ofNum(parseNumber(e.text, "numeric literal"))};
        case XExpr::Kind::Raw:
            evalFail("cannot evaluate opaque expression: " + e.text);
        case XExpr::Kind::Path:
            return evalPath(e, env, focus);
        case XExpr::Kind::Compare: {
            XqValue l = eval(e.kids[0], env, focus);
            XqValue r = eval(e.kids[1], env, focus);
            auto la = atomizeValue(*this, l), ra = atomizeValue(*this, r);
            for (const Atom& a : la)
                for (const Atom& b : ra)
                    if (compareAtoms(a, b, e.text)) return {XqItem::ofBool(true)};
            return {XqItem::ofBool(false)};
        }
        case XExpr::Kind::Arith: {
            auto la = atomizeValue(*this, eval(e.kids[0], env, focus));
            auto ra = atomizeValue(*this, eval(e.kids[1], env, focus));
            if (la.empty() || ra.empty()) return {};
            if (la.size() > 1 || ra.size() > 1) evalFail("arithmetic over a sequence");
            double x = atomNumber(la[0], "arithmetic");
            double y = atomNumber(ra[0], "arithmetic");
            const std::string& op = e.text;
            double v = 0;
            if (op == "+") v = x + y;
            else if (op == "-") v = x - y;
            else if (op == "*") v = x * y;
            else if (op == "/" || op == "div") v = x / y;
            else if (op == "mod") v = std::fmod(x, y);
            else evalFail("unknown arithmetic operator: " + op);
            return {XqItem::ofNum(v)};
        }
        case XExpr::Kind::And: {
            for (const XExpr& k : e.kids)
                if (!ebv(eval(k, env, focus))) return {XqItem::ofBool(false)};
            return {XqItem::ofBool(true)};
        }
        case XExpr::Kind::Or: {
            for (const XExpr& k : e.kids)
                if (ebv(eval(k, env, focus))) return {XqItem::ofBool(true)};
            return {XqItem::ofBool(false)};
        }
        case XExpr::Kind::Call:
            return evalCall(e, env, focus);
        case XExpr::Kind::Seq:
            return evalSeq(e.kids, env, focus);
        case XExpr::Kind::If:
            return ebv(eval(e.kids[0], env, focus)) ? eval(e.kids[1], env, focus)
                                                    : eval(e.kids[2], env, focus);
        case XExpr::Kind::Flwor:
            return evalFlwor(e, env, focus);
        case XExpr::Kind::Element:
            return evalElement(e, env, focus);
        case XExpr::Kind::Union: {
            XqValue out;
            std::set<std::pair<const XmlNode*, std::string>> seen;
            for (const XExpr& k : e.kids) {
                XqValue v = eval(k, env, focus);
                for (const XqItem& it : v) {
                    if (!it.isNode()) evalFail("union over atomic values");
                    const XmlNode* n = it.kind == XqItem::Kind::Doc ? &it.doc->root : it.node;
                    if (seen.insert({n, it.kind == XqItem::Kind::Attr ? it.attr : ""}).second)
                        out.push_back(it);
                }
            }
            return out;
        }
        case XExpr::Kind::Quantified: {
            XqValue dom = eval(e.kids[0], env, focus);
            bool every = e.text != "some";
            for (const XqItem& it : dom) {
                XqEnv inner = env;
                inner[e.quantVar] = {it};
                bool sat = ebv(eval(e.kids[1], inner, focus));
                if (every && !sat) return {XqItem::ofBool(false)};
                if (!every && sat) return {XqItem::ofBool(true)};
            }
            return {XqItem::ofBool(every)};
        }
        case XExpr::Kind::DeleteNodes: {
            if (!updating_) evalFail("updating expression in a read-only query");
            XqValue targets = eval(e.kids[0], env, focus);
            for (const XqItem& it : targets) {
                if (!it.isNode() || it.kind == XqItem::Kind::Doc)
                    evalFail("delete target must be an element or attribute");
                pendingDeletes_.push_back(it);
            }
            return {};
        }
        case XExpr::Kind::InsertNodes: {
            if (!updating_) evalFail("updating expression in a read-only query");
            XqValue content = eval(e.kids[0], env, focus);
            XqValue target = eval(e.kids[1], env, focus);
            if (target.size() != 1 || !target[0].isNode() ||
                target[0].kind == XqItem::Kind::Attr)
                evalFail("insert target must be a single element");
            PendingInsert pi;
            for (const XqItem& it : content) {
                if (!it.isNode()) evalFail("cannot insert an atomic value");
                if (it.kind == XqItem::Kind::Attr) evalFail("cannot insert an attribute node");
                pi.content.push_back(it.kind == XqItem::Kind::Doc ? it.doc->root : *it.node);
            }
            pi.target = target[0];
            pendingInserts_.push_back(std::move(pi));
            return {};
        }
    }
    evalFail("unhandled expression kind");
}

// ---- program entry points --------------------------------------------------

static void checkExternals(const XQueryProgram& p) {
    for (const XQueryFunction& f : p.functions) {
        if (f.body) continue;
        if (f.name != "local:civt" && f.name != "local:schema-path")
            evalFail("external function without an implementation: " + f.name);
    }
}

XqValue XQueryEvaluator::run(const XQueryProgram& p) {
    checkExternals(p);
    functions_ = &p.functions;
    XqEnv env;
    return eval(p.body, env, nullptr);
}

XqValue XQueryEvaluator::evalExpr(const XExpr& e, const XqEnv& env) {
    XqEnv scratch = env;
    return eval(e, scratch, nullptr);
}

UpdateEffects XQueryEvaluator::runUpdate(const XQueryProgram& p) {
    checkExternals(p);
    functions_ = &p.functions;
    updating_ = true;
    XqEnv env;
    eval(p.body, env, nullptr);
    updating_ = false;
    return applyPending();
}

namespace {

// Mutable positional-path resolution: the chain of elements down to the node
// (and the attribute name for attribute paths).
struct MutTarget {
    std::vector<XmlNode*> chain;
    std::string attr;
    bool ok = false;
};

MutTarget resolveMut(XmlDoc& doc, const std::string& path) {
    MutTarget t;
    size_t i = 0;
    XmlNode* cur = nullptr;
    while (i < path.size()) {
        if (path[i] != '/') return t;
        i++;
        if (i < path.size() && path[i] == '@') {
            t.attr = path.substr(i + 1);
            t.ok = cur != nullptr;
            return t;
        }
        size_t start = i;
        while (i < path.size() && path[i] != '/' && path[i] != '[') i++;
        std::string name = path.substr(start, i - start);
        size_t idx = 1;
        if (i < path.size() && path[i] == '[') {
            size_t close = path.find(']', i);
            if (close == std::string::npos) return t;
            idx = static_cast<size_t>(std::stoul(path.substr(i + 1, close - i - 1)));
            i = close + 1;
        }
        if (!cur) {
            if (doc.root.name != name || idx != 1) return t;
            cur = &doc.root;
        } else {
            size_t seen = 0;
            XmlNode* found = nullptr;
            for (XmlNode& kid : cur->kids) {
                if (!kid.isElement() || kid.name != name) continue;
                if (++seen == idx) {
                    found = &kid;
                    break;
                }
            }
            if (!found) return t;
            cur = found;
        }
        t.chain.push_back(cur);
    }
    t.ok = cur != nullptr;
    return t;
}

} // namespace

UpdateEffects XQueryEvaluator::applyPending() {
    UpdateEffects fx;

    auto mutableDoc = [&](const XmlDoc* d) -> XmlDoc* {
        for (XmlDoc* cand : docs_)
            if (cand == d) return cand;
        evalFail("update target outside the bound documents");
    };

    // Freeze every target as (document, positional path) before any mutation.
    struct Del {
        XmlDoc* doc;
        std::string path;
        std::vector<size_t> key; // child ordinals along the chain, for ordering
    };
    std::vector<Del> dels;
    std::set<std::pair<const XmlDoc*, std::string>> seenDel;
    for (const XqItem& it : pendingDeletes_) {
        const XmlDoc* d = docOf_.at(it.node);
        if (!d) evalFail("delete target is not part of a document");
        auto chain = chainOf(it.node);
        std::string path = positionalPath(
            *d, chain, it.kind == XqItem::Kind::Attr ? it.attr : std::string());
        if (!seenDel.insert({d, path}).second) continue;
        Del dl;
        dl.doc = mutableDoc(d);
        dl.path = path;
        for (size_t i = 1; i < chain.size(); i++) {
            const XmlNode* par = chain[i - 1];
            for (size_t j = 0; j < par->kids.size(); j++)
                if (&par->kids[j] == chain[i]) {
                    dl.key.push_back(j);
                    break;
                }
        }
        if (it.kind == XqItem::Kind::Attr) dl.key.push_back(SIZE_MAX); // after child elements
        dels.push_back(std::move(dl));
    }

    struct Ins {
        XmlDoc* doc;
        std::string parentPath;
        std::vector<XmlNode> content;
    };
    std::vector<Ins> inss;
    for (PendingInsert& pi : pendingInserts_) {
        const XmlDoc* d = pi.target.kind == XqItem::Kind::Doc ? pi.target.doc
                                                              : docOf_.at(pi.target.node);
        if (!d) evalFail("insert target is not part of a document");
        const XmlNode* node =
            pi.target.kind == XqItem::Kind::Doc ? &d->root : pi.target.node;
        inss.push_back({mutableDoc(d), positionalPath(*d, chainOf(node), std::string()),
                        std::move(pi.content)});
    }
    pendingDeletes_.clear();
    pendingInserts_.clear();

    // Standard update application order: insertions first, then deletions.
    // Appending children never disturbs the positional paths of existing
    // nodes, so each parent can be re-resolved fresh.
    for (Ins& ins : inss) {
        MutTarget t = resolveMut(*ins.doc, ins.parentPath);
        if (!t.ok || !t.attr.empty()) evalFail("insert target vanished: " + ins.parentPath);
        XmlNode* parent = t.chain.back();
        size_t start = parent->kids.size();
        for (XmlNode& c : ins.content) parent->kids.push_back(std::move(c));
        for (size_t j = start; j < parent->kids.size(); j++) {
            const std::string& nm = parent->kids[j].name;
            size_t total = 0, idx = 0;
            for (size_t k = 0; k < parent->kids.size(); k++) {
                if (!parent->kids[k].isElement() || parent->kids[k].name != nm) continue;
                total++;
                if (k == j) idx = total;
            }
            fx.insertedPaths.push_back(ins.parentPath + "/" + nm +
                                       (total > 1 ? "[" + std::to_string(idx) + "]" : ""));
        }
    }

    // Reverse document order keeps the remaining paths resolvable while nodes
    // disappear; targets inside an already-deleted subtree simply skip.
    std::sort(dels.begin(), dels.end(), [](const Del& a, const Del& b) {
        return a.key > b.key;
    });
    for (const Del& dl : dels) {
        MutTarget t = resolveMut(*dl.doc, dl.path);
        if (!t.ok) continue;
        if (!t.attr.empty()) {
            XmlNode* owner = t.chain.empty() ? &dl.doc->root : t.chain.back();
            auto& attrs = owner->attrs;
            attrs.erase(std::remove_if(attrs.begin(), attrs.end(),
                                       [&](const auto& a) { return a.first == t.attr; }),
                        attrs.end());
            fx.deletedPaths.push_back(dl.path);
            continue;
        }
        if (t.chain.size() < 2) evalFail("cannot delete the document root");
        XmlNode* parent = t.chain[t.chain.size() - 2];
        XmlNode* victim = t.chain.back();
        for (size_t j = 0; j < parent->kids.size(); j++) {
            if (&parent->kids[j] == victim) {
                parent->kids.erase(parent->kids.begin() + static_cast<long>(j));
                break;
            }
        }
        fx.deletedPaths.push_back(dl.path);
    }
    std::sort(fx.deletedPaths.begin(), fx.deletedPaths.end());
    return fx;
}

} // namespace sxq

#include "sxq/sparql.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>

namespace sxq {

namespace {

const char* kRdfNs = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
const char* kRdfsNs = "http://www.w3.org/2000/01/rdf-schema#";
const char* kOwlNs = "http://www.w3.org/2002/07/owl#";
const char* kXsdNs = "http://www.w3.org/2001/XMLSchema#";

std::string escapeString(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
        }
    }
    return out;
}

bool isXsdNumeric(const std::string& dt) {
    return dt == std::string(kXsdNs) + "integer" || dt == std::string(kXsdNs) + "decimal" ||
           dt == std::string(kXsdNs) + "double" || dt == std::string(kXsdNs) + "boolean";
}

} // namespace

// --- terms ------------------------------------------------------------------

Term Term::iri(std::string v) {
    Term t;
    t.kind = Kind::Iri;
    t.value = std::move(v);
    return t;
}

Term Term::literal(std::string v, std::string datatype, std::string lang) {
    Term t;
    t.kind = Kind::Literal;
    t.value = std::move(v);
    t.datatype = std::move(datatype);
    t.lang = std::move(lang);
    return t;
}

Term Term::variable(std::string name) {
    Term t;
    t.kind = Kind::Variable;
    t.value = std::move(name);
    return t;
}

std::string Term::text() const {
    switch (kind) {
        case Kind::Iri: return "<" + value + ">";
        case Kind::Variable: return "?" + value;
        case Kind::Blank: return "_:" + value;
        case Kind::Literal: break;
    }
    if (isXsdNumeric(datatype)) return value; // bare numerals read better
    std::string out = "\"" + escapeString(value) + "\"";
    if (!lang.empty()) out += "@" + lang;
    else if (!datatype.empty()) out += "^^<" + datatype + ">";
    return out;
}

bool Term::operator==(const Term& o) const {
    return kind == o.kind && value == o.value && datatype == o.datatype && lang == o.lang;
}

std::string TriplePattern::text() const {
    return s.text() + " " + p.text() + " " + o.text();
}

// --- filter expressions -----------------------------------------------------

Expr Expr::atomOf(Term t) {
    Expr e;
    e.kind = Kind::Atom;
    e.atom = std::move(t);
    return e;
}

Expr Expr::unary(Kind k, Expr a) {
    Expr e;
    e.kind = k;
    e.args.push_back(std::move(a));
    return e;
}

Expr Expr::binary(Kind k, std::string op, Expr a, Expr b) {
    Expr e;
    e.kind = k;
    e.op = std::move(op);
    e.args.push_back(std::move(a));
    e.args.push_back(std::move(b));
    return e;
}

Expr Expr::call(std::string name, std::vector<Expr> args) {
    Expr e;
    e.kind = Kind::Call;
    e.op = std::move(name);
    e.args = std::move(args);
    return e;
}

void Expr::collectVariables(std::vector<std::string>& out) const {
    if (kind == Kind::Atom) {
        if (atom.varLike() && std::find(out.begin(), out.end(), atom.value) == out.end())
            out.push_back(atom.value);
        return;
    }
    for (const auto& a : args) a.collectVariables(out);
}

std::vector<std::string> Expr::variables() const {
    std::vector<std::string> out;
    collectVariables(out);
    return out;
}

std::string Expr::text() const {
    switch (kind) {
        case Kind::Atom: return atom.text();
        case Kind::Not: return "!(" + args[0].text() + ")";
        case Kind::Or: return "(" + args[0].text() + " || " + args[1].text() + ")";
        case Kind::And: return "(" + args[0].text() + " && " + args[1].text() + ")";
        case Kind::Compare:
        case Kind::Arith: return "(" + args[0].text() + " " + op + " " + args[1].text() + ")";
        case Kind::Call: {
            std::string out = op + "(";
            for (size_t i = 0; i < args.size(); ++i) {
                if (i) out += ", ";
                out += args[i].text();
            }
            return out + ")";
        }
    }
    return "";
}

// --- graph patterns ---------------------------------------------------------

static void collectPatternVars(const GraphPattern& g, std::vector<std::string>& out) {
    auto push = [&](const std::string& v) {
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    };
    for (const auto& t : g.triples) {
        if (t.s.varLike()) push(t.s.value);
        if (t.p.varLike()) push(t.p.value);
        if (t.o.varLike()) push(t.o.value);
    }
    for (const auto& f : g.filters) f.collectVariables(out);
    for (const auto& k : g.kids) collectPatternVars(k, out);
    for (const auto& c : g.conds) c.collectVariables(out);
}

std::vector<std::string> GraphPattern::variables() const {
    std::vector<std::string> out;
    collectPatternVars(*this, out);
    return out;
}

std::string GraphPattern::text() const {
    switch (kind) {
        case Kind::Bgp: {
            std::string out = "{";
            for (size_t i = 0; i < triples.size(); ++i) {
                if (i) out += " . ";
                out += triples[i].text();
            }
            for (const auto& f : filters) {
                if (out.size() > 1) out += " ";
                out += "FILTER " + f.text();
            }
            return out + "}";
        }
        case Kind::And: return "(" + kids[0].text() + " AND " + kids[1].text() + ")";
        case Kind::Opt: return "(" + kids[0].text() + " OPT " + kids[1].text() + ")";
        case Kind::Union: return "(" + kids[0].text() + " UNION " + kids[1].text() + ")";
        case Kind::Filter: {
            std::string out = "(" + kids[0].text() + " FILTER";
            for (const auto& c : conds) out += " " + c.text();
            return out + ")";
        }
    }
    return "";
}

// --- tokenizer --------------------------------------------------------------

namespace {

struct Tok {
    enum K { Word, Var, Iri, Pname, BlankLabel, Str, Num, Punct, End };
    K k = End;
    std::string t;
    std::string lang; // Str only
    size_t pos = 0;
};

bool nameChar(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::vector<Tok> lex(std::string_view s) {
    std::vector<Tok> out;
    size_t i = 0, n = s.size();
    auto push = [&](Tok::K k, std::string t, size_t pos) {
        Tok tok;
        tok.k = k;
        tok.t = std::move(t);
        tok.pos = pos;
        out.push_back(std::move(tok));
    };
    while (i < n) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '#') {
            while (i < n && s[i] != '\n') ++i;
            continue;
        }
        size_t start = i;
        if (c == '<') {
            size_t j = i + 1;
            while (j < n && s[j] != '>' && s[j] != '<' && s[j] != '"' &&
                   !std::isspace(static_cast<unsigned char>(s[j])))
                ++j;
            if (j < n && s[j] == '>') {
                push(Tok::Iri, std::string(s.substr(i + 1, j - i - 1)), start);
                i = j + 1;
                continue;
            }
            if (i + 1 < n && s[i + 1] == '=') {
                push(Tok::Punct, "<=", start);
                i += 2;
            } else {
                push(Tok::Punct, "<", start);
                ++i;
            }
            continue;
        }
        if (c == '?' || c == '$') {
            size_t j = i + 1;
            while (j < n && nameChar(s[j])) ++j;
            if (j == i + 1) throw syntaxError("empty variable name", start);
            push(Tok::Var, std::string(s.substr(i + 1, j - i - 1)), start);
            i = j;
            continue;
        }
        if (c == '"' || c == '\'') {
            char q = c;
            std::string val;
            size_t j = i + 1;
            while (j < n && s[j] != q) {
                if (s[j] == '\\' && j + 1 < n) {
                    char e = s[j + 1];
                    val += e == 'n' ? '\n' : e == 't' ? '\t' : e == 'r' ? '\r' : e;
                    j += 2;
                } else {
                    val += s[j++];
                }
            }
            if (j >= n) throw syntaxError("unterminated string literal", start);
            i = j + 1;
            Tok tok;
            tok.k = Tok::Str;
            tok.t = std::move(val);
            tok.pos = start;
            if (i < n && s[i] == '@') {
                size_t k = i + 1;
                while (k < n && (std::isalnum(static_cast<unsigned char>(s[k])) || s[k] == '-')) ++k;
                tok.lang = std::string(s.substr(i + 1, k - i - 1));
                i = k;
            }
            out.push_back(std::move(tok));
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < n && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            if (j < n && s[j] == '.' && j + 1 < n && std::isdigit(static_cast<unsigned char>(s[j + 1]))) {
                ++j;
                while (j < n && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            }
            if (j < n && (s[j] == 'e' || s[j] == 'E')) {
                size_t k = j + 1;
                if (k < n && (s[k] == '+' || s[k] == '-')) ++k;
                while (k < n && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
                j = k;
            }
            push(Tok::Num, std::string(s.substr(i, j - i)), start);
            i = j;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':') {
            size_t j = i;
            while (j < n && nameChar(s[j])) ++j;
            std::string word(s.substr(i, j - i));
            if (j < n && s[j] == ':') {
                // prefixed name or blank label; dots allowed inside the local part
                size_t k = j + 1;
                while (k < n && (nameChar(s[k]) ||
                                 (s[k] == '.' && k + 1 < n && nameChar(s[k + 1]))))
                    ++k;
                std::string local(s.substr(j + 1, k - j - 1));
                if (word == "_") push(Tok::BlankLabel, local, start);
                else push(Tok::Pname, word + ":" + local, start);
                i = k;
                continue;
            }
            push(Tok::Word, word, start);
            i = j;
            continue;
        }
        // multi-char operators first
        if (c == '&' && i + 1 < n && s[i + 1] == '&') { push(Tok::Punct, "&&", start); i += 2; continue; }
        if (c == '|' && i + 1 < n && s[i + 1] == '|') { push(Tok::Punct, "||", start); i += 2; continue; }
        if (c == '!' && i + 1 < n && s[i + 1] == '=') { push(Tok::Punct, "!=", start); i += 2; continue; }
        if (c == '>' && i + 1 < n && s[i + 1] == '=') { push(Tok::Punct, ">=", start); i += 2; continue; }
        if (c == '^' && i + 1 < n && s[i + 1] == '^') { push(Tok::Punct, "^^", start); i += 2; continue; }
        if (std::string("{}()[].,;*+-/=!><^|@").find(c) != std::string::npos) {
            push(Tok::Punct, std::string(1, c), start);
            ++i;
            continue;
        }
        throw syntaxError(std::string("unexpected character '") + c + "'", start);
    }
    Tok end;
    end.k = Tok::End;
    end.pos = n;
    out.push_back(end);
    return out;
}

std::string upper(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

// --- parser -----------------------------------------------------------------

class Parser {
public:
    explicit Parser(std::string_view text) : toks_(lex(text)) {}

    SparqlQuery run() {
        parsePrologue();
        if (!at(Tok::Word)) throw syntaxError("expected query form keyword", pos());
        std::string form = upper(cur().t);
        if (form == "SELECT") parseSelect();
        else if (form == "ASK") parseAsk();
        else if (form == "CONSTRUCT") parseConstruct();
        else if (form == "DESCRIBE") parseDescribe();
        else throw syntaxError("unknown query form '" + cur().t + "'", pos());
        if (!at(Tok::End)) throw syntaxError("trailing content after query", pos());
        if (q_.wildcard) {
            for (const auto& v : q_.pattern.variables())
                if (v.rfind("_b", 0) != 0) q_.returnVars.push_back(v);
        }
        return std::move(q_);
    }

    UpdateRequest runUpdate() {
        parsePrologue();
        UpdateRequest u;
        if (atKw("WITH")) unsupported("WITH in update operations");
        for (const char* kw : {"CREATE", "DROP", "CLEAR", "LOAD", "COPY", "MOVE", "ADD"})
            if (atKw(kw)) unsupported("graph management operations");
        if (eatKw("DELETE")) {
            if (eatKw("DATA")) {
                u.kind = UpdateRequest::Kind::DeleteData;
                parseDataBlock(u.deleteTriples, /*ground=*/true);
            } else if (atKw("WHERE")) {
                // DELETE WHERE { P }: the pattern doubles as the template
                advance();
                u.kind = UpdateRequest::Kind::Modify;
                u.where = parseGroup();
                if (!u.where.isBgp())
                    unsupported("DELETE WHERE with a non-basic pattern");
                u.deleteTriples = u.where.triples;
            } else {
                u.kind = UpdateRequest::Kind::Modify;
                parseDataBlock(u.deleteTriples, /*ground=*/false);
                if (eatKw("INSERT")) parseDataBlock(u.insertTriples, /*ground=*/false);
                if (atKw("USING")) unsupported("USING in update operations");
                if (!eatKw("WHERE")) throw syntaxError("expected WHERE clause", pos());
                u.where = parseGroup();
            }
        } else if (eatKw("INSERT")) {
            if (eatKw("DATA")) {
                u.kind = UpdateRequest::Kind::InsertData;
                parseDataBlock(u.insertTriples, /*ground=*/true);
            } else {
                u.kind = UpdateRequest::Kind::Modify;
                parseDataBlock(u.insertTriples, /*ground=*/false);
                if (atKw("USING")) unsupported("USING in update operations");
                if (!eatKw("WHERE")) throw syntaxError("expected WHERE clause", pos());
                u.where = parseGroup();
            }
        } else {
            throw syntaxError("expected an update operation", pos());
        }
        if (eatPunct(";") && !at(Tok::End))
            unsupported("multi-operation update requests");
        if (!at(Tok::End)) throw syntaxError("trailing content after update", pos());
        u.prefixes = q_.prefixes;
        return u;
    }

private:
    std::vector<Tok> toks_;
    size_t i_ = 0;
    SparqlQuery q_;
    std::map<std::string, std::string> prefixes_;
    std::string base_;
    int blankCounter_ = 0;
    std::map<std::string, std::string> blankNames_;

    const Tok& cur() const { return toks_[i_]; }
    size_t pos() const { return cur().pos; }
    bool at(Tok::K k) const { return cur().k == k; }
    bool atPunct(const char* p) const { return cur().k == Tok::Punct && cur().t == p; }
    bool atKw(const char* kw) const { return cur().k == Tok::Word && upper(cur().t) == kw; }
    void advance() { if (cur().k != Tok::End) ++i_; }
    bool eatPunct(const char* p) {
        if (!atPunct(p)) return false;
        advance();
        return true;
    }
    bool eatKw(const char* kw) {
        if (!atKw(kw)) return false;
        advance();
        return true;
    }
    void expectPunct(const char* p) {
        if (!eatPunct(p))
            throw syntaxError(std::string("expected '") + p + "'", pos());
    }

    [[noreturn]] void unsupported(const std::string& feature) {
        throw Error(Error::Kind::Unsupported, "unsupported SPARQL feature: " + feature);
    }

    std::string resolveIri(const std::string& raw) const {
        if (!base_.empty() && raw.find("://") == std::string::npos && raw.find("urn:") != 0)
            return base_ + raw;
        return raw;
    }

    std::string expandPname(const std::string& pname) const {
        size_t c = pname.find(':');
        std::string prefix = pname.substr(0, c), local = pname.substr(c + 1);
        auto it = prefixes_.find(prefix);
        if (it == prefixes_.end())
            throw Error(Error::Kind::Syntax, "undeclared prefix '" + prefix + ":'");
        return it->second + local;
    }

    Term blankAsVariable(const std::string& label) {
        auto it = blankNames_.find(label);
        if (it == blankNames_.end())
            it = blankNames_.emplace(label, "_b" + std::to_string(++blankCounter_)).first;
        return Term::variable(it->second);
    }

    void parsePrologue() {
        for (;;) {
            if (eatKw("PREFIX")) {
                if (!at(Tok::Pname)) throw syntaxError("expected prefix name", pos());
                std::string pname = cur().t;
                advance();
                size_t c = pname.find(':');
                if (c + 1 != pname.size())
                    throw syntaxError("prefix declaration must end with ':'", pos());
                if (!at(Tok::Iri)) throw syntaxError("expected IRI after prefix", pos());
                std::string iri = cur().t;
                advance();
                prefixes_[pname.substr(0, c)] = iri;
                q_.prefixes.emplace_back(pname.substr(0, c), iri);
            } else if (eatKw("BASE")) {
                if (!at(Tok::Iri)) throw syntaxError("expected IRI after BASE", pos());
                base_ = cur().t;
                advance();
            } else {
                break;
            }
        }
    }

    void parseSelect() {
        advance(); // SELECT
        q_.form = SparqlQuery::Form::Select;
        if (eatKw("DISTINCT")) q_.distinct = true;
        else if (eatKw("REDUCED")) q_.reduced = true;
        if (eatPunct("*")) {
            q_.wildcard = true;
        } else {
            while (at(Tok::Var)) {
                q_.returnVars.push_back(cur().t);
                advance();
            }
            if (q_.returnVars.empty())
                throw syntaxError("SELECT needs variables or '*'", pos());
        }
        rejectDataset();
        eatKw("WHERE");
        q_.pattern = parseGroup();
        parseModifiers();
    }

    void parseAsk() {
        advance();
        q_.form = SparqlQuery::Form::Ask;
        rejectDataset();
        eatKw("WHERE");
        q_.pattern = parseGroup();
        parseModifiers();
    }

    void parseConstruct() {
        advance();
        q_.form = SparqlQuery::Form::Construct;
        expectPunct("{");
        while (!atPunct("}")) {
            if (at(Tok::End)) throw syntaxError("unterminated CONSTRUCT template", pos());
            if (atKw("FILTER")) throw syntaxError("FILTER not allowed in CONSTRUCT template", pos());
            parseTriplesInto(q_.constructTemplate);
            while (eatPunct(".")) {}
        }
        advance(); // }
        rejectDataset();
        if (!eatKw("WHERE") && !atPunct("{"))
            throw syntaxError("expected WHERE clause", pos());
        q_.pattern = parseGroup();
        parseModifiers();
    }

    void parseDescribe() {
        advance();
        q_.form = SparqlQuery::Form::Describe;
        if (eatPunct("*")) {
            q_.wildcard = true;
        } else {
            while (at(Tok::Var) || at(Tok::Iri) || at(Tok::Pname)) {
                if (!at(Tok::Var)) unsupported("DESCRIBE with IRI targets");
                q_.returnVars.push_back(cur().t);
                advance();
            }
            if (q_.returnVars.empty())
                throw syntaxError("DESCRIBE needs variables or '*'", pos());
        }
        rejectDataset();
        if (!atKw("WHERE") && !atPunct("{"))
            unsupported("DESCRIBE without a WHERE clause");
        eatKw("WHERE");
        q_.pattern = parseGroup();
        parseModifiers();
    }

    void rejectDataset() {
        if (atKw("FROM")) unsupported("named graphs (FROM)");
    }

    void parseModifiers() {
        if (eatKw("ORDER")) {
            if (!eatKw("BY")) throw syntaxError("expected BY after ORDER", pos());
            for (;;) {
                OrderKey key;
                if (eatKw("ASC") || eatKw("DESC")) {
                    key.descending = upper(toks_[i_ - 1].t) == "DESC";
                    expectPunct("(");
                    key.var = expectOrderVar();
                    expectPunct(")");
                } else if (at(Tok::Var)) {
                    key.var = cur().t;
                    advance();
                } else if (eatPunct("(")) {
                    key.var = expectOrderVar();
                    expectPunct(")");
                } else {
                    break;
                }
                q_.orderKeys.push_back(key);
            }
            if (q_.orderKeys.empty()) throw syntaxError("empty ORDER BY", pos());
        }
        for (int n = 0; n < 2; ++n) {
            if (eatKw("LIMIT")) {
                if (q_.limit) throw syntaxError("duplicate LIMIT", pos());
                q_.limit = expectCount();
            } else if (eatKw("OFFSET")) {
                if (q_.offset) throw syntaxError("duplicate OFFSET", pos());
                q_.offset = expectCount();
            }
        }
    }

    std::string expectOrderVar() {
        if (!at(Tok::Var)) unsupported("ORDER BY expressions");
        std::string v = cur().t;
        advance();
        return v;
    }

    long long expectCount() {
        if (!at(Tok::Num)) throw syntaxError("expected a number", pos());
        long long v = std::stoll(cur().t);
        advance();
        return v;
    }

    GraphPattern parseGroup() {
        expectPunct("{");
        struct Elem {
            bool optional = false;
            GraphPattern gp;
        };
        std::vector<Elem> elems;
        std::vector<TriplePattern> pending;
        std::vector<Expr> groupFilters;
        auto flush = [&] {
            if (pending.empty()) return;
            GraphPattern b;
            b.kind = GraphPattern::Kind::Bgp;
            b.triples = std::move(pending);
            pending.clear();
            elems.push_back({false, std::move(b)});
        };
        while (!atPunct("}")) {
            if (at(Tok::End)) throw syntaxError("unterminated group pattern", pos());
            if (eatPunct(".")) continue;
            if (atKw("FILTER")) {
                advance();
                groupFilters.push_back(parseConstraint());
            } else if (atKw("OPTIONAL")) {
                advance();
                flush();
                elems.push_back({true, parseGroup()});
            } else if (atPunct("{")) {
                flush();
                GraphPattern g = parseGroup();
                while (eatKw("UNION")) {
                    GraphPattern u;
                    u.kind = GraphPattern::Kind::Union;
                    u.kids.push_back(std::move(g));
                    u.kids.push_back(parseGroup());
                    g = std::move(u);
                }
                elems.push_back({false, std::move(g)});
            } else if (atKw("GRAPH")) {
                unsupported("named graphs (GRAPH)");
            } else if (atKw("SERVICE")) {
                unsupported("SERVICE");
            } else if (atKw("MINUS")) {
                unsupported("MINUS");
            } else if (atKw("BIND")) {
                unsupported("BIND");
            } else if (atKw("VALUES")) {
                unsupported("VALUES");
            } else if (atKw("SELECT")) {
                unsupported("subqueries");
            } else {
                parseTriplesInto(pending);
            }
        }
        advance(); // }

        flush();
        GraphPattern acc;
        bool haveAcc = false;
        for (auto& e : elems) {
            if (e.optional) {
                GraphPattern opt;
                opt.kind = GraphPattern::Kind::Opt;
                if (haveAcc) opt.kids.push_back(std::move(acc));
                else opt.kids.push_back(GraphPattern{}); // empty BGP left operand
                opt.kids.push_back(std::move(e.gp));
                acc = std::move(opt);
                haveAcc = true;
            } else if (!haveAcc) {
                acc = std::move(e.gp);
                haveAcc = true;
            } else {
                GraphPattern gand;
                gand.kind = GraphPattern::Kind::And;
                gand.kids.push_back(std::move(acc));
                gand.kids.push_back(std::move(e.gp));
                acc = std::move(gand);
            }
        }
        if (!haveAcc) acc = GraphPattern{};
        if (!groupFilters.empty()) {
            if (acc.isBgp()) {
                for (auto& f : groupFilters) acc.filters.push_back(std::move(f));
            } else {
                GraphPattern fl;
                fl.kind = GraphPattern::Kind::Filter;
                fl.kids.push_back(std::move(acc));
                fl.conds = std::move(groupFilters);
                acc = std::move(fl);
            }
        }
        return acc;
    }

    void parseDataBlock(std::vector<TriplePattern>& out, bool ground) {
        expectPunct("{");
        while (!atPunct("}")) {
            if (at(Tok::End)) throw syntaxError("unterminated data block", pos());
            if (eatPunct(".")) continue;
            if (atKw("GRAPH")) unsupported("named graphs (GRAPH)");
            parseTriplesInto(out);
        }
        advance(); // }
        if (ground)
            for (const auto& t : out)
                if (t.s.varLike() || t.p.varLike() || t.o.varLike())
                    throw Error(Error::Kind::Syntax,
                                "variables are not allowed in DATA blocks: " + t.text());
    }

    void parseTriplesInto(std::vector<TriplePattern>& out) {
        Term subject = parseTerm(/*allowLiteral=*/false);
        for (;;) {
            Term verb = parseVerb();
            if (atPunct("/") || atPunct("|") || atPunct("^") || atPunct("*") || atPunct("+"))
                unsupported("property paths");
            for (;;) {
                Term object = parseTerm(/*allowLiteral=*/true);
                out.push_back({subject, verb, object});
                if (!eatPunct(",")) break;
            }
            if (!eatPunct(";")) break;
            if (atPunct(".") || atPunct("}")) break; // trailing ';'
        }
    }

    Term parseVerb() {
        if (at(Tok::Var)) {
            Term t = Term::variable(cur().t);
            advance();
            return t;
        }
        if (at(Tok::Word) && cur().t == "a") {
            advance();
            return Term::iri(std::string(kRdfNs) + "type");
        }
        if (at(Tok::Iri)) {
            Term t = Term::iri(resolveIri(cur().t));
            advance();
            return t;
        }
        if (at(Tok::Pname)) {
            Term t = Term::iri(expandPname(cur().t));
            advance();
            return t;
        }
        throw syntaxError("expected predicate", pos());
    }

    Term parseTerm(bool allowLiteral) {
        if (at(Tok::Var)) {
            Term t = Term::variable(cur().t);
            advance();
            return t;
        }
        if (at(Tok::Iri)) {
            Term t = Term::iri(resolveIri(cur().t));
            advance();
            return t;
        }
        if (at(Tok::Pname)) {
            Term t = Term::iri(expandPname(cur().t));
            advance();
            return t;
        }
        if (at(Tok::BlankLabel)) {
            Term t = blankAsVariable(cur().t);
            advance();
            return t;
        }
        if (atPunct("[")) {
            advance();
            if (!eatPunct("]")) unsupported("blank node property lists");
            return Term::variable("_b" + std::to_string(++blankCounter_));
        }
        if (!allowLiteral) throw syntaxError("expected a term", pos());
        return parseLiteralTerm();
    }

    Term parseLiteralTerm() {
        if (at(Tok::Str)) {
            Tok tok = cur();
            advance();
            std::string datatype;
            if (eatPunct("^^")) {
                if (at(Tok::Iri)) datatype = resolveIri(cur().t);
                else if (at(Tok::Pname)) datatype = expandPname(cur().t);
                else throw syntaxError("expected datatype IRI after '^^'", pos());
                advance();
            }
            return Term::literal(tok.t, datatype, tok.lang);
        }
        bool negative = false;
        if (atPunct("-") || atPunct("+")) {
            negative = cur().t == "-";
            advance();
            if (!at(Tok::Num)) throw syntaxError("expected a number after sign", pos());
        }
        if (at(Tok::Num)) {
            std::string raw = (negative ? "-" : "") + cur().t;
            advance();
            return numericLiteral(raw);
        }
        if (at(Tok::Word)) {
            std::string w = upper(cur().t);
            if (w == "TRUE" || w == "FALSE") {
                advance();
                return Term::literal(w == "TRUE" ? "true" : "false",
                                     std::string(kXsdNs) + "boolean");
            }
        }
        throw syntaxError("expected a term", pos());
    }

    static Term numericLiteral(const std::string& raw) {
        std::string dt = std::string(kXsdNs) + "integer";
        if (raw.find_first_of("eE") != std::string::npos) dt = std::string(kXsdNs) + "double";
        else if (raw.find('.') != std::string::npos) dt = std::string(kXsdNs) + "decimal";
        return Term::literal(raw, dt);
    }

    // --- filter expressions ---

    Expr parseConstraint() {
        if (atPunct("(")) {
            advance();
            Expr e = parseOr();
            expectPunct(")");
            return e;
        }
        if (at(Tok::Word)) return parsePrimary();
        throw syntaxError("expected filter constraint", pos());
    }

    Expr parseOr() {
        Expr e = parseAnd();
        while (eatPunct("||")) e = Expr::binary(Expr::Kind::Or, "||", std::move(e), parseAnd());
        return e;
    }

    Expr parseAnd() {
        Expr e = parseRelational();
        while (eatPunct("&&")) e = Expr::binary(Expr::Kind::And, "&&", std::move(e), parseRelational());
        return e;
    }

    Expr parseRelational() {
        Expr e = parseAdditive();
        for (const char* op : {"=", "!=", "<=", ">=", "<", ">"}) {
            if (atPunct(op)) {
                advance();
                return Expr::binary(Expr::Kind::Compare, op, std::move(e), parseAdditive());
            }
        }
        return e;
    }

    Expr parseAdditive() {
        Expr e = parseMultiplicative();
        for (;;) {
            if (atPunct("+")) {
                advance();
                e = Expr::binary(Expr::Kind::Arith, "+", std::move(e), parseMultiplicative());
            } else if (atPunct("-")) {
                advance();
                e = Expr::binary(Expr::Kind::Arith, "-", std::move(e), parseMultiplicative());
            } else {
                break;
            }
        }
        return e;
    }

    Expr parseMultiplicative() {
        Expr e = parseUnary();
        for (;;) {
            if (atPunct("*")) {
                advance();
                e = Expr::binary(Expr::Kind::Arith, "*", std::move(e), parseUnary());
            } else if (atPunct("/")) {
                advance();
                e = Expr::binary(Expr::Kind::Arith, "/", std::move(e), parseUnary());
            } else {
                break;
            }
        }
        return e;
    }

    Expr parseUnary() {
        if (eatPunct("!")) return Expr::unary(Expr::Kind::Not, parseUnary());
        if (atPunct("-")) {
            advance();
            if (!at(Tok::Num)) throw syntaxError("expected number after unary '-'", pos());
            std::string raw = "-" + cur().t;
            advance();
            return Expr::atomOf(numericLiteral(raw));
        }
        if (eatPunct("+")) return parseUnary();
        return parsePrimary();
    }

    Expr parsePrimary() {
        if (atPunct("(")) {
            advance();
            Expr e = parseOr();
            expectPunct(")");
            return e;
        }
        if (at(Tok::Var)) {
            Expr e = Expr::atomOf(Term::variable(cur().t));
            advance();
            return e;
        }
        if (at(Tok::Word)) {
            std::string w = cur().t;
            std::string canon = canonicalFunction(w);
            if (!canon.empty()) {
                advance();
                expectPunct("(");
                std::vector<Expr> args;
                if (!atPunct(")")) {
                    args.push_back(parseOr());
                    while (eatPunct(",")) args.push_back(parseOr());
                }
                expectPunct(")");
                return Expr::call(canon, std::move(args));
            }
            std::string u = upper(w);
            if (u == "TRUE" || u == "FALSE") {
                advance();
                return Expr::atomOf(Term::literal(u == "TRUE" ? "true" : "false",
                                                  std::string(kXsdNs) + "boolean"));
            }
            unsupported("function '" + w + "'");
        }
        if (at(Tok::Str) || at(Tok::Num)) return Expr::atomOf(parseLiteralTerm());
        if (at(Tok::Iri)) {
            Expr e = Expr::atomOf(Term::iri(resolveIri(cur().t)));
            advance();
            return e;
        }
        if (at(Tok::Pname)) {
            Expr e = Expr::atomOf(Term::iri(expandPname(cur().t)));
            advance();
            return e;
        }
        throw syntaxError("expected expression", pos());
    }

    static std::string canonicalFunction(const std::string& w) {
        std::string u = upper(w);
        if (u == "REGEX") return "regex";
        if (u == "BOUND") return "bound";
        if (u == "SAMETERM") return "sameTerm";
        if (u == "LANG") return "lang";
        if (u == "LANGMATCHES") return "langMatches";
        if (u == "STR") return "str";
        if (u == "ISBLANK") return "isBlank";
        if (u == "ISIRI" || u == "ISURI") return "isIRI";
        if (u == "ISLITERAL") return "isLiteral";
        if (u == "DATATYPE") return "datatype";
        return "";
    }
};

} // namespace

SparqlQuery parseSparql(std::string_view text) {
    return Parser(text).run();
}

UpdateRequest parseSparqlUpdate(std::string_view text) {
    return Parser(text).runUpdate();
}

// --- normalization ----------------------------------------------------------

static GraphPattern mergeAnd(GraphPattern a, GraphPattern b) {
    auto emptyBgp = [](const GraphPattern& g) {
        return g.isBgp() && g.triples.empty() && g.filters.empty();
    };
    if (emptyBgp(a)) return b;
    if (emptyBgp(b)) return a;
    if (a.isBgp() && b.isBgp()) {
        for (auto& t : b.triples) a.triples.push_back(std::move(t));
        for (auto& f : b.filters) a.filters.push_back(std::move(f));
        return a;
    }
    GraphPattern g;
    g.kind = GraphPattern::Kind::And;
    g.kids.push_back(std::move(a));
    g.kids.push_back(std::move(b));
    return g;
}

std::vector<GraphPattern> normalize(const GraphPattern& gp) {
    switch (gp.kind) {
        case GraphPattern::Kind::Bgp: return {gp};
        case GraphPattern::Kind::Union: {
            std::vector<GraphPattern> out;
            for (const auto& k : gp.kids)
                for (auto& g : normalize(k)) out.push_back(std::move(g));
            return out;
        }
        case GraphPattern::Kind::And: {
            std::vector<GraphPattern> out;
            for (const auto& l : normalize(gp.kids[0]))
                for (const auto& r : normalize(gp.kids[1]))
                    out.push_back(mergeAnd(l, r));
            return out;
        }
        case GraphPattern::Kind::Opt: {
            auto rights = normalize(gp.kids[1]);
            if (rights.size() != 1)
                throw Error(Error::Kind::Unsupported,
                            "UNION inside the right operand of OPTIONAL has no union-free form");
            std::vector<GraphPattern> out;
            for (auto& l : normalize(gp.kids[0])) {
                GraphPattern o;
                o.kind = GraphPattern::Kind::Opt;
                o.kids.push_back(std::move(l));
                o.kids.push_back(rights[0]);
                out.push_back(std::move(o));
            }
            return out;
        }
        case GraphPattern::Kind::Filter: {
            std::vector<GraphPattern> out;
            for (auto& g : normalize(gp.kids[0])) {
                if (g.isBgp()) {
                    for (const auto& c : gp.conds) g.filters.push_back(c);
                } else {
                    GraphPattern f;
                    f.kind = GraphPattern::Kind::Filter;
                    f.kids.push_back(std::move(g));
                    f.conds = gp.conds;
                    g = std::move(f);
                }
                out.push_back(std::move(g));
            }
            return out;
        }
    }
    return {};
}

// --- well-designedness ------------------------------------------------------

static void collectVarsExcluding(const GraphPattern& g, const GraphPattern* exclude,
                                 std::vector<std::string>& out) {
    if (&g == exclude) return;
    auto push = [&](const std::string& v) {
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    };
    for (const auto& t : g.triples) {
        if (t.s.varLike()) push(t.s.value);
        if (t.p.varLike()) push(t.p.value);
        if (t.o.varLike()) push(t.o.value);
    }
    std::vector<std::string> fv;
    for (const auto& f : g.filters) f.collectVariables(fv);
    for (const auto& c : g.conds) c.collectVariables(fv);
    for (const auto& v : fv) push(v);
    for (const auto& k : g.kids) collectVarsExcluding(k, exclude, out);
}

static void collectOptNodes(const GraphPattern& g, std::vector<const GraphPattern*>& out) {
    if (g.kind == GraphPattern::Kind::Opt) out.push_back(&g);
    for (const auto& k : g.kids) collectOptNodes(k, out);
}

bool isWellDesigned(const GraphPattern& ufgp) {
    std::vector<const GraphPattern*> opts;
    collectOptNodes(ufgp, opts);
    for (const GraphPattern* opt : opts) {
        auto insideRight = opt->kids[1].variables();
        auto insideLeft = opt->kids[0].variables();
        std::vector<std::string> outside;
        collectVarsExcluding(ufgp, opt, outside);
        for (const auto& v : insideRight) {
            bool occursOutside =
                std::find(outside.begin(), outside.end(), v) != outside.end();
            bool occursLeft =
                std::find(insideLeft.begin(), insideLeft.end(), v) != insideLeft.end();
            if (occursOutside && !occursLeft) return false;
        }
    }
    return true;
}

// --- schema triples ---------------------------------------------------------

bool isVocabularyIri(const std::string& iri) {
    return iri.rfind(kRdfNs, 0) == 0 || iri.rfind(kRdfsNs, 0) == 0 || iri.rfind(kOwlNs, 0) == 0;
}

std::string iriLocalName(const std::string& iri) {
    size_t h = iri.rfind('#');
    if (h != std::string::npos) return iri.substr(h + 1);
    size_t s = iri.rfind('/');
    if (s != std::string::npos) return iri.substr(s + 1);
    return iri;
}

bool isSchemaTriple(const TriplePattern& t) {
    return t.p.isIri() && isVocabularyIri(t.p.value);
}

static void collectTriples(const GraphPattern& g, bool schema, std::vector<TriplePattern>& out) {
    for (const auto& t : g.triples)
        if (isSchemaTriple(t) == schema) out.push_back(t);
    for (const auto& k : g.kids) collectTriples(k, schema, out);
}

std::vector<TriplePattern> schemaTriples(const GraphPattern& ufgp) {
    std::vector<TriplePattern> out;
    collectTriples(ufgp, true, out);
    return out;
}

std::vector<TriplePattern> dataTriples(const GraphPattern& ufgp) {
    std::vector<TriplePattern> out;
    collectTriples(ufgp, false, out);
    return out;
}

// --- variable types ---------------------------------------------------------

const char* varTypeName(VarType t) {
    switch (t) {
        case VarType::CIVT: return "CIVT";
        case VarType::LVT: return "LVT";
        case VarType::UVT: return "UVT";
        case VarType::DTPVT: return "DTPVT";
        case VarType::OPVT: return "OPVT";
        case VarType::UPVT: return "UPVT";
    }
    return "?";
}

VarType VarTypeMap::of(const std::string& var) const {
    auto it = types.find(var);
    return it == types.end() ? VarType::UVT : it->second;
}

VarTypeMap determineVariableTypes(const GraphPattern& ufgp, const MappingCatalog& cat) {
    VarTypeMap vtm;
    auto data = dataTriples(ufgp);

    for (const auto& t : data)
        if (t.p.varLike()) vtm.types[t.p.value] = VarType::UPVT;
    for (const auto& t : data) {
        if (t.s.varLike()) vtm.types.emplace(t.s.value, VarType::UVT);
        if (t.o.varLike()) vtm.types.emplace(t.o.value, VarType::UVT);
    }

    auto unknown = [](VarType t) { return t == VarType::UVT || t == VarType::UPVT; };
    auto assign = [&](const std::string& var, VarType vt) -> bool {
        VarType cur = vtm.types.at(var);
        if (cur == vt) return false;
        if (unknown(cur)) {
            vtm.types[var] = vt;
            return true;
        }
        if (unknown(vt)) return false;
        if (!vtm.conflict) vtm.conflict = VarTypeMap::Conflict{var, cur, vt};
        return false;
    };

    // Rules 1, 2, 3 and 6 use evidence local to one triple. The object-type to
    // predicate-type direction of Rules 4/5 propagates across triples; the
    // reverse direction is not propagated, which keeps the published outcomes
    // (an object variable of an untyped predicate stays unknown) and makes the
    // result independent of triple order.
    bool changed = true;
    size_t guard = data.size() * 6 + 2;
    while (changed && guard--) {
        changed = false;
        for (const auto& t : data) {
            if (t.s.varLike()) changed |= assign(t.s.value, VarType::CIVT); // Rule 1
            if (t.p.isIri()) {
                std::string local = iriLocalName(t.p.value);
                if (t.o.varLike()) {
                    if (cat.hasConstruct(ConstructKind::DatatypeProperty, local))
                        changed |= assign(t.o.value, VarType::LVT); // Rule 2
                    if (cat.hasConstruct(ConstructKind::ObjectProperty, local))
                        changed |= assign(t.o.value, VarType::CIVT); // Rule 3
                }
            }
            if (t.p.varLike()) {
                if (t.o.isLiteral()) {
                    changed |= assign(t.p.value, VarType::DTPVT); // Rule 6
                } else if (t.o.varLike()) {
                    VarType to = vtm.types.at(t.o.value);
                    if (to == VarType::LVT)
                        changed |= assign(t.p.value, VarType::DTPVT); // Rule 4 (inverse)
                    if (to == VarType::CIVT)
                        changed |= assign(t.p.value, VarType::OPVT); // Rule 5 (inverse)
                }
            }
        }
    }
    return vtm;
}

// --- schema triple processing -----------------------------------------------

namespace {

// Candidate values a schema variable can take: ontology constructs plus the
// implicit universal class.
struct SchemaUniverse {
    std::vector<std::string> classes;    // includes "owl:Thing"
    std::vector<std::string> properties; // all property ids
    std::vector<std::string> datatypes;  // datatype names as written in ranges

    std::vector<std::string> all() const {
        std::vector<std::string> out = classes;
        out.insert(out.end(), properties.begin(), properties.end());
        out.insert(out.end(), datatypes.begin(), datatypes.end());
        return out;
    }
};

std::string datatypeLocal(const std::string& name) {
    std::string l = iriLocalName(name);
    size_t c = l.rfind(':');
    return c == std::string::npos ? l : l.substr(c + 1);
}

class SchemaMatcher {
public:
    SchemaMatcher(const OntologyModel& onto, bool transitive)
        : onto_(onto), transitive_(transitive) {
        universe_.classes.push_back("owl:Thing");
        for (const auto& [id, _] : onto.classes) universe_.classes.push_back(id);
        for (const auto& [id, _] : onto.properties) universe_.properties.push_back(id);
        std::set<std::string> dts;
        for (const auto& [id, p] : onto.properties)
            if (!p.object && !p.rangeDatatype.empty()) dts.insert(p.rangeDatatype);
        for (const auto& [id, _] : onto.datatypes) dts.insert(id);
        universe_.datatypes.assign(dts.begin(), dts.end());
    }

    const SchemaUniverse& universe() const { return universe_; }

    // True when class `sub` sits (transitively) below `super`; every class
    // sits below owl:Thing.
    bool isBelow(const std::string& sub, const std::string& super) const {
        if (super == "owl:Thing") return sub == "owl:Thing" || onto_.isClass(sub);
        std::vector<std::string> frontier{sub};
        std::set<std::string> seen;
        while (!frontier.empty()) {
            std::string c = frontier.back();
            frontier.pop_back();
            if (!seen.insert(c).second) continue;
            auto it = onto_.classes.find(c);
            if (it == onto_.classes.end()) continue;
            for (const auto& sup : it->second.superClasses) {
                if (sup == super) return true;
                frontier.push_back(sup);
            }
        }
        return false;
    }

    bool holds(const std::string& pred, const std::string& s, const std::string& o) const {
        std::string local = iriLocalName(pred);
        bool rdf = pred.rfind(kRdfNs, 0) == 0;
        bool rdfs = pred.rfind(kRdfsNs, 0) == 0;
        bool owl = pred.rfind(kOwlNs, 0) == 0;
        if (!rdf && !rdfs && !owl) return false;

        if (rdfs && local == "subClassOf") {
            if (!isClassValue(s) || !isClassValue(o)) return false;
            if (o == "owl:Thing") return onto_.isClass(s); // every class below owl:Thing
            auto it = onto_.classes.find(s);
            if (it == onto_.classes.end()) return false;
            if (!transitive_) {
                const auto& sup = it->second.superClasses;
                return std::find(sup.begin(), sup.end(), o) != sup.end();
            }
            return s != o && isBelow(s, o);
        }
        if (rdfs && local == "subPropertyOf") {
            auto it = onto_.properties.find(s);
            if (it == onto_.properties.end()) return false;
            if (!transitive_) {
                const auto& sup = it->second.superProperties;
                return std::find(sup.begin(), sup.end(), o) != sup.end();
            }
            std::vector<std::string> frontier{s};
            std::set<std::string> seen;
            while (!frontier.empty()) {
                std::string p = frontier.back();
                frontier.pop_back();
                if (!seen.insert(p).second) continue;
                auto pit = onto_.properties.find(p);
                if (pit == onto_.properties.end()) continue;
                for (const auto& sup : pit->second.superProperties) {
                    if (sup == o) return true;
                    frontier.push_back(sup);
                }
            }
            return false;
        }
        if (rdfs && local == "domain") {
            auto it = onto_.properties.find(s);
            if (it == onto_.properties.end() || !isClassValue(o)) return false;
            // A property applies to its asserted domain and to every class
            // below it, so a subclass matches its inherited properties.
            for (const auto& d : it->second.domains)
                if (d == o || isBelow(o, d)) return true;
            return false;
        }
        if (rdfs && local == "range") {
            auto it = onto_.properties.find(s);
            if (it == onto_.properties.end()) return false;
            if (it->second.object) {
                if (!isClassValue(o)) return false;
                for (const auto& r : it->second.rangeClasses)
                    if (r == o || isBelow(o, r)) return true;
                return false;
            }
            return datatypeLocal(it->second.rangeDatatype) == datatypeLocal(o);
        }
        if (rdf && local == "type") {
            if (o == "Class" || o == "owl:Class") return onto_.isClass(s);
            if (o == "DatatypeProperty") return onto_.isDatatypeProperty(s);
            if (o == "ObjectProperty") return onto_.isObjectProperty(s);
            if (o == "Property") return onto_.isProperty(s);
            // instance-of: the subject value is the class the instance belongs to
            if (o == "owl:Thing") return isClassValue(s);
            if (!onto_.isClass(o)) return false;
            if (s == o) return true;
            return transitive_ && isBelow(s, o);
        }
        return false; // no asserted statements for the remaining vocabulary
    }

    // Map an IRI term to a construct value: a vocabulary meta-term keeps its
    // local name, anything else resolves by local name.
    static std::string valueOfIri(const std::string& iri) {
        std::string local = iriLocalName(iri);
        if (iri.rfind(kOwlNs, 0) == 0 && local == "Thing") return "owl:Thing";
        return local;
    }

private:
    bool isClassValue(const std::string& v) const {
        return v == "owl:Thing" || onto_.isClass(v);
    }

    const OntologyModel& onto_;
    bool transitive_;
    SchemaUniverse universe_;
};

} // namespace

SchemaBindings processSchemaTriples(const GraphPattern& ufgp, const OntologyModel& onto,
                                    const MappingCatalog& cat, const VarTypeMap& varTypes,
                                    bool transitive) {
    SchemaBindings out;
    auto sts = schemaTriples(ufgp);
    if (sts.empty()) return out;

    SchemaMatcher matcher(onto, transitive);

    std::vector<std::string> vars;
    for (const auto& t : sts)
        for (const Term* term : {&t.s, &t.o})
            if (term->varLike() &&
                std::find(vars.begin(), vars.end(), term->value) == vars.end())
                vars.push_back(term->value);

    // Per-variable candidates, pre-pruned by the determined variable type.
    std::map<std::string, std::vector<std::string>> candidates;
    for (const auto& v : vars) {
        switch (varTypes.of(v)) {
            case VarType::DTPVT: {
                std::vector<std::string> c;
                for (const auto& id : matcher.universe().properties)
                    if (onto.isDatatypeProperty(id)) c.push_back(id);
                candidates[v] = std::move(c);
                break;
            }
            case VarType::OPVT: {
                std::vector<std::string> c;
                for (const auto& id : matcher.universe().properties)
                    if (onto.isObjectProperty(id)) c.push_back(id);
                candidates[v] = std::move(c);
                break;
            }
            case VarType::UPVT: candidates[v] = matcher.universe().properties; break;
            case VarType::CIVT: candidates[v] = matcher.universe().classes; break;
            default: candidates[v] = matcher.universe().all(); break;
        }
    }

    // Enumerate consistent assignments; sizes are schema-bounded and small.
    std::map<std::string, std::set<std::string>> matched;
    std::map<std::string, std::string> assignment;
    auto tripleValue = [&](const Term& t) -> std::optional<std::string> {
        if (t.isIri()) return SchemaMatcher::valueOfIri(t.value);
        if (t.isLiteral()) return t.value;
        auto it = assignment.find(t.value);
        if (it == assignment.end()) return std::nullopt;
        return it->second;
    };
    auto consistent = [&]() {
        for (const auto& t : sts) {
            auto s = tripleValue(t.s), o = tripleValue(t.o);
            if (!s || !o) continue; // not yet fully assigned
            if (!matcher.holds(t.p.value, *s, *o)) return false;
        }
        return true;
    };
    std::function<void(size_t)> search = [&](size_t idx) {
        if (idx == vars.size()) {
            for (const auto& [v, val] : assignment) matched[v].insert(val);
            return;
        }
        const std::string& v = vars[idx];
        for (const auto& value : candidates[v]) {
            assignment[v] = value;
            if (consistent()) search(idx + 1);
        }
        assignment.erase(v);
    };
    if (vars.empty()) {
        // fully ground schema triples: nothing to bind, but they still gate
        // satisfiability; callers check via an empty-variable map
        return out;
    }
    search(0);

    for (const auto& v : vars) {
        std::vector<std::string> values(matched[v].begin(), matched[v].end());
        PathSet paths;
        for (const auto& value : values) {
            if (onto.isClass(value)) {
                paths = setUnion(paths, cat.lookup(ConstructKind::Class, value));
            } else if (onto.isDatatypeProperty(value)) {
                paths = setUnion(paths, cat.lookup(ConstructKind::DatatypeProperty, value));
            } else if (onto.isObjectProperty(value)) {
                paths = setUnion(paths, cat.lookup(ConstructKind::ObjectProperty, value));
            }
            // datatypes and owl:Thing carry no XML-side paths
        }
        out.constructs[v] = std::move(values);
        out.paths[v] = Binding::of(std::move(paths));
    }
    return out;
}

} // namespace sxq

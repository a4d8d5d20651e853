#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sxq/error.hpp"
#include "sxq/mapping.hpp"
#include "sxq/ontology.hpp"
#include "sxq/xpath.hpp"

namespace sxq {

struct Term {
    enum class Kind { Iri, Literal, Variable, Blank };

    Kind kind = Kind::Iri;
    std::string value;    // iri text, literal lexical form, or variable/blank name
    std::string datatype; // literals only, full IRI or ""
    std::string lang;     // literals only

    static Term iri(std::string v);
    static Term literal(std::string v, std::string datatype = "", std::string lang = "");
    static Term variable(std::string name);

    bool isIri() const { return kind == Kind::Iri; }
    bool isLiteral() const { return kind == Kind::Literal; }
    bool isVariable() const { return kind == Kind::Variable; }
    // Blank nodes behave as variables throughout the translation.
    bool varLike() const { return kind == Kind::Variable || kind == Kind::Blank; }

    std::string text() const;
    bool operator==(const Term& o) const;
};

struct TriplePattern {
    Term s, p, o;
    std::string text() const;
};

// Filter condition tree. Calls keep canonical names (regex, bound, sameTerm,
// lang, langMatches, str, isBlank, isIRI, isLiteral, datatype).
struct Expr {
    enum class Kind { Or, And, Not, Compare, Arith, Call, Atom };

    Kind kind = Kind::Atom;
    std::string op; // Compare: = != < <= > >=; Arith: + - * /; Call: function name
    std::vector<Expr> args;
    Term atom;

    static Expr atomOf(Term t);
    static Expr unary(Kind k, Expr a);
    static Expr binary(Kind k, std::string op, Expr a, Expr b);
    static Expr call(std::string name, std::vector<Expr> args);

    void collectVariables(std::vector<std::string>& out) const;
    std::vector<std::string> variables() const;
    std::string text() const;
};

struct GraphPattern {
    enum class Kind { Bgp, And, Opt, Union, Filter };

    Kind kind = Kind::Bgp;
    std::vector<TriplePattern> triples; // Bgp
    std::vector<Expr> filters;          // Bgp
    std::vector<GraphPattern> kids;     // And/Opt/Union: 2, Filter: 1
    std::vector<Expr> conds;            // Filter

    bool isBgp() const { return kind == Kind::Bgp; }
    // Variables in first-appearance order, filters included.
    std::vector<std::string> variables() const;
    std::string text() const;
};

struct OrderKey {
    std::string var;
    bool descending = false;
};

struct SparqlQuery {
    enum class Form { Select, Ask, Construct, Describe };

    Form form = Form::Select;
    bool wildcard = false;                       // SELECT * / DESCRIBE *
    std::vector<std::string> returnVars;         // Select/Describe (resolved wildcard too)
    std::vector<TriplePattern> constructTemplate;
    GraphPattern pattern;
    bool distinct = false, reduced = false;
    std::vector<OrderKey> orderKeys;
    std::optional<long long> limit, offset;
    std::vector<std::pair<std::string, std::string>> prefixes;
};

SparqlQuery parseSparql(std::string_view text);

// --- updates ----------------------------------------------------------------

struct UpdateRequest {
    enum class Kind { InsertData, DeleteData, Modify };

    Kind kind = Kind::InsertData;
    std::vector<TriplePattern> insertTriples; // ground for InsertData
    std::vector<TriplePattern> deleteTriples; // ground for DeleteData
    GraphPattern where;                       // Modify only
    std::vector<std::pair<std::string, std::string>> prefixes;
};

// Graph update operations only. Graph management (CREATE/DROP/CLEAR/LOAD/
// COPY/MOVE/ADD), WITH/USING/GRAPH forms and multi-operation requests are
// rejected as unsupported.
UpdateRequest parseSparqlUpdate(std::string_view text);

// Union normal form: a disjunction of union-free patterns. And over Union and
// Opt (left operand) over Union distribute; adjacent BGPs merge. A Union kept
// inside the right operand of Opt has no valid distribution and is rejected.
std::vector<GraphPattern> normalize(const GraphPattern& gp);

bool isWellDesigned(const GraphPattern& ufgp);

// --- schema triples ---------------------------------------------------------

bool isVocabularyIri(const std::string& iri);
std::string iriLocalName(const std::string& iri);
// Schema triples carry an RDF/RDFS/OWL vocabulary predicate (rdf:type,
// rdfs:subClassOf, ...). Variable predicates never qualify.
bool isSchemaTriple(const TriplePattern& t);

std::vector<TriplePattern> schemaTriples(const GraphPattern& ufgp);
std::vector<TriplePattern> dataTriples(const GraphPattern& ufgp);

// --- variable types ---------------------------------------------------------

enum class VarType { CIVT, LVT, UVT, DTPVT, OPVT, UPVT };
const char* varTypeName(VarType t);

struct VarTypeMap {
    std::map<std::string, VarType> types;
    struct Conflict {
        std::string var;
        VarType a, b;
    };
    std::optional<Conflict> conflict;

    VarType of(const std::string& var) const;
};

VarTypeMap determineVariableTypes(const GraphPattern& ufgp, const MappingCatalog& cat);

// --- schema triple processing ----------------------------------------------

struct SchemaBindings {
    std::map<std::string, Binding> paths;
    std::map<std::string, std::vector<std::string>> constructs; // matched construct ids
};

// Evaluate the schema triples of `ufgp` against asserted ontology statements
// (simple entailment; `transitive` widens subClassOf/subPropertyOf matching),
// prune by variable type, and convert construct sets to XPath bindings.
SchemaBindings processSchemaTriples(const GraphPattern& ufgp, const OntologyModel& onto,
                                    const MappingCatalog& cat, const VarTypeMap& varTypes,
                                    bool transitive = false);

} // namespace sxq

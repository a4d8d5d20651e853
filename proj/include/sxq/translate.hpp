#pragma once

#include <map>
#include <string>
#include <vector>

#include "sxq/binding.hpp"
#include "sxq/mapping.hpp"
#include "sxq/ontology.hpp"
#include "sxq/sparql.hpp"
#include "sxq/xquery.hpp"

namespace sxq {

struct TranslateOptions {
    std::string docUri;            // collection() argument in the emitted query
    std::string docVar = "doc";    // variable the wrapper binds to the collection
    bool transitiveSchema = false; // widen subClassOf matching in schema processing
};

// Effective return variables: Construct queries return the template variables,
// everything else what the parser resolved.
std::vector<std::string> returnVariables(const SparqlQuery& q);

// var -> variables reachable over subject->object / subject->predicate /
// predicate->object edges of the data triples, transitively. A variable gets a
// For clause when it or one of these "extensions" is returned.
std::map<std::string, std::vector<std::string>>
extensionClosure(const std::vector<TriplePattern>& triples);

// For/Let clause selection. Ask queries always bind with Let.
XClause::Kind selectClauseKind(SparqlQuery::Form form, const std::vector<std::string>& rv,
                               const std::string& var,
                               const std::map<std::string, std::vector<std::string>>& ext);

// A filter is safe when every variable it mentions occurs in the triples of
// the pattern it accompanies; unsafe filters end up in Where clauses.
bool filterIsSafe(const Expr& filter, const GraphPattern& bgp);

struct GpTranslation {
    XExpr fragment;  // FLWOR producing <Result> rows; () when unmatchable
    bool usesCivt = false;
    bool usesSchemaPath = false;
    bool usesCompatible = false; // row-compatibility join helpers
    bool usesMerge = false;
};

// Translate the (already parsed) query pattern into the graph-pattern FLWOR
// that the query-form wrapper binds to $Results.
GpTranslation translateGraphPattern(const SparqlQuery& q, const MappingCatalog& cat,
                                    const OntologyModel& onto, const TranslateOptions& opt);

// Single-BGP entry used by tests and the rewriter fixtures: translates one BGP
// with the given pre-bound variables/bindings in scope.
struct BgpScope {
    std::map<std::string, Binding> carried; // bindings from enclosing clauses
    std::vector<std::string> boundVars;     // XQuery variables already in scope
};

GpTranslation translateBgpFragment(const GraphPattern& bgp, const SparqlQuery& q,
                                   const MappingCatalog& cat, const OntologyModel& onto,
                                   const TranslateOptions& opt, const BgpScope& scope = {});

// XQuery-safe variable name for a SPARQL variable (also used for row tags).
std::string xqName(const std::string& sparqlVar);

// SPARQL literal/IRI as an XQuery value (numeric literals stay bare).
XExpr literalToXQuery(const Term& t);

// Clause-level translation of one BGP: the For/Let clauses and the trailing
// Where, without a return. The update translation attaches its own returns.
struct BgpClauses {
    std::vector<XClause> clauses; // trailing Where included when conditions exist
    std::map<std::string, std::string> varNames; // SPARQL var -> bound XQuery var
    std::map<std::string, Binding> bindings;     // final bindings per variable
    bool unsat = false;
};

BgpClauses translateBgpClauses(const GraphPattern& bgp, const SparqlQuery& q,
                               const MappingCatalog& cat, const OntologyModel& onto,
                               const TranslateOptions& opt);

} // namespace sxq

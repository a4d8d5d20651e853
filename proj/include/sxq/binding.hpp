#pragma once

#include <map>
#include <string>
#include <vector>

#include "sxq/mapping.hpp"
#include "sxq/sparql.hpp"
#include "sxq/xpath.hpp"

namespace sxq {

struct BindingResult {
    // Final binding per data-triple variable. Variables appearing only in
    // schema triples keep their schema bindings and are not listed here.
    std::map<std::string, Binding> vars;
    // Number of passes over the BGP, including the final no-change pass.
    int iterations = 0;
    // False when some variable contracted to the empty path set: the BGP can
    // match no XML node and the whole UF-GP is unsatisfiable.
    bool satisfiable = true;
};

// Parent paths of every path with at least two steps (single-step paths have
// no expressible parent and are dropped).
PathSet parentPaths(const PathSet& set);

// Domain/range path sets of an IRI predicate, resolved by local name against
// the catalog; unmapped predicates yield empty sets.
const PathSet& predicateDomains(const Term& p, const MappingCatalog& cat);
const PathSet& predicateRanges(const Term& p, const MappingCatalog& cat);
const PathSet& predicateWholes(const Term& p, const MappingCatalog& cat);

// Iterate the per-triple binding rules over the BGP until the bindings are
// stable. Schema triples inside `bgp` are skipped; `schema` supplies initial
// bindings, everything else starts from Theta. Rules read the freshest stored
// values and update in place; a non-determinable co-argument acts as Theta.
// `trace`, when given, receives the full state after every pass.
BindingResult bindVariables(const GraphPattern& bgp, const SchemaBindings& schema,
                            const VarTypeMap& varTypes, const MappingCatalog& cat,
                            std::vector<std::map<std::string, Binding>>* trace = nullptr);

} // namespace sxq

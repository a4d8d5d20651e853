#pragma once

#include "sxq/translate.hpp"

namespace sxq {

// Wrap a translated graph-pattern fragment with the document binding, the
// solution sequence modifiers (order by, distinct/reduced, limit/offset) and
// the query-form result constructor. Declares the helper functions the
// fragment relies on (local:civt, local:schema-path, local:compatible,
// local:merge); the first two stay external and are supplied by the engine.
XQueryProgram finalizeQuery(const SparqlQuery& q, const GpTranslation& gp,
                            const TranslateOptions& opt);

// Graph update operations as XQuery Update expressions. Target nodes are
// located through instance IRIs of the form docUri#/xpath (the identifiers
// the result builders produce) plus the property mappings; ground data blocks
// support datatype properties with element paths, and DELETE/INSERT with a
// WHERE part supports a single basic graph pattern.
XQueryProgram translateUpdate(const UpdateRequest& u, const MappingCatalog& cat,
                              const OntologyModel& onto, const TranslateOptions& opt);

} // namespace sxq

#pragma once

#include <string>
#include <vector>

#include "sxq/mapping.hpp"
#include "sxq/ontology.hpp"
#include "sxq/xsd.hpp"

namespace sxq {

// Schema information that OWL cannot carry; kept as flat records.
struct BackCompatSidecar {
    struct NameRecord {
        std::string ontologyId;
        std::string xmlName;
        std::string construct; // element | attribute | complexType | simpleType
    };
    struct OrderRecord {
        std::string typeId;
        std::string groupKind;
        std::vector<std::string> memberNames;
    };

    std::vector<NameRecord> names;
    std::vector<OrderRecord> orders;
    std::vector<std::string> orphans; // keyref/assert/alternative/override/unsupported

    std::string save() const;
};

struct TransformResult {
    OntologyModel ontology;
    BackCompatSidecar sidecar;
};

// Identifier convention: construct name + "__" + type name with ':' -> '_';
// anonymous complex types of an element E become "NS_" + E + "_UNType".
std::string typeIdentifier(const std::string& typeName);

TransformResult transformSchema(const XsdModel& xsd,
                                const std::string& ontologyIri = "urn:schema-ontology#");

// Path enumeration (recursion unrolled to `recursionCap` visits per type)
// feeding the class/property path sets; domains are parent paths.
MappingCatalog generateMappings(const XsdModel& xsd, const OntologyModel& onto,
                                int recursionCap = 3);

// One construct per line: kind, id, super, domain, range.
std::string renderOntology(const OntologyModel& onto);

} // namespace sxq

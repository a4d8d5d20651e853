#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "sxq/xpath.hpp"

namespace sxq {

enum class ConstructKind { Class, DatatypeProperty, ObjectProperty };
enum class Facet { Whole, Domain, Range };

struct ConstructRef {
    ConstructKind kind;
    std::string id;
    Facet facet = Facet::Whole;
};

// Boolean combination of XML-construct references with per-node conditions.
// A condition names the construct (by element name) whose path step the
// predicate attaches to; conditions distribute onto leaves before combining.
struct XmlSideExpr {
    enum class Kind { Construct, And, Or };

    Kind kind = Kind::Construct;
    std::string construct; // leaf: dotted chain, e.g. "Person.LastName"
    std::unique_ptr<XmlSideExpr> lhs, rhs;
    struct Condition {
        std::string anchor; // element name of the conditioned construct
        std::string predicate;
    };
    std::vector<Condition> conditions;

    static XmlSideExpr leaf(std::string construct);
    static XmlSideExpr conj(XmlSideExpr a, XmlSideExpr b);
    static XmlSideExpr disj(XmlSideExpr a, XmlSideExpr b);
    XmlSideExpr withCondition(std::string anchor, std::string predicate) &&;
};

// Resolve the XML side of a schema mapping to a path set, per the
// expression-to-set correspondence rules (or to union, and to intersection,
// conditions as predicates on the anchored step of every affected path).
PathSet resolveXmlSide(const XmlSideExpr& expr,
                       const std::function<PathSet(const std::string&)>& cxps);

class MappingCatalog {
public:
    struct PropertySets {
        PathSet whole, domain, range;
    };

    std::string ontologyIri;

    void setClass(const std::string& id, PathSet paths);
    void setProperty(ConstructKind kind, const std::string& id, PropertySets sets);

    bool hasConstruct(ConstructKind kind, const std::string& id) const;
    // Unmapped constructs yield the empty set, never an error.
    const PathSet& lookup(const ConstructRef& ref) const;
    const PathSet& lookup(ConstructKind kind, const std::string& id,
                          Facet facet = Facet::Whole) const;

    std::vector<std::string> classIds() const;
    std::vector<std::string> propertyIds(ConstructKind kind) const;

    // Union-folded (whole, domain, range) over all mapped properties of the
    // requested kinds, in lexicographic id order.
    PropertySets allPropertySets(bool datatype, bool object) const;

    std::string save() const;
    static MappingCatalog load(const std::string& bytes);

private:
    std::map<std::string, PathSet> classes_;
    std::map<std::string, PropertySets> dtProps_, objProps_;
};

} // namespace sxq

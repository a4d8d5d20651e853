#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sxq/xml.hpp"
#include "sxq/xpath.hpp"

namespace sxq {

// XML Schema subset: complex types (sequence/choice, extension), local and
// global elements, attributes, simple-type restrictions, substitution groups,
// occurrence bounds, key/unique/keyref. Anything else lands in `unsupported`.
struct XsdOccurs {
    long min = 1;
    long max = 1; // -1 = unbounded
};

struct XsdElementUse {
    std::string name;      // resolved name (for ref=, the referenced element's name)
    std::string typeName;  // resolved type name (named, built-in, or generated anon id)
    bool viaRef = false;
    XsdOccurs occurs;
};

struct XsdAttributeUse {
    std::string name;
    std::string typeName;
    bool required = false;
};

struct XsdIdentityConstraint {
    std::string kind; // key | unique | keyref
    std::string name;
    std::string selector;
    std::vector<std::string> fields;
};

struct XsdComplexType {
    std::string id;            // name, or generated id for anonymous types
    bool anonymous = false;
    std::string baseType;      // extension base ("" if none)
    std::string groupKind;     // sequence | choice | "" (empty content)
    std::vector<XsdElementUse> elements; // local content (without inherited)
    std::vector<XsdAttributeUse> attributes;
    std::vector<XsdIdentityConstraint> constraints;
};

struct XsdSimpleType {
    std::string id;
    std::string base;
    std::optional<double> minInclusive, maxInclusive;
};

struct XsdGlobalElement {
    std::string name;
    std::string typeName;
    std::string substitutionGroup; // head element name, "" if none
};

class XsdModel {
public:
    std::vector<XsdGlobalElement> globals;
    std::map<std::string, XsdComplexType> complexTypes;
    std::map<std::string, XsdSimpleType> simpleTypes;
    std::vector<std::string> unsupported; // recorded constructs outside the subset

    bool isComplex(const std::string& typeName) const { return complexTypes.count(typeName) > 0; }
    bool isSimple(const std::string& typeName) const {
        return !isComplex(typeName); // built-ins and named simple types
    }

    const XsdGlobalElement* global(const std::string& name) const;

    // Content of a complex type including inherited particles/attributes
    // (base first, matching document order of extension).
    std::vector<XsdElementUse> contentOf(const std::string& typeName) const;
    std::vector<XsdAttributeUse> attributesOf(const std::string& typeName) const;

    // Elements substitutable for the given global element (direct members).
    std::vector<const XsdGlobalElement*> substitutionsFor(const std::string& headName) const;

    // Document roots: global elements never referenced by other constructs.
    std::vector<const XsdGlobalElement*> documentRoots() const;

    // Occurrence of the last step of an absolute element path, resolved by
    // walking types from a root. Attributes report {0 or 1, 1}.
    std::optional<XsdOccurs> occurrence(const XPath& path) const;
};

XsdModel parseXsd(const XmlNode& schemaRoot);
XsdModel parseXsdText(const std::string& bytes);

} // namespace sxq

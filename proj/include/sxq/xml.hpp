#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sxq/error.hpp"

namespace sxq {

// DOM for the XML subset used across the toolkit: elements, attributes,
// text (mixed content kept in order). A node with an empty name is a text run.
struct XmlNode {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attrs;
    std::vector<XmlNode> kids;
    std::string text; // set only for text runs

    bool isText() const { return name.empty(); }
    bool isElement() const { return !name.empty(); }

    const std::string* attr(const std::string& n) const;
    const XmlNode* child(const std::string& n) const; // first element child by name
    std::vector<const XmlNode*> children(const std::string& n) const;
    std::vector<const XmlNode*> elements() const;

    // Concatenated descendant text.
    std::string content() const;
    bool hasElementChildren() const;

    // Local part of a possibly prefixed name ("xs:element" -> "element").
    std::string localName() const;
};

struct XmlDoc {
    std::string uri;
    XmlNode root;
};

XmlNode parseXml(std::string_view bytes);
XmlDoc parseXmlDoc(std::string_view bytes, std::string uri);
XmlNode parseXmlFile(const std::string& path);

std::string serializeXml(const XmlNode& n, bool pretty = true);

// Unique location of a node: steps suffixed with [k] only where several
// same-name siblings exist ("/Persons/Student[3]"). Attributes end "/@name".
struct NodeRef {
    const XmlNode* node = nullptr;          // element, or owner element of an attribute
    const XmlNode* parentChain = nullptr;   // unused externally
};

std::string positionalPath(const XmlDoc& doc, const std::vector<const XmlNode*>& chainToNode,
                           const std::string& attrName = "");
const XmlNode* resolvePositionalPath(const XmlDoc& doc, const std::string& path,
                                     std::string* attrNameOut = nullptr);

// All root-to-node element chains in document order (used by walkers).
void walkChains(const XmlDoc& doc,
                const std::function<void(const std::vector<const XmlNode*>&)>& fn);

} // namespace sxq

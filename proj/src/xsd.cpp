#include "sxq/xsd.hpp"

#include <set>

namespace sxq {

namespace {

bool isXsdBuiltin(const std::string& t) {
    return t.rfind("xs:", 0) == 0 || t.rfind("xsd:", 0) == 0;
}

long parseOccur(const std::string& v) {
    if (v == "unbounded") return -1;
    return std::stol(v);
}

XsdOccurs occursOf(const XmlNode& el) {
    XsdOccurs o;
    if (const auto* v = el.attr("minOccurs")) o.min = parseOccur(*v);
    if (const auto* v = el.attr("maxOccurs")) o.max = parseOccur(*v);
    return o;
}

class XsdParser {
public:
    XsdModel parse(const XmlNode& root) {
        if (root.localName() != "schema")
            throw Error(Error::Kind::Syntax, "xsd: expected schema root, got " + root.name);
        for (const auto* n : root.elements()) {
            const std::string k = n->localName();
            if (k == "complexType") {
                const auto* name = n->attr("name");
                if (!name) throw Error(Error::Kind::Syntax, "xsd: unnamed global complexType");
                parseComplexType(*name, false, *n);
            } else if (k == "element") {
                parseGlobalElement(*n);
            } else if (k == "simpleType") {
                parseSimpleType(*n);
            } else if (k == "annotation") {
                // ignore
            } else {
                model_.unsupported.push_back(k);
            }
        }
        resolve();
        return std::move(model_);
    }

private:
    XsdModel model_;

    std::string anonTypeId(const std::string& elementName, const std::string& enclosing) {
        std::string id = "NS_" + elementName + "_UNType";
        if (!model_.complexTypes.count(id)) return id;
        return enclosing.empty() ? id + "_2" : enclosing + "_" + id;
    }

    void parseGlobalElement(const XmlNode& n) {
        XsdGlobalElement g;
        const auto* name = n.attr("name");
        if (!name) throw Error(Error::Kind::Syntax, "xsd: global element without name");
        g.name = *name;
        if (const auto* s = n.attr("substitutionGroup")) g.substitutionGroup = *s;
        if (const auto* t = n.attr("type")) {
            g.typeName = *t;
        } else if (const auto* ct = n.child("complexType")) {
            g.typeName = anonTypeId(g.name, "");
            parseComplexType(g.typeName, true, *ct);
        } else if (const auto* st = n.child("simpleType")) {
            const auto* restr = st->child("restriction");
            g.typeName = restr && restr->attr("base") ? *restr->attr("base") : "xs:string";
        } else {
            g.typeName = "xs:anyType";
            model_.unsupported.push_back("element-without-type:" + g.name);
        }
        model_.globals.push_back(std::move(g));
    }

    void parseSimpleType(const XmlNode& n) {
        const auto* name = n.attr("name");
        if (!name) throw Error(Error::Kind::Syntax, "xsd: unnamed global simpleType");
        XsdSimpleType st;
        st.id = *name;
        if (const auto* restr = n.child("restriction")) {
            if (const auto* b = restr->attr("base")) st.base = *b;
            if (const auto* mi = restr->child("minInclusive"))
                if (const auto* v = mi->attr("value")) st.minInclusive = std::stod(*v);
            if (const auto* ma = restr->child("maxInclusive"))
                if (const auto* v = ma->attr("value")) st.maxInclusive = std::stod(*v);
        } else {
            model_.unsupported.push_back("simpleType-variant:" + st.id);
        }
        model_.simpleTypes[st.id] = std::move(st);
    }

    void parseParticles(const XmlNode& group, XsdComplexType& ct) {
        for (const auto* n : group.elements()) {
            const std::string k = n->localName();
            if (k == "element") {
                XsdElementUse use;
                use.occurs = occursOf(*n);
                if (const auto* ref = n->attr("ref")) {
                    use.viaRef = true;
                    use.name = *ref;
                } else if (const auto* name = n->attr("name")) {
                    use.name = *name;
                    if (const auto* t = n->attr("type")) {
                        use.typeName = *t;
                    } else if (const auto* inner = n->child("complexType")) {
                        use.typeName = anonTypeId(use.name, ct.id);
                        parseComplexType(use.typeName, true, *inner);
                    } else if (const auto* st = n->child("simpleType")) {
                        const auto* restr = st->child("restriction");
                        use.typeName =
                            restr && restr->attr("base") ? *restr->attr("base") : "xs:string";
                    } else {
                        use.typeName = "xs:anyType";
                    }
                } else {
                    throw Error(Error::Kind::Syntax, "xsd: element without name or ref");
                }
                ct.elements.push_back(std::move(use));
            } else if (k == "sequence" || k == "choice" || k == "all") {
                parseParticles(*n, ct); // nested groups flattened
            } else if (k == "annotation") {
                // ignore
            } else {
                model_.unsupported.push_back(k);
            }
        }
    }

    void parseConstraint(const XmlNode& n, XsdComplexType& ct) {
        XsdIdentityConstraint ic;
        ic.kind = n.localName();
        if (const auto* name = n.attr("name")) ic.name = *name;
        if (const auto* sel = n.child("selector"))
            if (const auto* xp = sel->attr("xpath")) ic.selector = *xp;
        for (const auto* f : n.children("field"))
            if (const auto* xp = f->attr("xpath")) ic.fields.push_back(*xp);
        ct.constraints.push_back(std::move(ic));
    }

    void parseComplexBody(const XmlNode& n, XsdComplexType& ct) {
        for (const auto* c : n.elements()) {
            const std::string k = c->localName();
            if (k == "sequence" || k == "choice" || k == "all") {
                ct.groupKind = k;
                parseParticles(*c, ct);
            } else if (k == "attribute") {
                XsdAttributeUse a;
                if (const auto* name = c->attr("name")) a.name = *name;
                if (const auto* t = c->attr("type")) a.typeName = *t;
                if (const auto* u = c->attr("use")) a.required = (*u == "required");
                if (a.typeName.empty()) a.typeName = "xs:string";
                ct.attributes.push_back(std::move(a));
            } else if (k == "complexContent") {
                if (const auto* ext = c->child("extension")) {
                    if (const auto* b = ext->attr("base")) ct.baseType = *b;
                    parseComplexBody(*ext, ct);
                } else if (const auto* restr = c->child("restriction")) {
                    if (const auto* b = restr->attr("base")) ct.baseType = *b;
                    parseComplexBody(*restr, ct);
                    model_.unsupported.push_back("complexContent-restriction:" + ct.id);
                }
            } else if (k == "key" || k == "unique" || k == "keyref") {
                parseConstraint(*c, ct);
            } else if (k == "annotation") {
                // ignore
            } else if (k == "simpleContent") {
                model_.unsupported.push_back("simpleContent:" + ct.id);
            } else if (k == "assert" || k == "alternative" || k == "override") {
                model_.unsupported.push_back(k + ":" + ct.id);
            } else {
                model_.unsupported.push_back(k);
            }
        }
    }

    void parseComplexType(const std::string& id, bool anonymous, const XmlNode& n) {
        XsdComplexType ct;
        ct.id = id;
        ct.anonymous = anonymous;
        parseComplexBody(n, ct);
        // identity constraints may sit on the enclosing element in real
        // schemas; accept them on the type for the subset
        model_.complexTypes[id] = std::move(ct);
    }

    void resolve() {
        for (auto& [id, ct] : model_.complexTypes) {
            if (!ct.baseType.empty() && !model_.complexTypes.count(ct.baseType))
                throw Error(Error::Kind::Mapping,
                            "xsd: extension base '" + ct.baseType + "' of " + id + " not defined");
            for (auto& use : ct.elements) {
                if (use.viaRef) {
                    const auto* g = model_.global(use.name);
                    if (!g)
                        throw Error(Error::Kind::Mapping,
                                    "xsd: dangling element ref '" + use.name + "' in " + id);
                    use.typeName = g->typeName;
                } else if (!isXsdBuiltin(use.typeName) && !model_.complexTypes.count(use.typeName) &&
                           !model_.simpleTypes.count(use.typeName) && use.typeName != "xs:anyType") {
                    throw Error(Error::Kind::Mapping,
                                "xsd: unknown type '" + use.typeName + "' for element " + use.name);
                }
            }
        }
        for (const auto& g : model_.globals) {
            if (!g.substitutionGroup.empty() && !model_.global(g.substitutionGroup))
                throw Error(Error::Kind::Mapping, "xsd: substitutionGroup head '" +
                                                      g.substitutionGroup + "' of " + g.name +
                                                      " not defined");
            if (!isXsdBuiltin(g.typeName) && !model_.complexTypes.count(g.typeName) &&
                !model_.simpleTypes.count(g.typeName))
                throw Error(Error::Kind::Mapping,
                            "xsd: unknown type '" + g.typeName + "' for global element " + g.name);
        }
    }
};

} // namespace

const XsdGlobalElement* XsdModel::global(const std::string& name) const {
    for (const auto& g : globals)
        if (g.name == name) return &g;
    return nullptr;
}

std::vector<XsdElementUse> XsdModel::contentOf(const std::string& typeName) const {
    std::vector<XsdElementUse> out;
    std::set<std::string> seen;
    std::vector<const XsdComplexType*> chain;
    std::string cur = typeName;
    while (!cur.empty() && seen.insert(cur).second) {
        auto it = complexTypes.find(cur);
        if (it == complexTypes.end()) break;
        chain.push_back(&it->second);
        cur = it->second.baseType;
    }
    for (auto it = chain.rbegin(); it != chain.rend(); ++it)
        out.insert(out.end(), (*it)->elements.begin(), (*it)->elements.end());
    return out;
}

std::vector<XsdAttributeUse> XsdModel::attributesOf(const std::string& typeName) const {
    std::vector<XsdAttributeUse> out;
    std::set<std::string> seen;
    std::vector<const XsdComplexType*> chain;
    std::string cur = typeName;
    while (!cur.empty() && seen.insert(cur).second) {
        auto it = complexTypes.find(cur);
        if (it == complexTypes.end()) break;
        chain.push_back(&it->second);
        cur = it->second.baseType;
    }
    for (auto it = chain.rbegin(); it != chain.rend(); ++it)
        out.insert(out.end(), (*it)->attributes.begin(), (*it)->attributes.end());
    return out;
}

std::vector<const XsdGlobalElement*> XsdModel::substitutionsFor(const std::string& headName) const {
    std::vector<const XsdGlobalElement*> out;
    for (const auto& g : globals)
        if (g.substitutionGroup == headName) out.push_back(&g);
    return out;
}

std::vector<const XsdGlobalElement*> XsdModel::documentRoots() const {
    std::set<std::string> referenced;
    for (const auto& [id, ct] : complexTypes)
        for (const auto& use : ct.elements)
            if (use.viaRef) referenced.insert(use.name);
    for (const auto& g : globals)
        if (!g.substitutionGroup.empty()) {
            referenced.insert(g.substitutionGroup);
            referenced.insert(g.name); // members surface at their head's sites
        }
    std::vector<const XsdGlobalElement*> out;
    for (const auto& g : globals)
        if (!referenced.count(g.name)) out.push_back(&g);
    if (out.empty())
        for (const auto& g : globals)
            if (isComplex(g.typeName)) out.push_back(&g);
    return out;
}

std::optional<XsdOccurs> XsdModel::occurrence(const XPath& path) const {
    const auto& steps = path.steps();
    if (steps.empty() || steps[0].wildcard) return std::nullopt;
    const XsdGlobalElement* root = global(steps[0].name);
    if (!root) return std::nullopt;
    if (steps.size() == 1) return XsdOccurs{1, 1};

    std::string curType = root->typeName;
    XsdOccurs occ{1, 1};
    for (size_t i = 1; i < steps.size(); i++) {
        const Step& st = steps[i];
        if (st.wildcard) return std::nullopt;
        if (st.axis == Step::Axis::Attribute) {
            for (const auto& a : attributesOf(curType))
                if (a.name == st.name) return XsdOccurs{a.required ? 1 : 0, 1};
            return std::nullopt;
        }
        bool found = false;
        for (const auto& use : contentOf(curType)) {
            if (use.name == st.name) {
                occ = use.occurs;
                curType = use.typeName;
                found = true;
                break;
            }
            for (const auto* sub : substitutionsFor(use.name)) {
                if (sub->name == st.name) {
                    occ = XsdOccurs{0, use.occurs.max}; // substitution slot, presence optional
                    curType = sub->typeName;
                    found = true;
                    break;
                }
            }
            if (found) break;
        }
        if (!found) return std::nullopt;
    }
    return occ;
}

XsdModel parseXsd(const XmlNode& schemaRoot) { return XsdParser().parse(schemaRoot); }

XsdModel parseXsdText(const std::string& bytes) { return parseXsd(parseXml(bytes)); }

} // namespace sxq

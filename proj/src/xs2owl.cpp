#include "sxq/xs2owl.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace sxq {

std::string typeIdentifier(const std::string& typeName) {
    std::string out = typeName;
    std::replace(out.begin(), out.end(), ':', '_');
    return out;
}

namespace {

std::string propertyId(const std::string& name, const std::string& typeName) {
    return name + "__" + typeIdentifier(typeName);
}

void addUnique(std::vector<std::string>& v, const std::string& s) {
    if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
}

} // namespace

std::string BackCompatSidecar::save() const {
    XmlNode root;
    root.name = "backCompat";
    for (const auto& n : names) {
        XmlNode r;
        r.name = "name";
        r.attrs = {{"id", n.ontologyId}, {"xml", n.xmlName}, {"construct", n.construct}};
        root.kids.push_back(std::move(r));
    }
    for (const auto& o : orders) {
        XmlNode r;
        r.name = "order";
        r.attrs = {{"type", o.typeId}, {"group", o.groupKind}};
        for (const auto& m : o.memberNames) {
            XmlNode k;
            k.name = "member";
            XmlNode t;
            t.text = m;
            k.kids.push_back(std::move(t));
            r.kids.push_back(std::move(k));
        }
        root.kids.push_back(std::move(r));
    }
    for (const auto& o : orphans) {
        XmlNode r;
        r.name = "orphan";
        XmlNode t;
        t.text = o;
        r.kids.push_back(std::move(t));
        root.kids.push_back(std::move(r));
    }
    return serializeXml(root);
}

TransformResult transformSchema(const XsdModel& xsd, const std::string& ontologyIri) {
    TransformResult out;
    OntologyModel& onto = out.ontology;
    BackCompatSidecar& side = out.sidecar;
    onto.iri = ontologyIri;

    // classes from complex types
    for (const auto& [id, ct] : xsd.complexTypes) {
        OntClass c;
        c.id = id;
        if (!ct.baseType.empty()) c.superClasses.push_back(ct.baseType);
        for (const auto& ic : ct.constraints) {
            if (ic.kind == "keyref") {
                side.orphans.push_back("keyref:" + ic.name);
                continue;
            }
            c.keys.push_back(ic.fields); // key/unique -> hasKey metadata
        }
        onto.classes[id] = std::move(c);
        side.names.push_back({id, ct.anonymous ? "(anonymous)" : id, "complexType"});
        if (!ct.groupKind.empty()) {
            BackCompatSidecar::OrderRecord rec{id, ct.groupKind, {}};
            for (const auto& use : ct.elements) rec.memberNames.push_back(use.name);
            side.orders.push_back(std::move(rec));
        }
    }

    // datatype definitions from named simple types
    for (const auto& [id, st] : xsd.simpleTypes) {
        DatatypeDef d{id, st.base, st.minInclusive, st.maxInclusive};
        onto.datatypes[id] = std::move(d);
        side.names.push_back({id, id, "simpleType"});
    }

    auto ensureProperty = [&](const std::string& name, const std::string& typeName,
                              const std::string& domainClass) -> OntProperty& {
        std::string id = propertyId(name, typeName);
        auto it = onto.properties.find(id);
        if (it == onto.properties.end()) {
            OntProperty p;
            p.id = id;
            p.object = xsd.isComplex(typeName);
            if (p.object)
                p.rangeClasses.push_back(typeIdentifier(typeName));
            else
                p.rangeDatatype = typeName;
            it = onto.properties.emplace(id, std::move(p)).first;
            side.names.push_back({id, name, "element"});
        }
        if (!domainClass.empty()) addUnique(it->second.domains, domainClass);
        return it->second;
    };

    // element/attribute uses inside complex types become properties with the
    // enclosing class as domain (inherited content contributes no new domain)
    for (const auto& [id, ct] : xsd.complexTypes) {
        for (const auto& use : ct.elements) ensureProperty(use.name, use.typeName, id);
        for (const auto& attr : ct.attributes) {
            std::string pid = propertyId(attr.name, attr.typeName);
            auto it = onto.properties.find(pid);
            if (it == onto.properties.end()) {
                OntProperty p;
                p.id = pid;
                p.object = false;
                p.rangeDatatype = attr.typeName;
                it = onto.properties.emplace(pid, std::move(p)).first;
                side.names.push_back({pid, attr.name, "attribute"});
            }
            addUnique(it->second.domains, id);
        }
    }

    // global elements: roots carry owl:Thing as domain; substitution members
    // inherit the head's domains and become subproperties
    for (const auto& g : xsd.globals) {
        OntProperty& p = ensureProperty(g.name, g.typeName, "");
        if (!g.substitutionGroup.empty()) {
            const auto* head = xsd.global(g.substitutionGroup);
            addUnique(p.superProperties, propertyId(head->name, head->typeName));
        }
    }
    for (const auto& g : xsd.globals) {
        OntProperty& p = onto.properties.at(propertyId(g.name, g.typeName));
        if (!g.substitutionGroup.empty()) {
            const auto* head = xsd.global(g.substitutionGroup);
            const auto& headProp = onto.properties.at(propertyId(head->name, head->typeName));
            for (const auto& d : headProp.domains) addUnique(p.domains, d);
        }
        if (p.domains.empty()) p.domains.push_back("owl:Thing");
    }

    for (const auto& u : xsd.unsupported) side.orphans.push_back(u);
    return out;
}

namespace {

struct PathWalker {
    const XsdModel& xsd;
    int cap;
    MappingCatalog& cat;
    const OntologyModel& onto;
    std::map<std::string, PathSet> classPaths;
    std::map<std::string, MappingCatalog::PropertySets> propPaths;

    void recordProperty(const std::string& id, const XPath& whole, const XPath& domain) {
        auto& sets = propPaths[id];
        sets.whole.add(whole);
        sets.domain.add(domain);
        sets.range.add(whole);
    }

    void walkType(const XPath& at, const std::string& typeName,
                  std::map<std::string, int>& depth) {
        if (!xsd.isComplex(typeName)) return;
        int& d = depth[typeName];
        if (d >= cap) return;
        d++;
        classPaths[typeIdentifier(typeName)].add(at);
        for (const auto& attr : xsd.attributesOf(typeName)) {
            Step st;
            st.axis = Step::Axis::Attribute;
            st.name = attr.name;
            XPath ap = at.concat(XPath({st}));
            recordProperty(propertyId(attr.name, attr.typeName), ap, at);
        }
        for (const auto& use : xsd.contentOf(typeName)) {
            visitElement(at, use.name, use.typeName, depth);
            for (const auto* sub : xsd.substitutionsFor(use.name))
                visitElement(at, sub->name, sub->typeName, depth);
        }
        d--;
    }

    void visitElement(const XPath& at, const std::string& name, const std::string& typeName,
                      std::map<std::string, int>& depth) {
        Step st;
        st.name = name;
        XPath ep = at.concat(XPath({st}));
        recordProperty(propertyId(name, typeName), ep, at);
        walkType(ep, typeName, depth);
    }

    void run() {
        for (const auto* root : xsd.documentRoots()) {
            Step st;
            st.name = root->name;
            XPath rp{{st}};
            recordProperty(propertyId(root->name, root->typeName), rp, rp); // own path as domain
            std::map<std::string, int> depth;
            walkType(rp, root->typeName, depth);
        }
        for (auto& [id, set] : classPaths) cat.setClass(id, std::move(set));
        for (auto& [id, sets] : propPaths) {
            if (!onto.isProperty(id))
                throw Error(Error::Kind::Mapping, "generated id '" + id + "' absent from ontology");
            cat.setProperty(onto.isObjectProperty(id) ? ConstructKind::ObjectProperty
                                                      : ConstructKind::DatatypeProperty,
                            id, std::move(sets));
        }
    }
};

} // namespace

MappingCatalog generateMappings(const XsdModel& xsd, const OntologyModel& onto, int recursionCap) {
    MappingCatalog cat;
    cat.ontologyIri = onto.iri;
    PathWalker w{xsd, recursionCap, cat, onto, {}, {}};
    w.run();
    return cat;
}

std::string renderOntology(const OntologyModel& onto) {
    std::string out;
    for (const auto& [id, c] : onto.classes) {
        out += "class " + id;
        out += " subClassOf ";
        if (c.superClasses.empty())
            out += "owl:Thing";
        else
            for (size_t i = 0; i < c.superClasses.size(); i++)
                out += (i ? ", " : "") + c.superClasses[i];
        for (const auto& key : c.keys) {
            out += " hasKey(";
            for (size_t i = 0; i < key.size(); i++) out += (i ? ", " : "") + key[i];
            out += ")";
        }
        out += "\n";
    }
    for (const auto& [id, p] : onto.properties) {
        out += std::string(p.object ? "objectProperty " : "datatypeProperty ") + id;
        if (!p.superProperties.empty()) {
            out += " subPropertyOf ";
            for (size_t i = 0; i < p.superProperties.size(); i++)
                out += (i ? ", " : "") + p.superProperties[i];
        }
        out += " domain ";
        for (size_t i = 0; i < p.domains.size(); i++) out += (i ? ", " : "") + p.domains[i];
        out += " range ";
        if (p.object)
            for (size_t i = 0; i < p.rangeClasses.size(); i++)
                out += (i ? ", " : "") + p.rangeClasses[i];
        else
            out += p.rangeDatatype;
        out += "\n";
    }
    for (const auto& [id, d] : onto.datatypes) {
        out += "datatype " + id + " restrictionOf " + d.base;
        if (d.minInclusive) out += " minInclusive " + std::to_string(*d.minInclusive);
        if (d.maxInclusive) out += " maxInclusive " + std::to_string(*d.maxInclusive);
        out += "\n";
    }
    return out;
}

} // namespace sxq

#include "sxq/mapping.hpp"

#include <algorithm>

#include "sxq/xml.hpp"

namespace sxq {

XmlSideExpr XmlSideExpr::leaf(std::string construct) {
    XmlSideExpr e;
    e.kind = Kind::Construct;
    e.construct = std::move(construct);
    return e;
}

XmlSideExpr XmlSideExpr::conj(XmlSideExpr a, XmlSideExpr b) {
    XmlSideExpr e;
    e.kind = Kind::And;
    e.lhs = std::make_unique<XmlSideExpr>(std::move(a));
    e.rhs = std::make_unique<XmlSideExpr>(std::move(b));
    return e;
}

XmlSideExpr XmlSideExpr::disj(XmlSideExpr a, XmlSideExpr b) {
    XmlSideExpr e;
    e.kind = Kind::Or;
    e.lhs = std::make_unique<XmlSideExpr>(std::move(a));
    e.rhs = std::make_unique<XmlSideExpr>(std::move(b));
    return e;
}

XmlSideExpr XmlSideExpr::withCondition(std::string anchor, std::string predicate) && {
    conditions.push_back({std::move(anchor), std::move(predicate)});
    return std::move(*this);
}

namespace {

XPath attachPredicate(const XPath& p, const std::string& anchor, const std::string& predicate) {
    std::vector<Step> steps = p.steps();
    size_t at = steps.size(); // default: last step
    if (!anchor.empty()) {
        bool found = false;
        for (size_t i = steps.size(); i > 0; i--) {
            if (steps[i - 1].name == anchor) {
                at = i;
                found = true;
                break;
            }
        }
        if (!found)
            throw Error(Error::Kind::Mapping,
                        "condition anchor '" + anchor + "' not on path " + p.text());
    }
    Predicate pr;
    pr.alts.push_back(predicate);
    steps[at - 1].preds.push_back(std::move(pr));
    return XPath(std::move(steps));
}

PathSet resolveNode(const XmlSideExpr& e,
                    const std::function<PathSet(const std::string&)>& cxps,
                    std::vector<const XmlSideExpr::Condition*> conds) {
    for (const auto& c : e.conditions) conds.push_back(&c);
    switch (e.kind) {
    case XmlSideExpr::Kind::Construct: {
        PathSet base = cxps(e.construct);
        PathSet out;
        for (const auto& p : base) {
            XPath q = p;
            for (const auto* c : conds) q = attachPredicate(q, c->anchor, c->predicate);
            out.add(std::move(q));
        }
        return out;
    }
    case XmlSideExpr::Kind::And:
        return setIntersection(resolveNode(*e.lhs, cxps, conds), resolveNode(*e.rhs, cxps, conds));
    case XmlSideExpr::Kind::Or:
        return setUnion(resolveNode(*e.lhs, cxps, conds), resolveNode(*e.rhs, cxps, conds));
    }
    throw Error(Error::Kind::Internal, "unreachable");
}

} // namespace

PathSet resolveXmlSide(const XmlSideExpr& expr,
                       const std::function<PathSet(const std::string&)>& cxps) {
    return resolveNode(expr, cxps, {});
}

void MappingCatalog::setClass(const std::string& id, PathSet paths) {
    classes_[id] = std::move(paths);
}

void MappingCatalog::setProperty(ConstructKind kind, const std::string& id, PropertySets sets) {
    if (kind == ConstructKind::Class)
        throw Error(Error::Kind::Internal, "class entries have no facets");
    (kind == ConstructKind::DatatypeProperty ? dtProps_ : objProps_)[id] = std::move(sets);
}

bool MappingCatalog::hasConstruct(ConstructKind kind, const std::string& id) const {
    switch (kind) {
    case ConstructKind::Class: return classes_.count(id) > 0;
    case ConstructKind::DatatypeProperty: return dtProps_.count(id) > 0;
    case ConstructKind::ObjectProperty: return objProps_.count(id) > 0;
    }
    return false;
}

const PathSet& MappingCatalog::lookup(const ConstructRef& ref) const {
    return lookup(ref.kind, ref.id, ref.facet);
}

const PathSet& MappingCatalog::lookup(ConstructKind kind, const std::string& id,
                                      Facet facet) const {
    static const PathSet kEmpty;
    if (kind == ConstructKind::Class) {
        auto it = classes_.find(id);
        return it == classes_.end() ? kEmpty : it->second;
    }
    const auto& m = kind == ConstructKind::DatatypeProperty ? dtProps_ : objProps_;
    auto it = m.find(id);
    if (it == m.end()) return kEmpty;
    switch (facet) {
    case Facet::Whole: return it->second.whole;
    case Facet::Domain: return it->second.domain;
    case Facet::Range: return it->second.range;
    }
    return kEmpty;
}

std::vector<std::string> MappingCatalog::classIds() const {
    std::vector<std::string> out;
    for (const auto& [id, _] : classes_) out.push_back(id);
    return out;
}

std::vector<std::string> MappingCatalog::propertyIds(ConstructKind kind) const {
    std::vector<std::string> out;
    const auto& m = kind == ConstructKind::DatatypeProperty ? dtProps_ : objProps_;
    for (const auto& [id, _] : m) out.push_back(id);
    return out;
}

MappingCatalog::PropertySets MappingCatalog::allPropertySets(bool datatype, bool object) const {
    PropertySets acc;
    auto fold = [&](const std::map<std::string, PropertySets>& m) {
        for (const auto& [id, sets] : m) {
            acc.whole = setUnion(acc.whole, sets.whole);
            acc.domain = setUnion(acc.domain, sets.domain);
            acc.range = setUnion(acc.range, sets.range);
        }
    };
    if (datatype) fold(dtProps_);
    if (object) fold(objProps_);
    return acc;
}

namespace {

XmlNode pathsNode(const std::string& tag, const PathSet& set) {
    XmlNode n;
    n.name = tag;
    for (const auto& p : set) {
        XmlNode xp;
        xp.name = "xpath";
        XmlNode t;
        t.text = p.text();
        xp.kids.push_back(std::move(t));
        n.kids.push_back(std::move(xp));
    }
    return n;
}

PathSet readPaths(const XmlNode& n) {
    PathSet out;
    for (const auto* xp : n.children("xpath")) out.add(XPath::parse(xp->content()));
    return out;
}

} // namespace

std::string MappingCatalog::save() const {
    XmlNode root;
    root.name = "mappings";
    root.attrs.emplace_back("ontology", ontologyIri);
    for (const auto& [id, set] : classes_) {
        XmlNode c = pathsNode("class", set);
        c.attrs.emplace_back("id", id);
        root.kids.push_back(std::move(c));
    }
    auto emit = [&](const std::map<std::string, PropertySets>& m, const char* tag) {
        for (const auto& [id, sets] : m) {
            XmlNode p = pathsNode(tag, sets.whole);
            p.attrs.emplace_back("id", id);
            p.kids.push_back(pathsNode("domain", sets.domain));
            p.kids.push_back(pathsNode("range", sets.range));
            root.kids.push_back(std::move(p));
        }
    };
    emit(objProps_, "objectProperty");
    emit(dtProps_, "datatypeProperty");
    return serializeXml(root);
}

MappingCatalog MappingCatalog::load(const std::string& bytes) {
    XmlNode root = parseXml(bytes);
    if (root.name != "mappings")
        throw Error(Error::Kind::Syntax, "mapping file: expected <mappings> root");
    MappingCatalog cat;
    if (const auto* o = root.attr("ontology")) cat.ontologyIri = *o;
    for (const auto* el : root.elements()) {
        const auto* id = el->attr("id");
        if (!id) throw Error(Error::Kind::Syntax, "mapping file: <" + el->name + "> missing id");
        if (el->name == "class") {
            if (cat.classes_.count(*id))
                throw Error(Error::Kind::Syntax, "mapping file: duplicate class " + *id);
            cat.classes_[*id] = readPaths(*el);
        } else if (el->name == "objectProperty" || el->name == "datatypeProperty") {
            auto& m = el->name == "objectProperty" ? cat.objProps_ : cat.dtProps_;
            if (m.count(*id))
                throw Error(Error::Kind::Syntax, "mapping file: duplicate property " + *id);
            PropertySets sets;
            sets.whole = readPaths(*el);
            const auto* dom = el->child("domain");
            const auto* rng = el->child("range");
            if (!dom) throw Error(Error::Kind::Syntax, "mapping file: " + *id + " missing domain");
            if (!rng) throw Error(Error::Kind::Syntax, "mapping file: " + *id + " missing range");
            sets.domain = readPaths(*dom);
            sets.range = readPaths(*rng);
            for (const auto& p : sets.whole) {
                bool anchored = false;
                for (const auto& d : sets.domain)
                    if (d.isPrefixOf(p)) { anchored = true; break; }
                if (!anchored)
                    throw Error(Error::Kind::Syntax, "mapping file: " + *id + " path " + p.text() +
                                                         " not under any domain path");
            }
            m[*id] = std::move(sets);
        } else {
            throw Error(Error::Kind::Syntax, "mapping file: unknown element <" + el->name + ">");
        }
    }
    return cat;
}

} // namespace sxq

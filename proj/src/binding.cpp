#include "sxq/binding.hpp"

#include <algorithm>

namespace sxq {

PathSet parentPaths(const PathSet& set) {
    PathSet out;
    for (const auto& p : set)
        if (p.length() >= 2) out.add(p.parent());
    return out;
}

namespace {

ConstructKind kindOfPredicate(const Term& p, const MappingCatalog& cat) {
    std::string local = iriLocalName(p.value);
    if (cat.hasConstruct(ConstructKind::ObjectProperty, local))
        return ConstructKind::ObjectProperty;
    return ConstructKind::DatatypeProperty; // unmapped ids fall through to empty sets
}

} // namespace

const PathSet& predicateDomains(const Term& p, const MappingCatalog& cat) {
    return cat.lookup(kindOfPredicate(p, cat), iriLocalName(p.value), Facet::Domain);
}

const PathSet& predicateRanges(const Term& p, const MappingCatalog& cat) {
    return cat.lookup(kindOfPredicate(p, cat), iriLocalName(p.value), Facet::Range);
}

const PathSet& predicateWholes(const Term& p, const MappingCatalog& cat) {
    return cat.lookup(kindOfPredicate(p, cat), iriLocalName(p.value), Facet::Whole);
}

namespace {

Binding asTheta(const Binding& b) {
    return b.isND() ? Binding::theta() : b;
}

bool sameBinding(const Binding& a, const Binding& b) {
    if (a.isTheta() || b.isTheta()) return a.isTheta() && b.isTheta();
    if (a.isND() || b.isND()) return a.isND() && b.isND();
    return a.paths().setEquals(b.paths());
}

class Engine {
public:
    Engine(const std::vector<TriplePattern>& triples, const SchemaBindings& schema,
           const VarTypeMap& varTypes, const MappingCatalog& cat)
        : triples_(triples), varTypes_(varTypes), cat_(cat) {
        for (const auto& t : triples_)
            for (const Term* term : {&t.s, &t.p, &t.o})
                if (term->varLike() && !state_.count(term->value)) {
                    auto it = schema.paths.find(term->value);
                    state_[term->value] =
                        it == schema.paths.end() ? Binding::theta() : it->second;
                }
    }

    BindingResult run(size_t cap, std::vector<std::map<std::string, Binding>>* trace) {
        BindingResult out;
        for (;;) {
            auto before = state_;
            pass();
            ++out.iterations;
            if (trace) trace->push_back(state_);
            bool stable = true;
            for (const auto& [v, b] : state_)
                if (!sameBinding(b, before.at(v))) stable = false;
            if (stable) break;
            if (out.iterations >= static_cast<int>(cap))
                throw Error(Error::Kind::Internal, "variable binding did not stabilize");
        }
        out.vars = std::move(state_);
        for (const auto& [v, b] : out.vars)
            if (b.isSet() && b.paths().empty()) out.satisfiable = false;
        return out;
    }

private:
    // union of the path sets of all mapped classes (the X_S1 fallback)
    const Binding& allClassPaths() {
        if (!classFold_) {
            PathSet fold;
            for (const auto& id : cat_.classIds())
                fold = setUnion(fold, cat_.lookup(ConstructKind::Class, id));
            classFold_ = Binding::of(std::move(fold));
        }
        return *classFold_;
    }

    Binding propertySeed(const std::string& predVar) {
        bool dt = true, obj = true;
        switch (varTypes_.of(predVar)) {
            case VarType::DTPVT: obj = false; break;
            case VarType::OPVT: dt = false; break;
            default: break;
        }
        return Binding::of(cat_.allPropertySets(dt, obj).whole);
    }

    Binding valueOf(const Term& t) const {
        if (!t.varLike()) return Binding::theta(); // ground parts constrain nothing
        return state_.at(t.value);
    }

    // X_pD of the triple under the current state: catalog domains for IRI
    // predicates, parent paths of the current predicate binding otherwise.
    Binding domainsOf(const TriplePattern& t) const {
        if (t.p.isIri()) return Binding::of(predicateDomains(t.p, cat_));
        Binding cur = state_.at(t.p.value);
        if (cur.isTheta() || cur.isND()) return Binding::theta();
        return Binding::of(parentPaths(cur.paths()));
    }

    void pass() {
        for (const auto& t : triples_) {
            bool pVar = t.p.varLike();
            bool oVar = t.o.varLike();

            if (t.s.varLike()) {
                Binding xs = asTheta(valueOf(t.s));
                Binding xpd = asTheta(domainsOf(t));
                Binding xo = asTheta(valueOf(t.o));
                Binding next;
                if (!pVar && !oVar) {
                    next = setIntersection(xs, xpd); // Type 1
                } else if (!pVar) {
                    next = commonAncestors(setIntersection(xs, xpd), xo); // Type 2
                } else if (!oVar) {
                    next = xs.isTheta() && xpd.isTheta() ? allClassPaths()
                                                         : setIntersection(xs, xpd); // Type 3
                } else {
                    next = xs.isTheta() && xpd.isTheta() && xo.isTheta()
                               ? allClassPaths()
                               : commonAncestors(setIntersection(xpd, xs), xo); // Type 4
                }
                state_[t.s.value] = std::move(next);
            }

            if (pVar) {
                Binding seed = state_.at(t.p.value);
                if (seed.isTheta() || seed.isND()) seed = propertySeed(t.p.value);
                state_[t.p.value] = descendants(asTheta(valueOf(t.s)), seed);
            }

            if (oVar) {
                // literal-valued and variable-predicate objects stay outside
                // the path space; structural objects extend the subject paths
                if (varTypes_.of(t.o.value) == VarType::LVT || pVar) {
                    state_[t.o.value] = Binding::nonDeterminable();
                } else {
                    Binding xr = Binding::of(predicateRanges(t.p, cat_));
                    Binding xo = asTheta(valueOf(t.o));
                    state_[t.o.value] =
                        descendants(asTheta(valueOf(t.s)), setIntersection(xo, xr));
                }
            }
        }
    }

    const std::vector<TriplePattern>& triples_;
    const VarTypeMap& varTypes_;
    const MappingCatalog& cat_;
    std::map<std::string, Binding> state_;
    std::optional<Binding> classFold_;
};

} // namespace

BindingResult bindVariables(const GraphPattern& bgp, const SchemaBindings& schema,
                            const VarTypeMap& varTypes, const MappingCatalog& cat,
                            std::vector<std::map<std::string, Binding>>* trace) {
    if (!bgp.isBgp())
        throw Error(Error::Kind::Internal, "bindVariables expects a BGP leaf");
    std::vector<TriplePattern> data;
    for (const auto& t : bgp.triples)
        if (!isSchemaTriple(t)) data.push_back(t);

    if (data.empty()) {
        BindingResult out;
        out.iterations = 1;
        return out;
    }

    Engine engine(data, schema, varTypes, cat);
    size_t vars = 0;
    {
        std::vector<std::string> names;
        for (const auto& t : data)
            for (const Term* term : {&t.s, &t.p, &t.o})
                if (term->varLike() &&
                    std::find(names.begin(), names.end(), term->value) == names.end())
                    names.push_back(term->value);
        vars = names.size();
    }
    return engine.run(vars * data.size() + 2, trace);
}

} // namespace sxq

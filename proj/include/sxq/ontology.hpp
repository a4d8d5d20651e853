#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sxq {

// Schema-level model shared by the schema transformer, the query frontend
// (schema-triple evaluation) and the oracle. Identifiers are local ids; the
// namespace IRI is kept once.
struct OntClass {
    std::string id;
    std::vector<std::string> superClasses; // "owl:Thing" never listed
    std::vector<std::vector<std::string>> keys; // property-id tuples from key/unique
};

struct OntProperty {
    std::string id;
    bool object = false;
    std::vector<std::string> domains;      // class ids; "owl:Thing" for global roots
    std::string rangeDatatype;             // datatype properties: e.g. "xs:string"
    std::vector<std::string> rangeClasses; // object properties
    std::vector<std::string> superProperties;
};

struct DatatypeDef {
    std::string id;
    std::string base; // e.g. "xs:float"
    std::optional<double> minInclusive, maxInclusive;
};

class OntologyModel {
public:
    std::string iri; // ontology namespace, e.g. "http://www.music.tuc.gr/ontologies/persons#"

    std::map<std::string, OntClass> classes;
    std::map<std::string, OntProperty> properties;
    std::map<std::string, DatatypeDef> datatypes;

    bool isClass(const std::string& id) const { return classes.count(id) > 0; }
    bool isProperty(const std::string& id) const { return properties.count(id) > 0; }
    bool isDatatypeProperty(const std::string& id) const {
        auto it = properties.find(id);
        return it != properties.end() && !it->second.object;
    }
    bool isObjectProperty(const std::string& id) const {
        auto it = properties.find(id);
        return it != properties.end() && it->second.object;
    }

    // Direct subclasses of `id` ("simple entailment": no transitivity unless asked).
    std::vector<std::string> subClassesOf(const std::string& id, bool transitive) const {
        return subsOf(id, transitive, true);
    }
    std::vector<std::string> subPropertiesOf(const std::string& id, bool transitive) const {
        return subsOf(id, transitive, false);
    }

    bool hasSubClass(const std::string& sub, const std::string& super) const {
        auto it = classes.find(sub);
        if (it == classes.end()) return false;
        const auto& s = it->second.superClasses;
        return std::find(s.begin(), s.end(), super) != s.end();
    }

private:
    std::vector<std::string> subsOf(const std::string& id, bool transitive, bool cls) const {
        std::vector<std::string> out;
        std::set<std::string> seen;
        std::vector<std::string> frontier{id};
        while (!frontier.empty()) {
            std::vector<std::string> next;
            if (cls) {
                for (const auto& [cid, c] : classes)
                    for (const auto& sup : c.superClasses)
                        for (const auto& f : frontier)
                            if (sup == f && seen.insert(cid).second) {
                                out.push_back(cid);
                                next.push_back(cid);
                            }
            } else {
                for (const auto& [pid, p] : properties)
                    for (const auto& sup : p.superProperties)
                        for (const auto& f : frontier)
                            if (sup == f && seen.insert(pid).second) {
                                out.push_back(pid);
                                next.push_back(pid);
                            }
            }
            if (!transitive) break;
            frontier = std::move(next);
        }
        std::sort(out.begin(), out.end());
        return out;
    }
};

} // namespace sxq

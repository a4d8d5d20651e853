#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "persons_fixture.hpp"
#include "sxq/xs2owl.hpp"

using namespace sxq;
using namespace sxq::testutil;

static PathSet ps(std::initializer_list<const char*> l) { return PathSet(l); }

TEST_CASE("schema parse: construct counts and resolution") {
    const XsdModel& m = personsXsd();
    CHECK(m.complexTypes.size() == 3); // two named + one anonymous
    CHECK(m.complexTypes.count("NS_Persons_UNType") == 1);
    CHECK(m.globals.size() == 3);
    CHECK(m.simpleTypes.size() == 1);
    CHECK(m.substitutionsFor("LastName").size() == 1);

    auto roots = m.documentRoots();
    REQUIRE(roots.size() == 1);
    CHECK(roots[0]->name == "Persons");

    // inherited content: base particles precede the extension's own
    auto student = m.contentOf("Student_Type");
    REQUIRE(student.size() == 5);
    CHECK(student[0].name == "LastName");
    CHECK(student[4].name == "Dept");
    CHECK(m.attributesOf("Student_Type").size() == 1);

    CHECK(parseXsdText("<xs:schema xmlns:xs=\"x\"/>").globals.empty());
    CHECK_THROWS_AS(parseXsdText("<xs:schema xmlns:xs=\"x\"><xs:complexType name=\"T\">"
                                 "<xs:sequence><xs:element ref=\"Gone\"/></xs:sequence>"
                                 "</xs:complexType></xs:schema>"),
                    Error);
}

TEST_CASE("occurrence bounds resolved through types and substitutions") {
    const XsdModel& m = personsXsd();
    auto age = m.occurrence(XPath::parse("/Persons/Student/Age"));
    REQUIRE(age);
    CHECK(age->min == 1);
    CHECK(age->max == 1);
    auto last = m.occurrence(XPath::parse("/Persons/Person/LastName"));
    REQUIRE(last);
    CHECK(last->max == -1);
    auto ssn = m.occurrence(XPath::parse("/Persons/Person/@SSN"));
    REQUIRE(ssn);
    CHECK(ssn->min == 0);
    CHECK(ssn->max == 1);
    auto nach = m.occurrence(XPath::parse("/Persons/Student/Nachname"));
    REQUIRE(nach);
    CHECK(nach->min == 0);
    CHECK_FALSE(m.occurrence(XPath::parse("/Persons/Unknown")));
}

TEST_CASE("class table: ids and superclasses") {
    const OntologyModel& o = personsOntology();
    REQUIRE(o.classes.size() == 3);
    CHECK(o.classes.at("Person_Type").superClasses.empty()); // owl:Thing implied
    REQUIRE(o.classes.at("Student_Type").superClasses.size() == 1);
    CHECK(o.classes.at("Student_Type").superClasses[0] == "Person_Type");
    CHECK(o.classes.at("NS_Persons_UNType").superClasses.empty());
}

TEST_CASE("property table: ids, kinds, domains, ranges, hierarchy links") {
    const OntologyModel& o = personsOntology();
    REQUIRE(o.properties.size() == 10);

    auto dtp = [&](const char* id) -> const OntProperty& {
        REQUIRE_MESSAGE(o.isDatatypeProperty(id), id);
        return o.properties.at(id);
    };
    auto op = [&](const char* id) -> const OntProperty& {
        REQUIRE_MESSAGE(o.isObjectProperty(id), id);
        return o.properties.at(id);
    };

    CHECK(dtp("LastName__xs_string").domains == std::vector<std::string>{"Person_Type"});
    CHECK(dtp("LastName__xs_string").rangeDatatype == "xs:string");
    CHECK(dtp("FirstName__xs_string").domains == std::vector<std::string>{"Person_Type"});
    CHECK(dtp("Age__validAgeType").domains == std::vector<std::string>{"Person_Type"});
    CHECK(dtp("Age__validAgeType").rangeDatatype == "validAgeType");
    CHECK(dtp("Nachname__xs_string").superProperties ==
          std::vector<std::string>{"LastName__xs_string"});
    CHECK(dtp("Nachname__xs_string").domains == std::vector<std::string>{"Person_Type"});
    CHECK(dtp("Email__xs_string").domains == std::vector<std::string>{"Person_Type"});
    CHECK(dtp("SSN__xs_integer").domains == std::vector<std::string>{"Person_Type"});
    CHECK(dtp("SSN__xs_integer").rangeDatatype == "xs:integer");
    CHECK(dtp("Dept__xs_string").domains == std::vector<std::string>{"Student_Type"});

    CHECK(op("Person__Person_Type").domains == std::vector<std::string>{"NS_Persons_UNType"});
    CHECK(op("Person__Person_Type").rangeClasses == std::vector<std::string>{"Person_Type"});
    CHECK(op("Student__Student_Type").domains == std::vector<std::string>{"NS_Persons_UNType"});
    CHECK(op("Student__Student_Type").rangeClasses == std::vector<std::string>{"Student_Type"});
    CHECK(op("Persons__NS_Persons_UNType").domains == std::vector<std::string>{"owl:Thing"});
    CHECK(op("Persons__NS_Persons_UNType").rangeClasses ==
          std::vector<std::string>{"NS_Persons_UNType"});

    // restricted simple type became a datatype definition
    REQUIRE(o.datatypes.count("validAgeType") == 1);
    CHECK(o.datatypes.at("validAgeType").base == "xs:float");
    CHECK(*o.datatypes.at("validAgeType").minInclusive == doctest::Approx(0.0));
    CHECK(*o.datatypes.at("validAgeType").maxInclusive == doctest::Approx(150.0));

    // id uniqueness across construct kinds
    std::set<std::string> ids;
    for (const auto& [id, _] : o.classes) CHECK(ids.insert(id).second);
    for (const auto& [id, _] : o.properties) CHECK(ids.insert(id).second);
    for (const auto& [id, _] : o.datatypes) CHECK(ids.insert(id).second);
}

TEST_CASE("sidecar records names; keyref and unknown constructs are orphans") {
    const BackCompatSidecar& side = personsTransform().sidecar;
    std::set<std::string> recorded;
    for (const auto& n : side.names) recorded.insert(n.ontologyId);
    const OntologyModel& o = personsOntology();
    for (const auto& [id, _] : o.classes) CHECK(recorded.count(id) == 1);
    for (const auto& [id, _] : o.properties) CHECK(recorded.count(id) == 1);
    CHECK_FALSE(side.orders.empty());

    auto withKeyref = parseXsdText(
        "<xs:schema xmlns:xs=\"x\"><xs:complexType name=\"T\">"
        "<xs:sequence><xs:element name=\"e\" type=\"xs:string\"/></xs:sequence>"
        "<xs:keyref name=\"kr\" refer=\"k\"><xs:selector xpath=\".//e\"/>"
        "<xs:field xpath=\"@id\"/></xs:keyref></xs:complexType></xs:schema>");
    auto t = transformSchema(withKeyref);
    CHECK(t.ontology.classes.size() == 1);
    CHECK(t.ontology.classes.at("T").keys.empty());
    REQUIRE(t.sidecar.orphans.size() == 1);
    CHECK(t.sidecar.orphans[0].rfind("keyref:", 0) == 0);

    auto withKey = parseXsdText(
        "<xs:schema xmlns:xs=\"x\"><xs:complexType name=\"T\">"
        "<xs:sequence><xs:element name=\"e\" type=\"xs:string\"/></xs:sequence>"
        "<xs:key name=\"k\"><xs:selector xpath=\".//e\"/><xs:field xpath=\"e\"/></xs:key>"
        "</xs:complexType></xs:schema>");
    CHECK(transformSchema(withKey).ontology.classes.at("T").keys.size() == 1);

    auto minimal = transformSchema(parseXsdText(
        "<xs:schema xmlns:xs=\"x\"><xs:complexType name=\"Empty\"/></xs:schema>"));
    CHECK(minimal.ontology.classes.size() == 1);
    CHECK(minimal.ontology.properties.empty());
}

TEST_CASE("generated mappings reproduce the full catalog listing") {
    const MappingCatalog& cat = personsCatalog();

    CHECK(cat.lookup(ConstructKind::Class, "Person_Type").setEquals(ps({"/Persons/Person"})));
    CHECK(cat.lookup(ConstructKind::Class, "Student_Type").setEquals(ps({"/Persons/Student"})));
    CHECK(cat.lookup(ConstructKind::Class, "NS_Persons_UNType").setEquals(ps({"/Persons"})));
    CHECK(cat.classIds().size() == 3);

    struct Row {
        ConstructKind kind;
        const char* id;
        std::initializer_list<const char*> whole, domain, range;
    };
    const Row rows[] = {
        {ConstructKind::ObjectProperty, "Persons__NS_Persons_UNType",
         {"/Persons"}, {"/Persons"}, {"/Persons"}},
        {ConstructKind::ObjectProperty, "Person__Person_Type",
         {"/Persons/Person"}, {"/Persons"}, {"/Persons/Person"}},
        {ConstructKind::ObjectProperty, "Student__Student_Type",
         {"/Persons/Student"}, {"/Persons"}, {"/Persons/Student"}},
        {ConstructKind::DatatypeProperty, "FirstName__xs_string",
         {"/Persons/Person/FirstName", "/Persons/Student/FirstName"},
         {"/Persons/Person", "/Persons/Student"},
         {"/Persons/Person/FirstName", "/Persons/Student/FirstName"}},
        {ConstructKind::DatatypeProperty, "LastName__xs_string",
         {"/Persons/Person/LastName", "/Persons/Student/LastName"},
         {"/Persons/Person", "/Persons/Student"},
         {"/Persons/Person/LastName", "/Persons/Student/LastName"}},
        // the catalog listing prints this id with an integer range; the class
        // table and the schema give validAgeType, encoded here
        {ConstructKind::DatatypeProperty, "Age__validAgeType",
         {"/Persons/Person/Age", "/Persons/Student/Age"},
         {"/Persons/Person", "/Persons/Student"},
         {"/Persons/Person/Age", "/Persons/Student/Age"}},
        {ConstructKind::DatatypeProperty, "Email__xs_string",
         {"/Persons/Person/Email", "/Persons/Student/Email"},
         {"/Persons/Person", "/Persons/Student"},
         {"/Persons/Person/Email", "/Persons/Student/Email"}},
        {ConstructKind::DatatypeProperty, "Nachname__xs_string",
         {"/Persons/Person/Nachname", "/Persons/Student/Nachname"},
         {"/Persons/Person", "/Persons/Student"},
         {"/Persons/Person/Nachname", "/Persons/Student/Nachname"}},
        {ConstructKind::DatatypeProperty, "SSN__xs_integer",
         {"/Persons/Person/@SSN", "/Persons/Student/@SSN"},
         {"/Persons/Person", "/Persons/Student"},
         {"/Persons/Person/@SSN", "/Persons/Student/@SSN"}},
        {ConstructKind::DatatypeProperty, "Dept__xs_string",
         {"/Persons/Student/Dept"}, {"/Persons/Student"}, {"/Persons/Student/Dept"}},
    };
    for (const auto& row : rows) {
        CAPTURE(row.id);
        CHECK(cat.lookup(row.kind, row.id).setEquals(PathSet(row.whole)));
        CHECK(cat.lookup(row.kind, row.id, Facet::Domain).setEquals(PathSet(row.domain)));
        CHECK(cat.lookup(row.kind, row.id, Facet::Range).setEquals(PathSet(row.range)));
    }
    CHECK(cat.propertyIds(ConstructKind::DatatypeProperty).size() == 7);
    CHECK(cat.propertyIds(ConstructKind::ObjectProperty).size() == 3);

    // range paths extend domain paths for every property
    for (auto kind : {ConstructKind::DatatypeProperty, ConstructKind::ObjectProperty})
        for (const auto& id : cat.propertyIds(kind))
            for (const auto& r : cat.lookup(kind, id, Facet::Range)) {
                bool anchored = false;
                for (const auto& d : cat.lookup(kind, id, Facet::Domain))
                    if (d.isPrefixOf(r)) { anchored = true; break; }
                CHECK_MESSAGE(anchored, id, " range ", r.text());
            }

    // catalog round-trips through the file format
    auto back = MappingCatalog::load(cat.save());
    CHECK(back.save() == cat.save());
}

TEST_CASE("union-folded datatype sets give the unknown-predicate seed") {
    const MappingCatalog& cat = personsCatalog();
    auto dt = cat.allPropertySets(true, false);
    CHECK(dt.whole.setEquals(ps({
        "/Persons/Person/FirstName", "/Persons/Student/FirstName",
        "/Persons/Person/LastName", "/Persons/Student/LastName",
        "/Persons/Person/Age", "/Persons/Student/Age",
        "/Persons/Person/Email", "/Persons/Student/Email",
        "/Persons/Person/Nachname", "/Persons/Student/Nachname",
        "/Persons/Person/@SSN", "/Persons/Student/@SSN",
        "/Persons/Student/Dept",
    })));
    auto op = cat.allPropertySets(false, true);
    CHECK(op.whole.setEquals(ps({"/Persons", "/Persons/Person", "/Persons/Student"})));
}

TEST_CASE("ontology listing renders one construct per line") {
    std::string listing = renderOntology(personsOntology());
    CHECK(listing.find("class Student_Type subClassOf Person_Type") != std::string::npos);
    CHECK(listing.find("datatypeProperty Nachname__xs_string subPropertyOf LastName__xs_string") !=
          std::string::npos);
    CHECK(listing.find("objectProperty Persons__NS_Persons_UNType domain owl:Thing") !=
          std::string::npos);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sxq/mapping.hpp"

using namespace sxq;

static PathSet ps(std::initializer_list<const char*> l) { return PathSet(l); }

// Construct sets for the person/student running example.
static PathSet cxpsPersons(const std::string& construct) {
    if (construct == "Person.LastName") return ps({"/Persons/Person/LastName"});
    if (construct == "Person.Nachname") return ps({"/Persons/Person/Nachname"});
    if (construct == "Student.Course.ID") return ps({"/Persons/Student/Courses/ID"});
    if (construct == "Student") return ps({"/Persons/Student"});
    throw Error(Error::Kind::Mapping, "unknown construct " + construct);
}

static const char* kE1 =
    "./Age > 18 and ./firstName = ./Lastname and ends-with(./email, \"gmail.com\")";
static const char* kE3 =
    "./Dept = \"CS\" and ends-with(./email, \"mit.edu\") and ./Courses/Grade >= 5.0";

TEST_CASE("condition distribution over a disjunction, worked example 11") {
    auto expr = XmlSideExpr::disj(XmlSideExpr::leaf("Person.LastName"),
                                  XmlSideExpr::leaf("Person.Nachname"))
                    .withCondition("Person", kE1);
    PathSet r = resolveXmlSide(expr, cxpsPersons);
    PathSet expect;
    expect.add(XPath::parse(std::string("/Persons/Person[") + kE1 + "]/LastName"));
    expect.add(XPath::parse(std::string("/Persons/Person[") + kE1 + "]/Nachname"));
    CHECK(r.setEquals(expect));

    // distribution law: (w or z)<ce> resolves like w<ce> union z<ce>
    auto left = XmlSideExpr::leaf("Person.LastName").withCondition("Person", kE1);
    auto right = XmlSideExpr::leaf("Person.Nachname").withCondition("Person", kE1);
    CHECK(r.setEquals(setUnion(resolveXmlSide(left, cxpsPersons),
                               resolveXmlSide(right, cxpsPersons))));
}

TEST_CASE("condition anchored below the leaf, worked example 11 second mapping") {
    auto expr = XmlSideExpr::leaf("Student.Course.ID").withCondition("Student", kE3);
    PathSet r = resolveXmlSide(expr, cxpsPersons);
    CHECK(r.size() == 1);
    CHECK(r.paths()[0].text() ==
          std::string("/Persons/Student[") + kE3 + "]/Courses/ID");
    CHECK(r.paths()[0].length() == 4);
}

TEST_CASE("single construct with no conditions passes through") {
    auto expr = XmlSideExpr::leaf("Student");
    CHECK(resolveXmlSide(expr, cxpsPersons).setEquals(ps({"/Persons/Student"})));
}

TEST_CASE("unresolved construct and missing anchor are errors") {
    CHECK_THROWS_AS(resolveXmlSide(XmlSideExpr::leaf("Nope"), cxpsPersons), Error);
    auto bad = XmlSideExpr::leaf("Person.LastName").withCondition("Course", "1=1");
    CHECK_THROWS_AS(resolveXmlSide(bad, cxpsPersons), Error);
}

static MappingCatalog smallCatalog() {
    MappingCatalog cat;
    cat.ontologyIri = "http://example.org/onto#";
    cat.setClass("Person_Type", ps({"/Persons/Person"}));
    cat.setClass("Student_Type", ps({"/Persons/Student"}));
    MappingCatalog::PropertySets dept;
    dept.whole = ps({"/Persons/Student/Dept"});
    dept.domain = ps({"/Persons/Student"});
    dept.range = ps({"/Persons/Student/Dept"});
    cat.setProperty(ConstructKind::DatatypeProperty, "Dept__xs_string", dept);
    MappingCatalog::PropertySets person;
    person.whole = ps({"/Persons/Person"});
    person.domain = ps({"/Persons"});
    person.range = ps({"/Persons/Person"});
    cat.setProperty(ConstructKind::ObjectProperty, "Person__Person_Type", person);
    return cat;
}

TEST_CASE("catalog lookups; unmapped constructs are empty, not errors") {
    auto cat = smallCatalog();
    CHECK(cat.lookup(ConstructKind::Class, "Person_Type").setEquals(ps({"/Persons/Person"})));
    CHECK(cat.lookup(ConstructKind::DatatypeProperty, "Dept__xs_string", Facet::Domain)
              .setEquals(ps({"/Persons/Student"})));
    CHECK(cat.lookup(ConstructKind::Class, "NoSuchClass").empty());
    CHECK(cat.lookup(ConstructKind::DatatypeProperty, "Missing", Facet::Range).empty());
}

TEST_CASE("union-folded property sets per kind") {
    auto cat = smallCatalog();
    auto dt = cat.allPropertySets(true, false);
    CHECK(dt.whole.setEquals(ps({"/Persons/Student/Dept"})));
    auto none = cat.allPropertySets(false, false);
    CHECK(none.whole.empty());
    CHECK(none.domain.empty());
    CHECK(none.range.empty());
    auto op = cat.allPropertySets(false, true);
    CHECK(op.whole.setEquals(ps({"/Persons/Person"})));
}

TEST_CASE("catalog file round-trip") {
    auto cat = smallCatalog();
    std::string bytes = cat.save();
    auto back = MappingCatalog::load(bytes);
    CHECK(back.ontologyIri == cat.ontologyIri);
    CHECK(back.classIds() == cat.classIds());
    for (const auto& id : cat.classIds())
        CHECK(back.lookup(ConstructKind::Class, id).setEquals(cat.lookup(ConstructKind::Class, id)));
    for (auto kind : {ConstructKind::DatatypeProperty, ConstructKind::ObjectProperty})
        for (const auto& id : cat.propertyIds(kind))
            for (auto f : {Facet::Whole, Facet::Domain, Facet::Range})
                CHECK(back.lookup(kind, id, f).setEquals(cat.lookup(kind, id, f)));
    CHECK(back.save() == bytes);

    MappingCatalog empty;
    CHECK(MappingCatalog::load(empty.save()).classIds().empty());
}

TEST_CASE("catalog load rejects malformed documents") {
    CHECK_THROWS_AS(MappingCatalog::load("<wrong/>"), Error);
    CHECK_THROWS_AS(MappingCatalog::load("<mappings><class id=\"A\"/><class id=\"A\"/></mappings>"),
                    Error);
    // property without a range block
    CHECK_THROWS_AS(MappingCatalog::load("<mappings><datatypeProperty id=\"p\">"
                                         "<xpath>/a/b</xpath><domain><xpath>/a</xpath></domain>"
                                         "</datatypeProperty></mappings>"),
                    Error);
    // property path not under any domain path
    CHECK_THROWS_AS(MappingCatalog::load("<mappings><datatypeProperty id=\"p\">"
                                         "<xpath>/x/y</xpath><domain><xpath>/a</xpath></domain>"
                                         "<range><xpath>/x/y</xpath></range>"
                                         "</datatypeProperty></mappings>"),
                    Error);
}

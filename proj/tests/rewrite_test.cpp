#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sxq/finalize.hpp"
#include "sxq/rewrite.hpp"
#include "persons_fixture.hpp"

using namespace sxq;
using sxq::testutil::personsCatalog;
using sxq::testutil::personsOntology;
using sxq::testutil::personsXsd;

namespace {

const char* kUri = "http://www.music.tuc.gr/...";

const char* kPersonsQuery = R"(
PREFIX ns: <http://example.com/ns#>
PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#>
PREFIX rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#>
SELECT ?SSN ?lname ?email
WHERE { { ?studCl rdfs:subClassOf ns:Person_Type .
         ?stud rdf:type ?studCl .
         ?stud ns:SSN__xs_integer ?SSN .
         ?stud ns:FirstName__xs_string "John" .
         ?stud ns:LastName__xs_string ?lname .
         ?stud ns:Age__validAgeType ?age .
         FILTER ( regex( ?lname, "^B" ) && ?age>25 ) }
        OPTIONAL { ?stud ns:Email__xs_string ?email }
}ORDER BY ASC ( ?lname ) DESC( ?SSN )
LIMIT 30 OFFSET 5
)";

const char* kBgp1Query = R"(
PREFIX ns: <http://example.com/ns#>
PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#>
PREFIX rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#>
SELECT ?SSN ?lname ?email
WHERE { ?studCl rdfs:subClassOf ns:Person_Type .
        ?stud rdf:type ?studCl .
        ?stud ns:SSN__xs_integer ?SSN .
        ?stud ns:FirstName__xs_string "John" .
        ?stud ns:LastName__xs_string ?lname .
        ?stud ns:Age__validAgeType ?age .
        FILTER ( regex( ?lname, "^B" ) && ?age>25 ) }
)";

TranslateOptions opts() {
    TranslateOptions o;
    o.docUri = kUri;
    return o;
}

CardinalityOracle oracle() { return CardinalityOracle(&personsXsd()); }

OuterRoots docRoot() { return {{"doc", {XPath()}}}; }

std::vector<std::string> toks(const XExpr& e) { return xqueryTokens(renderExpr(e)); }
std::vector<std::string> toks(const std::string& s) { return xqueryTokens(s); }

bool containsSeq(const std::vector<std::string>& hay,
                 const std::vector<std::string>& needle) {
    if (needle.empty()) return true;
    for (size_t i = 0; i + needle.size() <= hay.size(); ++i) {
        bool all = true;
        for (size_t j = 0; j < needle.size(); ++j)
            if (hay[i + j] != needle[j]) { all = false; break; }
        if (all) return true;
    }
    return false;
}

XExpr studentsPath() { return xVarPath("doc", XPath::parse("/Persons/Student"), 0); }

} // namespace

TEST_CASE("cardinality oracle reads the schema bounds") {
    auto o = oracle();
    std::vector<XPath> stud{XPath::parse("/Persons/Student")};
    auto steps = [](const char* rel) {
        std::vector<XqStep> out;
        appendSteps(out, XPath::parse(rel), 0);
        return out;
    };
    CHECK(o.of(stud, steps("/Age")) == Cardinality::ExactlyOne);
    CHECK(o.of(stud, steps("/Dept")) == Cardinality::ExactlyOne);
    CHECK(o.of(stud, steps("/LastName")) == Cardinality::Many);
    CHECK(o.of(stud, steps("/Email")) == Cardinality::Many);
    CHECK(o.of(stud, steps("/@SSN")) == Cardinality::AtMostOne);
    // substitutes into LastName's unbounded slot
    CHECK(o.of(stud, steps("/Nachname")) == Cardinality::Many);
    CHECK(o.of(stud, steps("/Course")) == Cardinality::Unknown);
    CHECK(o.of({XPath()}, steps("/Persons/Student")) == Cardinality::Many);
    // worst case across a union of bases
    std::vector<XPath> both{XPath::parse("/Persons/Person"),
                            XPath::parse("/Persons/Student")};
    CHECK(o.of(both, steps("/Age")) == Cardinality::ExactlyOne);
    CHECK(CardinalityOracle().of(stud, steps("/Age")) == Cardinality::Unknown);
}

TEST_CASE("rule 1 turns single-valued for clauses into lets") {
    XExpr in = xFlwor({xFor("stud", studentsPath()),
                       xFor("age", xVarPath("stud", XPath::parse("/Age"), 0)),
                       xWhere(xCall("exists", {xVar("age")}))},
                      {xCall("string", {xVar("age")})});
    auto out = rule1ForToLet(in, oracle(), docRoot());
    CHECK(containsSeq(toks(out), toks(R"(
        for $stud in $doc/Persons/Student
        let $age := $stud/Age
        where ( exists($age) )
        return ( string($age) ))")));
}

TEST_CASE("rule 1 converts optional attributes without a guard") {
    XExpr in = xFlwor({xFor("stud", studentsPath()),
                       xFor("SSN", xVarPath("stud", XPath::parse("/@SSN"), 0))},
                      {xVar("SSN")});
    auto out = rule1ForToLet(in, oracle(), docRoot());
    CHECK(containsSeq(toks(out), toks("let $SSN := $stud/@SSN")));
}

TEST_CASE("rule 1 leaves many-valued and unknown paths alone") {
    XExpr in = xFlwor({xFor("stud", studentsPath()),
                       xFor("n", xVarPath("stud", XPath::parse("/LastName"), 0)),
                       xFor("c", xVarPath("stud", XPath::parse("/Course"), 0)),
                       xFor("d", xVarPath("stud", XPath::parse("/Dept"), 0)),
                       xWhere(xCall("exists", {xVar("d")}))},
                      {xVar("n")});
    auto out = rule1ForToLet(in, oracle(), docRoot());
    auto t = toks(out);
    CHECK(containsSeq(t, toks("for $n in $stud/LastName")));
    CHECK(containsSeq(t, toks("for $c in $stud/Course")));
    CHECK(containsSeq(t, toks("let $d := $stud/Dept")));
}

TEST_CASE("rule 1 derives the context through earlier clauses") {
    // a predicate on the defining path makes the context optional but keeps it
    // resolvable; Age then only converts because of its assurance guard
    XExpr guarded =
        xFlwor({xFor("stud", studentsPath()),
                xFor("age", xVarPath("stud", XPath::parse("/Age[. > 25]"), 0)),
                xWhere(xCall("exists", {xVar("age")}))},
               {xVar("age")});
    auto out = rule1ForToLet(guarded, oracle(), docRoot());
    CHECK(containsSeq(toks(out), toks("let $age := $stud/Age[. > 25]")));

    XExpr unguarded =
        xFlwor({xFor("stud", studentsPath()),
                xFor("age", xVarPath("stud", XPath::parse("/Age[. > 25]"), 0))},
               {xVar("age")});
    auto kept = rule1ForToLet(unguarded, oracle(), docRoot());
    CHECK(containsSeq(toks(kept), toks("for $age in $stud/Age[. > 25]")));
}

TEST_CASE("rule 2 inlines lets used once as a path prefix") {
    XExpr in = xFlwor({xFor("stud", studentsPath()),
                       xLet("course", xVarPath("stud", XPath::parse("/Course"), 0)),
                       xFor("grade", xVarPath("course", XPath::parse("/Grade"), 0))},
                      {xCall("string", {xVar("grade")})});
    auto out = rule2ReduceLet(in);
    CHECK(containsSeq(toks(out), toks(R"(
        for $stud in $doc/Persons/Student
        for $grade in $stud/Course/Grade
        return ( string($grade) ))")));
}

TEST_CASE("rule 2 pushes sole existence guards into predicates") {
    XExpr in = xFlwor({xFor("stud", studentsPath()),
                       xLet("age", xVarPath("stud", XPath::parse("/age"), 0)),
                       xWhere(xCall("exists", {xVar("age")}))},
                      {xCall("string", {xVar("stud")})});
    auto out = rule2ReduceLet(in);
    CHECK(containsSeq(toks(out), toks(R"(
        for $stud in $doc/Persons/Student[./age]
        return ( string($stud) ))")));
    CHECK(!containsSeq(toks(out), toks("where")));
}

TEST_CASE("rule 2 keeps multi-use lets") {
    XExpr in = xFlwor({xFor("stud", studentsPath()),
                       xLet("n", xVarPath("stud", XPath::parse("/LastName"), 0))},
                      {xCall("string", {xVar("n")}), xCall("count", {xVar("n")})});
    auto out = rule2ReduceLet(in);
    CHECK(containsSeq(toks(out), toks("let $n := $stud/LastName")));
}

TEST_CASE("rule 2 inlines document roots but keeps the binding") {
    XExpr in = xFlwor({xLet("doc", xCollection(kUri)),
                       xFor("stud", studentsPath())},
                      {xVar("stud")});
    auto out = rule2ReduceLet(in);
    CHECK(containsSeq(toks(out), toks(R"(
        let $doc := collection("http://www.music.tuc.gr/...")
        for $stud in collection("http://www.music.tuc.gr/...")/Persons/Student)")));
}

TEST_CASE("rule 3 unnests a for over an otherwise unused for") {
    XExpr in = xFlwor({xFor("stud", studentsPath()),
                       xFor("name", xVarPath("stud", XPath::parse("/name"), 0))},
                      {xCall("string", {xVar("name")})});
    auto out = rule3UnnestFor(in);
    CHECK(containsSeq(toks(out), toks(R"(
        for $name in $doc/Persons/Student/name
        return ( string($name) ))")));
}

TEST_CASE("rule 3 leaves the outer variable alone when it is still used") {
    XExpr in = xFlwor({xFor("stud", studentsPath()),
                       xFor("name", xVarPath("stud", XPath::parse("/name"), 0))},
                      {xVar("stud")});
    auto out = rule3UnnestFor(in);
    CHECK(containsSeq(toks(out), toks("for $stud in $doc/Persons/Student")));
    CHECK(containsSeq(toks(out), toks("for $name in $stud/name")));
}

TEST_CASE("rule 3 collapses chains iteratively") {
    XExpr in = xFlwor({xFor("a", studentsPath()),
                       xFor("b", xVarPath("a", XPath::parse("/x"), 0)),
                       xFor("c", xVarPath("b", XPath::parse("/y"), 0))},
                      {xVar("c")});
    auto out = rule3UnnestFor(in);
    CHECK(containsSeq(toks(out), toks(R"(
        for $c in $doc/Persons/Student/x/y
        return ( $c ))")));
}

TEST_CASE("the mandatory fragment rewrites to its final form") {
    auto q = parseSparql(kBgp1Query);
    auto gp = translateGraphPattern(q, personsCatalog(), personsOntology(), opts());
    auto rw = rewriteExpr(gp.fragment, oracle(), docRoot());
    CHECK(toks(rw) == toks(R"(
        for $stud in $doc/Persons/Student[./FirstName = "John"][Age[. > 25]]
        for $lname in $stud/LastName[matches(. , "^B")]
        return ( <Result><SSN>{ string($stud/@SSN) }</SSN> ,
                 <lname>{ string($lname) }</lname></Result> ))"));
}

TEST_CASE("the full program rewrite matches the worked result") {
    auto q = parseSparql(kPersonsQuery);
    auto gp = translateGraphPattern(q, personsCatalog(), personsOntology(), opts());
    auto prog = finalizeQuery(q, gp, opts());
    auto rw = rewrite(prog, oracle());
    auto t = toks(renderXQuery(rw));
    CHECK(containsSeq(t, toks(R"(
        let $doc := collection("http://www.music.tuc.gr/...")
        let $Modified_Results :=(
          let $Results :=(
            for $stud in collection("http://www.music.tuc.gr/...")
                /Persons/Student[./FirstName = "John"][Age[. > 25]]
            for $lname in $stud/LastName[matches(. , "^B")]
            let $BGP_2 :=(
              for $email in $stud/Email
              return ( <Result><email>{ string($email) }</email></Result> )
            ))")));
    CHECK(containsSeq(t, toks("string($stud/@SSN)")));
    CHECK(!containsSeq(t, toks("$SSN :=")));
    CHECK(!containsSeq(t, toks("where")));
}

TEST_CASE("rewriting is idempotent on the worked programs") {
    auto q = parseSparql(kPersonsQuery);
    auto gp = translateGraphPattern(q, personsCatalog(), personsOntology(), opts());
    auto prog = finalizeQuery(q, gp, opts());
    auto once = rewrite(prog, oracle());
    auto twice = rewrite(once, oracle());
    CHECK(renderXQuery(once) == renderXQuery(twice));

    auto frag = translateGraphPattern(parseSparql(kBgp1Query), personsCatalog(),
                                      personsOntology(), opts());
    auto f1 = rewriteExpr(frag.fragment, oracle(), docRoot());
    auto f2 = rewriteExpr(f1, oracle(), docRoot());
    CHECK(renderExpr(f1) == renderExpr(f2));
}

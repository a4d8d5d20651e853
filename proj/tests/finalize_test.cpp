#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sxq/finalize.hpp"
#include "persons_fixture.hpp"

using namespace sxq;
using sxq::testutil::personsCatalog;
using sxq::testutil::personsOntology;

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

TranslateOptions opts() {
    TranslateOptions o;
    o.docUri = kUri;
    return o;
}

std::string finalizeText(const std::string& text) {
    auto q = parseSparql(text);
    auto gp = translateGraphPattern(q, personsCatalog(), personsOntology(), opts());
    return renderXQuery(finalizeQuery(q, gp, opts()));
}

std::string updateText(const std::string& text) {
    auto u = parseSparqlUpdate(text);
    return renderXQuery(translateUpdate(u, personsCatalog(), personsOntology(), opts()));
}

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

} // namespace

TEST_CASE("select queries nest the modifier lets inside returns") {
    auto t = toks(finalizeText(kPersonsQuery));
    CHECK(containsSeq(t, toks(R"(
        let $doc := collection("http://www.music.tuc.gr/...")
        let $Modified_Results :=(
          let $Results :=(
            for $stud in $doc/Persons/Student[./FirstName = "John"])")));
    // modifier chain: order-by then position window, each let inside the
    // previous return
    CHECK(containsSeq(t, toks(R"(
        return ( let $Ordered_Results :=(
          for $iter in $Results
          order by $iter/lname empty least , $iter/SSN descending empty least
          return($iter) )
          return ($Ordered_Results[position()>5 and position()<=35]) )
        )
        return ( <Results>{ $Modified_Results }</Results> ))")));
}

TEST_CASE("queries without modifiers pass the results straight through") {
    auto t = toks(finalizeText(R"(
        PREFIX ns: <http://example.com/ns#>
        SELECT ?fn WHERE { ?p ns:FirstName__xs_string ?fn })"));
    CHECK(containsSeq(t, toks(R"(
        let $Modified_Results :=(
          let $Results :=(
            for $p in $doc/Persons/Person union $doc/Persons/Student
            for $fn in $p/FirstName
            return ( <Result><fn>{ string($fn) }</fn></Result> )
          )
          return ( $Results )
        )
        return ( <Results>{ $Modified_Results }</Results> ))")));
}

TEST_CASE("distinct adds a keep-first dedup pass") {
    auto t = toks(finalizeText(R"(
        PREFIX ns: <http://example.com/ns#>
        SELECT DISTINCT ?fn WHERE { ?p ns:FirstName__xs_string ?fn })"));
    CHECK(containsSeq(t, toks(R"(
        return ( let $Distinct_Results :=(
          for $iter at $i in $Results
          where ( empty($Results[position() < $i][deep-equal(. , $iter)]) )
          return ( $iter )
        )
        return ( $Distinct_Results ) ))")));
}

TEST_CASE("limit without offset windows from the start") {
    auto t = toks(finalizeText(R"(
        PREFIX ns: <http://example.com/ns#>
        SELECT ?fn WHERE { ?p ns:FirstName__xs_string ?fn } LIMIT 10)"));
    CHECK(containsSeq(t, toks("return ( $Results[position() <= 10] )")));
}

TEST_CASE("ask queries answer yes or no") {
    auto t = toks(finalizeText(R"(
        PREFIX ns: <http://example.com/ns#>
        ASK { ?p ns:FirstName__xs_string "John" })"));
    CHECK(containsSeq(t, toks(R"(
        let $doc := collection("http://www.music.tuc.gr/..."))")));
    CHECK(containsSeq(t, toks(R"(
        return ( if ( empty($Results) ) then ( "no" ) else ( "yes" ) ))")));
    // no modifier pipeline for ASK
    CHECK(!containsSeq(t, toks("$Modified_Results")));
}

TEST_CASE("construct serializes guarded triples per result row") {
    auto t = toks(finalizeText(R"(
        PREFIX ns: <http://example.com/ns#>
        CONSTRUCT { ?p ns:hasName ?fn . _:card ns:of ?p }
        WHERE { ?p ns:FirstName__xs_string ?fn })"));
    CHECK(containsSeq(t, toks("declare function local:civt($n) external;")));
    CHECK(containsSeq(t, toks("for $res at $iter in $Modified_Results")));
    CHECK(containsSeq(t, toks(R"(
        if ( exists($res/p) and exists($res/fn) )
        then ( concat(string($res/p) , " " , "http://example.com/ns#hasName" , " " ,
                      string($res/fn) , " .") )
        else ( () ))")));
    // template blanks become per-row fresh labels and need no guard
    CHECK(containsSeq(t, toks(R"(concat(concat("_:_b1_" , $iter) , " " ,
                                        "http://example.com/ns#of" , " " ,
                                        string($res/p) , " ."))")));
}

TEST_CASE("helper functions are declared on demand") {
    GpTranslation gp;
    gp.fragment = xSeq({});
    gp.usesCompatible = true;
    gp.usesMerge = true;
    SparqlQuery q;
    q.form = SparqlQuery::Form::Ask;
    auto t = toks(renderXQuery(finalizeQuery(q, gp, opts())));
    CHECK(containsSeq(t, toks(R"(
        declare function local:compatible($a, $b) {
          every $x in $a/* satisfies ( every $y in
            $b/*[local-name(.) = local-name($x)]
            satisfies ( string($y) = string($x) ) )
        };)")));
    CHECK(containsSeq(t, toks(R"(
        declare function local:merge($a, $b) {
          <Result>{ $a/* } , { $b/*[not(local-name(.) = local-name($a/*))] }</Result>
        };)")));
}

TEST_CASE("update requests parse into the three kinds") {
    auto d = parseSparqlUpdate(R"(
        PREFIX ns: <http://example.com/ns#>
        DELETE DATA { <http://www.music.tuc.gr/...#/Persons/Person[1]>
                      ns:FirstName__xs_string "John" })");
    CHECK(d.kind == UpdateRequest::Kind::DeleteData);
    REQUIRE(d.deleteTriples.size() == 1);
    CHECK(d.deleteTriples[0].s.isIri());
    CHECK(d.deleteTriples[0].o.isLiteral());

    auto i = parseSparqlUpdate(R"(
        PREFIX ns: <http://example.com/ns#>
        INSERT DATA { <http://ex/n1> a ns:Student_Type ;
                      ns:Dept__xs_string "CS" })");
    CHECK(i.kind == UpdateRequest::Kind::InsertData);
    CHECK(i.insertTriples.size() == 2);

    auto m = parseSparqlUpdate(R"(
        PREFIX ns: <http://example.com/ns#>
        DELETE { ?s ns:Age__validAgeType ?a }
        INSERT { ?s ns:Age__validAgeType "30" }
        WHERE { ?s ns:Age__validAgeType ?a })");
    CHECK(m.kind == UpdateRequest::Kind::Modify);
    CHECK(m.deleteTriples.size() == 1);
    CHECK(m.insertTriples.size() == 1);
    CHECK(m.where.isBgp());

    auto w = parseSparqlUpdate(R"(
        PREFIX ns: <http://example.com/ns#>
        DELETE WHERE { ?s ns:Age__validAgeType ?a })");
    CHECK(w.kind == UpdateRequest::Kind::Modify);
    CHECK(w.deleteTriples.size() == 1);
    CHECK(w.insertTriples.empty());
}

TEST_CASE("update parsing rejects what the translation cannot honor") {
    auto kindOf = [](const char* text) {
        try {
            parseSparqlUpdate(text);
        } catch (const Error& e) {
            return e.kind();
        }
        return Error::Kind::Internal;
    };
    CHECK(kindOf(R"(PREFIX ns: <http://example.com/ns#>
                    INSERT DATA { ?x ns:p "v" })") == Error::Kind::Syntax);
    CHECK(kindOf(R"(PREFIX ns: <http://example.com/ns#>
                    INSERT DATA { _:n ns:p "v" })") == Error::Kind::Syntax);
    CHECK(kindOf(R"(WITH <http://ex/g>
                    DELETE { ?s ?p ?o } WHERE { ?s ?p ?o })") ==
          Error::Kind::Unsupported);
    CHECK(kindOf("CREATE GRAPH <http://ex/g>") == Error::Kind::Unsupported);
    CHECK(kindOf("DROP GRAPH <http://ex/g>") == Error::Kind::Unsupported);
    CHECK(kindOf(R"(PREFIX ns: <http://example.com/ns#>
                    DELETE { ?s ns:p ?o }
                    USING <http://ex/g>
                    WHERE { ?s ns:p ?o })") == Error::Kind::Unsupported);
    CHECK(kindOf(R"(PREFIX ns: <http://example.com/ns#>
                    DELETE DATA { <http://ex/i> ns:p "a" } ;
                    DELETE DATA { <http://ex/i> ns:p "b" })") ==
          Error::Kind::Unsupported);
}

TEST_CASE("delete data removes value nodes and whole instances") {
    auto t = toks(updateText(R"(
        PREFIX ns: <http://example.com/ns#>
        PREFIX rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#>
        DELETE DATA {
          <http://www.music.tuc.gr/...#/Persons/Person[1]>
              ns:FirstName__xs_string "John" .
          <http://www.music.tuc.gr/...#/Persons/Person[1]> ns:SSN__xs_integer 100 .
          <http://www.music.tuc.gr/...#/Persons/Student[2]> rdf:type ns:Student_Type .
        })"));
    CHECK(containsSeq(t, toks(R"(
        delete nodes collection("http://www.music.tuc.gr/...")
            /Persons/Person[1]/FirstName[. = "John"])")));
    CHECK(containsSeq(t, toks(R"(
        delete nodes collection("http://www.music.tuc.gr/...")
            /Persons/Person[1]/@SSN[. = 100])")));
    CHECK(containsSeq(t, toks(R"(
        delete nodes collection("http://www.music.tuc.gr/...")/Persons/Student[2])")));
}

TEST_CASE("insert data builds new instances and property nodes") {
    auto t = toks(updateText(R"(
        PREFIX ns: <http://example.com/ns#>
        PREFIX rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#>
        INSERT DATA {
          <http://ex/new1> rdf:type ns:Student_Type ;
                           ns:FirstName__xs_string "Mary" ;
                           ns:Dept__xs_string "CS" .
          <http://www.music.tuc.gr/...#/Persons/Student[1]>
              ns:Email__xs_string "a@b.c" .
        })"));
    CHECK(containsSeq(t, toks(R"(
        let $n1 := <Student><FirstName>{ "Mary" }</FirstName> ,
                            <Dept>{ "CS" }</Dept></Student>
        let $data1 := ( $n1 )
        let $insert_location1 := collection("http://www.music.tuc.gr/...")/Persons)")));
    CHECK(containsSeq(t, toks(R"(
        let $n2 := <Email>{ "a@b.c" }</Email>
        let $data2 := ( $n2 )
        let $insert_location2 :=
            collection("http://www.music.tuc.gr/...")/Persons/Student[1])")));
    CHECK(containsSeq(t, toks(R"(
        return ( insert nodes $data1 into $insert_location1 ,
                 insert nodes $data2 into $insert_location2 ))")));
}

TEST_CASE("modify reuses the where translation for deletes and inserts") {
    auto t = toks(updateText(R"(
        PREFIX ns: <http://example.com/ns#>
        PREFIX rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#>
        DELETE { ?stud ns:Age__validAgeType ?age }
        INSERT { ?stud ns:Age__validAgeType "30" }
        WHERE { ?stud rdf:type ns:Student_Type .
                ?stud ns:Age__validAgeType ?age .
                FILTER ( ?age > 60 ) })"));
    CHECK(containsSeq(t, toks(R"(
        let $doc := collection("http://www.music.tuc.gr/...")
        let $where_gp :=(
          for $stud in $doc/Persons/Student
          for $age in $stud/Age[. > 60]
          return ( $age )
        )
        let $delete_gp := $where_gp)")));
    CHECK(containsSeq(t, toks("delete nodes $delete_gp")));
    CHECK(containsSeq(t, toks(R"(
        for $stud in $doc/Persons/Student
        for $age in $stud/Age[. > 60]
        return ( insert nodes <Age>{ "30" }</Age> into $stud ))")));
}

TEST_CASE("delete where removes the matched instances") {
    auto t = toks(updateText(R"(
        PREFIX ns: <http://example.com/ns#>
        PREFIX rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#>
        DELETE WHERE { ?p rdf:type ns:Person_Type .
                       ?p ns:FirstName__xs_string "John" })"));
    CHECK(containsSeq(t, toks(R"(
        let $where_gp :=(
          for $p in $doc/Persons/Person[./FirstName = "John"]
          return ( $p )
        )
        let $delete_gp := $where_gp
        return ( delete nodes $delete_gp ))")));
}

TEST_CASE("updates that cannot be mapped surface structured errors") {
    auto kindOf = [](const char* text) {
        try {
            updateText(text);
        } catch (const Error& e) {
            return e.kind();
        }
        return Error::Kind::Internal;
    };
    // subject IRI without an instance fragment
    CHECK(kindOf(R"(PREFIX ns: <http://example.com/ns#>
                    DELETE DATA { <http://ex/someone> ns:FirstName__xs_string "J" })") ==
          Error::Kind::Mapping);
    // object properties cannot be rewritten as value nodes
    CHECK(kindOf(R"(PREFIX ns: <http://example.com/ns#>
                    DELETE DATA { <http://www.music.tuc.gr/...#/Persons/Person[1]>
                                  ns:knows <http://ex/other> })") ==
          Error::Kind::Unsupported);
    // unknown class name
    CHECK(kindOf(R"(PREFIX ns: <http://example.com/ns#>
                    PREFIX rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#>
                    INSERT DATA { <http://ex/n> rdf:type ns:Course_Type })") ==
          Error::Kind::Mapping);
    // attributes cannot be inserted as child nodes
    CHECK(kindOf(R"(PREFIX ns: <http://example.com/ns#>
                    INSERT DATA { <http://www.music.tuc.gr/...#/Persons/Person[1]>
                                  ns:SSN__xs_integer 7 })") ==
          Error::Kind::Unsupported);
    // unmapped property
    CHECK(kindOf(R"(PREFIX ns: <http://example.com/ns#>
                    DELETE DATA { <http://www.music.tuc.gr/...#/Persons/Person[1]>
                                  ns:Shoe__xs_string "44" })") ==
          Error::Kind::Mapping);
}

TEST_CASE("modify templates must stay within the bound variables") {
    auto kindOf = [](const char* text) {
        try {
            updateText(text);
        } catch (const Error& e) {
            return e.kind();
        }
        return Error::Kind::Internal;
    };
    CHECK(kindOf(R"(PREFIX ns: <http://example.com/ns#>
                    DELETE { ?other ns:Age__validAgeType ?age }
                    WHERE { ?stud ns:Age__validAgeType ?age .
                            ?other ns:Dept__xs_string "CS" })") ==
          Error::Kind::Internal); // both vars bound: translates fine
    CHECK(kindOf(R"(PREFIX ns: <http://example.com/ns#>
                    DELETE { ?ghost ns:Age__validAgeType ?age }
                    WHERE { ?stud ns:Age__validAgeType ?age })") ==
          Error::Kind::Unsupported);
    // non-BGP where patterns are out of scope for updates
    CHECK(kindOf(R"(PREFIX ns: <http://example.com/ns#>
                    DELETE { ?s ns:Age__validAgeType ?a }
                    WHERE { { ?s ns:Age__validAgeType ?a }
                            UNION { ?s ns:Dept__xs_string ?a } })") ==
          Error::Kind::Unsupported);
}

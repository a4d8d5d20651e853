#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sxq/xml.hpp"

using namespace sxq;

TEST_CASE("parse, attributes, content, entities") {
    auto doc = parseXml("<?xml version=\"1.0\"?>\n<a x=\"1\"><!-- c --><b>hi &amp; bye</b><b>2</b></a>");
    CHECK(doc.name == "a");
    REQUIRE(doc.attr("x"));
    CHECK(*doc.attr("x") == "1");
    auto bs = doc.children("b");
    REQUIRE(bs.size() == 2);
    CHECK(bs[0]->content() == "hi & bye");
    CHECK(doc.content() == "hi & bye2");

    CHECK_THROWS_AS(parseXml("<a><b></a>"), Error);
    CHECK_THROWS_AS(parseXml("<a>"), Error);
}

TEST_CASE("serialize round-trip") {
    auto doc = parseXml("<m o=\"i&quot;ri\"><c id=\"k\"><xpath>/a/b</xpath></c><t>x &lt; y</t></m>");
    auto again = parseXml(serializeXml(doc));
    CHECK(again.children("c").size() == 1);
    CHECK(*again.attr("o") == "i\"ri");
    CHECK(again.child("t")->content() == "x < y");
}

TEST_CASE("positional paths round-trip to nodes") {
    XmlDoc doc = parseXmlDoc(
        "<Persons><Person><LastName>A</LastName></Person>"
        "<Student s=\"1\"><LastName>B</LastName></Student>"
        "<Student s=\"2\"><LastName>C</LastName><LastName>D</LastName></Student></Persons>",
        "http://x/doc.xml");

    int count = 0;
    walkChains(doc, [&](const std::vector<const XmlNode*>& chain) {
        std::string p = positionalPath(doc, chain);
        const XmlNode* back = resolvePositionalPath(doc, p);
        CHECK(back == chain.back());
        count++;
    });
    CHECK(count == 8);

    // the single Person carries no index; repeated Students do
    const XmlNode* s2 = resolvePositionalPath(doc, "/Persons/Student[2]");
    REQUIRE(s2);
    CHECK(*s2->attr("s") == "2");
    const XmlNode* p1 = resolvePositionalPath(doc, "/Persons/Person");
    REQUIRE(p1);
    CHECK(p1->child("LastName")->content() == "A");
    std::string attr;
    const XmlNode* owner = resolvePositionalPath(doc, "/Persons/Student[1]/@s", &attr);
    REQUIRE(owner);
    CHECK(attr == "s");
    CHECK(resolvePositionalPath(doc, "/Persons/Student[9]") == nullptr);
}

#pragma once

#include "sxq/mapping.hpp"
#include "sxq/xs2owl.hpp"
#include "sxq/xsd.hpp"

namespace sxq::testutil {

// The running example schema: persons with an extension subtype for students,
// a substitution element, an attribute and a restricted simple type.
inline const char* kPersonsXsd = R"(<xs:schema xmlns:xs="http://www.w3.org/2001/XMLSchema">
  <xs:complexType name="Person_Type">
    <xs:sequence>
      <xs:element ref="LastName" minOccurs="1" maxOccurs="unbounded"/>
      <xs:element name="FirstName" type="xs:string" minOccurs="1" maxOccurs="unbounded"/>
      <xs:element name="Age" type="validAgeType" minOccurs="1" maxOccurs="1"/>
      <xs:element name="Email" type="xs:string" minOccurs="0" maxOccurs="unbounded"/>
    </xs:sequence>
    <xs:attribute name="SSN" type="xs:integer"/>
  </xs:complexType>

  <xs:complexType name="Student_Type">
    <xs:complexContent>
      <xs:extension base="Person_Type">
        <xs:sequence>
          <xs:element name="Dept" type="xs:string"/>
        </xs:sequence>
      </xs:extension>
    </xs:complexContent>
  </xs:complexType>

  <xs:element name="Persons">
    <xs:complexType>
      <xs:sequence>
        <xs:element name="Person" type="Person_Type" minOccurs="0" maxOccurs="unbounded"/>
        <xs:element name="Student" type="Student_Type" minOccurs="0" maxOccurs="unbounded"/>
      </xs:sequence>
    </xs:complexType>
  </xs:element>

  <xs:element name="LastName" type="xs:string"/>

  <xs:element name="Nachname" substitutionGroup="LastName" type="xs:string"/>

  <xs:simpleType name="validAgeType">
    <xs:restriction base="xs:float">
      <xs:minInclusive value="0.0"/>
      <xs:maxInclusive value="150.0"/>
    </xs:restriction>
  </xs:simpleType>
</xs:schema>
)";

inline const char* kPersonsIri = "http://www.music.tuc.gr/ontologies/persons#";

inline const XsdModel& personsXsd() {
    static XsdModel m = parseXsdText(kPersonsXsd);
    return m;
}

inline const TransformResult& personsTransform() {
    static TransformResult t = transformSchema(personsXsd(), kPersonsIri);
    return t;
}

inline const OntologyModel& personsOntology() { return personsTransform().ontology; }

inline const MappingCatalog& personsCatalog() {
    static MappingCatalog c = generateMappings(personsXsd(), personsOntology());
    return c;
}

} // namespace sxq::testutil

#pragma once

#include <map>
#include <string>
#include <vector>

#include "sxq/xquery.hpp"
#include "sxq/xsd.hpp"

namespace sxq {

enum class Cardinality { ExactlyOne, AtMostOne, Many, Unknown };

// Schema-backed multiplicity: how many nodes `steps` can select starting from
// one node located at any of `bases`. Attributes never report more than
// at-most-one; unmapped or wildcard steps give Unknown.
class CardinalityOracle {
public:
    CardinalityOracle() = default; // no schema: everything Unknown
    explicit CardinalityOracle(const XsdModel* xsd) : xsd_(xsd) {}

    Cardinality of(const std::vector<XPath>& bases,
                   const std::vector<XqStep>& steps) const;

private:
    const XsdModel* xsd_ = nullptr;
};

// Names single-node variables bound outside the expression being rewritten,
// with the absolute paths their nodes can live at ({} = a document root).
using OuterRoots = std::map<std::string, std::vector<XPath>>;

// The three rewriting rules, individually and chained (1 then 2 then 3).
XExpr rule1ForToLet(const XExpr& e, const CardinalityOracle& oracle,
                    const OuterRoots& outer = {});
XExpr rule2ReduceLet(const XExpr& e);
XExpr rule3UnnestFor(const XExpr& e);
XExpr rewriteExpr(const XExpr& e, const CardinalityOracle& oracle,
                  const OuterRoots& outer = {});

XQueryProgram rewrite(const XQueryProgram& p, const CardinalityOracle& oracle);

} // namespace sxq

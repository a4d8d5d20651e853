#pragma once

#include <deque>
#include <map>
#include <string>
#include <vector>

#include "sxq/error.hpp"
#include "sxq/xml.hpp"
#include "sxq/xquery.hpp"

namespace sxq {

// One item of an XQuery value: a node reference or an atomic. Node items point
// into a loaded document or into the evaluator's arena of constructed trees.
struct XqItem {
    enum class Kind { Doc, Elem, Attr, Str, Num, Bool };

    Kind kind = Kind::Str;
    const XmlDoc* doc = nullptr;   // Doc: the document (also set for doc-owned Elem/Attr)
    const XmlNode* node = nullptr; // Elem: the element; Attr: its owner element
    std::string attr;              // Attr: attribute name
    std::string str;               // Str payload
    double num = 0;                // Num payload
    bool flag = false;             // Bool payload

    bool isNode() const {
        return kind == Kind::Doc || kind == Kind::Elem || kind == Kind::Attr;
    }

    static XqItem ofStr(std::string s);
    static XqItem ofNum(double v);
    static XqItem ofBool(bool b);
};

using XqValue = std::vector<XqItem>;
using XqEnv = std::map<std::string, XqValue>;

// What an update program did to the documents, as positional paths (attributes
// end "/@name"). Deleted paths are pre-deletion locations in document order;
// inserted paths are the locations of the new nodes after application.
struct UpdateEffects {
    std::vector<std::string> deletedPaths;
    std::vector<std::string> insertedPaths;
};

// Evaluates the XQuery subset the translator emits, over in-memory documents.
// Single-threaded per instance; documents are only mutated by runUpdate, after
// which the instance must not be reused (its node indexes are stale).
class XQueryEvaluator {
public:
    explicit XQueryEvaluator(std::vector<XmlDoc*> docs);

    XqValue run(const XQueryProgram& p);
    XqValue evalExpr(const XExpr& e, const XqEnv& env = {});

    UpdateEffects runUpdate(const XQueryProgram& p);

    std::string itemString(const XqItem& it) const;
    std::string positionalPathOf(const XqItem& it) const;
    std::string schemaPathOf(const XqItem& it) const;
    // Nodes serialized as XML (compact), atomics space-separated.
    std::string serializeValue(const XqValue& v) const;

private:
    struct Focus {
        const XqItem* item = nullptr;
        size_t pos = 0, size = 0;
    };
    struct PendingInsert {
        std::vector<XmlNode> content;
        XqItem target;
    };

    XqValue eval(const XExpr& e, XqEnv& env, const Focus* focus);
    XqValue evalSeq(const std::vector<XExpr>& es, XqEnv& env, const Focus* focus);
    XqValue evalPath(const XExpr& e, XqEnv& env, const Focus* focus);
    XqValue evalFlwor(const XExpr& e, XqEnv& env, const Focus* focus);
    XqValue evalCall(const XExpr& e, XqEnv& env, const Focus* focus);
    XqValue evalElement(const XExpr& e, XqEnv& env, const Focus* focus);
    XqValue applyPredicates(XqValue group, const std::vector<XExpr>& preds, XqEnv& env);
    XqValue childAxis(const XqItem& base, const XqStep& step) const;
    bool ebv(const XqValue& v) const;
    bool deepEqualValues(const XqValue& a, const XqValue& b) const;

    const XmlNode* intern(XmlNode tree);
    void indexTree(const XmlNode* n, const XmlNode* par, const XmlDoc* d);
    std::vector<const XmlNode*> chainOf(const XmlNode* n) const;
    UpdateEffects applyPending();

    std::vector<XmlDoc*> docs_;
    std::map<const XmlNode*, const XmlNode*> parent_;
    std::map<const XmlNode*, const XmlDoc*> docOf_;
    std::deque<XmlNode> arena_;
    const std::vector<XQueryFunction>* functions_ = nullptr;
    bool updating_ = false;
    std::vector<XqItem> pendingDeletes_;
    std::vector<PendingInsert> pendingInserts_;
};

} // namespace sxq

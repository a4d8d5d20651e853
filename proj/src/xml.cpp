#include "sxq/xml.hpp"

#include <fstream>
#include <sstream>

namespace sxq {

const std::string* XmlNode::attr(const std::string& n) const {
    for (const auto& [k, v] : attrs)
        if (k == n) return &v;
    return nullptr;
}

const XmlNode* XmlNode::child(const std::string& n) const {
    for (const auto& k : kids)
        if (k.isElement() && (k.name == n || k.localName() == n)) return &k;
    return nullptr;
}

std::vector<const XmlNode*> XmlNode::children(const std::string& n) const {
    std::vector<const XmlNode*> out;
    for (const auto& k : kids)
        if (k.isElement() && (k.name == n || k.localName() == n)) out.push_back(&k);
    return out;
}

std::vector<const XmlNode*> XmlNode::elements() const {
    std::vector<const XmlNode*> out;
    for (const auto& k : kids)
        if (k.isElement()) out.push_back(&k);
    return out;
}

std::string XmlNode::content() const {
    if (isText()) return text;
    std::string out;
    for (const auto& k : kids) out += k.content();
    return out;
}

bool XmlNode::hasElementChildren() const {
    for (const auto& k : kids)
        if (k.isElement()) return true;
    return false;
}

std::string XmlNode::localName() const {
    auto colon = name.find(':');
    return colon == std::string::npos ? name : name.substr(colon + 1);
}

namespace {

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    XmlNode document() {
        skipMisc();
        XmlNode root = element();
        skipMisc();
        if (pos_ != s_.size()) fail("trailing content after document element");
        return root;
    }

private:
    std::string_view s_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) { throw syntaxError("xml: " + msg, pos_); }

    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
    bool startsWith(std::string_view t) const { return s_.substr(pos_, t.size()) == t; }
    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        pos_++;
    }
    void skipWs() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' || s_[pos_] == '\r'))
            pos_++;
    }

    void skipMisc() {
        for (;;) {
            skipWs();
            if (startsWith("<?")) {
                auto end = s_.find("?>", pos_);
                if (end == std::string_view::npos) fail("unterminated processing instruction");
                pos_ = end + 2;
            } else if (startsWith("<!--")) {
                auto end = s_.find("-->", pos_);
                if (end == std::string_view::npos) fail("unterminated comment");
                pos_ = end + 3;
            } else if (startsWith("<!DOCTYPE")) {
                auto end = s_.find('>', pos_);
                if (end == std::string_view::npos) fail("unterminated doctype");
                pos_ = end + 1;
            } else {
                return;
            }
        }
    }

    std::string nameToken() {
        size_t start = pos_;
        while (pos_ < s_.size()) {
            char c = s_[pos_];
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '>' || c == '/' || c == '=' || c == '<')
                break;
            pos_++;
        }
        if (pos_ == start) fail("expected name");
        return std::string(s_.substr(start, pos_ - start));
    }

    std::string decode(std::string_view raw) {
        std::string out;
        out.reserve(raw.size());
        for (size_t i = 0; i < raw.size(); i++) {
            if (raw[i] != '&') {
                out.push_back(raw[i]);
                continue;
            }
            auto semi = raw.find(';', i);
            if (semi == std::string_view::npos) { out.push_back('&'); continue; }
            std::string_view ent = raw.substr(i + 1, semi - i - 1);
            if (ent == "lt") out.push_back('<');
            else if (ent == "gt") out.push_back('>');
            else if (ent == "amp") out.push_back('&');
            else if (ent == "quot") out.push_back('"');
            else if (ent == "apos") out.push_back('\'');
            else if (!ent.empty() && ent[0] == '#') {
                int code = ent[1] == 'x' ? std::stoi(std::string(ent.substr(2)), nullptr, 16)
                                         : std::stoi(std::string(ent.substr(1)));
                if (code < 0x80) out.push_back(static_cast<char>(code));
                else { // UTF-8 encode
                    if (code < 0x800) {
                        out.push_back(static_cast<char>(0xC0 | (code >> 6)));
                        out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
                    } else {
                        out.push_back(static_cast<char>(0xE0 | (code >> 12)));
                        out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3F)));
                        out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
                    }
                }
            } else {
                out.append("&").append(ent).append(";");
            }
            i = semi;
        }
        return out;
    }

    XmlNode element() {
        expect('<');
        XmlNode n;
        n.name = nameToken();
        for (;;) {
            skipWs();
            if (peek() == '/') {
                pos_++;
                expect('>');
                return n;
            }
            if (peek() == '>') {
                pos_++;
                break;
            }
            std::string an = nameToken();
            skipWs();
            expect('=');
            skipWs();
            char q = peek();
            if (q != '"' && q != '\'') fail("expected quoted attribute value");
            pos_++;
            auto end = s_.find(q, pos_);
            if (end == std::string_view::npos) fail("unterminated attribute value");
            n.attrs.emplace_back(an, decode(s_.substr(pos_, end - pos_)));
            pos_ = end + 1;
        }
        // content
        for (;;) {
            size_t lt = s_.find('<', pos_);
            if (lt == std::string_view::npos) fail("unterminated element " + n.name);
            if (lt > pos_) {
                std::string txt = decode(s_.substr(pos_, lt - pos_));
                bool blank = txt.find_first_not_of(" \t\r\n") == std::string::npos;
                if (!blank) {
                    XmlNode t;
                    t.text = txt;
                    n.kids.push_back(std::move(t));
                }
            }
            pos_ = lt;
            if (startsWith("</")) {
                pos_ += 2;
                std::string close = nameToken();
                if (close != n.name) fail("mismatched close tag " + close + " for " + n.name);
                skipWs();
                expect('>');
                return n;
            }
            if (startsWith("<!--")) {
                auto end = s_.find("-->", pos_);
                if (end == std::string_view::npos) fail("unterminated comment");
                pos_ = end + 3;
                continue;
            }
            if (startsWith("<![CDATA[")) {
                auto end = s_.find("]]>", pos_);
                if (end == std::string_view::npos) fail("unterminated CDATA");
                XmlNode t;
                t.text = std::string(s_.substr(pos_ + 9, end - pos_ - 9));
                n.kids.push_back(std::move(t));
                pos_ = end + 3;
                continue;
            }
            n.kids.push_back(element());
        }
    }
};

std::string encode(const std::string& raw, bool attr) {
    std::string out;
    for (char c : raw) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': if (attr) { out += "&quot;"; break; } [[fallthrough]];
        default: out.push_back(c);
        }
    }
    return out;
}

void serialize(const XmlNode& n, std::string& out, int indent, bool pretty) {
    auto pad = [&](int d) {
        if (pretty)
            out.append(static_cast<size_t>(d) * 2, ' ');
    };
    if (n.isText()) {
        out += encode(n.text, false);
        return;
    }
    pad(indent);
    out += "<" + n.name;
    for (const auto& [k, v] : n.attrs) out += " " + k + "=\"" + encode(v, true) + "\"";
    if (n.kids.empty()) {
        out += "/>";
        if (pretty) out += "\n";
        return;
    }
    bool textOnly = true;
    for (const auto& k : n.kids)
        if (k.isElement()) textOnly = false;
    out += ">";
    if (textOnly) {
        for (const auto& k : n.kids) out += encode(k.text, false);
    } else {
        if (pretty) out += "\n";
        for (const auto& k : n.kids) {
            if (k.isText()) {
                pad(indent + 1);
                out += encode(k.text, false);
                if (pretty) out += "\n";
            } else {
                serialize(k, out, indent + 1, pretty);
            }
        }
        pad(indent);
    }
    out += "</" + n.name + ">";
    if (pretty) out += "\n";
}

} // namespace

XmlNode parseXml(std::string_view bytes) { return Parser(bytes).document(); }

XmlDoc parseXmlDoc(std::string_view bytes, std::string uri) {
    return XmlDoc{std::move(uri), parseXml(bytes)};
}

XmlNode parseXmlFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Error::Kind::Syntax, "cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parseXml(ss.str());
}

std::string serializeXml(const XmlNode& n, bool pretty) {
    std::string out;
    serialize(n, out, 0, pretty);
    return out;
}

std::string positionalPath(const XmlDoc& doc, const std::vector<const XmlNode*>& chain,
                           const std::string& attrName) {
    std::string out;
    const XmlNode* parent = nullptr;
    for (const XmlNode* n : chain) {
        out += "/" + n->name;
        if (parent) {
            auto same = parent->children(n->name);
            if (same.size() > 1) {
                size_t idx = 0;
                for (size_t i = 0; i < same.size(); i++)
                    if (same[i] == n) { idx = i + 1; break; }
                out += "[" + std::to_string(idx) + "]";
            }
        }
        parent = n;
    }
    (void)doc;
    if (!attrName.empty()) out += "/@" + attrName;
    return out;
}

const XmlNode* resolvePositionalPath(const XmlDoc& doc, const std::string& path,
                                     std::string* attrNameOut) {
    if (attrNameOut) attrNameOut->clear();
    size_t i = 0;
    const XmlNode* cur = nullptr;
    while (i < path.size()) {
        if (path[i] != '/') return nullptr;
        i++;
        if (i < path.size() && path[i] == '@') {
            if (attrNameOut) *attrNameOut = path.substr(i + 1);
            return cur;
        }
        size_t start = i;
        while (i < path.size() && path[i] != '/' && path[i] != '[') i++;
        std::string name = path.substr(start, i - start);
        size_t idx = 1;
        if (i < path.size() && path[i] == '[') {
            size_t close = path.find(']', i);
            idx = static_cast<size_t>(std::stoul(path.substr(i + 1, close - i - 1)));
            i = close + 1;
        }
        if (!cur) {
            if (doc.root.name != name || idx != 1) return nullptr;
            cur = &doc.root;
        } else {
            auto same = cur->children(name);
            if (idx == 0 || idx > same.size()) return nullptr;
            cur = same[idx - 1];
        }
    }
    return cur;
}

namespace {
void walkRec(std::vector<const XmlNode*>& chain, const XmlNode* n,
             const std::function<void(const std::vector<const XmlNode*>&)>& fn) {
    chain.push_back(n);
    fn(chain);
    for (const auto& k : n->kids)
        if (k.isElement()) walkRec(chain, &k, fn);
    chain.pop_back();
}
} // namespace

void walkChains(const XmlDoc& doc,
                const std::function<void(const std::vector<const XmlNode*>&)>& fn) {
    std::vector<const XmlNode*> chain;
    walkRec(chain, &doc.root, fn);
}

} // namespace sxq

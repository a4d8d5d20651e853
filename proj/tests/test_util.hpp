#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "sxq/xpath.hpp"

namespace sxq::testutil {

// Membership comparison that tolerates predicate reordering: each step's
// predicate list and each predicate's alternatives compare as multisets.
inline std::string orderFreeKey(const XPath& p) {
    std::string key;
    for (const auto& st : p.steps()) {
        key += "/";
        key += st.axis == Step::Axis::Attribute ? "@" : "";
        key += st.wildcard ? "*" : st.name;
        std::vector<std::string> preds;
        for (const auto& pr : st.preds) {
            auto alts = pr.alts;
            std::sort(alts.begin(), alts.end());
            std::string t;
            for (const auto& a : alts) t += a + "|";
            preds.push_back(t);
        }
        std::sort(preds.begin(), preds.end());
        for (const auto& t : preds) key += "[" + t + "]";
    }
    return key;
}

inline bool equalUpToPredOrder(const PathSet& a, const PathSet& b) {
    std::vector<std::string> ka, kb;
    for (const auto& p : a) ka.push_back(orderFreeKey(p));
    for (const auto& p : b) kb.push_back(orderFreeKey(p));
    std::sort(ka.begin(), ka.end());
    std::sort(kb.begin(), kb.end());
    return ka == kb;
}

// Random paths over a small alphabet, for round-trip and algebra properties.
class PathGen {
public:
    explicit PathGen(unsigned seed) : rng_(seed) {}

    XPath path() {
        std::uniform_int_distribution<int> len(1, 4);
        std::vector<Step> steps;
        int n = len(rng_);
        for (int i = 0; i < n; i++) {
            Step st;
            if (chance(15) && i == n - 1 && n > 1) {
                st.axis = Step::Axis::Attribute;
                st.name = name();
                steps.push_back(st);
                break;
            }
            if (chance(20)) {
                st.wildcard = true;
            } else {
                st.name = name();
            }
            if (chance(25)) {
                Predicate p;
                p.alts.push_back("./" + name() + " > " + std::to_string(pick(1, 99)));
                st.preds.push_back(p);
            }
            steps.push_back(st);
        }
        return XPath(std::move(steps));
    }

    PathSet set(int maxSize = 4) {
        PathSet s;
        int n = pick(0, maxSize);
        for (int i = 0; i < n; i++) s.add(path());
        return s;
    }

    bool chance(int percent) { return pick(1, 100) <= percent; }
    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    std::string name() {
        static const char* names[] = {"a", "b", "c", "d", "e", "f", "g", "h"};
        return names[pick(0, 7)];
    }

    std::mt19937& rng() { return rng_; }

private:
    std::mt19937 rng_;
};

} // namespace sxq::testutil

#pragma once

#include "cyclesynth/acpc.hpp"
#include "cyclesynth/mdp.hpp"

#include <fstream>
#include <sstream>
#include <string>

namespace fixtures {

using namespace cyclesynth;

inline std::string dataPath(const std::string& rel) { return std::string(CYCLESYNTH_DATA_DIR) + "/" + rel; }

inline std::string readText(const std::string& rel) {
    std::ifstream in(dataPath(rel));
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

// s1 <-> s2, one action, unit costs; s1 carries pi.
inline LabeledMdp toyA() {
    LabeledMdp m;
    m.actions = {"a"};
    m.propositions = {"pi"};
    m.labels = {{"pi"}, {}};
    m.choices = {{{0, 1.0, {{1, 1.0}}}}, {{0, 1.0, {{0, 1.0}}}}};
    return m;
}

// s1: a = self-loop cost 5, b = to s2 cost 1; s2: a = back to s1 cost 1.
inline LabeledMdp toyB() {
    LabeledMdp m;
    m.actions = {"a", "b"};
    m.propositions = {"pi"};
    m.labels = {{"pi"}, {}};
    m.choices = {{{0, 5.0, {{0, 1.0}}}, {1, 1.0, {{1, 1.0}}}}, {{0, 1.0, {{0, 1.0}}}}};
    return m;
}

// s1: 0.5 self, 0.5 to s2; s2: to s1; unit costs.
inline LabeledMdp toyC() {
    LabeledMdp m;
    m.actions = {"a"};
    m.propositions = {"pi"};
    m.labels = {{"pi"}, {}};
    m.choices = {{{0, 1.0, {{0, 0.5}, {1, 0.5}}}}, {{0, 1.0, {{0, 1.0}}}}};
    return m;
}

inline StationaryPolicy policy(std::initializer_list<ActionId> a) { return StationaryPolicy{std::vector<ActionId>(a)}; }

}  // namespace fixtures

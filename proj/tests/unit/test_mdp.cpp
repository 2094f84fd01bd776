#include <doctest.h>

#include "cyclesynth/error.hpp"
#include "cyclesynth/mdp.hpp"

#include "fixtures.hpp"
#include "random_problems.hpp"

using namespace cyclesynth;
using fixtures::policy;

namespace {

bool mentions(const ValidationReport& r, const std::string& text) {
    for (const auto& v : r.violations) {
        if (v.message.find(text) != std::string::npos) return true;
    }
    return false;
}

}  // namespace

TEST_SUITE("mdp") {
    TEST_CASE("validate accepts the swap instance") { CHECK(validate(fixtures::toyA()).ok()); }

    TEST_CASE("validate reports a short row") {
        auto m = fixtures::toyA();
        m.choices[0][0].row = {{0, 0.5}, {1, 0.4}};
        auto r = validate(m);
        CHECK_FALSE(r.ok());
        CHECK(mentions(r, "row sum 0.9 != 1 at (0,a)"));
    }

    TEST_CASE("validate rejects a zero cost") {
        auto m = fixtures::toyA();
        m.choices[0][0].cost = 0.0;
        CHECK(mentions(validate(m), "non-positive cost"));
    }

    TEST_CASE("validate lists every violation") {
        auto m = fixtures::toyA();
        m.choices[0][0].cost = -1.0;
        m.choices[1].clear();
        m.init = 7;
        auto r = validate(m);
        CHECK(r.violations.size() == 3);
        CHECK(mentions(r, "no available action at state 1"));
        CHECK(mentions(r, "initial state 7"));
        CHECK_THROWS_AS(requireValid(m), Error);
    }

    TEST_CASE("induced chain of the swap") {
        auto c = inducedChain(fixtures::toyA(), policy({0, 0}));
        REQUIRE(c.recurrentClasses.size() == 1);
        CHECK(c.recurrentClasses[0] == StateSet{0, 1});
        CHECK(c.transientStates.empty());
    }

    TEST_CASE("induced chain with a transient tail") {
        LabeledMdp m;
        m.actions = {"a"};
        m.labels = {{}, {}, {}};
        m.choices = {{{0, 1.0, {{1, 1.0}}}}, {{0, 1.0, {{0, 1.0}}}}, {{0, 1.0, {{0, 1.0}}}}};
        auto c = inducedChain(m, policy({0, 0, 0}));
        REQUIRE(c.recurrentClasses.size() == 1);
        CHECK(c.recurrentClasses[0] == StateSet{0, 1});
        CHECK(c.transientStates == StateSet{2});
        CHECK(c.reachability[2] == StateSet{0, 1, 2});
    }

    TEST_CASE("self-loop policy leaves s2 transient") {
        auto c = inducedChain(fixtures::toyB(), policy({0, 0}));
        REQUIRE(c.recurrentClasses.size() == 1);
        CHECK(c.recurrentClasses[0] == StateSet{0});
        CHECK(c.transientStates == StateSet{1});
    }

    TEST_CASE("induced chain needs a total policy") {
        CHECK_THROWS_AS(inducedChain(fixtures::toyA(), policy({0, kNoAction})), Error);
        try {
            inducedChain(fixtures::toyA(), policy({0}));
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::PolicyIncomplete);
        }
    }

    TEST_CASE("properness") {
        CHECK(isProper(fixtures::toyA(), policy({0, 0}), {0}));
        CHECK_FALSE(isProper(fixtures::toyB(), policy({0, 0}), {1}));
        CHECK(isProper(fixtures::toyC(), policy({0, 0}), {0}));
        try {
            isProper(fixtures::toyA(), policy({0, 0}), {});
            FAIL("expected EmptyTarget");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::EmptyTarget);
        }
    }

    TEST_CASE("communication") {
        CHECK(isCommunicating(fixtures::toyA()));
        CHECK(isCommunicating(fixtures::toyB()));
        LabeledMdp m = fixtures::toyA();
        m.choices[1][0].row = {{1, 1.0}};
        CHECK_FALSE(isCommunicating(m));
    }

    TEST_CASE("chain structure partitions the states") {
        std::mt19937_64 rng(11);
        for (int trial = 0; trial < 50; ++trial) {
            auto m = testgen::communicatingMdp(rng);
            StationaryPolicy mu{std::vector<ActionId>(m.numStates())};
            for (std::size_t i = 0; i < m.numStates(); ++i) mu.choice[i] = m.choices[i].back().action;
            auto c = inducedChain(m, mu);
            std::vector<int> seen(m.numStates(), 0);
            for (const auto& cls : c.recurrentClasses) {
                for (std::size_t i : cls) ++seen[i];
            }
            for (std::size_t i : c.transientStates) ++seen[i];
            for (int s : seen) CHECK(s == 1);
        }
    }

    TEST_CASE("properness is monotone in the target") {
        std::mt19937_64 rng(12);
        for (int trial = 0; trial < 50; ++trial) {
            auto m = testgen::communicatingMdp(rng);
            StationaryPolicy mu{std::vector<ActionId>(m.numStates())};
            for (std::size_t i = 0; i < m.numStates(); ++i) mu.choice[i] = m.choices[i].front().action;
            auto t = testgen::nonemptySubset(rng, m.numStates());
            if (!isProper(m, mu, t)) continue;
            StateSet bigger = t;
            for (std::size_t i = 0; i < m.numStates(); ++i) {
                if (!std::binary_search(t.begin(), t.end(), i)) {
                    bigger.push_back(i);
                    break;
                }
            }
            std::sort(bigger.begin(), bigger.end());
            CHECK(isProper(m, mu, bigger));
        }
    }

    TEST_CASE("JSON round trip and renormalization") {
        auto m = parseMdpJson(fixtures::readText("mdp/toy_b.json"));
        CHECK(m.numStates() == 2);
        CHECK(m.actions == std::vector<std::string>{"a", "b"});
        CHECK(m.hasLabel(0, "pi"));
        CHECK(m.statesLabeled("pi") == StateSet{0});
        auto again = parseMdpJson(toMdpJson(m));
        CHECK(again.choices.size() == m.choices.size());
        CHECK(toMdpJson(again) == toMdpJson(m));

        std::string text = R"({"states":[{"id":0,"label":[]}],"actions":["a"],"available":{"0":["a"]},
            "trans":{"0,a":[[0,0.3333333333],[0,0.6666666666]]},"cost":{"0,a":2},"init":0})";
        auto r = parseMdpJson(text);
        REQUIRE(r.choices[0][0].row.size() == 1);
        CHECK(r.choices[0][0].row[0].probability == 1.0);
    }

    TEST_CASE("JSON loader rejects bad documents") {
        auto code = [](const std::string& text) {
            try {
                parseMdpJson(text);
            } catch (const Error& e) {
                return e.code();
            }
            return ErrorCode::InvalidArgument;
        };
        const std::string ok = R"({"states":[{"id":0,"label":[]}],"actions":["a"],"available":{"0":["a"]},
            "trans":{"0,a":[[0,1]]},"cost":{"0,a":1},"init":0})";
        CHECK_NOTHROW(parseMdpJson(ok));
        CHECK(code(R"({"states":[],"extra":1})") == ErrorCode::ParseError);
        CHECK(code(R"({"states":[{"id":0,"label":[]}],"actions":["a"],"available":{"0":["a"]},
            "trans":{"0,a":[[0,1]]},"cost":{"0,b":1},"init":0})") == ErrorCode::ParseError);
        CHECK(code(R"({"states":[{"id":0,"label":[]}],"actions":["a"],"available":{"0":["a"]},
            "trans":{"0,a":[[0,0.5]]},"cost":{"0,a":1},"init":0})") == ErrorCode::InvariantViolation);
        CHECK(code(R"({"states":[{"id":0,"label":[]}],"actions":["a"],"available":{"0":["a"]},
            "trans":{"0,a":[[0,1]]},"init":0})") == ErrorCode::ParseError);
        CHECK(code("{\"states\": [") == ErrorCode::ParseError);
        try {
            parseMdpJson(fixtures::readText("mdp/malformed.json"));
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("line 5") != std::string::npos);
        }
    }
}

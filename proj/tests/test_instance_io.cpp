#include <string>

#include "doctest.h"
#include "storyline/instance_io.hpp"
#include "support.hpp"

using namespace storyline;

TEST_CASE("parse the crossing pair") {
  const auto doc = parseInstanceDocument(R"({
    "characters": [{"id": "a", "activeFrom": 1, "activeTo": 2}, {"id": "b", "activeFrom": 1, "activeTo": 2}],
    "meetings": [],
    "orderings": [["a", "b"], ["b", "a"]]
  })");
  const auto& inst = doc.instance;
  CHECK(inst.stepCount() == 2);
  CHECK(inst.characterCount() == 2);
  CHECK(inst.position(1, 0) == 1);
  CHECK_FALSE(doc.params.has_value());
  CHECK(doc.paramsOrDefault().delta == 1.0);
  CHECK(doc.paramsOrDefault().deltaBar == 1.0);
}

TEST_CASE("parse errors") {
  SUBCASE("meeting not consecutive") {
    CHECK_THROWS_WITH_AS(parseInstance(R"({
      "characters": [{"id": "a", "activeFrom": 1, "activeTo": 1}, {"id": "b", "activeFrom": 1, "activeTo": 1},
                     {"id": "c", "activeFrom": 1, "activeTo": 1}],
      "meetings": [{"t": 1, "members": ["a", "c"]}],
      "orderings": [["a", "b", "c"]]
    })"),
                         doctest::Contains("meeting not consecutive"), InstanceError);
  }
  SUBCASE("activity not contiguous") {
    CHECK_THROWS_WITH_AS(parseInstance(R"({
      "characters": [{"id": "a", "activeSteps": [1, 3]}],
      "orderings": [["a"], [], ["a"]]
    })"),
                         doctest::Contains("activity not contiguous"), InstanceError);
  }
  SUBCASE("syntax error carries a location") {
    try {
      parseInstance("{\n  \"characters\": [\n  ,]\n}");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
      CHECK(e.column() >= 1);
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
  }
  SUBCASE("member inactive names the character") {
    CHECK_THROWS_WITH_AS(parseInstance(R"({
      "characters": [{"id": "a", "activeFrom": 1, "activeTo": 2}, {"id": "b", "activeFrom": 2, "activeTo": 2}],
      "meetings": [{"t": 1, "members": ["a", "b"]}],
      "orderings": [["a"], ["a", "b"]]
    })"),
                         doctest::Contains("b"), InstanceError);
  }
  SUBCASE("unknown character in an ordering") {
    CHECK_THROWS_AS(parseInstance(R"({"characters": [{"id": "a", "activeFrom": 1, "activeTo": 1}],
                                      "orderings": [["a", "x"]]})"),
                    InstanceError);
  }
  SUBCASE("zero delta is rejected") {
    CHECK_THROWS(parseInstanceDocument(R"({"characters": [], "orderings": [], "params": {"delta": 0, "deltaBar": 1}})"));
  }
}

TEST_CASE("round trip") {
  testing::Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const auto inst = testing::randomInstance(rng, {1, 5, 1, 5, 3, false});
    const NicenessParams params{2.0, 1.5};
    const auto again = parseInstanceDocument(serializeInstance(inst, params));
    REQUIRE(again.params.has_value());
    CHECK(again.params->delta == 2.0);
    CHECK(again.params->deltaBar == 1.5);
    CHECK(serializeInstance(again.instance, params) == serializeInstance(inst, params));
    REQUIRE(again.instance.stepCount() == inst.stepCount());
    for (Step t = 0; t < inst.stepCount(); ++t) {
      const auto a = inst.ordering(t);
      const auto b = again.instance.ordering(t);
      CHECK(std::equal(a.begin(), a.end(), b.begin(), b.end()));
    }
  }
}

TEST_CASE("data files") {
  const auto doc = loadInstance(std::string(STORYLINE_TEST_DATA) + "/crossing_pair.json");
  CHECK(doc.instance.characterCount() == 2);
  CHECK_THROWS_AS(loadInstance(std::string(STORYLINE_TEST_DATA) + "/malformed.json"), ParseError);
  CHECK_THROWS_AS(loadInstance(std::string(STORYLINE_TEST_DATA) + "/does-not-exist.json"), InstanceError);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "altmin/errors.hpp"
#include "altmin/instance_io.hpp"
#include "altmin/trace_io.hpp"
#include "instance_helpers.hpp"

using namespace altmin;

TEST_CASE("instance JSON round trip preserves every number") {
  GeneratedInstance gi = helpers::make_instance(4, 77, 1.5, 5);
  Instance inst{gi.condensed.problem, InstanceMeta{77, 3, 2, 5, 1.5, 0.25, {false, false, false, false}}};
  std::string text = instance_to_json(inst);
  Instance back = instance_from_json(text);
  CHECK(back.problem.M() == 4);
  CHECK(back.problem.net.neighbors == gi.condensed.problem.net.neighbors);
  for (int i = 0; i < 4; ++i) {
    CHECK((back.problem.agents[i].f.H() - gi.condensed.problem.agents[i].f.H()).norm() == 0.0);
    CHECK((back.problem.agents[i].f.h() - gi.condensed.problem.agents[i].f.h()).norm() == 0.0);
    CHECK((back.problem.agents[i].set.lower() - gi.condensed.problem.agents[i].set.lower()).norm() ==
          0.0);
  }
  REQUIRE(back.meta.has_value());
  CHECK(back.meta->seed == 77);
  CHECK(back.meta->N == 5);
  // serialization is deterministic
  CHECK(instance_to_json(back) == text);
  CHECK(content_hash(text) == content_hash(text));
  CHECK(content_hash(text).size() == 16);
}

TEST_CASE("instance JSON validation errors") {
  CHECK_THROWS_AS(instance_from_json("not json"), ConfigError);
  CHECK_THROWS_AS(instance_from_json("{\"version\": 2}"), ConfigError);
}

TEST_CASE("trace table CSV round trip with NaN cells") {
  TraceTable t;
  t.add_column("k", {1, 2, 3});
  t.add_column("value", {0.5, std::nan(""), 1.0 / 3.0});
  std::string text = to_csv(t);
  TraceTable back = csv_from_string(text);
  CHECK(back.columns == t.columns);
  REQUIRE(back.rows.size() == 3);
  CHECK(back.rows[0][1] == 0.5);
  CHECK(std::isnan(back.rows[1][1]));
  CHECK(back.rows[2][1] == 1.0 / 3.0);  // 17 significant digits round-trip
  CHECK(back.column("value")[0] == 0.5);
  CHECK(back.column_index("missing") == -1);
  CHECK_THROWS_AS(back.column("missing"), ConfigError);
}

TEST_CASE("ragged CSV rejected") {
  CHECK_THROWS_AS(csv_from_string("a,b\n1\n"), ConfigError);
}

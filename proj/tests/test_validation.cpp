#include "doctest.h"
#include "fixtures.hpp"

#include "pmsd/error.hpp"
#include "pmsd/json_io.hpp"
#include "pmsd/validation.hpp"

#include <limits>

using namespace pmsd;

namespace {

SimulationTrace trace_of(std::string name, std::vector<double> sim) {
  SimulationTrace t;
  t.elements = {std::move(name)};
  sim.insert(sim.begin(), sim.front());  // row 0: initial state
  t.values = {sim};
  return t;
}

}  // namespace

TEST_CASE("KS statistic") {
  // CDFs at {1,2,3}: a = (.5, 1, 1), b = (.5, .5, 1)
  CHECK(ks_statistic(std::vector<double>{1, 2}, std::vector<double>{1, 3}) == 0.5);
  CHECK(ks_statistic(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}) == 0.0);
  CHECK(ks_statistic(std::vector<double>{0, 0, 0}, std::vector<double>{1, 1, 1}) == 1.0);
  CHECK_THROWS_AS(ks_statistic(std::vector<double>{}, std::vector<double>{1}), Error);
}

TEST_CASE("property: KS agrees with CDF enumeration and stays in [0,1]") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> len(1, 20), val(0, 6);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> a(len(rng)), b(len(rng));
    for (auto& v : a) v = val(rng);
    for (auto& v : b) v = val(rng);
    const double d = ks_statistic(a, b);
    CHECK(d == doctest::Approx(fx::naive_ks(a, b)).epsilon(1e-12));
    CHECK(d >= 0.0);
    CHECK(d <= 1.0);
    CHECK(ks_statistic(a, a) == 0.0);
  }
}

TEST_CASE("identical series pass") {
  const auto sd = fx::make_sdlog({{"v", {3, 5, 4, 6}}});
  const auto r = validate(trace_of("v", {3, 5, 4, 6}), sd, {"v"});
  REQUIRE(r.variables.size() == 1);
  CHECK(r.variables[0].rmse == 0.0);
  CHECK(r.variables[0].ks_statistic == 0.0);
  CHECK(r.variables[0].pass);
  CHECK(r.aligned_steps == 4);
}

TEST_CASE("disjoint supports fail") {
  const auto r = validate(trace_of("v", {1, 1, 1}), fx::make_sdlog({{"v", {0, 0, 0}}}), {"v"});
  CHECK(r.variables[0].ks_statistic == 1.0);
  CHECK(r.variables[0].mape_skipped == 3);
  CHECK(r.variables[0].mape == std::numeric_limits<double>::infinity());
  CHECK_FALSE(r.variables[0].pass);
  CHECK(to_json(r)["variables"][0]["verdict"] == "fail");
}

TEST_CASE("verdict thresholds") {
  // real [10,10,10,10], sim [12,12,12,12]: mape 0.2 exactly, ks 1
  auto r = validate(trace_of("v", {12, 12, 12, 12}), fx::make_sdlog({{"v", {10, 10, 10, 10}}}), {"v"});
  CHECK(r.variables[0].mape == doctest::Approx(0.2));
  CHECK_FALSE(r.variables[0].pass);  // ks too large

  // real [1,2,3,4,5], sim [1,2,3,4,6]: mape 0.04, ks 0.2 -> pass at defaults
  r = validate(trace_of("v", {1, 2, 3, 4, 6}), fx::make_sdlog({{"v", {1, 2, 3, 4, 5}}}), {"v"});
  CHECK(r.variables[0].ks_statistic == doctest::Approx(0.2));
  CHECK(r.variables[0].pass);
  // tightened kappa
  r = validate(trace_of("v", {1, 2, 3, 4, 6}), fx::make_sdlog({{"v", {1, 2, 3, 4, 5}}}), {"v"}, {0.2, 0.1});
  CHECK_FALSE(r.variables[0].pass);
  // tightened tau
  r = validate(trace_of("v", {1, 2, 3, 4, 6}), fx::make_sdlog({{"v", {1, 2, 3, 4, 5}}}), {"v"}, {0.01, 0.3});
  CHECK_FALSE(r.variables[0].pass);
}

TEST_CASE("alignment uses min(horizon, k)") {
  const auto r = validate(trace_of("v", {1, 2}), fx::make_sdlog({{"v", {1, 2, 3, 4}}}), {"v"});
  CHECK(r.aligned_steps == 2);
  CHECK(r.variables[0].rmse == 0.0);
}

TEST_CASE("validation errors") {
  try {
    validate(trace_of("v", {1}), fx::make_sdlog({{"v", {1, 2}}}), {"v"});
    FAIL("expected NotEnoughSteps");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotEnoughSteps);
  }
  try {
    validate(trace_of("v", {1, 2}), fx::make_sdlog({{"v", {1, 2}}}), {"w"});
    FAIL("expected UnknownVariable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownVariable);
  }
}

TEST_CASE("validation JSON round trip") {
  const auto r = validate(trace_of("v", {1, 2, 3, 4, 6}), fx::make_sdlog({{"v", {1, 2, 3, 4, 5}}}), {"v"});
  const auto back = validation_from_json(to_json(r));
  CHECK(back.aligned_steps == r.aligned_steps);
  CHECK(back.variables[0].pass == r.variables[0].pass);
  CHECK(back.variables[0].mape == r.variables[0].mape);
}

#include "doctest.h"
#include "gibbsnet/validate.hpp"
#include "json.hpp"

using namespace gibbsnet;

namespace {

ValidateOptions quick() {
  ValidateOptions o;
  o.density_samples = 200000;
  o.balance_pairs = 200;
  o.decision_rounds = 100000;
  o.independence_rounds = 50000;
  return o;
}

}  // namespace

TEST_CASE("validation suites pass on the exact sampler") {
  const auto reports = run_validation(quick());
  REQUIRE(reports.size() == 4);
  for (const auto& r : reports) {
    CHECK_MESSAGE(r.passed(), r.suite);
    for (const auto& c : r.checks) CHECK(c.samples >= 0);
  }
  const auto j = nlohmann::json::parse(validation_json(reports, quick()));
  CHECK(j["passed"] == true);
  CHECK(j["suites"].size() == 4);
}

TEST_CASE("the density suite catches a corrupted sampler") {
  auto o = quick();
  o.mutate_sampler = true;
  CHECK(!sampler_density_suite(o).passed());
}

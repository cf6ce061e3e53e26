#include <gtest/gtest.h>

#include "digeco/config.hpp"
#include "digeco/scenarios.hpp"

using namespace digeco;
using nlohmann::json;

namespace {
std::string config_error(const json& j) {
  RunConfig cfg = default_config("succession");
  try {
    merge_config(cfg, j);
    cfg.validate();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::Config);
    return e.what();
  }
  return "";
}
}  // namespace

TEST(Config, PresetsValidateAndRoundTrip) {
  for (const auto& name : scenario_names()) {
    RunConfig cfg = default_config(name);
    EXPECT_NO_THROW(cfg.validate()) << name;
    RunConfig back = default_config(name);
    merge_config(back, to_json(cfg));
    EXPECT_EQ(to_json(back), to_json(cfg)) << name;
    EXPECT_EQ(config_hash(back), config_hash(cfg));
    EXPECT_EQ(config_hash(cfg).size(), 16u);
  }
  EXPECT_NE(config_hash(default_config("succession")), config_hash(default_config("catalyst")));
}

TEST(Config, UnknownKeysAndBadTypesNameTheirPath) {
  EXPECT_EQ(config_error({{"ecosystem", {{"n_userz", 3}}}}), "ecosystem.n_userz: unknown key");
  EXPECT_EQ(config_error({{"runs", "x"}}), "runs: wrong type");
  EXPECT_NE(config_error({{"runs", -1}}), "");
  EXPECT_NE(config_error({{"ecosystem", {{"request_parts", {{"kind", "cauchy"}}}}}}).find("request_parts"),
            std::string::npos);
  EXPECT_NE(config_error({{"arms", {"baseline", "nonsense"}}}), "");
  EXPECT_EQ(config_error({{"runs", 3}, {"seed", 9}}), "");
}

TEST(Config, UnknownScenario) {
  try {
    default_config("weather");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnknownScenario);
  }
  EXPECT_FALSE(is_scenario("weather"));
  EXPECT_TRUE(is_scenario("stability-grid"));
}

TEST(Config, FnvReferenceValues) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Scenarios, ReportBodiesAreReproducible) {
  RunConfig succ = default_config("succession");
  succ.runs = 2;
  succ.events = 30;
  succ.window = 10;
  succ.early_event = 10;
  succ.ecosystem.n_users = 20;
  succ.ecosystem.n_communities = 4;
  succ.ecosystem.catalogue_size = 40;
  RunConfig cx = default_config("complexity");
  cx.runs = 2;
  cx.generations = 30;
  for (const auto& cfg : {succ, cx}) {
    const auto a = run_scenario(cfg).body.dump(), b = run_scenario(cfg).body.dump();
    EXPECT_EQ(a, b) << cfg.scenario;
    RunConfig other = cfg;
    other.seed += 1;
    EXPECT_NE(run_scenario(other).body["summary"].dump(), json::parse(a)["summary"].dump());
  }
}

TEST(Scenarios, RunSeedsAreDistinct) {
  EXPECT_NE(run_seed(1, 0), run_seed(1, 1));
  EXPECT_NE(run_seed(1, 0), run_seed(2, 0));
  EXPECT_EQ(run_seed(5, 3), run_seed(5, 3));
}

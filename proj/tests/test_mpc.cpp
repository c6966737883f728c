#include <gtest/gtest.h>

#include <filesystem>

#include "rotogo/mpc.hpp"

using namespace rotogo;

namespace {

TimePoint sec(double s) { return TimePoint::from_seconds(s); }

// A four-second mission that exercises every code path of the loop quickly.
ScenarioConfig small_mission(ObjectiveMode mode, std::uint64_t seed, double noise_std = 0.05) {
  ScenarioConfig c;
  c.name = "small";
  c.formula = "G[0,4] !human & F[0,4] (x > 1.5)";
  c.aliases = {{"human", "(x - xe)^2 + (y - ye)^2 < 0.25"}};
  c.robot_start = {0.5, 2.5, 0, 0};
  c.env_start = {1.5, 1.5};
  c.horizon = 4.0;
  c.env_noise_std = noise_std;
  c.mode = mode;
  c.seed = seed;
  return c;
}

Signal reconstruct(const RunResult& r, const ReplanRecord& rec, const ScenarioConfig& cfg) {
  std::vector<TraceRow> prefix(r.trace.begin(), r.trace.begin() + static_cast<std::ptrdiff_t>(rec.sample_index + 1));
  const Signal suffix = plan_suffix(rec.trajectory, rec.time, cfg.trace_step(), prefix.back().sample.state.env());
  return assemble_signal(prefix, suffix);
}

}  // namespace

// ---------------------------------------------------------------------------
// Scenarios and configuration

TEST(Scenario, BuiltInsAreValid) {
  const ScenarioConfig a = scenario_phi_avoid();
  EXPECT_NO_THROW(a.validate());
  EXPECT_EQ(horizon(a.parsed_formula()), TimeBound::finite(sec(20)));
  EXPECT_EQ(a.sample_count(), 201u);
  EXPECT_EQ(a.replan_every(), 5u);
  EXPECT_EQ(a.robot_start, (RobotState{0.5, 2.5, 0, 0}));
  const ScenarioConfig s = scenario_phi_stayin();
  EXPECT_NO_THROW(s.validate());
  const Formula region = s.alias_table().at("region");
  EXPECT_DOUBLE_EQ(region.predicate().evaluate(State({2, 3, 0, 0}, {2, 3})), 2.0);
  EXPECT_THROW(scenario_by_name("nope"), ConfigError);
}

TEST(Scenario, AvoidObstacleGeometry) {
  const AliasTable t = scenario_phi_avoid().alias_table();
  auto holds = [&](const char* alias, double x, double y) {
    return t.at(alias).op() == Op::pred ? t.at(alias).predicate().evaluate(State({x, y, 0, 0}, {0, 0})) > 0
                                        : robustness(Signal({{sec(0), State({x, y, 0, 0}, {9, 9})}}), sec(0),
                                                     t.at(alias))
                                              .positive();
  };
  EXPECT_TRUE(holds("obs1", 0.75, 1.0));
  EXPECT_FALSE(holds("obs1", 0.75, 2.5));
  EXPECT_TRUE(holds("obs2", 0.75, 3.0));
  EXPECT_TRUE(holds("goal", 4.5, 2.5));
  EXPECT_FALSE(holds("goal", 4.5, 3.5));
}

TEST(Scenario, ValidationErrors) {
  ScenarioConfig c = small_mission(ObjectiveMode::rotogo, 0);
  c.formula = "F[0,inf) (x > 0)";
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_mission(ObjectiveMode::rotogo, 0);
  c.formula = "G[0,5] (x > 0)";
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_mission(ObjectiveMode::rotogo, 0);
  c.replan_period = 0.25;
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_mission(ObjectiveMode::rotogo, 0);
  c.formula = "G[0,1] bogus";
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_mission(ObjectiveMode::rotogo, 0);
  c.env_noise_std = -1;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(mode_from_name("fast"), ConfigError);
  EXPECT_THROW(noise_preset("loud"), ConfigError);
}

TEST(Scenario, JsonRoundTrip) {
  ScenarioConfig c = scenario_phi_avoid();
  c.seed = 1234567890123ull;
  c.mode = ObjectiveMode::robustness;
  c.set_noise(noise_preset("table2"));
  c.planner.cmaes.max_iterations = 7;
  const ScenarioConfig d = scenario_from_json(to_json(c));
  EXPECT_EQ(to_json(d), to_json(c));
  EXPECT_EQ(d.aliases, c.aliases);
  EXPECT_EQ(d.env_noise_std, c.env_noise_std);
}

TEST(Scenario, JsonPartialOverridesAndPresets) {
  const ScenarioConfig c = scenario_from_json(nlohmann::json{{"scenario", "phi_stayin"}, {"noise", "sec7"}, {"seed", 9}});
  EXPECT_EQ(c.name, "phi_stayin");
  EXPECT_EQ(c.env_step_period, 0.02);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_THROW(scenario_from_json(nlohmann::json{{"scenario", "phi_avoid"}, {"horizon", "long"}}), ConfigError);
  EXPECT_THROW(scenario_from_json(nlohmann::json::array()), ConfigError);
  for (const auto& name : noise_preset_names()) EXPECT_NO_THROW(noise_preset(name));
}

// ---------------------------------------------------------------------------
// Helpers

TEST(Mpc, SplitMixReferenceValue) {
  EXPECT_EQ(splitmix64(0), 0xE220A8397B1DCDAFull);
}

TEST(Mpc, PlanSuffixHoldsEnvironment) {
  const Trajectory tr = {{0, 1, 1, 0, 0, 0, 0}, {0.1, 1.1, 1, 1, 0, 0, 0}, {0.2, 1.2, 1, 1, 0, 0, 0}};
  const Signal s = plan_suffix(tr, sec(1.0), sec(0.1), {3, 4});
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.time(0), sec(1.1));
  EXPECT_EQ(s.state(1)[Var::x], 1.2);
  EXPECT_EQ(s.state(1)[Var::ye], 4.0);
}

// ---------------------------------------------------------------------------
// Closed loop

TEST(Mpc, VacuousTaskSucceeds) {
  ScenarioConfig c = small_mission(ObjectiveMode::rotogo, 3);
  c.formula = "G[0,1] (x > -100)";
  for (ObjectiveMode m : {ObjectiveMode::rotogo, ObjectiveMode::robustness}) {
    c.mode = m;
    const RunResult r = mpc_run(c);
    EXPECT_TRUE(r.success);
    EXPECT_GT(r.final_robustness, ExtReal(0.0));
  }
}

TEST(Mpc, ExecutedTracesSatisfyDynamics) {
  for (ObjectiveMode m : {ObjectiveMode::rotogo, ObjectiveMode::robustness}) {
    const ScenarioConfig c = small_mission(m, 11);
    const RunResult r = mpc_run(c);
    ASSERT_EQ(r.trace.size(), c.sample_count());
    std::vector<TraceRow> rows(r.trace.begin(), r.trace.end() - 1);
    const auto rep = validate_trace(rows, c.trace_step(), DoubleIntegrator{});
    EXPECT_TRUE(rep.valid) << rep.message << " at " << rep.violation_index;
    EXPECT_EQ(r.replans.size(), 8u);
    EXPECT_EQ(r.success, r.final_robustness.positive());
    EXPECT_EQ(r.final_robustness, robustness(to_signal(r.trace), sec(0), c.parsed_formula()));
    double md = std::numeric_limits<double>::infinity();
    for (const auto& row : r.trace) md = std::min(md, distance_to_env(row.sample.state, c.distance_radius));
    EXPECT_EQ(r.min_distance, md);
  }
}

TEST(Mpc, DeterministicGivenSeed) {
  const ScenarioConfig c = small_mission(ObjectiveMode::rotogo, 21);
  const RunResult a = mpc_run(c), b = mpc_run(c);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) EXPECT_EQ(a.trace[i].sample.state, b.trace[i].sample.state);
  EXPECT_EQ(a.final_robustness, b.final_robustness);
}

TEST(Mpc, StaticEnvironmentNeverMoves) {
  const ScenarioConfig c = small_mission(ObjectiveMode::robustness, 5, 0.0);
  const RunResult r = mpc_run(c);
  for (const auto& row : r.trace) EXPECT_EQ(row.sample.state.env(), c.env_start);
}

TEST(Mpc, EnvironmentDisturbanceSumsSubsteps) {
  ScenarioConfig c = small_mission(ObjectiveMode::rotogo, 8);
  c.formula = "G[0,1] (x > -100)";
  c.horizon = 20;
  c.planner.cmaes.max_iterations = 1;
  const RunResult r = mpc_run(c);
  // 20 substeps of std 0.05 per 0.1 s sample.
  double ss = 0;
  std::size_t n = 0;
  for (const auto& row : r.trace)
    if (row.w) {
      ss += row.w->w1 * row.w->w1 + row.w->w2 * row.w->w2;
      n += 2;
    }
  const double sd = std::sqrt(ss / static_cast<double>(n));
  EXPECT_NEAR(sd, 0.05 * std::sqrt(20.0), 0.05 * std::sqrt(20.0) * 0.2);
}

// The objective logged at every rotogo replan equals the robustness-to-go of
// the executed prefix joined to the chosen plan, evaluated from the start.
TEST(Mpc, RotogoObjectiveMatchesDirectEvaluation) {
  const ScenarioConfig c = small_mission(ObjectiveMode::rotogo, 31);
  const RunResult r = mpc_run(c);
  const Formula phi0 = c.parsed_formula();
  for (const auto& rec : r.replans) {
    const Signal full = reconstruct(r, rec, c);
    EXPECT_EQ(rec.objective, rotogo::rotogo(full, sec(0), rec.time, phi0)) << "replan at " << format_seconds(rec.time);
  }
}

TEST(Mpc, RobustnessObjectiveAndCostRecompute) {
  const ScenarioConfig c = small_mission(ObjectiveMode::robustness, 41);
  const RunResult r = mpc_run(c);
  const Formula phi0 = c.parsed_formula();
  for (const auto& rec : r.replans) {
    const Signal full = reconstruct(r, rec, c);
    EXPECT_EQ(rec.objective, robustness(full, sec(0), phi0));
    CostBreakdown cb;
    add_penalties(rec.trajectory, c.planner.limits, c.workspace, cb);
    EXPECT_EQ(rec.cost, robustness_to_cost(rec.objective) + cb.workspace_penalty + cb.limit_penalty);
  }
}

TEST(Mpc, SampleTouchesByMode) {
  const ScenarioConfig rc = small_mission(ObjectiveMode::rotogo, 51);
  const ScenarioConfig bc = small_mission(ObjectiveMode::robustness, 51);
  const RunResult r = mpc_run(rc), b = mpc_run(bc);
  const std::size_t n = rc.sample_count();
  for (const auto& rec : r.replans) {
    if (rec.formula.is_verdict()) continue;
    EXPECT_LE(rec.samples_touched, n - rec.sample_index - 1);
    EXPECT_GE(rec.earliest_sample_touched, rec.sample_index + 1);
  }
  for (const auto& rec : b.replans) EXPECT_EQ(rec.earliest_sample_touched, 0u);
}

TEST(Mpc, PlanFromStart) {
  const ScenarioConfig c = small_mission(ObjectiveMode::rotogo, 61, 0.0);
  const ReplanRecord rec = plan_from_start(c);
  ASSERT_EQ(rec.trajectory.size(), c.sample_count());
  EXPECT_EQ(rec.trajectory.front().x, c.robot_start.x);
  EXPECT_EQ(rec.trajectory.front().y, c.robot_start.y);
  EXPECT_EQ(rec.plan.via_points.size(), 4u);
  EXPECT_DOUBLE_EQ(rec.plan.duration, 4.0);
}

TEST(Mpc, RetainedPlansAreNotWorseThanOptimizerResult) {
  const ScenarioConfig c = small_mission(ObjectiveMode::robustness, 71, 0.0);
  const RunResult r = mpc_run(c);
  // In a static environment each replan scores at least as well as the
  // previous plan's tail, so costs never increase.
  for (std::size_t i = 1; i < r.replans.size(); ++i) EXPECT_LE(r.replans[i].cost, r.replans[i - 1].cost);
}

TEST(Scenario, ShippedConfigsLoad) {
  std::size_t count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(std::string(ROTOGO_SOURCE_DIR) + "/configs")) {
    if (entry.path().extension() != ".json") continue;
    EXPECT_NO_THROW(load_scenario_file(entry.path().string())) << entry.path();
    ++count;
  }
  EXPECT_GE(count, 4u);
  const ScenarioConfig s = load_scenario_file(std::string(ROTOGO_SOURCE_DIR) + "/configs/phi_avoid_static.json");
  EXPECT_EQ(s.env_noise_std, 0.0);
  EXPECT_EQ(s.formula, scenario_phi_avoid().formula);
}

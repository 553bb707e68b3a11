#include <doctest.h>

#include <cmath>

#include "netmisfit/error.hpp"
#include "netmisfit/montecarlo.hpp"

using namespace netmisfit;

namespace {

McSummary fake(int reps, int rejections) {
  McSummary s;
  s.spec.replications = reps;
  s.counts[static_cast<std::size_t>(Outcome::Misspecified)] = rejections;
  s.counts[static_cast<std::size_t>(Outcome::WellSpecified)] = reps - rejections;
  return s;
}

}  // namespace

TEST_SUITE("montecarlo") {
  TEST_CASE("spec validation") {
    ScenarioSpec s;
    s.replications = 0;
    CHECK_THROWS_AS(s.validate(), Error);
    s.replications = 1;
    s.scenario = Scenario::Perturbed;
    s.n = 55;
    try {
      s.validate();
      FAIL("expected IndivisibleN");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::IndivisibleN);
    }
    s.n = 50;
    s.model = Model::SBM;
    s.m = 0;
    CHECK_THROWS_AS(s.validate(), Error);
  }

  TEST_CASE("counts sum to replications") {
    for (Model model : {Model::ERG, Model::SBM}) {
      for (Scenario sc : {Scenario::Null, Scenario::Perturbed}) {
        ScenarioSpec s;
        s.model = model;
        s.scenario = sc;
        s.n = 30;
        s.m = 2;
        s.replications = 20;
        s.master_seed = 12;
        const McSummary r = run_scenario(s);
        int total = 0;
        for (int c : r.counts) total += c;
        CHECK(total == 20);
        int failures = 0;
        for (const auto& [reason, count] : r.failure_reasons) failures += count;
        CHECK(failures == r.count(Outcome::EstimationFailed));
      }
    }
  }

  TEST_CASE("ERG null in paper mode never rejects") {
    ScenarioSpec s;
    s.n = 50;
    s.replications = 200;
    s.erg_mode = ErgMode::PaperLiteral;
    s.master_seed = 77;
    const McSummary r = run_scenario(s);
    CHECK(r.count(Outcome::Misspecified) <= 1);
    CHECK(r.proportion_well_specified >= 0.99);
  }

  TEST_CASE("same seed gives identical summaries at any worker count") {
    ScenarioSpec s;
    s.model = Model::SBM;
    s.n = 40;
    s.m = 2;
    s.replications = 12;
    s.master_seed = 5;
    s.keep_records = true;
    const McSummary a = run_scenario(s);
    s.workers = 4;
    const McSummary b = run_scenario(s);
    CHECK(csv_row(a) == csv_row(b));
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
      CHECK(a.records[i].outcome == b.records[i].outcome);
      CHECK(a.records[i].statistic == b.records[i].statistic);
    }
    s.replications = 1;
    s.workers = 1;
    const McSummary c = run_scenario(s);
    s.workers = 8;
    CHECK(csv_row(c) == csv_row(run_scenario(s)));
  }

  TEST_CASE("draws depend only on the replication index") {
    ScenarioSpec s;
    s.model = Model::SBM;
    s.n = 30;
    s.m = 3;
    s.master_seed = 9;
    CHECK(draw_replication(s, 4).graph == draw_replication(s, 4).graph);
    CHECK_FALSE(draw_replication(s, 4).graph == draw_replication(s, 5).graph);
  }

  TEST_CASE("compare_scenarios") {
    const McSummary same = fake(100, 10);
    const DirectionalReport d0 = compare_scenarios(same, same);
    CHECK(d0.difference == 0.0);
    CHECK_FALSE(d0.flagged);
    const DirectionalReport d = compare_scenarios(fake(100, 2), fake(100, 98));
    CHECK(d.flagged);
    CHECK(d.difference == doctest::Approx(0.96));
    CHECK(d.z > 10.0);
    McSummary other = fake(100, 2);
    other.spec.n = 60;
    try {
      compare_scenarios(fake(100, 2), other);
      FAIL("expected MismatchedSpecs");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MismatchedSpecs);
    }
  }

  TEST_CASE("csv layout") {
    CHECK(csv_header() == "model,scenario,reps,n,m,proportion_well_specified,n_degenerate,n_failed");
    McSummary s = fake(10, 3);
    s.spec.n = 50;
    s.proportion_well_specified = 0.7;
    CHECK(csv_row(s) == "erg,null,10,50,,0.7000,0,0");
    s.spec.model = Model::SBM;
    s.spec.m = 3;
    s.proportion_well_specified = std::nan("");
    CHECK(csv_row(s) == "sbm,null,10,50,3,NA,0,0");
  }
}

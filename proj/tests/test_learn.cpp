#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fml/learn.hpp"
#include "fml/report_json.hpp"

using namespace fml;
using Catch::Approx;

namespace {

Dataset small_dataset(int n = 60, std::uint64_t seed = 5) {
  return gen_slp_dataset(n, seed);
}

LearnConfig quick_ga() {
  LearnConfig cfg = LearnConfig::ga_defaults();
  cfg.generations = 8;
  cfg.population_size = 10;
  return cfg;
}

LearnConfig quick_pso() {
  LearnConfig cfg = LearnConfig::pso_defaults();
  cfg.generations = 8;
  cfg.population_size = 12;
  return cfg;
}

}  // namespace

TEST_CASE("mse basics") {
  const FuzzySystem sys = baseline_part1_system();

  SECTION("zero when desired equals the inference output") {
    Dataset ds = small_dataset(20);
    const Evaluator ev(sys);
    Evaluator::Scratch scratch;
    for (auto& r : ds.records) r.desired = ev.infer_crisp(r.inputs, scratch);
    CHECK(mse(sys, ds) == 0.0);
  }

  SECTION("single record squares the error") {
    Dataset ds;
    ds.input_names = {"sa", "lcd", "scl", "sts"};
    ds.desired_name = "slp_do";
    const double out = infer(sys, {{"SA", 0}, {"LCD", 0}, {"SCL", 5}, {"STS", 5}}).crisp_value;
    ds.records.push_back({{0, 0, 5, 5}, out + 0.1});
    CHECK(mse(sys, ds) == Approx(0.01).margin(1e-12));
  }

  SECTION("empty dataset raises") {
    Dataset ds;
    ds.input_names = {"sa", "lcd", "scl", "sts"};
    CHECK_THROWS_AS(mse(sys, ds), EmptyDataset);
  }

  SECTION("baseline regression value is reproducible") {
    const double a = mse(sys, gen_slp_dataset(400, 42));
    const double b = mse(sys, gen_slp_dataset(400, 42));
    CHECK(a == b);
    CHECK(a > 0.0);
  }
}

TEST_CASE("chromosome encoding round-trips the baseline") {
  const FuzzySystem sys = baseline_part1_system();
  const Chromosome ch = encode_chromosome(sys);

  CHECK(ch.knowledge[0].size() == 16);
  CHECK(ch.knowledge[4].size() == 20);
  CHECK(ch.rule_weights.size() == 256);
  for (double w : ch.rule_weights) CHECK(w == 1.0);
  for (Hedge h : ch.hedges) CHECK(h == Hedge::None);

  CHECK(decode_chromosome(ch, sys) == sys);
  CHECK(decode_chromosome(ch) == sys);
}

TEST_CASE("decode repairs shuffled parameters") {
  const FuzzySystem sys = baseline_part1_system();
  Chromosome ch = encode_chromosome(sys);
  ch.knowledge[0][0] = -0.6;
  ch.knowledge[0][1] = -4.0;
  ch.knowledge[0][2] = -1.11;
  ch.knowledge[0][3] = -4.0;
  ch.rule_weights[7] = 1.7;    // clamps to 1
  ch.rule_weights[9] = -0.3;   // clamps to 0
  const FuzzySystem out = decode_chromosome(ch, sys);
  CHECK(out.variables[0].terms[0].shape == TrapezoidShape{-4, -4, -1.11, -0.6});
  CHECK(out.rules[7].weight == 1.0);
  CHECK(out.rules[9].weight == 0.0);
  CHECK(validate(out).empty());
}

TEST_CASE("decode always yields validate-clean systems") {
  SeededRng rng(17);
  const FuzzySystem skeleton = baseline_part1_system();
  const Dataset ds = small_dataset(10);
  for (int i = 0; i < 200; ++i) {
    Chromosome ch = encode_chromosome(skeleton);
    for (auto& block : ch.knowledge)
      for (double& p : block) p = rng.uniform(-6, 12);  // deliberately out of domain
    for (double& w : ch.rule_weights) w = rng.uniform(-1, 2);
    for (auto& h : ch.hedges) h = static_cast<Hedge>(rng.uniform_int(0, 2));
    const FuzzySystem sys = decode_chromosome(ch, skeleton);
    CHECK(validate(sys).empty());
    CHECK_NOTHROW(mse(sys, ds));
  }
}

TEST_CASE("encode rejects systems without the expected shape") {
  FuzzySystem sys = baseline_part1_system();
  sys.variables[0].terms.pop_back();
  CHECK_THROWS_AS(encode_chromosome(sys), ShapeMismatch);

  FuzzySystem fewer_rules = baseline_part1_system();
  fewer_rules.rules.resize(100);
  CHECK_THROWS_AS(encode_chromosome(fewer_rules), ShapeMismatch);
}

TEST_CASE("single-individual single-generation run reports that MSE") {
  const Dataset ds = small_dataset();
  LearnConfig cfg = quick_ga();
  cfg.generations = 1;
  cfg.population_size = 1;
  const LearnReport report = ga_optimize(ds, cfg);
  REQUIRE(report.history_best_mse.size() == 1);
  CHECK(report.history_best_mse[0] == Approx(mse(baseline_part1_system(), ds)).margin(1e-15));
}

TEST_CASE("no-op evolution stays at the baseline") {
  const Dataset ds = small_dataset();
  LearnConfig cfg = quick_ga();
  cfg.population_size = 1;
  cfg.crossover_rate = 0.0;
  cfg.mutation_rate = 0.0;
  const LearnReport report = ga_optimize(ds, cfg);
  const double baseline = mse(baseline_part1_system(), ds);
  for (double v : report.history_best_mse) CHECK(v == Approx(baseline).margin(1e-15));
  CHECK(report.best_system == baseline_part1_system());
}

TEST_CASE("ga history is monotone non-increasing") {
  const Dataset ds = small_dataset();
  const LearnReport report = ga_optimize(ds, quick_ga());
  REQUIRE(report.history_best_mse.size() == 8);
  for (std::size_t i = 1; i < report.history_best_mse.size(); ++i)
    CHECK(report.history_best_mse[i] <= report.history_best_mse[i - 1]);
  CHECK(validate(report.best_system).empty());
}

TEST_CASE("stationary particle keeps the baseline MSE") {
  const Dataset ds = small_dataset();
  LearnConfig cfg = quick_pso();
  cfg.population_size = 1;
  cfg.generations = 3;
  cfg.cognitive = 0.0;
  cfg.social = 0.0;
  const LearnReport report = pso_optimize(ds, cfg);
  const double baseline = mse(baseline_part1_system(), ds);
  REQUIRE(report.history_best_mse.size() == 3);
  for (double v : report.history_best_mse) CHECK(v == Approx(baseline).margin(1e-15));
}

TEST_CASE("pso history is monotone and the swarm is seeded") {
  const Dataset ds = small_dataset();
  const LearnReport a = pso_optimize(ds, quick_pso());
  const LearnReport b = pso_optimize(ds, quick_pso());
  for (std::size_t i = 1; i < a.history_best_mse.size(); ++i)
    CHECK(a.history_best_mse[i] <= a.history_best_mse[i - 1]);
  CHECK(a.history_best_mse == b.history_best_mse);
  CHECK(a.best_system == b.best_system);
}

TEST_CASE("reports are identical across thread counts") {
  const Dataset ds = small_dataset();

  LearnConfig one = quick_ga();
  one.threads = 1;
  LearnConfig four = quick_ga();
  four.threads = 4;
  const auto report1 = ga_optimize(ds, one);
  const auto report4 = ga_optimize(ds, four);
  CHECK(report1.history_best_mse == report4.history_best_mse);
  CHECK(report1.best_system == report4.best_system);

  LearnConfig pso_one = quick_pso();
  pso_one.threads = 1;
  LearnConfig pso_four = quick_pso();
  pso_four.threads = 4;
  CHECK(pso_optimize(ds, pso_one).history_best_mse ==
        pso_optimize(ds, pso_four).history_best_mse);
}

TEST_CASE("cross_validate aggregates fold results") {
  const Dataset ds = gen_slp_dataset(100, 21);
  LearnConfig cfg = quick_ga();
  cfg.generations = 4;
  cfg.folds = 5;
  const LearnReport report = cross_validate(ds, cfg);

  REQUIRE(report.fold_mses.size() == 5);
  REQUIRE(report.fold_histories.size() == 5);
  for (const auto& fm : report.fold_mses) {
    CHECK(fm.train_mse >= 0.0);
    CHECK(fm.test_mse >= 0.0);
  }
  CHECK(report.baseline_mse == Approx(mse(baseline_part1_system(), ds)).margin(1e-15));
  for (std::size_t i = 1; i < report.history_best_mse.size(); ++i)
    CHECK(report.history_best_mse[i] <= report.history_best_mse[i - 1]);

  SECTION("deterministic re-run") {
    const LearnReport again = cross_validate(ds, cfg);
    CHECK(report_to_json(report).dump() == report_to_json(again).dump());
    CHECK(report.best_system == again.best_system);
  }
}

TEST_CASE("learning improves on the baseline in a short run") {
  const Dataset ds = gen_slp_dataset(120, 11);
  LearnConfig cfg = quick_ga();
  cfg.generations = 30;
  cfg.population_size = 20;
  const LearnReport report = ga_optimize(ds, cfg);
  CHECK(report.history_best_mse.back() < report.history_best_mse.front());
}

TEST_CASE("config validation") {
  const Dataset ds = small_dataset(10);
  LearnConfig cfg = quick_ga();
  cfg.generations = 0;
  CHECK_THROWS_AS(ga_optimize(ds, cfg), std::invalid_argument);

  LearnConfig wrong = quick_pso();
  CHECK_THROWS_AS(ga_optimize(ds, wrong), std::invalid_argument);

  LearnConfig bad_rate = quick_ga();
  bad_rate.mutation_rate = 1.5;
  CHECK_THROWS_AS(ga_optimize(ds, bad_rate), std::invalid_argument);

  Dataset empty;
  empty.input_names = {"sa", "lcd", "scl", "sts"};
  CHECK_THROWS_AS(ga_optimize(empty, quick_ga()), EmptyDataset);
}

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "fml/dataset.hpp"

using namespace fml;
using Catch::Approx;

TEST_CASE("slp_oracle maps the score range onto [0,1]") {
  CHECK(slp_oracle(-4, 4, 0, 0) == 0.0);
  CHECK(slp_oracle(4, -4, 10, 10) == 1.0);
  CHECK(slp_oracle(0, 0, 5, 5) == Approx(0.5));
}

TEST_CASE("slp_oracle is monotone in each argument") {
  SeededRng rng(5);
  for (int i = 0; i < 200; ++i) {
    const double sa = rng.uniform(-4, 4), lcd = rng.uniform(-4, 4);
    const double scl = rng.uniform(0, 10), sts = rng.uniform(0, 10);
    const double base = slp_oracle(sa, lcd, scl, sts);
    const double eps = 0.25;
    if (sa + eps <= 4) CHECK(slp_oracle(sa + eps, lcd, scl, sts) >= base);
    if (lcd + eps <= 4) CHECK(slp_oracle(sa, lcd + eps, scl, sts) <= base);
    if (scl + eps <= 10) CHECK(slp_oracle(sa, lcd, scl + eps, sts) >= base);
    if (sts + eps <= 10) CHECK(slp_oracle(sa, lcd, scl, sts + eps) >= base);
  }
}

TEST_CASE("rlcr_oracle reproduces every published desired output") {
  struct Row {
    double sa, slp, expected;
  };
  const Row rows[] = {
      {-1.43, 0.111, -1.99067}, {-1.03, 0.167, -1.57467}, {-2.23, 0.098, -2.55867},
      {-1.88, 0.110, -2.29333}, {-3.74, 0.113, -3.52533}, {-2.87, 0.116, -2.93733},
      {-1.68, 0.153, -2.04533}, {-0.97, 0.117, -1.668},   {-1.50, 0.105, -2.05333},
      {-2.65, 0.112, -2.80133}, {2.87, 0.903, 2.988},     {3.71, 0.902, 3.545333},
      {1.43, 0.803, 1.761333},  {1.61, 0.850, 2.006667},  {1.57, 0.907, 2.132},
  };
  for (const Row& r : rows) {
    CAPTURE(r.sa, r.slp);
    CHECK(rlcr_oracle(r.sa, r.slp) == Approx(r.expected).margin(1e-3));
  }
  CHECK(rlcr_oracle(4, 1) == 4.0);
  CHECK(rlcr_oracle(-4, 0) == -4.0);
}

TEST_CASE("gen_slp_dataset is seeded and clamped") {
  const Dataset a = gen_slp_dataset(400, 42);
  const Dataset b = gen_slp_dataset(400, 42);
  CHECK(a == b);
  CHECK(a.records.size() == 400);
  for (const auto& r : a.records) {
    CHECK(r.desired >= 0.0);
    CHECK(r.desired <= 1.0);
    CHECK(r.inputs.size() == 4);
  }
  CHECK(gen_slp_dataset(400, 43) != a);
}

TEST_CASE("gen_slp_dataset mean matches the oracle's expectation") {
  const Dataset big = gen_slp_dataset(10000, 7);
  double mean = 0;
  for (const auto& r : big.records) mean += r.desired;
  mean /= static_cast<double>(big.records.size());
  CHECK(mean == Approx(0.5).margin(0.05));
}

TEST_CASE("gen_rlcr_dataset embeds the fixture prefix on request") {
  const Dataset ds = gen_rlcr_dataset(400, 42, /*include_paper_rows=*/true);
  REQUIRE(ds.records.size() == 400);
  const auto& fixtures = rlcr_fixture_inputs();
  for (std::size_t i = 0; i < fixtures.size(); ++i) {
    CHECK(ds.records[i].inputs[0] == fixtures[i].first);
    CHECK(ds.records[i].inputs[1] == fixtures[i].second);
    CHECK(ds.records[i].desired ==
          Approx(rlcr_oracle(fixtures[i].first, fixtures[i].second)).margin(1e-9));
  }
  CHECK(gen_rlcr_dataset(0, 42).records.empty());
  CHECK(gen_rlcr_dataset(100, 9) == gen_rlcr_dataset(100, 9));
}

TEST_CASE("kfold_split partitions the dataset") {
  const Dataset ds = gen_slp_dataset(400, 42);
  const auto folds = kfold_split(ds, 5, 42);
  REQUIRE(folds.size() == 5);

  std::vector<Record> all_test;
  for (const auto& f : folds) {
    CHECK(f.test.records.size() == 80);
    CHECK(f.train.records.size() == 320);
    all_test.insert(all_test.end(), f.test.records.begin(), f.test.records.end());
  }
  REQUIRE(all_test.size() == ds.records.size());

  auto key = [](const Record& r) { return std::make_pair(r.inputs, r.desired); };
  std::vector<std::pair<std::vector<double>, double>> got, want;
  for (const auto& r : all_test) got.push_back(key(r));
  for (const auto& r : ds.records) want.push_back(key(r));
  std::sort(got.begin(), got.end());
  std::sort(want.begin(), want.end());
  CHECK(got == want);

  SECTION("same seed, same split") {
    const auto again = kfold_split(ds, 5, 42);
    for (std::size_t f = 0; f < folds.size(); ++f) {
      CHECK(again[f].train == folds[f].train);
      CHECK(again[f].test == folds[f].test);
    }
  }

  SECTION("uneven sizes stay within one") {
    const auto uneven = kfold_split(gen_slp_dataset(17, 3), 5, 1);
    std::size_t total = 0;
    for (const auto& f : uneven) {
      CHECK(f.test.records.size() >= 3);
      CHECK(f.test.records.size() <= 4);
      total += f.test.records.size();
    }
    CHECK(total == 17);
  }

  SECTION("too few records") {
    CHECK_THROWS_AS(kfold_split(gen_slp_dataset(3, 1), 5, 1), TooFewRecords);
  }
}

#pragma once

// Synthetic datasets for both pipeline stages: seeded record generation,
// the desired-output oracles, and the K-fold splitter.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "fml/rng.hpp"

namespace fml {

struct TooFewRecords : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Record {
  std::vector<double> inputs;  // ordered per Dataset::input_names
  double desired = 0.0;

  friend bool operator==(const Record&, const Record&) = default;
};

struct Dataset {
  std::vector<std::string> input_names;
  std::string desired_name;
  std::vector<Record> records;
  std::uint64_t seed = 0;

  std::size_t size() const { return records.size(); }

  std::vector<std::string> schema() const {
    std::vector<std::string> s = input_names;
    s.push_back(desired_name);
    return s;
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

inline std::map<std::string, double> to_crisp_input(const Dataset& ds, const Record& r) {
  std::map<std::string, double> m;
  for (std::size_t i = 0; i < ds.input_names.size(); ++i) m[ds.input_names[i]] = r.inputs[i];
  return m;
}

inline double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

/// Target performance for the assessment stage: each input mapped linearly
/// onto [0,3] over its domain, combined with the same 4/-1/1/1 weighting the
/// rule base uses, then rescaled from [-3,18] into [0,1].
inline double slp_oracle(double sa, double lcd, double scl, double sts) {
  auto unit3 = [](double x, double lo, double hi) { return (x - lo) / (hi - lo) * 3.0; };
  const double s = 4.0 * unit3(sa, -4, 4) - unit3(lcd, -4, 4) + unit3(scl, 0, 10) +
                   unit3(sts, 0, 10);
  return clamp01((s + 3.0) / 21.0);
}

/// Target content rank for the recommendation stage, clamped to [-4,4].
inline double rlcr_oracle(double sa, double slp) {
  return std::clamp((2.0 * sa + 8.0 * slp - 4.0) / 3.0, -4.0, 4.0);
}

/// Published (SA, SLP) fixture pairs used by gen_rlcr_dataset when asked to
/// embed them as a fixed prefix.
inline const std::vector<std::pair<double, double>>& rlcr_fixture_inputs() {
  static const std::vector<std::pair<double, double>> rows = {
      {-1.43, 0.111}, {-1.03, 0.167}, {-2.23, 0.098}, {-1.88, 0.110}, {-3.74, 0.113},
      {-2.87, 0.116}, {-1.68, 0.153}, {-0.97, 0.117}, {-1.50, 0.105}, {-2.65, 0.112},
      {2.87, 0.903},  {3.71, 0.902},  {1.43, 0.803},  {1.61, 0.850},  {1.57, 0.907}};
  return rows;
}

/// Assessment-stage dataset: inputs uniform over their domains, desired
/// output from slp_oracle plus clamped Gaussian noise.
inline Dataset gen_slp_dataset(int n = 400, std::uint64_t seed = 42,
                               double noise_sigma = 0.02) {
  if (n < 1) throw std::invalid_argument("gen_slp_dataset: n must be >= 1");
  Dataset ds;
  ds.input_names = {"sa", "lcd", "scl", "sts"};
  ds.desired_name = "slp_do";
  ds.seed = seed;
  SeededRng rng(seed);
  ds.records.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double sa = rng.uniform(-4, 4);
    const double lcd = rng.uniform(-4, 4);
    const double scl = rng.uniform(0, 10);
    const double sts = rng.uniform(0, 10);
    const double noise = noise_sigma > 0.0 ? rng.gaussian(0.0, noise_sigma) : 0.0;
    ds.records.push_back({{sa, lcd, scl, sts}, clamp01(slp_oracle(sa, lcd, scl, sts) + noise)});
  }
  return ds;
}

/// Recommendation-stage dataset: SA uniform on [-4,4], SLP uniform on [0,1],
/// desired output from rlcr_oracle. With include_paper_rows the 15 published
/// input pairs form a fixed prefix.
inline Dataset gen_rlcr_dataset(int n = 400, std::uint64_t seed = 42,
                                bool include_paper_rows = false) {
  if (n < 0) throw std::invalid_argument("gen_rlcr_dataset: n must be >= 0");
  Dataset ds;
  ds.input_names = {"sa", "slp"};
  ds.desired_name = "rlcr_do";
  ds.seed = seed;
  SeededRng rng(seed);
  if (include_paper_rows) {
    const auto& fixtures = rlcr_fixture_inputs();
    for (std::size_t i = 0; i < fixtures.size() && static_cast<int>(i) < n; ++i) {
      const auto [sa, slp] = fixtures[i];
      ds.records.push_back({{sa, slp}, rlcr_oracle(sa, slp)});
    }
  }
  while (static_cast<int>(ds.records.size()) < n) {
    const double sa = rng.uniform(-4, 4);
    const double slp = rng.uniform(0, 1);
    ds.records.push_back({{sa, slp}, rlcr_oracle(sa, slp)});
  }
  return ds;
}

struct KFold {
  Dataset train;
  Dataset test;
};

/// Seeded shuffle, then K folds sized within one record of each other; every
/// record lands in exactly one test fold.
inline std::vector<KFold> kfold_split(const Dataset& ds, int k = 5,
                                      std::uint64_t seed = 42) {
  if (k < 2) throw std::invalid_argument("kfold_split: K must be >= 2");
  if (ds.records.size() < static_cast<std::size_t>(k))
    throw TooFewRecords("kfold_split: dataset smaller than K");

  std::vector<std::size_t> order(ds.records.size());
  std::iota(order.begin(), order.end(), 0);
  SeededRng rng(seed);
  rng.shuffle(order);

  const std::size_t n = order.size();
  std::vector<KFold> folds;
  folds.reserve(static_cast<std::size_t>(k));
  std::size_t start = 0;
  for (int f = 0; f < k; ++f) {
    const std::size_t count = n / static_cast<std::size_t>(k) +
                              (static_cast<std::size_t>(f) < n % static_cast<std::size_t>(k) ? 1 : 0);
    KFold fold;
    fold.train.input_names = fold.test.input_names = ds.input_names;
    fold.train.desired_name = fold.test.desired_name = ds.desired_name;
    fold.train.seed = fold.test.seed = ds.seed;
    for (std::size_t i = 0; i < n; ++i) {
      const bool in_test = i >= start && i < start + count;
      (in_test ? fold.test : fold.train).records.push_back(ds.records[order[i]]);
    }
    folds.push_back(std::move(fold));
    start += count;
  }
  return folds;
}

}  // namespace fml

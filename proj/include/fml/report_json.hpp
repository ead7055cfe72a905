#pragma once

// JSON export of learning reports: config echo, per-generation MSE curve,
// per-fold table.

#include <json.hpp>

#include "fml/learn.hpp"

namespace fml {

inline nlohmann::json config_to_json(const LearnConfig& cfg) {
  return nlohmann::json{
      {"method", cfg.method == LearnMethod::Ga ? "ga" : "pso"},
      {"generations", cfg.generations},
      {"populationSize", cfg.population_size},
      {"crossoverRate", cfg.crossover_rate},
      {"mutationRate", cfg.mutation_rate},
      {"inertia", cfg.inertia},
      {"cognitive", cfg.cognitive},
      {"social", cfg.social},
      {"velocityClampFraction", cfg.velocity_clamp_fraction},
      {"seed", cfg.seed},
      {"folds", cfg.folds},
      {"threads", cfg.threads},
      {"seedBaseline", cfg.seed_baseline},
      {"cogSamples", cfg.cog_samples},
  };
}

inline nlohmann::json report_to_json(const LearnReport& report) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : report.fold_mses)
    folds.push_back({{"fold", f.fold}, {"trainMse", f.train_mse}, {"testMse", f.test_mse}});
  return nlohmann::json{
      {"config", config_to_json(report.config)},
      {"beforeMse", report.baseline_mse},
      {"historyBestMse", report.history_best_mse},
      {"folds", folds},
      {"meanTrainMse", report.mean_train_mse},
      {"meanTestMse", report.mean_test_mse},
  };
}

}  // namespace fml

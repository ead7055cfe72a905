#pragma once

// Knowledge-base optimization against dataset MSE: a generational GA over
// the full 266-gene encoding (shape blocks, rule weights, hedges) and a
// global-best PSO over the 84 shape parameters, plus a K-fold harness.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "fml/dataset.hpp"
#include "fml/inference.hpp"
#include "fml/model.hpp"
#include "fml/rng.hpp"
#include "fml/rulegen.hpp"

namespace fml {

struct EmptyDataset : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ShapeMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class LearnMethod { Ga, Pso };

struct LearnConfig {
  LearnMethod method = LearnMethod::Ga;
  int generations = 300;
  int population_size = 50;  // GA population / PSO swarm size
  double crossover_rate = 0.9;
  double mutation_rate = 0.1;
  double inertia = 0.729;
  double cognitive = 1.49445;
  double social = 1.49445;
  double velocity_clamp_fraction = 0.2;
  std::uint64_t seed = 42;
  int folds = 5;
  int threads = 1;
  bool seed_baseline = true;  // first individual/particle starts at the base system
  int cog_samples = 1001;
  std::optional<FuzzySystem> base_system;  // defaults to baseline_part1_system()

  static LearnConfig ga_defaults() { return LearnConfig{}; }

  static LearnConfig pso_defaults() {
    LearnConfig cfg;
    cfg.method = LearnMethod::Pso;
    cfg.population_size = 84;
    return cfg;
  }
};

/// 266-gene encoding: five shape blocks (one per variable, 4 params per
/// term), 256 rule weights, five per-variable hedges.
struct Chromosome {
  std::array<std::vector<double>, 5> knowledge;  // 16,16,16,16,20 params
  std::vector<double> rule_weights;              // 256
  std::array<Hedge, 5> hedges = {Hedge::None, Hedge::None, Hedge::None, Hedge::None,
                                 Hedge::None};

  friend bool operator==(const Chromosome&, const Chromosome&) = default;
};

struct Particle {
  std::vector<double> position;  // 84 shape parameters
  std::vector<double> velocity;
  std::vector<double> pbest_position;
  double pbest_fitness = std::numeric_limits<double>::infinity();
};

struct FoldMse {
  int fold = 0;
  double train_mse = 0.0;
  double test_mse = 0.0;
};

struct LearnReport {
  FuzzySystem best_system;
  std::vector<double> history_best_mse;  // best-so-far per generation
  std::vector<FoldMse> fold_mses;
  std::vector<std::vector<double>> fold_histories;
  double baseline_mse = 0.0;
  double mean_train_mse = 0.0;
  double mean_test_mse = 0.0;
  LearnConfig config;
};

namespace learn_detail {

// The fixed tunable layout: 4 input variables of 4 terms, one output of 5
// terms, 256 rules.
struct Layout {
  std::array<std::size_t, 5> block_sizes;   // 4 * term count per variable
  std::array<double, 5> domain_left;
  std::array<double, 5> domain_right;
  std::size_t total_params = 0;
};

inline void require_part1_shape(const FuzzySystem& sys) {
  const auto inputs = sys.input_variables();
  const FuzzyVariable* output = sys.output_variable();
  if (sys.variables.size() != 5 || inputs.size() != 4 || !output)
    throw ShapeMismatch("system must have 4 input variables and 1 output variable");
  for (const auto* v : inputs)
    if (v->terms.size() != 4)
      throw ShapeMismatch("input variable '" + v->name + "' must have 4 terms");
  if (output->terms.size() != 5)
    throw ShapeMismatch("output variable '" + output->name + "' must have 5 terms");
  if (sys.rules.size() != 256)
    throw ShapeMismatch("rule base must have 256 rules, has " +
                        std::to_string(sys.rules.size()));
}

inline Layout layout_of(const FuzzySystem& sys) {
  require_part1_shape(sys);
  Layout l{};
  for (std::size_t i = 0; i < 5; ++i) {
    const FuzzyVariable& v = sys.variables[i];
    l.block_sizes[i] = v.terms.size() * 4;
    l.domain_left[i] = v.domain_left;
    l.domain_right[i] = v.domain_right;
    l.total_params += l.block_sizes[i];
  }
  return l;
}

/// Sort one term's 4 parameters ascending and clamp them into the domain.
inline void repair_term(double* p, double lo, double hi) {
  std::sort(p, p + 4);
  for (int i = 0; i < 4; ++i) p[i] = std::clamp(p[i], lo, hi);
}

inline void repair_block(std::vector<double>& block, double lo, double hi) {
  for (std::size_t t = 0; t * 4 < block.size(); ++t) repair_term(block.data() + t * 4, lo, hi);
}

inline std::size_t column_of(const Dataset& ds, const std::string& name) {
  auto lower = [](std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  };
  const std::string want = lower(name);
  for (std::size_t i = 0; i < ds.input_names.size(); ++i)
    if (lower(ds.input_names[i]) == want) return i;
  throw ShapeMismatch("dataset has no column for input variable '" + name + "'");
}

inline std::vector<std::size_t> input_permutation(const Evaluator& ev, const Dataset& ds) {
  std::vector<std::size_t> perm;
  perm.reserve(ev.input_names().size());
  for (const auto& name : ev.input_names()) perm.push_back(column_of(ds, name));
  return perm;
}

inline double mse_of(const Evaluator& ev, const Dataset& ds,
                     const std::vector<std::size_t>& perm) {
  Evaluator::Scratch scratch;
  std::vector<double> inputs(perm.size());
  double sum = 0.0;
  for (const auto& r : ds.records) {
    for (std::size_t i = 0; i < perm.size(); ++i) inputs[i] = r.inputs[perm[i]];
    const double err = ev.infer_crisp(inputs, scratch) - r.desired;
    sum += err * err;
  }
  return sum / static_cast<double>(ds.records.size());
}

/// Run `fn(i)` for i in [0,n) across `threads` workers in deterministic
/// chunks. Results must be written to independent slots.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace learn_detail

/// Mean squared error of the system's inference against the dataset's
/// desired outputs.
inline double mse(const FuzzySystem& sys, const Dataset& ds, int cog_samples = 1001) {
  if (ds.records.empty()) throw EmptyDataset("mse: dataset is empty");
  Evaluator ev(sys, InferenceOptions{cog_samples});
  return learn_detail::mse_of(ev, ds, learn_detail::input_permutation(ev, ds));
}

inline Chromosome encode_chromosome(const FuzzySystem& sys) {
  learn_detail::require_part1_shape(sys);
  Chromosome ch;
  for (std::size_t i = 0; i < 5; ++i) {
    const FuzzyVariable& v = sys.variables[i];
    ch.knowledge[i].reserve(v.terms.size() * 4);
    for (const auto& t : v.terms) {
      ch.knowledge[i].push_back(t.shape.a);
      ch.knowledge[i].push_back(t.shape.b);
      ch.knowledge[i].push_back(t.shape.c);
      ch.knowledge[i].push_back(t.shape.d);
    }
    ch.hedges[i] = v.terms.front().hedge;
  }
  ch.rule_weights.reserve(sys.rules.size());
  for (const auto& r : sys.rules) ch.rule_weights.push_back(r.weight);
  return ch;
}

/// Rebuild a system from a chromosome on top of a structural skeleton
/// (names, rule structure, metadata). Shapes are repaired: each term's four
/// parameters sorted ascending and clamped into the variable's domain;
/// weights clamped into [0,1]; the per-variable hedge lands on every term.
inline FuzzySystem decode_chromosome(const Chromosome& ch, const FuzzySystem& skeleton) {
  const learn_detail::Layout layout = learn_detail::layout_of(skeleton);
  for (std::size_t i = 0; i < 5; ++i)
    if (ch.knowledge[i].size() != layout.block_sizes[i])
      throw ShapeMismatch("knowledge block " + std::to_string(i) + " has wrong size");
  if (ch.rule_weights.size() != skeleton.rules.size())
    throw ShapeMismatch("rule weight vector has wrong size");

  FuzzySystem sys = skeleton;
  for (std::size_t i = 0; i < 5; ++i) {
    FuzzyVariable& v = sys.variables[i];
    std::vector<double> block = ch.knowledge[i];
    learn_detail::repair_block(block, v.domain_left, v.domain_right);
    for (std::size_t t = 0; t < v.terms.size(); ++t) {
      v.terms[t].shape = {block[t * 4], block[t * 4 + 1], block[t * 4 + 2], block[t * 4 + 3]};
      v.terms[t].hedge = ch.hedges[i];
    }
  }
  for (std::size_t i = 0; i < sys.rules.size(); ++i)
    sys.rules[i].weight = std::clamp(ch.rule_weights[i], 0.0, 1.0);
  return sys;
}

inline FuzzySystem decode_chromosome(const Chromosome& ch) {
  return decode_chromosome(ch, baseline_part1_system());
}

namespace learn_detail {

inline void check_config(const LearnConfig& cfg, LearnMethod expected) {
  if (cfg.method != expected) throw std::invalid_argument("wrong method in LearnConfig");
  if (cfg.generations < 1) throw std::invalid_argument("generations must be >= 1");
  if (cfg.population_size < 1) throw std::invalid_argument("population must be >= 1");
  for (double rate : {cfg.crossover_rate, cfg.mutation_rate})
    if (rate < 0.0 || rate > 1.0) throw std::invalid_argument("rates must be in [0,1]");
}

inline Chromosome random_chromosome(const Layout& layout, const FuzzySystem& skeleton,
                                    SeededRng& rng) {
  Chromosome ch;
  for (std::size_t i = 0; i < 5; ++i) {
    ch.knowledge[i].resize(layout.block_sizes[i]);
    for (double& p : ch.knowledge[i])
      p = rng.uniform(layout.domain_left[i], layout.domain_right[i]);
    repair_block(ch.knowledge[i], layout.domain_left[i], layout.domain_right[i]);
    ch.hedges[i] = static_cast<Hedge>(rng.uniform_int(0, 2));
  }
  ch.rule_weights.resize(skeleton.rules.size());
  for (double& w : ch.rule_weights) w = rng.uniform01();
  return ch;
}

// Gene indexing: 0..4 shape blocks, 5..260 rule weights, 261..265 hedges.
inline constexpr std::size_t kKnowledgeGenes = 5;
inline constexpr std::size_t kWeightGenes = 256;
inline constexpr std::size_t kTotalGenes = kKnowledgeGenes + kWeightGenes + 5;

inline void swap_gene(Chromosome& a, Chromosome& b, std::size_t gene) {
  if (gene < kKnowledgeGenes) {
    std::swap(a.knowledge[gene], b.knowledge[gene]);
  } else if (gene < kKnowledgeGenes + kWeightGenes) {
    std::swap(a.rule_weights[gene - kKnowledgeGenes], b.rule_weights[gene - kKnowledgeGenes]);
  } else {
    std::swap(a.hedges[gene - kKnowledgeGenes - kWeightGenes],
              b.hedges[gene - kKnowledgeGenes - kWeightGenes]);
  }
}

inline void mutate_gene(Chromosome& ch, std::size_t gene, const Layout& layout,
                        SeededRng& rng) {
  if (gene < kKnowledgeGenes) {
    auto& block = ch.knowledge[gene];
    const double width = layout.domain_right[gene] - layout.domain_left[gene];
    const std::size_t p = static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<int>(block.size()) - 1));
    block[p] += rng.gaussian(0.0, 0.05 * width);
    repair_term(block.data() + (p / 4) * 4, layout.domain_left[gene],
                layout.domain_right[gene]);
  } else if (gene < kKnowledgeGenes + kWeightGenes) {
    ch.rule_weights[gene - kKnowledgeGenes] = rng.uniform01();
  } else {
    ch.hedges[gene - kKnowledgeGenes - kWeightGenes] =
        static_cast<Hedge>(rng.uniform_int(0, 2));
  }
}

struct EvalContext {
  const FuzzySystem* skeleton;
  const Dataset* train;
  int cog_samples;
  std::vector<std::size_t> perm;

  double fitness(const FuzzySystem& sys) const {
    Evaluator ev(sys, InferenceOptions{cog_samples});
    return mse_of(ev, *train, perm);
  }
};

}  // namespace learn_detail

/// Generational GA with elitism of one: tournament selection, uniform
/// crossover at gene granularity (whole shape blocks swap as units), and
/// per-gene mutation. All random draws happen in the single-threaded
/// breeding phase, so fitness evaluation parallelism cannot change results.
inline LearnReport ga_optimize(const Dataset& train, const LearnConfig& cfg) {
  using namespace learn_detail;
  check_config(cfg, LearnMethod::Ga);
  if (train.records.empty()) throw EmptyDataset("ga_optimize: empty training set");

  const FuzzySystem skeleton =
      cfg.base_system ? *cfg.base_system : baseline_part1_system();
  const Layout layout = layout_of(skeleton);

  EvalContext ctx;
  ctx.skeleton = &skeleton;
  ctx.train = &train;
  ctx.cog_samples = cfg.cog_samples;
  {
    Evaluator probe(skeleton, InferenceOptions{cfg.cog_samples});
    ctx.perm = input_permutation(probe, train);
  }

  SeededRng rng(cfg.seed);
  const std::size_t pop_size = static_cast<std::size_t>(cfg.population_size);
  std::vector<Chromosome> pop;
  pop.reserve(pop_size);
  for (std::size_t i = 0; i < pop_size; ++i) {
    if (i == 0 && cfg.seed_baseline)
      pop.push_back(encode_chromosome(skeleton));
    else
      pop.push_back(random_chromosome(layout, skeleton, rng));
  }

  std::vector<double> fitness(pop_size, 0.0);
  auto evaluate_all = [&]() {
    parallel_for(pop_size, cfg.threads, [&](std::size_t i) {
      fitness[i] = ctx.fitness(decode_chromosome(pop[i], skeleton));
    });
  };

  auto best_index = [&]() {
    std::size_t best = 0;
    for (std::size_t i = 1; i < pop_size; ++i)
      if (fitness[i] < fitness[best]) best = i;
    return best;
  };

  LearnReport report;
  report.config = cfg;
  report.config.base_system.reset();

  evaluate_all();
  std::size_t best = best_index();
  Chromosome best_ever = pop[best];
  double best_fitness = fitness[best];
  report.history_best_mse.push_back(best_fitness);

  for (int gen = 1; gen < cfg.generations; ++gen) {
    std::vector<Chromosome> next;
    next.reserve(pop_size);
    next.push_back(best_ever);  // elite

    auto select = [&]() -> const Chromosome& {
      const std::size_t a = static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<int>(pop_size) - 1));
      const std::size_t b = static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<int>(pop_size) - 1));
      return fitness[a] <= fitness[b] ? pop[a] : pop[b];
    };

    while (next.size() < pop_size) {
      Chromosome child1 = select();
      Chromosome child2 = select();
      if (rng.uniform01() < cfg.crossover_rate) {
        for (std::size_t g = 0; g < kTotalGenes; ++g)
          if (rng.uniform01() < 0.5) swap_gene(child1, child2, g);
      }
      for (Chromosome* child : {&child1, &child2}) {
        for (std::size_t g = 0; g < kTotalGenes; ++g)
          if (rng.uniform01() < cfg.mutation_rate) mutate_gene(*child, g, layout, rng);
      }
      next.push_back(std::move(child1));
      if (next.size() < pop_size) next.push_back(std::move(child2));
    }

    pop = std::move(next);
    evaluate_all();
    best = best_index();
    if (fitness[best] < best_fitness) {
      best_fitness = fitness[best];
      best_ever = pop[best];
    }
    report.history_best_mse.push_back(best_fitness);
  }

  report.best_system = decode_chromosome(best_ever, skeleton);
  return report;
}

/// Synchronous global-best PSO over the 84 shape parameters; rule weights
/// stay 1.0 and hedges None. Velocities clamp per dimension to a fraction of
/// the domain width, positions clamp to the domain.
inline LearnReport pso_optimize(const Dataset& train, const LearnConfig& cfg) {
  using namespace learn_detail;
  check_config(cfg, LearnMethod::Pso);
  if (train.records.empty()) throw EmptyDataset("pso_optimize: empty training set");

  const FuzzySystem skeleton =
      cfg.base_system ? *cfg.base_system : baseline_part1_system();
  const Layout layout = layout_of(skeleton);

  // Flatten per-dimension bounds.
  std::vector<double> lo, hi;
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t k = 0; k < layout.block_sizes[i]; ++k) {
      lo.push_back(layout.domain_left[i]);
      hi.push_back(layout.domain_right[i]);
    }
  }
  const std::size_t dims = lo.size();

  EvalContext ctx;
  ctx.skeleton = &skeleton;
  ctx.train = &train;
  ctx.cog_samples = cfg.cog_samples;
  {
    Evaluator probe(skeleton, InferenceOptions{cfg.cog_samples});
    ctx.perm = input_permutation(probe, train);
  }

  auto position_to_system = [&](const std::vector<double>& pos) {
    Chromosome ch;
    std::size_t off = 0;
    for (std::size_t i = 0; i < 5; ++i) {
      ch.knowledge[i].assign(pos.begin() + static_cast<std::ptrdiff_t>(off),
                             pos.begin() + static_cast<std::ptrdiff_t>(off + layout.block_sizes[i]));
      off += layout.block_sizes[i];
    }
    ch.rule_weights.assign(skeleton.rules.size(), 1.0);
    return decode_chromosome(ch, skeleton);
  };

  SeededRng rng(cfg.seed);
  const std::size_t swarm = static_cast<std::size_t>(cfg.population_size);
  std::vector<Particle> particles(swarm);
  for (std::size_t i = 0; i < swarm; ++i) {
    Particle& p = particles[i];
    p.position.resize(dims);
    p.velocity.assign(dims, 0.0);
    if (i == 0 && cfg.seed_baseline) {
      const Chromosome base = encode_chromosome(skeleton);
      std::size_t off = 0;
      for (std::size_t b = 0; b < 5; ++b)
        for (double v : base.knowledge[b]) p.position[off++] = v;
    } else {
      for (std::size_t d = 0; d < dims; ++d) p.position[d] = rng.uniform(lo[d], hi[d]);
    }
    p.pbest_position = p.position;
  }

  std::vector<double> fitness(swarm, 0.0);
  auto evaluate_all = [&]() {
    parallel_for(swarm, cfg.threads, [&](std::size_t i) {
      fitness[i] = ctx.fitness(position_to_system(particles[i].position));
    });
  };

  LearnReport report;
  report.config = cfg;
  report.config.base_system.reset();

  evaluate_all();
  std::vector<double> gbest_position;
  double gbest_fitness = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < swarm; ++i) {
    particles[i].pbest_fitness = fitness[i];
    if (fitness[i] < gbest_fitness) {
      gbest_fitness = fitness[i];
      gbest_position = particles[i].position;
    }
  }
  report.history_best_mse.push_back(gbest_fitness);

  for (int iter = 1; iter < cfg.generations; ++iter) {
    for (auto& p : particles) {
      for (std::size_t d = 0; d < dims; ++d) {
        const double r1 = rng.uniform01();
        const double r2 = rng.uniform01();
        const double width = hi[d] - lo[d];
        double v = cfg.inertia * p.velocity[d] +
                   cfg.cognitive * r1 * (p.pbest_position[d] - p.position[d]) +
                   cfg.social * r2 * (gbest_position[d] - p.position[d]);
        const double vmax = cfg.velocity_clamp_fraction * width;
        v = std::clamp(v, -vmax, vmax);
        p.velocity[d] = v;
        p.position[d] = std::clamp(p.position[d] + v, lo[d], hi[d]);
      }
    }
    evaluate_all();
    for (std::size_t i = 0; i < swarm; ++i) {
      Particle& p = particles[i];
      if (fitness[i] < p.pbest_fitness) {
        p.pbest_fitness = fitness[i];
        p.pbest_position = p.position;
      }
      if (fitness[i] < gbest_fitness) {
        gbest_fitness = fitness[i];
        gbest_position = p.position;
      }
    }
    report.history_best_mse.push_back(gbest_fitness);
  }

  report.best_system = position_to_system(gbest_position);
  return report;
}

inline LearnReport optimize(const Dataset& train, const LearnConfig& cfg) {
  return cfg.method == LearnMethod::Ga ? ga_optimize(train, cfg) : pso_optimize(train, cfg);
}

/// K-fold harness: optimize per fold, score on the held-out fold, report the
/// per-fold table, the mean curves, and the system with the best test MSE.
inline LearnReport cross_validate(const Dataset& ds, const LearnConfig& cfg) {
  if (ds.records.empty()) throw EmptyDataset("cross_validate: dataset is empty");
  const FuzzySystem skeleton =
      cfg.base_system ? *cfg.base_system : baseline_part1_system();

  const auto folds = kfold_split(ds, cfg.folds, cfg.seed);

  LearnReport report;
  report.config = cfg;
  report.config.base_system.reset();
  report.baseline_mse = mse(skeleton, ds, cfg.cog_samples);

  double best_test = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < folds.size(); ++f) {
    LearnConfig fold_cfg = cfg;
    fold_cfg.seed = cfg.seed + f;
    const LearnReport fold_report = optimize(folds[f].train, fold_cfg);
    const double train_mse = fold_report.history_best_mse.back();
    const double test_mse = mse(fold_report.best_system, folds[f].test, cfg.cog_samples);
    report.fold_mses.push_back({static_cast<int>(f), train_mse, test_mse});
    report.fold_histories.push_back(fold_report.history_best_mse);
    if (test_mse < best_test) {
      best_test = test_mse;
      report.best_system = fold_report.best_system;
    }
  }

  report.history_best_mse.assign(static_cast<std::size_t>(cfg.generations), 0.0);
  for (const auto& h : report.fold_histories)
    for (std::size_t g = 0; g < h.size(); ++g) report.history_best_mse[g] += h[g];
  for (double& v : report.history_best_mse) v /= static_cast<double>(folds.size());

  for (const auto& fm : report.fold_mses) {
    report.mean_train_mse += fm.train_mse;
    report.mean_test_mse += fm.test_mse;
  }
  report.mean_train_mse /= static_cast<double>(report.fold_mses.size());
  report.mean_test_mse /= static_cast<double>(report.fold_mses.size());
  return report;
}

}  // namespace fml

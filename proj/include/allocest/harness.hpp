#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "allocest/algorithms.hpp"
#include "allocest/gravesl.hpp"

namespace allocest {

enum class Algorithm { ae2, aestar, ucb1, uniform_commit };

struct ExperimentSpec {
  Algorithm algorithm = Algorithm::ae2;
  long T = 1000;
  int true_model = 0;
  std::vector<std::uint64_t> seeds;
  Ae2Config ae2;
  AeStarConfig aestar;
};

struct TraceSummary {
  double cum_regret = 0.0;
  double regret_over_logT = 0.0;
  long explore_count = 0;
  long exploit_mistakes = 0;       // exploit rounds played off the true optimum
  double membership_rate = 0.0;    // over the last half of explore rounds
  double est_kl_cum = 0.0;
  int final_greedy = 0;
  bool fallback_seen = false;      // AE*2 full-class fallback occurred
};

struct RunTrace {
  std::uint64_t seed = 0;
  int true_model = 0;
  std::vector<RoundRecord> records;
  std::vector<VectorXd> explore_lambdas;  // lambda^s per explore round
  TraceSummary summary;
};

std::vector<RunTrace> run_experiment(const ClassAnalysis& ca, const ExperimentSpec& spec);

enum class ExtractPolicy { tail_average, last_explore_lambda };

struct ExtractedAllocation {
  VectorXd lambda;
  bool no_explore_fallback = false;  // no explore rounds: point mass on final greedy
};

ExtractedAllocation extract_allocation(const RunTrace& trace, const ClassAnalysis& ca,
                                       ExtractPolicy policy = ExtractPolicy::tail_average);

struct AllocationReport {
  struct Cell {
    int model = 0;
    std::uint64_t seed = 0;
    VectorXd lambda_hat;
    bool member = false;
    std::optional<double> witness_n;
  };
  std::vector<Cell> cells;
  std::vector<double> per_model_success;
  double worst_success = 1.0;
};

// Runs the spec with every class model as the true model and checks the
// extracted allocation's near-optimality set membership, recomputed from
// scratch (never trusted from the algorithm's own flags).
AllocationReport allocation_protocol_eval(const ClassAnalysis& ca, const ExperimentSpec& spec,
                                          double eps, double n_max,
                                          ExtractPolicy policy = ExtractPolicy::tail_average);

void export_csv(const std::vector<RunTrace>& traces, const std::string& path);
std::vector<RunTrace> import_csv(const std::string& path);

// Aligned text table: per-trace summaries plus mean/sd aggregates.
std::string summarize(const std::vector<RunTrace>& traces);
std::string summarize_json(const std::vector<RunTrace>& traces);

}  // namespace allocest

#pragma once

#include <cstdint>
#include <vector>

#include "rssvar/estimators.hpp"
#include "rssvar/sampling.hpp"

namespace rssvar {

struct Scenario {
    Scheme scheme = Scheme::Rss;
    int n_measured = 0; // N, the measured sample size
    int k = 0;
    double rho = 0.0;
    TargetTransform transform = TargetTransform::Identity;
    int reps = 10000;
    std::uint64_t base_seed = 0;
};

// RSS/DS need N divisible by k (n = N/k cycles); reps >= 1
void validate(const Scenario& s);

// Identity -> 1, NormalCdf -> 1/12, NegLogNormalCdf -> 1
double true_variance(TargetTransform t);

// Stable hash of the design fields (scheme, N, k, rho, transform). The
// replication count and seed are excluded on purpose: changing reps must not
// reshuffle the per-replication streams.
std::uint64_t scenario_id(const Scenario& s);

std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t scenario_id,
                               std::uint64_t rep_index);

double mean_squared_error(const std::vector<double>& estimates, double truth);

// mse_est == 0 -> NumericalError (degenerate estimator; do not divide)
double relative_efficiency(double mse_ref, double mse_est);

struct EstimatorResult {
    EstimatorId id;
    double mse = 0.0;
    double re = 0.0;
};

struct ScenarioResult {
    Scenario scenario;
    double true_variance = 0.0;
    int reps_used = 0;
    std::vector<EstimatorResult> estimators; // reference estimator first
};

// Full replication loop. Estimator set by scheme:
//   RSS -> RSS (reference), M, N, plus N_DS computed on a paired but
//          independent double-sampling draw of the same size;
//   JPS -> JPS (reference), F (only when a weights provider is passed; a
//          profile it does not cover aborts the scenario), N;
//   DS  -> empirical variance of the measured subsample (reference), N_DS.
// Bit-identical output for a fixed scenario regardless of `threads`.
ScenarioResult run_scenario(const Scenario& s, const FreyWeights* weights = nullptr,
                            int threads = 1);

struct TableCell {
    int n_measured;
    int k;
    double rho;
    TargetTransform transform;
};

// the shared simulation grid: N in {15,30,45} x k in {3,5} x rho in {0,0.8,1}
// x all three transforms, in that nesting order (54 cells)
std::vector<TableCell> table_cells();

} // namespace rssvar

#pragma once

#include <utility>
#include <vector>

#include "rssvar/random.hpp"

namespace rssvar {

enum class Scheme { Rss, Jps, Ds };

// Target variable as a function of the latent standard normal Y: the identity
// (normal target), the normal CDF (uniform target), or -log of the normal CDF
// (exponential target; decreasing in Y).
enum class TargetTransform { Identity, NormalCdf, NegLogNormalCdf };

// Bivariate-normal ranking model: (Y, X) has standard normal marginals with
// correlation rho. rho = 1 ranks perfectly, rho = 0 ranks at random.
struct RankingModel {
    double rho = 1.0;
};

void validate(const RankingModel& model);

double normal_cdf(double z);
double apply_transform(TargetTransform t, double y_latent);

struct MeasuredUnit {
    double y = 0.0; // target value, transform applied
    double x = 0.0; // concomitant value
    int rank = 0;   // judgment rank in 1..k; 0 means unranked (double sampling)
};

// One drawn sample. `pool` holds every concomitant value used in ranking.
//
// Pool layout contract: pool[i] == units[i].x for i < units.size(), followed
// by the unmeasured concomitant values. For RSS and JPS the tail is grouped
// per measured unit: the k-1 other members of unit i's comparison set occupy
// pool[N + i*(k-1), N + (i+1)*(k-1)) in draw order. For DS the tail holds the
// unselected first-phase units in draw order.
struct Sample {
    Scheme scheme = Scheme::Rss;
    int k = 1;
    int design_size = 0; // n cycles for RSS, N measured for JPS/DS
    std::vector<MeasuredUnit> units;
    std::vector<double> pool;
    std::vector<int> stratum_counts; // size k; all zero for DS
};

// One (y_latent, x) draw from the ranking model.
std::pair<double, double> draw_bivariate_pair(const RankingModel& model, RandomStream& rng);

// Balanced ranked set sample: n cycles, each drawing k comparison sets of
// size k, ranked by the concomitant; the r-th set contributes its r-th
// ranked unit. N = n*k measured units, pool size n*k^2.
Sample draw_rss_sample(int n, int k, const RankingModel& model, TargetTransform t, RandomStream& rng);

// Judgment post stratification: n_measured units, each ranked against k-1
// fresh supplemental concomitant values. Pool size n_measured*k.
Sample draw_jps_sample(int n_measured, int k, const RankingModel& model, TargetTransform t,
                       RandomStream& rng);

// Double sampling: n*k^2 first-phase concomitant values; y is measured on a
// uniform random subsample (without replacement) of n*k units.
Sample draw_ds_sample(int n, int k, const RankingModel& model, TargetTransform t, RandomStream& rng);

} // namespace rssvar

#include "rssvar/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "rssvar/errors.hpp"

namespace rssvar {

void validate(const RankingModel& model) {
    if (!(std::abs(model.rho) <= 1.0))
        throw DesignError("ranking model: |rho| must be <= 1, got " + std::to_string(model.rho));
}

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double apply_transform(TargetTransform t, double y_latent) {
    switch (t) {
    case TargetTransform::Identity:
        return y_latent;
    case TargetTransform::NormalCdf:
        return normal_cdf(y_latent);
    case TargetTransform::NegLogNormalCdf:
        return -std::log(normal_cdf(y_latent));
    }
    throw DesignError("unknown target transform");
}

std::pair<double, double> draw_bivariate_pair(const RankingModel& model, RandomStream& rng) {
    const double y = rng.normal();
    const double z = rng.normal();
    const double x = model.rho * y + std::sqrt(1.0 - model.rho * model.rho) * z;
    return {y, x};
}

namespace {

void check_design(int n, int k, const char* what) {
    if (n < 1 || k < 1)
        throw DesignError(std::string(what) + ": design sizes must be >= 1, got n=" +
                          std::to_string(n) + ", k=" + std::to_string(k));
}

} // namespace

Sample draw_rss_sample(int n, int k, const RankingModel& model, TargetTransform t,
                       RandomStream& rng) {
    check_design(n, k, "rss");
    validate(model);

    const std::size_t total = static_cast<std::size_t>(n) * k;
    Sample s;
    s.scheme = Scheme::Rss;
    s.k = k;
    s.design_size = n;
    s.units.reserve(total);
    s.pool.resize(total * k);
    s.stratum_counts.assign(k, n);

    std::vector<double> set_y(k), set_x(k);
    std::vector<int> order(k);
    std::size_t tail = total;
    for (int cycle = 0; cycle < n; ++cycle) {
        for (int r = 0; r < k; ++r) {
            for (int j = 0; j < k; ++j) {
                auto [y, x] = draw_bivariate_pair(model, rng);
                set_y[j] = y;
                set_x[j] = x;
            }
            std::iota(order.begin(), order.end(), 0);
            // rank by the concomitant; stable sort breaks floating-point ties
            // by draw order
            std::stable_sort(order.begin(), order.end(),
                             [&](int a, int b) { return set_x[a] < set_x[b]; });
            const int chosen = order[r];
            s.pool[s.units.size()] = set_x[chosen];
            s.units.push_back({apply_transform(t, set_y[chosen]), set_x[chosen], r + 1});
            for (int j = 0; j < k; ++j)
                if (j != chosen) s.pool[tail++] = set_x[j];
        }
    }
    return s;
}

Sample draw_jps_sample(int n_measured, int k, const RankingModel& model, TargetTransform t,
                       RandomStream& rng) {
    check_design(n_measured, k, "jps");
    validate(model);

    Sample s;
    s.scheme = Scheme::Jps;
    s.k = k;
    s.design_size = n_measured;
    s.units.reserve(n_measured);
    s.pool.resize(static_cast<std::size_t>(n_measured) * k);
    s.stratum_counts.assign(k, 0);

    std::size_t tail = static_cast<std::size_t>(n_measured);
    for (int i = 0; i < n_measured; ++i) {
        auto [y, x] = draw_bivariate_pair(model, rng);
        int below = 0;
        for (int j = 0; j < k - 1; ++j) {
            // supplemental units are full draws from the model with y discarded,
            // so the concomitant marginal stays exactly standard normal
            auto [y_sup, x_sup] = draw_bivariate_pair(model, rng);
            (void)y_sup;
            s.pool[tail++] = x_sup;
            if (x_sup < x) ++below;
        }
        const int rank = 1 + below;
        s.pool[i] = x;
        s.units.push_back({apply_transform(t, y), x, rank});
        ++s.stratum_counts[rank - 1];
    }
    return s;
}

Sample draw_ds_sample(int n, int k, const RankingModel& model, TargetTransform t,
                      RandomStream& rng) {
    check_design(n, k, "ds");
    validate(model);

    const std::size_t measured = static_cast<std::size_t>(n) * k;
    const std::size_t first_phase = measured * k;

    std::vector<double> lat_y(first_phase), con_x(first_phase);
    for (std::size_t i = 0; i < first_phase; ++i) {
        auto [y, x] = draw_bivariate_pair(model, rng);
        lat_y[i] = y;
        con_x[i] = x;
    }

    // uniform SRS without replacement via a partial Fisher-Yates shuffle
    std::vector<std::size_t> idx(first_phase);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < measured; ++i)
        std::swap(idx[i], idx[i + rng.uniform_index(first_phase - i)]);
    std::vector<std::size_t> selected(idx.begin(), idx.begin() + measured);
    std::sort(selected.begin(), selected.end());

    Sample s;
    s.scheme = Scheme::Ds;
    s.k = k;
    s.design_size = static_cast<int>(measured);
    s.units.reserve(measured);
    s.pool.resize(first_phase);
    s.stratum_counts.assign(k, 0);

    std::vector<bool> taken(first_phase, false);
    for (std::size_t i : selected) taken[i] = true;
    for (std::size_t i : selected) {
        s.pool[s.units.size()] = con_x[i];
        s.units.push_back({apply_transform(t, lat_y[i]), con_x[i], 0});
    }
    std::size_t tail = measured;
    for (std::size_t i = 0; i < first_phase; ++i)
        if (!taken[i]) s.pool[tail++] = con_x[i];
    return s;
}

} // namespace rssvar

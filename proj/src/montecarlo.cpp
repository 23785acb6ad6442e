#include "rssvar/montecarlo.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "rssvar/errors.hpp"
#include "rssvar/random.hpp"

namespace rssvar {

namespace {

std::vector<double> measured_ys(const Sample& sample) {
    std::vector<double> ys;
    ys.reserve(sample.units.size());
    for (const auto& unit : sample.units) ys.push_back(unit.y);
    return ys;
}

// one replication: fills out[0..n_est) in the estimator order documented on run_scenario
void run_replication(const Scenario& s, const FreyWeights* weights, bool with_frey,
                     RandomStream& rng, double* out) {
    const RankingModel model{s.rho};
    switch (s.scheme) {
        case Scheme::Rss: {
            const int n = s.n_measured / s.k;
            const Sample sample = draw_rss_sample(n, s.k, model, s.transform, rng);
            out[0] = var_rss_empirical(measured_ys(sample)).value;
            out[1] = var_maceachern(sample).value;
            out[2] = var_concomitant(sample).value;
            const Sample paired = draw_ds_sample(n, s.k, model, s.transform, rng);
            out[3] = var_concomitant(paired).value;
            break;
        }
        case Scheme::Jps: {
            const Sample sample = draw_jps_sample(s.n_measured, s.k, model, s.transform, rng);
            std::size_t e = 0;
            out[e++] = var_jps_stratified(sample).value;
            if (with_frey) out[e++] = var_frey_feeman(sample, *weights).value;
            out[e++] = var_concomitant(sample).value;
            break;
        }
        case Scheme::Ds: {
            const int n = s.n_measured / s.k;
            const Sample sample = draw_ds_sample(n, s.k, model, s.transform, rng);
            out[0] = var_rss_empirical(measured_ys(sample)).value;
            out[1] = var_concomitant(sample).value;
            break;
        }
    }
}

} // namespace

void validate(const Scenario& s) {
    if (s.k < 1) throw DesignError("scenario: set size k must be >= 1");
    if (s.n_measured < 1) throw DesignError("scenario: measured size N must be >= 1");
    if ((s.scheme == Scheme::Rss || s.scheme == Scheme::Ds) && s.n_measured % s.k != 0)
        throw DesignError("scenario: N must be divisible by k for ranked-set or double sampling");
    if (s.reps < 1) throw DesignError("scenario: replication count must be >= 1");
    validate(RankingModel{s.rho});
}

double true_variance(TargetTransform t) {
    switch (t) {
        case TargetTransform::Identity: return 1.0;
        case TargetTransform::NormalCdf: return 1.0 / 12.0;
        case TargetTransform::NegLogNormalCdf: return 1.0;
    }
    throw DesignError("unknown target transform");
}

std::uint64_t scenario_id(const Scenario& s) {
    std::uint64_t h = 0x52535356415231ULL; // arbitrary nonzero tag
    h = mix64(h ^ static_cast<std::uint64_t>(s.scheme));
    h = mix64(h ^ static_cast<std::uint64_t>(s.n_measured));
    h = mix64(h ^ static_cast<std::uint64_t>(s.k));
    h = mix64(h ^ std::bit_cast<std::uint64_t>(s.rho));
    h = mix64(h ^ static_cast<std::uint64_t>(s.transform));
    return h;
}

std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t scenario_id,
                               std::uint64_t rep_index) {
    return mix64(mix64(mix64(base_seed) ^ scenario_id) ^ rep_index);
}

double mean_squared_error(const std::vector<double>& estimates, double truth) {
    if (estimates.empty()) throw InsufficientDataError("MSE of an empty estimate list");
    double acc = 0.0;
    for (double e : estimates) acc += (e - truth) * (e - truth);
    return acc / static_cast<double>(estimates.size());
}

double relative_efficiency(double mse_ref, double mse_est) {
    if (mse_ref < 0.0 || mse_est < 0.0) throw DesignError("MSE cannot be negative");
    if (mse_est == 0.0)
        throw NumericalError("degenerate estimator: zero MSE, relative efficiency undefined");
    return mse_ref / mse_est;
}

ScenarioResult run_scenario(const Scenario& s, const FreyWeights* weights, int threads) {
    validate(s);
    const bool with_frey = s.scheme == Scheme::Jps && weights != nullptr && !weights->empty();

    std::vector<EstimatorId> ids;
    switch (s.scheme) {
        case Scheme::Rss:
            ids = {EstimatorId::EmpiricalRss, EstimatorId::MacEachern, EstimatorId::Concomitant,
                   EstimatorId::ConcomitantDs};
            break;
        case Scheme::Jps:
            ids.push_back(EstimatorId::JpsStratified);
            if (with_frey) ids.push_back(EstimatorId::FreyFeeman);
            ids.push_back(EstimatorId::Concomitant);
            break;
        case Scheme::Ds:
            ids = {EstimatorId::EmpiricalRss, EstimatorId::ConcomitantDs};
            break;
    }

    const std::size_t n_est = ids.size();
    const std::size_t reps = static_cast<std::size_t>(s.reps);
    const std::uint64_t sid = scenario_id(s);
    std::vector<double> values(reps * n_est);

    std::size_t n_threads = threads < 1 ? 1 : static_cast<std::size_t>(threads);
    n_threads = std::min(n_threads, reps);

    // each worker owns a contiguous replication range; on failure it records
    // the earliest failing replication so diagnostics are schedule-independent
    std::vector<std::exception_ptr> errors(n_threads);
    std::vector<std::size_t> error_rep(n_threads, reps);
    auto work = [&](std::size_t slot, std::size_t lo, std::size_t hi) {
        for (std::size_t rep = lo; rep < hi; ++rep) {
            RandomStream rng(replication_seed(s.base_seed, sid, rep));
            try {
                run_replication(s, weights, with_frey, rng, values.data() + rep * n_est);
            } catch (...) {
                errors[slot] = std::current_exception();
                error_rep[slot] = rep;
                return;
            }
        }
    };

    if (n_threads == 1) {
        work(0, 0, reps);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        const std::size_t base = reps / n_threads, extra = reps % n_threads;
        std::size_t lo = 0;
        for (std::size_t t = 0; t < n_threads; ++t) {
            const std::size_t hi = lo + base + (t < extra ? 1 : 0);
            pool.emplace_back(work, t, lo, hi);
            lo = hi;
        }
        for (auto& th : pool) th.join();
    }

    std::size_t first_bad = reps;
    std::exception_ptr bad;
    for (std::size_t t = 0; t < n_threads; ++t)
        if (errors[t] && error_rep[t] < first_bad) {
            first_bad = error_rep[t];
            bad = errors[t];
        }
    if (bad) {
        const std::string ctx = "replication " + std::to_string(first_bad) + ": ";
        try {
            std::rethrow_exception(bad);
        } catch (const UnsupportedProfileError& e) {
            throw UnsupportedProfileError(ctx + e.what());
        } catch (const InsufficientDataError& e) {
            throw InsufficientDataError(ctx + e.what());
        } catch (const NumericalError& e) {
            throw NumericalError(ctx + e.what());
        } catch (const DesignError& e) {
            throw DesignError(ctx + e.what());
        } catch (const std::exception& e) {
            throw NumericalError(ctx + e.what());
        }
    }

    ScenarioResult result;
    result.scenario = s;
    result.true_variance = true_variance(s.transform);
    result.reps_used = s.reps;
    result.estimators.reserve(n_est);

    std::vector<double> column(reps);
    std::vector<double> mses(n_est);
    for (std::size_t e = 0; e < n_est; ++e) {
        for (std::size_t rep = 0; rep < reps; ++rep) column[rep] = values[rep * n_est + e];
        mses[e] = mean_squared_error(column, result.true_variance);
    }
    for (std::size_t e = 0; e < n_est; ++e)
        result.estimators.push_back({ids[e], mses[e], relative_efficiency(mses[0], mses[e])});
    return result;
}

std::vector<TableCell> table_cells() {
    std::vector<TableCell> cells;
    cells.reserve(54);
    for (int n : {15, 30, 45})
        for (int k : {3, 5})
            for (double rho : {0.0, 0.8, 1.0})
                for (TargetTransform t : {TargetTransform::Identity, TargetTransform::NormalCdf,
                                          TargetTransform::NegLogNormalCdf})
                    cells.push_back({n, k, rho, t});
    return cells;
}

} // namespace rssvar

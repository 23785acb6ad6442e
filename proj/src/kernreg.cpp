#include "rssvar/kernreg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rssvar/errors.hpp"

namespace rssvar {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kHatGuard = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_bandwidth(double h) {
    if (!(h > 0.0) || !std::isfinite(h))
        throw DesignError("bandwidth must be positive and finite, got " + std::to_string(h));
}

void check_finite(const std::vector<double>& v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) throw DesignError(std::string(what) + " contains a non-finite value");
}

struct CvWorkspace {
    std::vector<double> s; // kernel row sums
    std::vector<double> t; // weighted sums, row-major by response
};

// Shortcut CV scores at bandwidth h for every response, sharing one pass over
// the symmetric kernel matrix. Writes +inf for all responses when the
// 1 - H_ii guard trips. Row sums include the self weight k(0), so they never
// vanish; the guard catches effectively isolated design points.
void cv_scores_at(const std::vector<double>& xs, const std::vector<double>* const* responses,
                  std::size_t n_resp, double h, CvWorkspace& ws, double* out) {
    const std::size_t n = xs.size();
    const double k0 = gaussian_kernel(0.0);

    ws.s.assign(n, k0);
    ws.t.assign(n_resp * n, 0.0);
    std::vector<const double*> yptr(n_resp);
    std::vector<double*> tptr(n_resp);
    for (std::size_t r = 0; r < n_resp; ++r) {
        yptr[r] = responses[r]->data();
        tptr[r] = ws.t.data() + r * n;
        for (std::size_t i = 0; i < n; ++i) tptr[r][i] = k0 * yptr[r][i];
    }

    const double inv_h = 1.0 / h;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double w = gaussian_kernel((xs[i] - xs[j]) * inv_h);
            ws.s[i] += w;
            ws.s[j] += w;
            for (std::size_t r = 0; r < n_resp; ++r) {
                tptr[r][i] += w * yptr[r][j];
                tptr[r][j] += w * yptr[r][i];
            }
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (1.0 - k0 / ws.s[i] < kHatGuard) {
            for (std::size_t r = 0; r < n_resp; ++r) out[r] = kInf;
            return;
        }
    }
    for (std::size_t r = 0; r < n_resp; ++r) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double res = (yptr[r][i] - tptr[r][i] / ws.s[i]) / (1.0 - k0 / ws.s[i]);
            acc += res * res;
        }
        out[r] = acc / static_cast<double>(n);
    }
}

void check_grid(const BandwidthGrid& grid) {
    if (grid.values.empty()) throw DesignError("bandwidth grid is empty");
    double prev = 0.0;
    for (double v : grid.values) {
        if (!(v > 0.0) || !std::isfinite(v)) throw DesignError("bandwidth grid values must be positive");
        if (v <= prev && &v != &grid.values.front())
            throw DesignError("bandwidth grid values must be strictly increasing");
        prev = v;
    }
}

} // namespace

double gaussian_kernel(double u) {
    const double q = u * u;
    // past here exp underflows to zero anyway; returning early keeps the hot
    // loops out of subnormal arithmetic
    if (q >= 1500.0) return 0.0;
    return kInvSqrt2Pi * std::exp(-0.5 * q);
}

void validate(const RegressionData& data) {
    if (data.xs.size() != data.ys.size())
        throw DesignError("regression data: xs and ys lengths differ");
    if (data.xs.empty()) throw InsufficientDataError("regression data is empty");
    check_finite(data.xs, "regression xs");
    check_finite(data.ys, "regression ys");
}

BandwidthGrid make_grid(double lo, double hi, double step) {
    if (!(lo > 0.0) || !std::isfinite(lo)) throw DesignError("grid lo must be positive");
    if (!(step > 0.0) || !std::isfinite(step)) throw DesignError("grid step must be positive");
    if (!(hi >= lo) || !std::isfinite(hi)) throw DesignError("grid hi must be >= lo");
    BandwidthGrid grid{lo, hi, step, {}};
    for (std::size_t i = 0;; ++i) {
        const double v = lo + static_cast<double>(i) * step;
        if (v > hi) break;
        grid.values.push_back(v);
    }
    return grid;
}

BandwidthGrid bandwidth_grid(std::size_t n) {
    if (n < 1) throw DesignError("bandwidth grid needs a sample size >= 1");
    const double base = std::pow(static_cast<double>(n), -0.25);
    return make_grid(base / 3.0, 3.0 * base, 0.01);
}

double nw_estimate(double x, const RegressionData& data, double h) {
    validate(data);
    check_bandwidth(h);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < data.xs.size(); ++i) {
        const double w = gaussian_kernel((x - data.xs[i]) / h);
        num += w * data.ys[i];
        den += w;
    }
    if (den == 0.0) {
        // every weight underflowed: fall back to the nearest design point so
        // the convex-combination range contract still holds
        std::size_t nearest = 0;
        double best = std::abs(x - data.xs[0]);
        for (std::size_t i = 1; i < data.xs.size(); ++i) {
            const double d = std::abs(x - data.xs[i]);
            if (d < best) {
                best = d;
                nearest = i;
            }
        }
        return data.ys[nearest];
    }
    return num / den;
}

std::vector<double> hat_diag(const RegressionData& data, double h) {
    validate(data);
    check_bandwidth(h);
    const std::size_t n = data.xs.size();
    if (n < 2) throw InsufficientDataError("hat diagonal needs at least two observations");
    const double k0 = gaussian_kernel(0.0);
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += gaussian_kernel((data.xs[i] - data.xs[j]) / h);
        diag[i] = k0 / s;
    }
    return diag;
}

double cv_score(const RegressionData& data, double h) {
    validate(data);
    check_bandwidth(h);
    if (data.xs.size() < 2)
        throw InsufficientDataError("leave-one-out CV needs at least two observations");
    const std::vector<double>* resp = &data.ys;
    CvWorkspace ws;
    double score = 0.0;
    cv_scores_at(data.xs, &resp, 1, h, ws, &score);
    return score;
}

RegressionFit select_bandwidth(const RegressionData& data, const BandwidthGrid& grid) {
    validate(data);
    auto fits = select_bandwidths(data.xs, {data.ys}, grid);
    return std::move(fits.front());
}

std::vector<RegressionFit> select_bandwidths(const std::vector<double>& xs,
                                             const std::vector<std::vector<double>>& responses,
                                             const BandwidthGrid& grid) {
    if (responses.empty()) throw DesignError("bandwidth selection needs at least one response");
    if (xs.size() < 2)
        throw InsufficientDataError("bandwidth selection needs at least two observations");
    check_finite(xs, "regression xs");
    for (const auto& ys : responses) {
        if (ys.size() != xs.size()) throw DesignError("response length differs from design points");
        check_finite(ys, "regression ys");
    }
    check_grid(grid);

    const std::size_t n_resp = responses.size();
    std::vector<const std::vector<double>*> resp_ptr(n_resp);
    for (std::size_t r = 0; r < n_resp; ++r) resp_ptr[r] = &responses[r];

    std::vector<double> best_cv(n_resp, kInf);
    std::vector<double> best_h(n_resp, 0.0);
    std::vector<double> scores(n_resp);
    CvWorkspace ws;
    for (double h : grid.values) {
        cv_scores_at(xs, resp_ptr.data(), n_resp, h, ws, scores.data());
        for (std::size_t r = 0; r < n_resp; ++r) {
            // strict comparison: ties keep the smallest bandwidth
            if (scores[r] < best_cv[r]) {
                best_cv[r] = scores[r];
                best_h[r] = h;
            }
        }
    }

    std::vector<RegressionFit> fits;
    fits.reserve(n_resp);
    for (std::size_t r = 0; r < n_resp; ++r) {
        if (!std::isfinite(best_cv[r]))
            throw NumericalError("bandwidth selection failed: every grid value is degenerate");
        fits.push_back({RegressionData{xs, responses[r]}, best_h[r], best_cv[r]});
    }
    return fits;
}

} // namespace rssvar

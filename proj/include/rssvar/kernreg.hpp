#pragma once

#include <cstddef>
#include <vector>

namespace rssvar {

// standard normal density, the kernel used throughout
double gaussian_kernel(double u);

struct RegressionData {
    std::vector<double> xs; // design points (concomitants of measured units)
    std::vector<double> ys; // responses
};

void validate(const RegressionData& data); // equal lengths >= 1, all finite

struct BandwidthGrid {
    double lo = 0.0;
    double hi = 0.0;
    double step = 0.0;
    std::vector<double> values; // lo, lo+step, ..., largest value <= hi
};

BandwidthGrid make_grid(double lo, double hi, double step);

// CV search grid for a sample of size n: [n^(-1/4)/3, 3*n^(-1/4)] in steps of 0.01.
BandwidthGrid bandwidth_grid(std::size_t n);

// Nadaraya-Watson estimate at x: sum_i y_i k((x-x_i)/h) / sum_i k((x-x_i)/h).
// Always a convex combination of the responses; if every kernel weight
// underflows to zero the nearest design point's response is returned instead.
double nw_estimate(double x, const RegressionData& data, double h);

// Diagonal of the row-normalized kernel weight matrix:
// H_ii = k(0) / sum_j k((x_i-x_j)/h). Requires at least two design points.
std::vector<double> hat_diag(const RegressionData& data, double h);

// Leave-one-out CV score through the hat-matrix identity
//   (1/N) sum_i ((y_i - m(x_i, h)) / (1 - H_ii))^2,
// equal to the explicit leave-one-out score in exact arithmetic. Returns
// +infinity when any 1 - H_ii drops below 1e-12 (bandwidth unusable).
double cv_score(const RegressionData& data, double h);

struct RegressionFit {
    RegressionData data;
    double h = 0.0;  // selected bandwidth, a member of the search grid
    double cv = 0.0; // achieved CV score

    double predict(double x) const { return nw_estimate(x, data, h); }
};

// Grid value minimizing cv_score; ties break toward the smallest bandwidth.
RegressionFit select_bandwidth(const RegressionData& data, const BandwidthGrid& grid);

// Joint selection for several responses sharing one set of design points.
// Kernel sums are computed once per grid value; the scores (and therefore the
// selections) are identical to running select_bandwidth per response.
std::vector<RegressionFit> select_bandwidths(const std::vector<double>& xs,
                                             const std::vector<std::vector<double>>& responses,
                                             const BandwidthGrid& grid);

} // namespace rssvar

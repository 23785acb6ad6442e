#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rssvar/sampling.hpp"

namespace rssvar {

enum class EstimatorId { EmpiricalRss, MacEachern, JpsStratified, FreyFeeman, Concomitant, ConcomitantDs };

// short labels used in output: RSS, M, JPS, F, N, N_DS
const char* to_string(EstimatorId id);

struct VarianceEstimate {
    double value = 0.0;
    EstimatorId id = EstimatorId::EmpiricalRss;
    std::optional<std::pair<double, double>> bandwidths; // (h1, h2), set by the concomitant estimator
};

// measured y values grouped by judgment rank; strata[r-1] holds rank r and may be empty
struct StratifiedData {
    int k = 0;
    std::vector<std::vector<double>> strata;
};

void validate(const StratifiedData& data);

// groups a ranked sample's measured units by rank; rejects double-sampling data (no ranks)
StratifiedData to_stratified(const Sample& sample);

// Externally supplied Frey-Feeman coefficient tables, keyed by the ordered
// nonzero stratum-size profile s_1 >= ... >= s_m > 0. The coefficients
// themselves come from outside this library; only the summation is built in.
class FreyWeights {
public:
    struct Table {
        int m = 0;
        std::vector<double> upper; // row-major upper triangle, m(m+1)/2 entries
        double at(int i, int j) const; // 0-based, symmetric access
    };

    bool empty() const { return tables_.empty(); }
    std::size_t size() const { return tables_.size(); }

    // sizes must be positive and nonincreasing; upper must hold m(m+1)/2 finite values
    void add(std::vector<int> sizes, std::vector<double> upper);

    // null when no table covers the profile
    const Table* find(const std::vector<int>& sizes) const;

    // Text format, one profile per line:
    //   s_1 s_2 ... s_m : w_11 w_12 ... w_1m w_22 ... w_mm
    // '#' starts a comment, blank lines are skipped.
    static FreyWeights parse(std::istream& in, const std::string& source_name);
    static FreyWeights load_file(const std::string& path);

    // Structural-testing stub: every w_ij = 1/(P(P-1)) with P the profile total,
    // which collapses the weighted sum to the pooled empirical variance.
    static FreyWeights pooled_stub(const std::vector<std::vector<int>>& profiles);

private:
    std::map<std::vector<int>, Table> tables_;
};

VarianceEstimate var_rss_empirical(const std::vector<double>& ys);

// balanced ranked-set data only: every stratum must hold the same n >= 2 values
VarianceEstimate var_maceachern(const StratifiedData& data);
VarianceEstimate var_maceachern(const Sample& sample);

VarianceEstimate var_jps_stratified(const StratifiedData& data);
VarianceEstimate var_jps_stratified(const Sample& sample);

VarianceEstimate var_frey_feeman(const StratifiedData& data, const FreyWeights& weights);
VarianceEstimate var_frey_feeman(const Sample& sample, const FreyWeights& weights);

// The proposed kernel-regression estimator: regress y and y^2 on x over the
// measured pairs with independently CV-selected bandwidths, average both fits
// over every pooled x, and return the second moment minus the squared first.
// Applies to all three schemes; the result may be negative (not clamped).
VarianceEstimate var_concomitant(const Sample& sample);

} // namespace rssvar

#include "rssvar/estimators.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "rssvar/errors.hpp"
#include "rssvar/kernreg.hpp"

namespace rssvar {

namespace {

bool parse_full(const std::string& token, double& out) {
    const char* begin = token.data();
    const char* end = begin + token.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end;
}

bool parse_full_int(const std::string& token, int& out) {
    const char* begin = token.data();
    const char* end = begin + token.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end;
}

std::string profile_label(const std::vector<int>& sizes) {
    std::string s = "[";
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (i) s += ' ';
        s += std::to_string(sizes[i]);
    }
    s += ']';
    return s;
}

} // namespace

const char* to_string(EstimatorId id) {
    switch (id) {
        case EstimatorId::EmpiricalRss: return "RSS";
        case EstimatorId::MacEachern: return "M";
        case EstimatorId::JpsStratified: return "JPS";
        case EstimatorId::FreyFeeman: return "F";
        case EstimatorId::Concomitant: return "N";
        case EstimatorId::ConcomitantDs: return "N_DS";
    }
    return "?";
}

void validate(const StratifiedData& data) {
    if (data.k < 1) throw DesignError("stratified data: set size k must be >= 1");
    if (data.strata.size() != static_cast<std::size_t>(data.k))
        throw DesignError("stratified data: expected one stratum per rank 1..k");
    std::size_t total = 0;
    for (const auto& stratum : data.strata) {
        total += stratum.size();
        for (double y : stratum)
            if (!std::isfinite(y)) throw DesignError("stratified data contains a non-finite value");
    }
    if (total == 0) throw InsufficientDataError("stratified data: all strata are empty");
}

StratifiedData to_stratified(const Sample& sample) {
    if (sample.scheme == Scheme::Ds)
        throw DesignError("double-sampling data carries no judgment ranks; rank-based estimators do not apply");
    if (sample.k < 1) throw DesignError("sample: set size k must be >= 1");
    if (sample.units.empty()) throw InsufficientDataError("sample has no measured units");
    StratifiedData data;
    data.k = sample.k;
    data.strata.resize(static_cast<std::size_t>(sample.k));
    for (const auto& unit : sample.units) {
        if (unit.rank < 1 || unit.rank > sample.k)
            throw DesignError("measured unit has rank outside 1..k");
        data.strata[static_cast<std::size_t>(unit.rank - 1)].push_back(unit.y);
    }
    return data;
}

double FreyWeights::Table::at(int i, int j) const {
    if (i > j) std::swap(i, j);
    const int idx = i * m - i * (i - 1) / 2 + (j - i);
    return upper[static_cast<std::size_t>(idx)];
}

void FreyWeights::add(std::vector<int> sizes, std::vector<double> upper) {
    if (sizes.empty()) throw DesignError("weights: empty size profile");
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] < 1) throw DesignError("weights: stratum sizes must be positive");
        if (i > 0 && sizes[i] > sizes[i - 1])
            throw DesignError("weights: size profile must be nonincreasing");
    }
    const std::size_t m = sizes.size();
    if (upper.size() != m * (m + 1) / 2)
        throw DesignError("weights: expected m(m+1)/2 coefficients for the upper triangle");
    for (double w : upper)
        if (!std::isfinite(w)) throw DesignError("weights: coefficients must be finite");
    if (tables_.count(sizes)) throw DesignError("weights: duplicate size profile " + profile_label(sizes));
    Table table{static_cast<int>(m), std::move(upper)};
    tables_.emplace(std::move(sizes), std::move(table));
}

const FreyWeights::Table* FreyWeights::find(const std::vector<int>& sizes) const {
    auto it = tables_.find(sizes);
    return it == tables_.end() ? nullptr : &it->second;
}

FreyWeights FreyWeights::parse(std::istream& in, const std::string& source_name) {
    FreyWeights weights;
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) -> InputError {
        return InputError(source_name + ":" + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto colon = line.find(':');
        if (colon == std::string::npos) throw fail("expected 'sizes : weights' (missing ':')");
        if (line.find(':', colon + 1) != std::string::npos) throw fail("more than one ':' in line");

        std::istringstream left(line.substr(0, colon));
        std::vector<int> sizes;
        std::string token;
        while (left >> token) {
            int s = 0;
            if (!parse_full_int(token, s) || s < 1)
                throw fail("bad stratum size '" + token + "' (positive integer required)");
            if (!sizes.empty() && s > sizes.back())
                throw fail("size profile must be nonincreasing");
            sizes.push_back(s);
        }
        if (sizes.empty()) throw fail("empty size profile");

        std::istringstream right(line.substr(colon + 1));
        std::vector<double> upper;
        while (right >> token) {
            double w = 0.0;
            if (!parse_full(token, w) || !std::isfinite(w))
                throw fail("bad weight '" + token + "' (finite number required)");
            upper.push_back(w);
        }
        const std::size_t m = sizes.size();
        if (upper.size() != m * (m + 1) / 2)
            throw fail("expected " + std::to_string(m * (m + 1) / 2) + " weights for a profile of " +
                       std::to_string(m) + " strata, got " + std::to_string(upper.size()));
        if (weights.find(sizes)) throw fail("duplicate size profile " + profile_label(sizes));
        weights.add(std::move(sizes), std::move(upper));
    }
    return weights;
}

FreyWeights FreyWeights::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open weights file: " + path);
    return parse(in, path);
}

FreyWeights FreyWeights::pooled_stub(const std::vector<std::vector<int>>& profiles) {
    FreyWeights weights;
    for (const auto& sizes : profiles) {
        long total = std::accumulate(sizes.begin(), sizes.end(), 0L);
        if (total < 2) throw DesignError("stub weights need a profile totalling at least two units");
        const double c = 1.0 / (static_cast<double>(total) * static_cast<double>(total - 1));
        const std::size_t m = sizes.size();
        weights.add(sizes, std::vector<double>(m * (m + 1) / 2, c));
    }
    return weights;
}

VarianceEstimate var_rss_empirical(const std::vector<double>& ys) {
    const std::size_t n = ys.size();
    if (n < 2) throw InsufficientDataError("empirical variance needs at least two measured values");
    double mean = 0.0;
    for (double y : ys) mean += y;
    mean /= static_cast<double>(n);
    double ssd = 0.0;
    for (double y : ys) ssd += (y - mean) * (y - mean);
    return {ssd / static_cast<double>(n - 1), EstimatorId::EmpiricalRss, {}};
}

VarianceEstimate var_maceachern(const StratifiedData& data) {
    validate(data);
    const std::size_t k = data.strata.size();
    const std::size_t n = data.strata.front().size();
    for (const auto& stratum : data.strata)
        if (stratum.size() != n)
            throw DesignError("MacEachern estimator needs balanced data (equal stratum sizes)");
    if (n < 2) throw InsufficientDataError("MacEachern estimator needs at least two cycles per rank");

    const double dn = static_cast<double>(n), dk = static_cast<double>(k);
    double term1 = 0.0;
    for (std::size_t r = 0; r < k; ++r)
        for (std::size_t s = 0; s < k; ++s) {
            if (r == s) continue;
            for (double yr : data.strata[r])
                for (double ys : data.strata[s]) term1 += (yr - ys) * (yr - ys);
        }
    term1 /= 2.0 * dn * dn * dk * dk;

    double term2 = 0.0;
    for (const auto& stratum : data.strata)
        for (double yi : stratum)
            for (double yj : stratum) term2 += (yi - yj) * (yi - yj);
    term2 /= 2.0 * dn * (dn - 1.0) * dk * dk;

    return {term1 + term2, EstimatorId::MacEachern, {}};
}

VarianceEstimate var_maceachern(const Sample& sample) {
    if (sample.scheme != Scheme::Rss)
        throw DesignError("MacEachern estimator applies to balanced ranked-set samples only");
    return var_maceachern(to_stratified(sample));
}

VarianceEstimate var_jps_stratified(const StratifiedData& data) {
    validate(data);
    double sum_mean = 0.0, sum_sq_mean = 0.0;
    int m = 0;
    for (const auto& stratum : data.strata) {
        if (stratum.empty()) continue;
        double mean = 0.0, mean_sq = 0.0;
        for (double y : stratum) {
            mean += y;
            mean_sq += y * y;
        }
        mean /= static_cast<double>(stratum.size());
        mean_sq /= static_cast<double>(stratum.size());
        sum_mean += mean;
        sum_sq_mean += mean_sq;
        ++m;
    }
    const double dm = static_cast<double>(m);
    const double first = sum_mean / dm;
    return {sum_sq_mean / dm - first * first, EstimatorId::JpsStratified, {}};
}

VarianceEstimate var_jps_stratified(const Sample& sample) {
    return var_jps_stratified(to_stratified(sample));
}

VarianceEstimate var_frey_feeman(const StratifiedData& data, const FreyWeights& weights) {
    validate(data);
    // nonempty strata ordered by descending size; ties keep rank order
    std::vector<std::size_t> order;
    for (std::size_t r = 0; r < data.strata.size(); ++r)
        if (!data.strata[r].empty()) order.push_back(r);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return data.strata[a].size() > data.strata[b].size();
    });
    std::vector<int> profile;
    profile.reserve(order.size());
    for (std::size_t r : order) profile.push_back(static_cast<int>(data.strata[r].size()));

    const FreyWeights::Table* table = weights.find(profile);
    if (!table)
        throw UnsupportedProfileError("no Frey-Feeman weights for stratum-size profile " +
                                      profile_label(profile));

    const int m = static_cast<int>(order.size());
    double acc = 0.0;
    for (int i = 0; i < m; ++i) {
        const auto& yi = data.strata[order[static_cast<std::size_t>(i)]];
        double inner = 0.0;
        for (std::size_t r = 0; r < yi.size(); ++r)
            for (std::size_t s = r + 1; s < yi.size(); ++s) inner += (yi[r] - yi[s]) * (yi[r] - yi[s]);
        acc += table->at(i, i) * inner;
    }
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            const auto& yi = data.strata[order[static_cast<std::size_t>(i)]];
            const auto& yj = data.strata[order[static_cast<std::size_t>(j)]];
            double inner = 0.0;
            for (double a : yi)
                for (double b : yj) inner += (a - b) * (a - b);
            acc += table->at(i, j) * inner;
        }
    return {acc, EstimatorId::FreyFeeman, {}};
}

VarianceEstimate var_frey_feeman(const Sample& sample, const FreyWeights& weights) {
    return var_frey_feeman(to_stratified(sample), weights);
}

VarianceEstimate var_concomitant(const Sample& sample) {
    const std::size_t n = sample.units.size();
    if (n < 2) throw InsufficientDataError("concomitant estimator needs at least two measured units");
    if (sample.pool.empty())
        throw InsufficientDataError("concomitant estimator needs recorded pool x values");

    std::vector<double> xs(n), ys(n), ys2(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = sample.units[i].x;
        ys[i] = sample.units[i].y;
        ys2[i] = sample.units[i].y * sample.units[i].y;
    }
    const BandwidthGrid grid = bandwidth_grid(n);
    const auto fits = select_bandwidths(xs, {ys, ys2}, grid);

    double s1 = 0.0, s2 = 0.0;
    for (double x : sample.pool) {
        s1 += fits[0].predict(x);
        s2 += fits[1].predict(x);
    }
    const double p = static_cast<double>(sample.pool.size());
    const double m1 = s1 / p;
    const double value = s2 / p - m1 * m1;
    if (!std::isfinite(value)) throw NumericalError("concomitant estimator produced a non-finite value");

    const EstimatorId id =
        sample.scheme == Scheme::Ds ? EstimatorId::ConcomitantDs : EstimatorId::Concomitant;
    return {value, id, std::make_pair(fits[0].h, fits[1].h)};
}

} // namespace rssvar

#include "rssvar/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "rssvar/csv_io.hpp"
#include "rssvar/errors.hpp"
#include "rssvar/estimators.hpp"
#include "rssvar/kernreg.hpp"
#include "rssvar/montecarlo.hpp"
#include "rssvar/random.hpp"
#include "rssvar/sampling.hpp"

namespace rssvar::cli {

namespace {

std::string fmt(const char* spec, double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

TargetTransform parse_transform(const std::string& name) {
    if (name == "identity") return TargetTransform::Identity;
    if (name == "cdf") return TargetTransform::NormalCdf;
    if (name == "neglogcdf") return TargetTransform::NegLogNormalCdf;
    throw DesignError("unknown transform '" + name + "'");
}

const char* transform_label(TargetTransform t) {
    switch (t) {
        case TargetTransform::Identity: return "identity";
        case TargetTransform::NormalCdf: return "cdf";
        case TargetTransform::NegLogNormalCdf: return "neglogcdf";
    }
    return "?";
}

Scheme parse_scheme(const std::string& name) {
    if (name == "rss") return Scheme::Rss;
    if (name == "jps") return Scheme::Jps;
    if (name == "ds") return Scheme::Ds;
    throw DesignError("unknown scheme '" + name + "'");
}

struct CellResult {
    TableCell cell;
    std::vector<EstimatorResult> ests; // reference estimator dropped
};

void render_table_csv(std::ostream& os, const std::vector<CellResult>& rows) {
    os << "N,k,rho,transform,estimator,RE\n";
    for (const auto& row : rows)
        for (const auto& est : row.ests)
            os << row.cell.n_measured << ',' << row.cell.k << ',' << fmt("%g", row.cell.rho) << ','
               << transform_label(row.cell.transform) << ',' << to_string(est.id) << ','
               << fmt("%.6f", est.re) << '\n';
}

// reshapes the long cell list into the wide layout: one row per (N, k,
// transform), estimator columns grouped under each rho
void render_table_md(std::ostream& os, const std::vector<CellResult>& rows,
                     const std::string& note) {
    const double rhos[3] = {0.0, 0.8, 1.0};
    std::vector<EstimatorId> est_ids;
    for (const auto& est : rows.front().ests) est_ids.push_back(est.id);

    struct WideRow {
        int n, k;
        TargetTransform transform;
        std::vector<double> re; // rho-major, then estimator
    };
    std::vector<WideRow> wide;
    for (const auto& row : rows) {
        WideRow* slot = nullptr;
        for (auto& w : wide)
            if (w.n == row.cell.n_measured && w.k == row.cell.k && w.transform == row.cell.transform)
                slot = &w;
        if (!slot) {
            wide.push_back({row.cell.n_measured, row.cell.k, row.cell.transform,
                            std::vector<double>(3 * est_ids.size(), 0.0)});
            slot = &wide.back();
        }
        std::size_t ri = 0;
        while (ri < 3 && rhos[ri] != row.cell.rho) ++ri;
        for (std::size_t e = 0; e < row.ests.size(); ++e)
            slot->re[ri * est_ids.size() + e] = row.ests[e].re;
    }

    os << "| N | k | transform |";
    for (double rho : rhos)
        for (EstimatorId id : est_ids) os << ' ' << to_string(id) << " rho=" << fmt("%g", rho) << " |";
    os << "\n|---|---|---|";
    for (std::size_t c = 0; c < 3 * est_ids.size(); ++c) os << "---|";
    os << '\n';
    for (const auto& w : wide) {
        os << "| " << w.n << " | " << w.k << " | " << transform_label(w.transform) << " |";
        for (double re : w.re) os << ' ' << fmt("%.2f", re) << " |";
        os << '\n';
    }
    if (!note.empty()) os << '\n' << note << '\n';
}

void write_output(const std::string& path, const std::string& body, std::ostream& fallback) {
    if (path.empty()) {
        fallback << body;
        return;
    }
    std::ofstream f(path);
    if (!f) throw InputError("cannot open output file: " + path);
    f << body;
    f.flush();
    if (!f) throw InputError("failed writing output file: " + path);
}

struct SimOpts {
    int reps = 10000;
    std::uint64_t seed = kDefaultSeed;
    int threads = 1;
    std::string out_path;
    std::string format = "csv";
    std::string weights_file;
};

void run_table(int which, const SimOpts& opt, std::ostream& out, std::ostream& err) {
    std::optional<FreyWeights> weights;
    if (!opt.weights_file.empty()) weights = FreyWeights::load_file(opt.weights_file);
    const Scheme scheme = which == 1 ? Scheme::Rss : Scheme::Jps;

    const auto cells = table_cells();
    std::vector<CellResult> rows;
    rows.reserve(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& cell = cells[i];
        err << "table" << which << ": cell " << i + 1 << "/" << cells.size() << " (N="
            << cell.n_measured << " k=" << cell.k << " rho=" << fmt("%g", cell.rho) << " "
            << transform_label(cell.transform) << ")" << std::endl;
        Scenario s{scheme, cell.n_measured, cell.k, cell.rho, cell.transform, opt.reps, opt.seed};
        ScenarioResult result = run_scenario(s, weights ? &*weights : nullptr, opt.threads);
        rows.push_back(
            {cell, {result.estimators.begin() + 1, result.estimators.end()}});
    }

    std::ostringstream body;
    if (opt.format == "md") {
        std::string note;
        if (which == 2 && !weights)
            note = "F unavailable: no weights file supplied.";
        render_table_md(body, rows, note);
    } else {
        render_table_csv(body, rows);
    }
    if (which == 2 && !weights)
        err << "note: F omitted (supply --weights-file to include it)" << std::endl;
    write_output(opt.out_path, body.str(), out);
}

void run_one_scenario(const Scenario& s, const SimOpts& opt, std::ostream& out, std::ostream& err) {
    std::optional<FreyWeights> weights;
    if (!opt.weights_file.empty()) weights = FreyWeights::load_file(opt.weights_file);
    err << "scenario: N=" << s.n_measured << " k=" << s.k << " rho=" << fmt("%g", s.rho) << " "
        << transform_label(s.transform) << " reps=" << s.reps << std::endl;
    ScenarioResult result = run_scenario(s, weights ? &*weights : nullptr, opt.threads);

    std::ostringstream body;
    if (opt.format == "md") {
        body << "| estimator | MSE | RE |\n|---|---|---|\n";
        for (const auto& est : result.estimators)
            body << "| " << to_string(est.id) << " | " << fmt("%.6g", est.mse) << " | "
                 << fmt("%.6f", est.re) << " |\n";
    } else {
        body << "estimator,MSE,RE\n";
        for (const auto& est : result.estimators)
            body << to_string(est.id) << ',' << fmt("%.6g", est.mse) << ',' << fmt("%.6f", est.re)
                 << '\n';
    }
    write_output(opt.out_path, body.str(), out);
}

Sample assemble_sample(const LoadedSample& loaded, Scheme scheme, int k) {
    Sample s;
    s.scheme = scheme;
    s.k = k;
    s.design_size = static_cast<int>(loaded.units.size());
    s.units = loaded.units;
    s.pool.reserve(loaded.units.size() + loaded.extra_pool.size());
    for (const auto& unit : loaded.units) s.pool.push_back(unit.x);
    s.pool.insert(s.pool.end(), loaded.extra_pool.begin(), loaded.extra_pool.end());
    return s;
}

void check_ranks(const LoadedSample& loaded, int k, const std::string& path) {
    if (!loaded.has_ranks)
        throw DesignError("this estimator needs ranked data, but the file has no ranks");
    for (std::size_t i = 0; i < loaded.units.size(); ++i)
        if (loaded.units[i].rank > k)
            throw InputError(path + ":" + std::to_string(loaded.unit_rows[i]) + ": rank " +
                             std::to_string(loaded.units[i].rank) + " out of range 1.." +
                             std::to_string(k));
}

void run_estimate(const std::string& input, const std::string& estimator, int k,
                  const std::string& weights_file, std::ostream& out) {
    const LoadedSample loaded = read_sample_file(input);
    auto need_k = [&]() {
        if (k < 1) throw DesignError("--k is required for estimator '" + estimator + "'");
        check_ranks(loaded, k, input);
    };

    VarianceEstimate est;
    if (estimator == "rss") {
        std::vector<double> ys;
        ys.reserve(loaded.units.size());
        for (const auto& unit : loaded.units) ys.push_back(unit.y);
        est = var_rss_empirical(ys);
    } else if (estimator == "maceachern") {
        need_k();
        est = var_maceachern(assemble_sample(loaded, Scheme::Rss, k));
    } else if (estimator == "jps") {
        need_k();
        est = var_jps_stratified(assemble_sample(loaded, Scheme::Jps, k));
    } else if (estimator == "frey") {
        need_k();
        if (weights_file.empty())
            throw DesignError("estimator 'frey' needs --weights-file");
        const FreyWeights weights = FreyWeights::load_file(weights_file);
        est = var_frey_feeman(assemble_sample(loaded, Scheme::Jps, k), weights);
    } else if (estimator == "concomitant") {
        if (loaded.extra_pool.empty())
            throw DesignError("estimator 'concomitant' needs pool rows in the input file");
        const Scheme scheme = loaded.has_ranks ? Scheme::Jps : Scheme::Ds;
        int kk = k;
        for (const auto& unit : loaded.units) kk = std::max(kk, unit.rank);
        est = var_concomitant(assemble_sample(loaded, scheme, std::max(kk, 1)));
    } else {
        throw DesignError("unknown estimator '" + estimator +
                          "' (expected rss, maceachern, jps, frey or concomitant)");
    }

    out << "estimator: " << to_string(est.id) << '\n';
    out << "value: " << fmt("%.17g", est.value) << '\n';
    if (est.bandwidths) {
        out << "h1: " << fmt("%.17g", est.bandwidths->first) << '\n';
        out << "h2: " << fmt("%.17g", est.bandwidths->second) << '\n';
    }
}

void run_sample(Scheme scheme, int n_measured, int k, double rho, TargetTransform transform,
                std::uint64_t seed, const std::string& out_path, std::ostream& out) {
    Scenario s{scheme, n_measured, k, rho, transform, 1, seed};
    validate(s);
    // the sample command reproduces replication 0 of the matching scenario
    RandomStream rng(replication_seed(seed, scenario_id(s), 0));
    const RankingModel model{rho};
    Sample sample;
    switch (scheme) {
        case Scheme::Rss: sample = draw_rss_sample(n_measured / k, k, model, transform, rng); break;
        case Scheme::Jps: sample = draw_jps_sample(n_measured, k, model, transform, rng); break;
        case Scheme::Ds: sample = draw_ds_sample(n_measured / k, k, model, transform, rng); break;
    }
    std::ostringstream body;
    write_sample_csv(body, sample);
    write_output(out_path, body.str(), out);
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"ranked-set sampling variance estimation toolkit"};
    app.require_subcommand(1);

    SimOpts opt;
    int n_measured = 0, k = 0;
    double rho = 0.0;
    std::string transform = "identity", scheme = "rss";
    std::string input_path, estimator_name;

    auto add_output_opts = [&](CLI::App* sub) {
        sub->add_option("--out", opt.out_path, "output file (default: stdout)");
        sub->add_option("--format", opt.format, "output format")
            ->check(CLI::IsMember({"csv", "md"}));
    };
    auto add_sim_opts = [&](CLI::App* sub) {
        sub->add_option("--reps", opt.reps, "Monte Carlo replications")->check(CLI::PositiveNumber);
        sub->add_option("--seed", opt.seed, "base seed");
        sub->add_option("--threads", opt.threads, "worker threads (results are thread-count invariant)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--weights-file", opt.weights_file, "Frey-Feeman coefficient tables");
        add_output_opts(sub);
    };
    auto add_design_opts = [&](CLI::App* sub, bool with_scheme) {
        if (with_scheme)
            sub->add_option("--scheme", scheme, "sampling scheme")
                ->check(CLI::IsMember({"rss", "jps", "ds"}));
        sub->add_option("--N", n_measured, "measured sample size")->required()->check(CLI::PositiveNumber);
        sub->add_option("--k", k, "set size")->required()->check(CLI::PositiveNumber);
        sub->add_option("--rho", rho, "ranking correlation in [-1,1]");
        sub->add_option("--transform", transform, "target transform")
            ->check(CLI::IsMember({"identity", "cdf", "neglogcdf"}));
    };

    CLI::App* t1 = app.add_subcommand("table1", "relative-efficiency grid, ranked-set scheme");
    add_sim_opts(t1);
    CLI::App* t2 = app.add_subcommand("table2", "relative-efficiency grid, judgment post-stratification");
    add_sim_opts(t2);

    CLI::App* sc = app.add_subcommand("scenario", "run a single simulation cell");
    add_design_opts(sc, true);
    add_sim_opts(sc);

    CLI::App* es = app.add_subcommand("estimate", "compute one estimator from a sample CSV");
    es->add_option("input", input_path, "sample CSV path")->required();
    es->add_option("estimator", estimator_name, "rss | maceachern | jps | frey | concomitant")
        ->required();
    es->add_option("--k", k, "set size (rank-based estimators)")->check(CLI::PositiveNumber);
    es->add_option("--weights-file", opt.weights_file, "Frey-Feeman coefficient tables");

    CLI::App* sa = app.add_subcommand("sample", "draw one sample and write it as CSV");
    add_design_opts(sa, true);
    sa->add_option("--seed", opt.seed, "base seed");
    sa->add_option("--out", opt.out_path, "output file (default: stdout)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return 1;
    }

    try {
        if (t1->parsed()) {
            run_table(1, opt, out, err);
        } else if (t2->parsed()) {
            run_table(2, opt, out, err);
        } else if (sc->parsed()) {
            Scenario s{parse_scheme(scheme), n_measured, k, rho, parse_transform(transform),
                       opt.reps, opt.seed};
            run_one_scenario(s, opt, out, err);
        } else if (es->parsed()) {
            run_estimate(input_path, estimator_name, k, opt.weights_file, out);
        } else if (sa->parsed()) {
            run_sample(parse_scheme(scheme), n_measured, k, rho, parse_transform(transform),
                       opt.seed, opt.out_path, out);
        }
        return 0;
    } catch (const DesignError& e) {
        err << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const UnsupportedProfileError& e) {
        err << "input error: " << e.what() << '\n';
        return 2;
    } catch (const InputError& e) {
        err << "input error: " << e.what() << '\n';
        return 2;
    } catch (const InsufficientDataError& e) {
        err << "input error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }
}

} // namespace rssvar::cli

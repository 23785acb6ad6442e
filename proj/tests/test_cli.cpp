#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "rssvar/cli.hpp"
#include "rssvar/csv_io.hpp"
#include "rssvar/estimators.hpp"

using namespace rssvar;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::size_t count_lines(const std::string& text) {
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

std::size_t count_prefix(const std::string& text, const std::string& prefix) {
    std::size_t n = 0, pos = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (line.rfind(prefix, 0) == 0) ++n;
    (void)pos;
    return n;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path);
    REQUIRE(f.good());
    f << content;
}

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct TempFile {
    std::string path;
    explicit TempFile(std::string p) : path(std::move(p)) {}
    ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("help and usage errors") {
    const CliResult help = run_cli({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("table1") != std::string::npos);
    CHECK(help.out.find("estimate") != std::string::npos);

    CHECK(run_cli({}).code == 1);
    CHECK(run_cli({"no-such-command"}).code == 1);
    const CliResult bad = run_cli({"scenario", "--N", "6", "--k", "3", "--bogus"});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("usage error") != std::string::npos);
    // --N and --k are required
    CHECK(run_cli({"scenario", "--N", "6"}).code == 1);
    // constrained option values are rejected at parse time
    CHECK(run_cli({"scenario", "--N", "6", "--k", "3", "--format", "xml"}).code == 1);
    CHECK(run_cli({"scenario", "--N", "0", "--k", "3"}).code == 1);
}

TEST_CASE("sample command draws structurally sound designs") {
    const CliResult rss =
        run_cli({"sample", "--scheme", "rss", "--N", "15", "--k", "3", "--rho", "0.8"});
    REQUIRE(rss.code == 0);
    CHECK(count_lines(rss.out) == 46); // header + 15 measured + 30 pool
    CHECK(rss.out.rfind("role,y,x,rank\n", 0) == 0);
    CHECK(count_prefix(rss.out, "measured,") == 15);
    CHECK(count_prefix(rss.out, "pool,,") == 30);

    const CliResult jps =
        run_cli({"sample", "--scheme", "jps", "--N", "8", "--k", "2", "--rho", "0.8"});
    REQUIRE(jps.code == 0);
    CHECK(count_lines(jps.out) == 17); // header + 8 measured + 8 pool

    const CliResult ds =
        run_cli({"sample", "--scheme", "ds", "--N", "6", "--k", "3", "--rho", "0.5"});
    REQUIRE(ds.code == 0);
    CHECK(count_lines(ds.out) == 19); // header + 6 measured + 12 pool
    // double-sampling rows carry no rank: the rank field is empty
    std::istringstream in(ds.out);
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    CHECK(line.rfind("measured,", 0) == 0);
    CHECK(line.back() == ',');

    // same seed, same bytes; different seed, different sample
    const CliResult again =
        run_cli({"sample", "--scheme", "rss", "--N", "15", "--k", "3", "--rho", "0.8"});
    CHECK(again.out == rss.out);
    const CliResult other = run_cli(
        {"sample", "--scheme", "rss", "--N", "15", "--k", "3", "--rho", "0.8", "--seed", "7"});
    CHECK(other.out != rss.out);

    // invalid designs are usage errors
    CHECK(run_cli({"sample", "--scheme", "rss", "--N", "7", "--k", "3"}).code == 1);
    CHECK(run_cli({"sample", "--scheme", "rss", "--N", "6", "--k", "3", "--rho", "1.5"}).code == 1);
}

TEST_CASE("sample round-trips through the estimate command") {
    TempFile csv("cli_roundtrip.csv");
    const CliResult drawn = run_cli({"sample", "--scheme", "rss", "--N", "15", "--k", "3",
                                     "--rho", "0.8", "--out", csv.path});
    REQUIRE(drawn.code == 0);

    const LoadedSample loaded = read_sample_file(csv.path);
    REQUIRE(loaded.units.size() == 15);
    std::vector<double> ys;
    for (const auto& unit : loaded.units) ys.push_back(unit.y);
    const std::string expected = "estimator: RSS\nvalue: " +
                                 fmt17(var_rss_empirical(ys).value) + "\n";

    const CliResult est = run_cli({"estimate", csv.path, "rss"});
    CHECK(est.code == 0);
    CHECK(est.out == expected);

    // rank-based estimators run off the same file
    const CliResult mac = run_cli({"estimate", csv.path, "maceachern", "--k", "3"});
    CHECK(mac.code == 0);
    CHECK(mac.out.find("estimator: M\n") == 0);
    const CliResult jps = run_cli({"estimate", csv.path, "jps", "--k", "3"});
    CHECK(jps.code == 0);
    CHECK(jps.out.find("estimator: JPS\n") == 0);
}

TEST_CASE("estimate concomitant matches the in-memory estimator") {
    TempFile csv("cli_concomitant.csv");
    REQUIRE(run_cli({"sample", "--scheme", "jps", "--N", "8", "--k", "2", "--rho", "0.8",
                     "--out", csv.path})
                .code == 0);

    const LoadedSample loaded = read_sample_file(csv.path);
    REQUIRE(loaded.has_ranks);
    Sample s;
    s.scheme = Scheme::Jps;
    s.k = 0;
    for (const auto& unit : loaded.units) s.k = std::max(s.k, unit.rank);
    s.design_size = static_cast<int>(loaded.units.size());
    s.units = loaded.units;
    for (const auto& unit : loaded.units) s.pool.push_back(unit.x);
    s.pool.insert(s.pool.end(), loaded.extra_pool.begin(), loaded.extra_pool.end());
    const VarianceEstimate expected = var_concomitant(s);
    REQUIRE(expected.bandwidths.has_value());

    const CliResult est = run_cli({"estimate", csv.path, "concomitant"});
    REQUIRE(est.code == 0);
    std::ostringstream want;
    want << "estimator: N\nvalue: " << fmt17(expected.value) << "\nh1: "
         << fmt17(expected.bandwidths->first) << "\nh2: " << fmt17(expected.bandwidths->second)
         << "\n";
    CHECK(est.out == want.str());
}

TEST_CASE("estimate validates its inputs") {
    TempFile ranked("cli_ranked.csv");
    write_file(ranked.path,
               "role,y,x,rank\n"
               "measured,0,0.1,1\n"
               "measured,2,0.4,1\n");

    // unknown estimator / missing required pieces are usage errors
    CHECK(run_cli({"estimate", ranked.path, "frobnicate"}).code == 1);
    CHECK(run_cli({"estimate", ranked.path, "maceachern"}).code == 1);
    CHECK(run_cli({"estimate", ranked.path, "frey", "--k", "1"}).code == 1);
    const CliResult no_pool = run_cli({"estimate", ranked.path, "concomitant"});
    CHECK(no_pool.code == 1);
    CHECK(no_pool.err.find("pool") != std::string::npos);

    const CliResult plain = run_cli({"estimate", ranked.path, "rss"});
    CHECK(plain.code == 0);
    CHECK(plain.out == "estimator: RSS\nvalue: 2\n");

    // a rank beyond k points at the offending row
    TempFile high("cli_highrank.csv");
    write_file(high.path,
               "role,y,x,rank\n"
               "measured,0,0.1,1\n"
               "measured,2,0.4,4\n");
    const CliResult bad_rank = run_cli({"estimate", high.path, "jps", "--k", "3"});
    CHECK(bad_rank.code == 2);
    CHECK(bad_rank.err.find(high.path + ":3: rank 4 out of range 1..3") != std::string::npos);

    CHECK(run_cli({"estimate", "does-not-exist.csv", "rss"}).code == 2);
}

TEST_CASE("estimate frey uses the weights file") {
    TempFile ranked("cli_frey.csv");
    write_file(ranked.path,
               "role,y,x,rank\n"
               "measured,0,0.1,1\n"
               "measured,2,0.4,1\n");
    TempFile weights("cli_frey_weights.txt");
    write_file(weights.path, "2 : 0.5\n");

    const CliResult ok =
        run_cli({"estimate", ranked.path, "frey", "--k", "1", "--weights-file", weights.path});
    CHECK(ok.code == 0);
    CHECK(ok.out == "estimator: F\nvalue: 2\n");

    TempFile wrong("cli_frey_wrong.txt");
    write_file(wrong.path, "1 1 : 0.1 0.1 0.1\n");
    const CliResult missing =
        run_cli({"estimate", ranked.path, "frey", "--k", "1", "--weights-file", wrong.path});
    CHECK(missing.code == 2);
    CHECK(missing.err.find("no Frey-Feeman weights") != std::string::npos);

    TempFile broken("cli_frey_broken.txt");
    write_file(broken.path, "2 0.5\n");
    const CliResult parse =
        run_cli({"estimate", ranked.path, "frey", "--k", "1", "--weights-file", broken.path});
    CHECK(parse.code == 2);
    CHECK(parse.err.find(broken.path + ":1") != std::string::npos);
}

TEST_CASE("malformed sample files are input errors with line numbers") {
    auto expect_input_error = [](const std::string& content, const std::string& needle) {
        TempFile f("cli_malformed.csv");
        write_file(f.path, content);
        const CliResult r = run_cli({"estimate", f.path, "rss"});
        CHECK(r.code == 2);
        CHECK(r.err.find(needle) != std::string::npos);
    };
    expect_input_error("role,y,rank\nmeasured,1,1\n", "missing column 'x'");
    expect_input_error("role,y,x,rank\nmeasured,abc,0.1,\n", ":2: bad y value 'abc'");
    expect_input_error("role,y,x,rank\nmeasured,1,0.1\n", ":2: expected 4 fields, got 3");
    expect_input_error("role,y,x,rank\nmeasured,1,0.1,1\nmeasured,2,0.2,\n",
                       "rank present on some measured rows but not others");
    expect_input_error("role,y,x,rank\npool,1,0.1,\n", "pool row must have an empty y field");
    expect_input_error("role,y,x,rank\nvisitor,1,0.1,\n", "unknown role 'visitor'");
    expect_input_error("", "empty file");
}

TEST_CASE("scenario command prints an estimator table") {
    const CliResult rss = run_cli({"scenario", "--scheme", "rss", "--N", "6", "--k", "3",
                                   "--rho", "0.8", "--reps", "5", "--seed", "7"});
    REQUIRE(rss.code == 0);
    REQUIRE(count_lines(rss.out) == 5); // header + RSS, M, N, N_DS
    CHECK(rss.out.rfind("estimator,MSE,RE\n", 0) == 0);
    std::istringstream in(rss.out);
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    CHECK(line.rfind("RSS,", 0) == 0);
    CHECK(line.find(",1.000000") == line.size() - 9); // reference RE is exactly one

    const CliResult jps = run_cli({"scenario", "--scheme", "jps", "--N", "6", "--k", "2",
                                   "--rho", "0.8", "--reps", "5", "--seed", "7"});
    REQUIRE(jps.code == 0);
    CHECK(count_lines(jps.out) == 3); // header + JPS, N

    const CliResult md = run_cli({"scenario", "--scheme", "ds", "--N", "6", "--k", "3",
                                  "--rho", "0.5", "--reps", "5", "--format", "md"});
    REQUIRE(md.code == 0);
    CHECK(md.out.rfind("| estimator | MSE | RE |\n", 0) == 0);
    CHECK(count_lines(md.out) == 4); // header + rule + RSS, N_DS
}

TEST_CASE("scenario with weights covering every jps profile includes F") {
    TempFile weights("cli_scenario_weights.txt");
    const std::string c = "0.033333333333333333";
    write_file(weights.path, "6 : " + c + "\n5 1 : " + c + " " + c + " " + c + "\n4 2 : " + c +
                                 " " + c + " " + c + "\n3 3 : " + c + " " + c + " " + c + "\n");
    const CliResult r =
        run_cli({"scenario", "--scheme", "jps", "--N", "6", "--k", "2", "--rho", "0.8",
                 "--reps", "5", "--seed", "7", "--weights-file", weights.path});
    REQUIRE(r.code == 0);
    CHECK(count_lines(r.out) == 4); // header + JPS, F, N
    CHECK(r.out.find("\nF,") != std::string::npos);

    // a table that misses reachable profiles aborts with an input error
    TempFile partial("cli_scenario_partial.txt");
    write_file(partial.path, "6 : " + c + "\n");
    const CliResult bad =
        run_cli({"scenario", "--scheme", "jps", "--N", "6", "--k", "2", "--rho", "0.8",
                 "--reps", "20", "--seed", "7", "--weights-file", partial.path});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("replication") != std::string::npos);
}

TEST_CASE("table commands render the full grid deterministically") {
    const std::vector<std::string> t1_args = {"table1", "--reps", "1", "--seed", "11"};
    const CliResult t1 = run_cli(t1_args);
    REQUIRE(t1.code == 0);
    // header + 54 cells x {M, N, N_DS}
    CHECK(count_lines(t1.out) == 1 + 54 * 3);
    CHECK(t1.out.rfind("N,k,rho,transform,estimator,RE\n", 0) == 0);
    CHECK(t1.out.find("15,3,0,identity,M,") != std::string::npos);
    CHECK(t1.out.find("45,5,1,neglogcdf,N_DS,") != std::string::npos);
    CHECK(t1.err.find("table1: cell 54/54") != std::string::npos);

    const CliResult t1_again = run_cli(t1_args);
    CHECK(t1_again.out == t1.out);

    const CliResult t2 = run_cli({"table2", "--reps", "1", "--seed", "11"});
    REQUIRE(t2.code == 0);
    CHECK(count_lines(t2.out) == 1 + 54 * 1); // F omitted without weights
    CHECK(t2.err.find("F omitted") != std::string::npos);

    const CliResult t2_md = run_cli({"table2", "--reps", "1", "--seed", "11", "--format", "md"});
    REQUIRE(t2_md.code == 0);
    CHECK(t2_md.out.rfind("| N | k | transform |", 0) == 0);
    CHECK(t2_md.out.find("N rho=0.8") != std::string::npos);
    // header + rule + 18 wide rows + blank + note
    CHECK(count_lines(t2_md.out) == 22);
    CHECK(t2_md.out.find("F unavailable") != std::string::npos);
}

TEST_CASE("output files are written and failures reported") {
    TempFile out("cli_out.csv");
    const CliResult r = run_cli({"scenario", "--scheme", "ds", "--N", "6", "--k", "3",
                                 "--reps", "3", "--out", out.path});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream f(out.path);
    std::stringstream content;
    content << f.rdbuf();
    CHECK(content.str().rfind("estimator,MSE,RE\n", 0) == 0);

    const CliResult bad = run_cli({"scenario", "--scheme", "ds", "--N", "6", "--k", "3",
                                   "--reps", "3", "--out", "no-such-dir/x.csv"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("cannot open output file") != std::string::npos);
}

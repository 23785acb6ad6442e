#include "rssvar/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rssvar/errors.hpp"

namespace rssvar {

namespace {

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

bool parse_double(const std::string& field, double& out) {
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end && std::isfinite(out);
}

bool parse_rank(const std::string& field, int& out) {
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end;
}

} // namespace

void write_sample_csv(std::ostream& out, const Sample& sample) {
    out << "role,y,x,rank\n";
    for (const auto& unit : sample.units) {
        out << "measured," << fmt17(unit.y) << ',' << fmt17(unit.x) << ',';
        if (unit.rank > 0) out << unit.rank;
        out << '\n';
    }
    // by the pool layout contract, entries past the measured block are the
    // unmeasured pool values
    for (std::size_t i = sample.units.size(); i < sample.pool.size(); ++i)
        out << "pool,," << fmt17(sample.pool[i]) << ",\n";
}

void write_sample_file(const std::string& path, const Sample& sample) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open output file: " + path);
    write_sample_csv(out, sample);
    out.flush();
    if (!out) throw InputError("failed writing output file: " + path);
}

LoadedSample read_sample_csv(std::istream& in, const std::string& source_name) {
    static const std::vector<std::string> kHeader = {"role", "y", "x", "rank"};

    LoadedSample loaded;
    std::string line;
    int lineno = 0;
    bool saw_header = false;
    bool rank_mode_set = false;

    auto fail = [&](const std::string& msg) -> InputError {
        return InputError(source_name + ":" + std::to_string(lineno) + ": " + msg);
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_fields(line);

        if (!saw_header) {
            for (const auto& name : kHeader) {
                bool found = false;
                for (const auto& f : fields) found = found || f == name;
                if (!found) throw fail("missing column '" + name + "'");
            }
            if (fields != kHeader)
                throw fail("header must be exactly 'role,y,x,rank'");
            saw_header = true;
            continue;
        }

        if (fields.size() != 4)
            throw fail("expected 4 fields, got " + std::to_string(fields.size()));
        const std::string& role = fields[0];
        const std::string& y_field = fields[1];
        const std::string& x_field = fields[2];
        const std::string& rank_field = fields[3];

        double x = 0.0;
        if (!parse_double(x_field, x)) throw fail("bad x value '" + x_field + "'");

        if (role == "measured") {
            double y = 0.0;
            if (y_field.empty()) throw fail("measured row must carry a y value");
            if (!parse_double(y_field, y)) throw fail("bad y value '" + y_field + "'");
            int rank = 0;
            const bool has_rank = !rank_field.empty();
            if (has_rank && (!parse_rank(rank_field, rank) || rank < 1))
                throw fail("bad rank '" + rank_field + "' (positive integer or empty)");
            if (!rank_mode_set) {
                loaded.has_ranks = has_rank;
                rank_mode_set = true;
            } else if (has_rank != loaded.has_ranks) {
                throw fail("rank present on some measured rows but not others");
            }
            loaded.units.push_back({y, x, rank});
            loaded.unit_rows.push_back(lineno);
        } else if (role == "pool") {
            if (!y_field.empty()) throw fail("pool row must have an empty y field");
            if (!rank_field.empty()) throw fail("pool row must have an empty rank field");
            loaded.extra_pool.push_back(x);
        } else {
            throw fail("unknown role '" + role + "' (expected measured or pool)");
        }
    }

    if (!saw_header) {
        lineno = 1;
        throw fail("empty file: header 'role,y,x,rank' required");
    }
    return loaded;
}

LoadedSample read_sample_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open input file: " + path);
    return read_sample_csv(in, path);
}

} // namespace rssvar

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rssvar/sampling.hpp"

namespace rssvar {

// One flat schema covers all three designs:
//   role,y,x,rank
// with one "measured" row per measured unit (rank empty for unranked data) and
// one "pool" row per unmeasured pool x (y and rank empty). Numbers carry 17
// significant digits so files round-trip bit-exactly. No quoting.
void write_sample_csv(std::ostream& out, const Sample& sample);
void write_sample_file(const std::string& path, const Sample& sample);

struct LoadedSample {
    std::vector<MeasuredUnit> units; // rank 0 when the rank field was empty
    std::vector<int> unit_rows;      // 1-based source line of each unit, for diagnostics
    std::vector<double> extra_pool;  // x values of pool rows, in file order
    bool has_ranks = false;          // all measured rows carried a rank
};

// throws InputError with "<source>:<line>: ..." on any schema violation
LoadedSample read_sample_csv(std::istream& in, const std::string& source_name);
LoadedSample read_sample_file(const std::string& path);

} // namespace rssvar

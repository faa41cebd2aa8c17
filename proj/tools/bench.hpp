#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "scadsched/solver.hpp"

namespace scad::cli {

/// One benchmark run: either an explicit corpus of `.bb` files or a seeded
/// generation grid (n_from..n_to at a fixed level count, `instances` blocks
/// per cell). Rows are grouped into (n, levels, objective) cells; each cell
/// gets an aggregate row with the average and maximum wall time.
struct BenchSpec {
    std::vector<std::string> files;  ///< explicit corpus; empty = use the grid
    std::uint32_t n_from = 0;
    std::uint32_t n_to = 0;
    std::uint32_t levels = 0;
    std::uint32_t instances = 0;
    std::uint64_t seed = 0;
    ObjectiveKind objective = ObjectiveKind::LexPUsThenTime;
    double timeout_seconds = 0;  ///< per instance; 0 = no timeout
    unsigned jobs = 1;           ///< accepted for interface stability; runs are sequential
};

/// Writes the CSV to `out` (header, instance rows in fixed instance order,
/// one aggregate row per cell). Timeouts mark the row and flag the cell's
/// aggregate but never abort the run. Wall time covers the solve call only,
/// not parsing or serialization. Returns a cli exit code.
int run_bench(const BenchSpec& spec, std::ostream& out, std::ostream& err);

} // namespace scad::cli

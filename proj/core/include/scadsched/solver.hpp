#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "scadsched/basic_block.hpp"
#include "scadsched/schedule.hpp"

namespace scad {

/// Enumeration settings for a fixed PU count. "Valid" means the ordering
/// constraints: partition onto exactly k nonempty PUs, same-PU dependency
/// order, and operand-order preservation on both sides. executable_only
/// additionally requires combined-order acyclicity, i.e. restricts to
/// schedules that can actually run.
struct EnumerateOptions {
    std::uint32_t k = 1;
    bool canonical_only = false;
    bool executable_only = false;
};

/// Streams each valid schedule exactly once (with canonical_only, one
/// canonical representative per PU-renaming class). Deterministic order:
/// depth-first placement along a fixed topological variable order, PU-renaming
/// classes expanded in lexicographic permutation order. The callback returns
/// false to stop early.
void enumerate_valid(const BasicBlock& bb, const EnumerateOptions& opts,
                     const std::function<bool(const Schedule&)>& emit);

struct CountResult {
    std::uint64_t total = 0;
    std::uint64_t canonical = 0;
};

/// Counts valid schedules on exactly k PUs without materializing them.
/// total == canonical * k! (every class has exactly k! members).
CountResult count_valid(const BasicBlock& bb, std::uint32_t k, bool executable_only = false);

enum class ObjectiveKind : std::uint8_t {
    MinPUs,           ///< fewest PUs admitting a valid schedule
    MinTimeGivenPUs,  ///< fewest rounds on exactly the given PU count
    LexPUsThenTime,   ///< fewest PUs first, then fewest rounds
    LexTimeThenPUs,   ///< fewest rounds first, then fewest PUs
};

const char* to_string(ObjectiveKind kind);

struct Objective {
    ObjectiveKind kind = ObjectiveKind::MinPUs;
    std::uint32_t pus = 0;  ///< PU count for MinTimeGivenPUs
    /// MinTimeGivenPUs only: optimize over at most `pus` PUs (the union of
    /// the exactly-j regimes for j <= pus) instead of exactly `pus`. Counts
    /// then sum over every j attaining the optimum and best_pus reports the
    /// smallest such j.
    bool at_most_pus = false;
    SolverBounds bounds;
};

enum class CollectMode : std::uint8_t {
    None,          ///< counts only
    First,         ///< one witness schedule
    All,           ///< every optimal schedule
    AllCanonical,  ///< one canonical representative per PU-renaming class
};

struct OptResult {
    bool feasible = false;
    std::uint32_t best_pus = 0;
    std::optional<std::uint32_t> best_cost;  ///< set by cost-aware objectives
    std::uint64_t count_total = 0;
    std::uint64_t count_canonical = 0;
    std::vector<Schedule> schedules;
};

/// Exact optimization. Time-aware selection ranges over schedules with a
/// finite cost; plain PU minimization ranges over all ordering-valid
/// schedules. Counts describe the full optimum set of the objective.
OptResult solve(const BasicBlock& bb, const Objective& obj,
                CollectMode collect = CollectMode::None);

/// Smallest k admitting a valid schedule under the bounds, if any.
std::optional<std::uint32_t> min_pus(const BasicBlock& bb, const SolverBounds& bounds = {});

} // namespace scad

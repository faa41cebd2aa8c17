#pragma once

#include <vector>

#include "scadsched/basic_block.hpp"
#include "scadsched/schedule.hpp"

namespace scad {

/// Exhaustive reference enumeration, written as a plain transcription of the
/// scheduling constraints (own transitive closure, own pairwise checks) and
/// deliberately independent of the solver's search. Enumerates every ordering
/// of every surjective assignment onto exactly k PUs and filters by the
/// ordering constraints (partition, same-PU dependency order, operand-order
/// preservation on both sides). Combined-order acyclicity is NOT part of the
/// ordering constraints; pair with executable_check to probe it.
///
/// Guarded: throws TooLarge when n_vars > 9 or k > 4.
std::vector<Schedule> brute_force_schedules(const BasicBlock& bb, std::uint32_t k);

/// Machine-level ground truth: generates the move program and runs the
/// simulator (unbounded buffers, preregistered issue). True iff code
/// generation succeeds, the FIFO discipline holds, the run completes, and the
/// produced root values equal direct evaluation of the block.
bool executable_check(const BasicBlock& bb, const Schedule& s);

} // namespace scad

#pragma once

#include <cstdint>

#include "scadsched/basic_block.hpp"

namespace scad {

/// Parameters for the seeded random block generator: exactly n variables,
/// dataflow depth exactly `levels`. Feasible iff n >= 1 and 1 <= levels <= n
/// (operands may repeat, so one variable per level suffices).
struct GenParams {
    std::uint32_t n = 1;
    std::uint32_t levels = 1;
    std::uint64_t seed = 0;
};

/// Deterministic random block: variables are named x0..x{n-1} in creation
/// order, level sizes come from a seeded composition of n into `levels`
/// positive parts, and each node above the leaf level takes its left operand
/// uniformly from the level directly below and its right operand uniformly
/// from all lower levels. The left-operand anchoring pins every node's depth,
/// so depth(block) == levels always holds.
///
/// For levels >= 2 every leaf is guaranteed to be consumed by at least one
/// operation: blocks are serialized as operand facts only, so an unread leaf
/// would vanish on a write/re-parse cycle and the block would no longer have
/// n variables. Free draws that miss a leaf are patched deterministically
/// (see the implementation); fully covered draws are returned untouched.
///
/// Randomness is SplitMix64 (documented in the implementation), chosen over
/// an implementation-defined standard generator so the same (n, levels, seed)
/// triple yields byte-identical fact text on every platform. Throws
/// InfeasibleParams for n == 0, levels == 0, or levels > n.
BasicBlock random_block(const GenParams& params);

} // namespace scad

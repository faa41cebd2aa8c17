#pragma once

#include <string>
#include <string_view>

#include "scadsched/basic_block.hpp"
#include "scadsched/schedule.hpp"
#include "scadsched/solver.hpp"

namespace scad {

struct AspOptions {
    bool symmetry_breaking = true;  ///< order PUs by their minimum variable
};

/// The block as answer-set facts: one `operand(t,l,r).` per definition in
/// fact order. parse_block(emit_facts(bb)) reproduces the block.
std::string emit_facts(const BasicBlock& bb);

/// Complete answer-set program (facts plus encoding) for the given objective
/// and bounds: assignment and order choices, operand-order propagation,
/// dependency constraints, PU-count machinery, and — for time-aware
/// objectives or a time bound — longest-path cost rules with minimization at
/// the appropriate priorities. The header comment in the emitted text
/// documents the exactly-one reading of the order choice.
std::string emit_program(const BasicBlock& bb, const Objective& obj,
                         const AspOptions& opts = {});

/// Reads one answer set (the whitespace-separated atom list a solver prints)
/// back into a schedule. Considers asgn/2 and order/2 atoms, ignores the
/// rest. Throws MissingAssignment when a variable has no PU,
/// InconsistentModel when the order atoms are not a total per-PU order, and
/// UnknownVariable for names outside the block.
Schedule parse_answer_set(const BasicBlock& bb, std::string_view text);

} // namespace scad

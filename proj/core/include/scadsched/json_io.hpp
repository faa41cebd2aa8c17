#pragma once

#include <string>
#include <string_view>

#include "scadsched/basic_block.hpp"
#include "scadsched/codegen.hpp"
#include "scadsched/machine.hpp"
#include "scadsched/schedule.hpp"

namespace scad {

/// {"pus": [["x0","x1"],["x2"]]} — sequences of display names.
std::string schedule_to_json(const BasicBlock& bb, const Schedule& s);

/// Inverse of schedule_to_json. Throws SyntaxError on malformed JSON or an
/// unexpected shape, UnknownVariable for names outside the block. Does not
/// check validity; run validate() for that.
Schedule schedule_from_json(const BasicBlock& bb, std::string_view text);

/// {"valid": bool, "violations": [{"kind": "...", "vars": [...], "pus": [...]}]}
/// with kind strings exactly matching the ViolationKind enumerator names.
std::string report_to_json(const BasicBlock& bb, const ValidationReport& report);

/// {"status": "Completed"|"Deadlock", "rounds": N, "stall_cycles": N,
///  "outputs": {"x8": "x8(x4(x0,x2),x2)", ...}} plus "trace" when collected.
std::string sim_result_to_json(const BasicBlock& bb, const SimResult& r);

/// [{"kind": "Data"|"LoadAddress", "src": "x0", "pu": 0, "side": "L"}, ...].
/// A pu equal to the program's pu_count denotes the load/store unit.
std::string moves_to_json(const BasicBlock& bb, const MoveProgram& p);

} // namespace scad

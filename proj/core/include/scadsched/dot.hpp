#pragma once

#include <string>

#include "scadsched/basic_block.hpp"
#include "scadsched/schedule.hpp"

namespace scad {

/// Graphviz rendering of the dataflow DAG: one node per variable labeled by
/// its display name, one solid edge per distinct operand->consumer pair.
std::string to_dot(const BasicBlock& bb);

/// Same graph with a schedule overlaid: each PU's consecutive-production
/// edges are added dashed (skipping those that coincide with a dataflow
/// edge), and nodes carry their PU index in the label. An empty schedule
/// renders identically to the plain block.
std::string to_dot(const BasicBlock& bb, const Schedule& s);

} // namespace scad

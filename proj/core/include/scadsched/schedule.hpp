#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scadsched/basic_block.hpp"

namespace scad {

/// A schedule: per-PU production sequences (front = produced first). Every
/// variable of the block occurs exactly once across all sequences; empty
/// sequences are allowed only where a caller explicitly works with "at most
/// k" semantics.
struct Schedule {
    std::vector<std::vector<VarId>> pus;

    friend bool operator==(const Schedule&, const Schedule&) = default;
};

enum class ViolationKind : std::uint8_t {
    Partition,      ///< some variable missing or repeated across PU sequences
    Dependency,     ///< same-PU pair ordered against the transitive dataflow
    OperandOrderL,  ///< left operands ordered against their consumers' order
    OperandOrderR,  ///< right operands ordered against their consumers' order
    CombinedCycle,  ///< dataflow plus sequence-order edges form a cycle
};

const char* to_string(ViolationKind kind);

struct Violation {
    ViolationKind kind;
    std::vector<VarId> vars;  ///< involved variables (witness)
    std::vector<int> pus;     ///< involved PU indices (witness)
};

struct ValidationReport {
    bool valid = true;  ///< no violations of any kind, so the schedule executes
    std::vector<Violation> violations;
};

/// Full validity check. Reports every violated constraint instance with a
/// witness (one per offending pair/cycle). Throws UnknownVariable if the
/// schedule mentions an index outside the block.
ValidationReport validate(const BasicBlock& bb, const Schedule& s);

/// Dataflow edges plus the consecutive-production edges of each PU sequence.
/// Node weights default to 1 and are an extension hook for non-unit opcode
/// latencies.
struct CombinedDag {
    std::uint32_t n = 0;
    std::vector<std::pair<VarId, VarId>> edges;  ///< deduplicated, sorted
    std::vector<std::uint32_t> weights;          ///< per node, default 1
};

CombinedDag combined_dag(const BasicBlock& bb, const Schedule& s);

/// Longest weighted path (sum of node weights along a path, unit weights give
/// the node count). Returns nullopt when the combined DAG is cyclic; a cyclic
/// schedule has no execution time.
std::optional<std::uint32_t> cost(const CombinedDag& dag);

/// PU-permutation normal form: sequences ordered by their minimum variable
/// under numeric display-name order, empty sequences last. Two schedules are
/// PU-renamings of each other iff their canonical forms are equal.
Schedule canonical_form(const BasicBlock& bb, const Schedule& s);

bool is_canonical(const BasicBlock& bb, const Schedule& s);

/// Bounds shared by solver objectives and the emitted ASP encodings.
struct SolverBounds {
    std::uint32_t max_pus = 0;                   ///< search ceiling; 0 = n_vars
    std::optional<std::uint32_t> time_bound;     ///< hard cap on cost
    std::optional<std::uint32_t> pu_bound;       ///< hard cap on PU count
};

} // namespace scad

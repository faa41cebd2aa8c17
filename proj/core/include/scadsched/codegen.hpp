#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scadsched/basic_block.hpp"
#include "scadsched/schedule.hpp"

namespace scad {

enum class MoveKind : std::uint8_t { Data, LoadAddress };

/// One move instruction. Data: transport the value of variable `src` to the
/// given input buffer. LoadAddress: place the memory address of leaf `src`
/// into the target input buffer as an immediate. A Data move with
/// tgt_pu == pu_count targets the load/store unit (optional store emission).
struct MoveInstruction {
    MoveKind kind;
    VarId src;
    std::uint32_t tgt_pu;
    Side side;

    friend bool operator==(const MoveInstruction&, const MoveInstruction&) = default;
};

/// A move program plus the per-PU production order. The production order is
/// the opcode stream a real machine program would carry alongside the moves;
/// it cannot always be reconstructed from the moves alone (two variables with
/// identical operand sources on one PU are indistinguishable on the wire).
struct MoveProgram {
    std::vector<MoveInstruction> moves;
    std::uint32_t pu_count = 0;
    std::vector<std::vector<VarId>> pu_sequences;
};

struct CodegenOptions {
    bool emit_stores = false;  ///< also emit one store move per root to the LSU
};

/// Emits a deterministic move program for a schedule: each variable's
/// delivery moves (a leaf's address move, or an operation's left-then-right
/// data moves) are grouped, and the groups are ordered by nondecreasing
/// longest-path level in the combined DAG, ties broken on variable index.
/// Every input buffer therefore receives its entries in operand order, and
/// no delivery is ever withheld past the round its consumer becomes ready:
/// the program runs in exactly cost(combined_dag(bb, s)) rounds. Throws
/// CyclicPrecedence when the combined order is cyclic, i.e. the schedule
/// cannot execute.
MoveProgram move_program(const BasicBlock& bb, const Schedule& s,
                         const CodegenOptions& opts = {});

/// Independent checker for the FIFO discipline: program order must list each
/// input buffer's entries in its consumers' production order, with exactly
/// one move per consumer slot, one address move per leaf, and stores (when
/// present) covering exactly the roots. Does not inspect how the program was
/// built and does not decide deadlock-freedom; the simulator covers liveness.
bool fifo_consistent(const BasicBlock& bb, const Schedule& s, const MoveProgram& p);

/// Text form, one move per line: "x0 -> PU0.L", "addr(x2) -> PU1.L",
/// stores as "x5 -> LSU".
std::string moves_to_text(const BasicBlock& bb, const MoveProgram& p);

/// Parses the text form back (inverse of moves_to_text for a known block and
/// schedule; pu_sequences are taken from the schedule).
MoveProgram moves_from_text(const BasicBlock& bb, const Schedule& s, std::string_view text);

} // namespace scad

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scadsched/basic_block.hpp"
#include "scadsched/codegen.hpp"

namespace scad {

/// Symbolic machine values. Operations are uninterpreted, so a correct run
/// reproduces each variable's expression tree: Address is the immediate
/// placed by a LoadAddress move, Load is the memory value behind an address,
/// Op tags an operation firing with the variable it computes. Invalid marks
/// the result of loading from a non-address value (only reachable with
/// malformed programs).
struct ValueTerm;
using TermPtr = std::shared_ptr<const ValueTerm>;

struct ValueTerm {
    enum class Kind : std::uint8_t { Address, Load, Op, Invalid };
    Kind kind;
    VarId var;
    TermPtr left;
    TermPtr right;
};

TermPtr make_address(VarId leaf);
TermPtr make_load(VarId leaf);
TermPtr make_op(VarId v, TermPtr left, TermPtr right);
TermPtr make_invalid();

bool terms_equal(const TermPtr& a, const TermPtr& b);

/// "x5(x0,x3(x0,x1))" for Op terms, plain names for loads, "addr(x0)" for
/// addresses.
std::string term_to_string(const BasicBlock& bb, const TermPtr& t);

/// Direct evaluation of the block: every root's expected term (subterms
/// shared). The machine-independent reference the simulator is checked
/// against.
std::map<std::uint32_t, TermPtr> reference_eval(const BasicBlock& bb);

enum class IssueMode : std::uint8_t {
    Preregistered,  ///< all moves registered before the first round
    OnePerCycle,    ///< one registration attempt per round, stalls on full buffers
};

struct MachineConfig {
    std::uint32_t pu_count = 0;
    std::optional<std::uint32_t> input_capacity;   ///< per input buffer; unset = unbounded
    std::optional<std::uint32_t> output_capacity;  ///< per output buffer; unset = unbounded
    IssueMode issue_mode = IssueMode::Preregistered;
    bool collect_trace = false;
};

enum class SimStatus : std::uint8_t { Completed, Deadlock };

struct SimResult {
    SimStatus status = SimStatus::Completed;
    /// Produced terms of the block's roots (indexed by variable index).
    std::map<std::uint32_t, TermPtr> outputs;
    std::uint32_t rounds = 0;
    std::uint32_t stall_cycles = 0;
    std::vector<std::string> trace;
};

/// Cycle-accurate simulation of the buffered exposed-datapath machine.
///
/// Each round: (1) in one-per-cycle mode, try to register the next move —
/// a data move appends an empty tagged entry to the producer's output buffer
/// and the target input buffer, an address move appends a filled immediate
/// entry; registration stalls while a required buffer is full. (2) Every PU
/// with a filled input head (both heads for binary ops) fires once, consuming
/// the heads and latching its value; all currently registered output entries
/// of that variable are filled, and entries registered later are filled at
/// registration time from the latch. (3) Output buffers drain from the head
/// as long as the head is filled; a delivered message fills the empty entry
/// closest to the target's head that is tagged with the sending PU. Messages
/// arrive in the same round they are sent, and a value delivered in round r
/// is consumable from round r+1, so with everything preregistered the number
/// of rounds equals the longest dependency chain.
///
/// Terminates Completed when every variable is produced, every move is
/// registered, and all output buffers have drained; reports Deadlock when a
/// round passes with no registration, firing, or delivery before that point.
/// Preregistered issue requires unbounded buffers (throws MalformedProgram
/// otherwise, as does any program/config mismatch).
SimResult simulate(const BasicBlock& bb, const MoveProgram& p, const MachineConfig& cfg);

} // namespace scad

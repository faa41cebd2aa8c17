#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace scad {

/// Dense variable index within one basic block, in first-appearance order of
/// the block text. Display names (e.g. "x3") are kept by the block.
struct VarId {
    std::uint32_t index = 0;

    friend auto operator<=>(const VarId&, const VarId&) = default;
};

enum class Side : std::uint8_t { L = 0, R = 1 };

const char* to_string(Side side);

/// One operand fact: `target = op(left, right)`. The operation itself is
/// uninterpreted; a defined variable's opcode is its own name.
struct Definition {
    VarId left;
    VarId right;
};

struct ConsumerSlot {
    VarId consumer;
    Side side;

    friend auto operator<=>(const ConsumerSlot&, const ConsumerSlot&) = default;
};

/// A basic block as a dataflow DAG: each variable is either a leaf (loaded
/// from memory) or defined by exactly one binary operation over earlier
/// variables. Parsed from `operand(t,l,r).` fact text.
class BasicBlock {
public:
    std::uint32_t n_vars() const { return static_cast<std::uint32_t>(names_.size()); }
    const std::string& name(VarId v) const { return names_[v.index]; }
    std::optional<VarId> find(std::string_view name) const;

    bool is_leaf(VarId v) const { return !defs_[v.index].has_value(); }
    const std::optional<Definition>& definition(VarId v) const { return defs_[v.index]; }

    /// Variables never defined by an operand fact, ascending by index.
    const std::vector<VarId>& leaves() const { return leaves_; }
    /// Variables not consumed as an operand by any fact, ascending by index.
    const std::vector<VarId>& roots() const { return roots_; }
    /// Defined variables in the textual order of their facts.
    const std::vector<VarId>& defined_in_fact_order() const { return def_order_; }

    /// All (consumer, side) pairs that read v, ascending by (consumer, L<R).
    const std::vector<ConsumerSlot>& consumer_slots(VarId v) const {
        return slots_[v.index];
    }

    /// Builder used by the parser and the generator.
    static BasicBlock from_definitions(
        std::vector<std::string> names,
        std::vector<std::optional<Definition>> defs,
        std::vector<VarId> def_order);

private:
    std::vector<std::string> names_;
    std::vector<std::optional<Definition>> defs_;
    std::vector<VarId> def_order_;
    std::vector<VarId> leaves_;
    std::vector<VarId> roots_;
    std::vector<std::vector<ConsumerSlot>> slots_;
};

/// Parses `operand(t,l,r).` facts ('%' starts a line comment). Throws Error
/// with kind SyntaxError / DuplicateDefinition / CyclicProgram / EmptyProgram.
BasicBlock parse_block(std::string_view text);

/// Strict transitive predecessor relation of the dataflow DAG, stored as one
/// bitset row per variable.
class PrecedenceRelation {
public:
    explicit PrecedenceRelation(std::uint32_t n);

    /// True iff a is a strict transitive predecessor of b.
    bool precedes(VarId a, VarId b) const {
        return (rows_[b.index * words_ + a.index / 64] >> (a.index % 64)) & 1u;
    }

    void set(VarId a, VarId b);
    /// rows OR-update: preds(b) |= preds(a). Used while building the closure.
    void merge_into(VarId a, VarId b);

    std::uint32_t size() const { return n_; }

private:
    std::uint32_t n_;
    std::uint32_t words_;
    std::vector<std::uint64_t> rows_;
};

/// Transitive closure of "is an operand of, directly or indirectly".
PrecedenceRelation predecessors(const BasicBlock& bb);

/// Dataflow edges operand -> consumer, deduplicated, ascending by (from, to).
std::vector<std::pair<VarId, VarId>> initial_edges(const BasicBlock& bb);

/// Longest path of the dataflow DAG counted in nodes (leaves have depth 1).
std::uint32_t depth(const BasicBlock& bb);

/// Orders display names the way "x0 < x2 < x10" expects: by alphabetic prefix,
/// then numerically by the trailing digit run.
bool numeric_name_less(std::string_view a, std::string_view b);

} // namespace scad

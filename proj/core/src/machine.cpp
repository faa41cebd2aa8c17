#include "scadsched/machine.hpp"

#include <array>
#include <deque>
#include <sstream>

#include "scadsched/error.hpp"

namespace scad {

TermPtr make_address(VarId leaf) {
    return std::make_shared<ValueTerm>(ValueTerm{ValueTerm::Kind::Address, leaf, nullptr, nullptr});
}

TermPtr make_load(VarId leaf) {
    return std::make_shared<ValueTerm>(ValueTerm{ValueTerm::Kind::Load, leaf, nullptr, nullptr});
}

TermPtr make_op(VarId v, TermPtr left, TermPtr right) {
    return std::make_shared<ValueTerm>(
        ValueTerm{ValueTerm::Kind::Op, v, std::move(left), std::move(right)});
}

TermPtr make_invalid() {
    return std::make_shared<ValueTerm>(ValueTerm{ValueTerm::Kind::Invalid, VarId{0}, nullptr, nullptr});
}

bool terms_equal(const TermPtr& a, const TermPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind || a->var != b->var) return false;
    return terms_equal(a->left, b->left) && terms_equal(a->right, b->right);
}

std::string term_to_string(const BasicBlock& bb, const TermPtr& t) {
    if (!t) return "?";
    switch (t->kind) {
    case ValueTerm::Kind::Address: return "addr(" + bb.name(t->var) + ")";
    case ValueTerm::Kind::Load: return bb.name(t->var);
    case ValueTerm::Kind::Invalid: return "<invalid>";
    case ValueTerm::Kind::Op:
        return bb.name(t->var) + "(" + term_to_string(bb, t->left) + "," +
               term_to_string(bb, t->right) + ")";
    }
    return "?";
}

std::map<std::uint32_t, TermPtr> reference_eval(const BasicBlock& bb) {
    const std::uint32_t n = bb.n_vars();
    std::vector<TermPtr> value(n);
    // Indices are first-appearance order; resolve via Kahn over consumer slots.
    std::vector<std::uint32_t> indegree(n, 0);
    for (std::uint32_t i = 0; i < n; ++i) {
        if (bb.definition(VarId{i})) indegree[i] = 2;
    }
    std::vector<VarId> ready;
    for (std::uint32_t i = 0; i < n; ++i) {
        if (indegree[i] == 0) ready.push_back(VarId{i});
    }
    while (!ready.empty()) {
        VarId v = ready.back();
        ready.pop_back();
        if (const auto& d = bb.definition(v)) {
            value[v.index] = make_op(v, value[d->left.index], value[d->right.index]);
        } else {
            value[v.index] = make_load(v);
        }
        for (const ConsumerSlot& s : bb.consumer_slots(v)) {
            if (--indegree[s.consumer.index] == 0) ready.push_back(s.consumer);
        }
    }
    std::map<std::uint32_t, TermPtr> roots;
    for (VarId r : bb.roots()) roots[r.index] = value[r.index];
    return roots;
}

namespace {

constexpr std::uint32_t kNone = 0xffffffffu;

struct InEntry {
    bool immediate;        // filled with an address term at registration
    std::uint32_t src_pu;  // tag matched by delivery (kNone for immediates)
    TermPtr val;           // empty until filled
};

struct OutEntry {
    VarId owner;  // producing variable; filled when (or after) it fires
    std::uint32_t tgt_pu;
    Side tgt_side;
    TermPtr val;
};

struct Machine {
    const BasicBlock& bb;
    const MoveProgram& program;
    const MachineConfig& cfg;

    std::vector<std::array<std::deque<InEntry>, 2>> in_buf;
    std::vector<std::deque<OutEntry>> out_buf;
    std::vector<std::uint32_t> next_slot;    // per PU, index into its sequence
    std::vector<std::uint32_t> pu_of;        // per variable
    std::vector<TermPtr> latched;            // per variable, set when it fires
    std::size_t cursor = 0;                  // next move to register
    SimResult result;
    std::ostringstream round_log;

    explicit Machine(const BasicBlock& b, const MoveProgram& p, const MachineConfig& c)
        : bb(b), program(p), cfg(c) {}

    bool has_space_in(std::uint32_t pu, Side side) const {
        return !cfg.input_capacity ||
               in_buf[pu][static_cast<std::size_t>(side)].size() < *cfg.input_capacity;
    }
    bool has_space_out(std::uint32_t pu) const {
        return !cfg.output_capacity || out_buf[pu].size() < *cfg.output_capacity;
    }

    // Appends the buffer entries of one move. Returns false when a required
    // buffer is full (one-per-cycle stall).
    bool register_move(const MoveInstruction& m) {
        if (m.kind == MoveKind::LoadAddress) {
            if (!has_space_in(m.tgt_pu, m.side)) return false;
            in_buf[m.tgt_pu][static_cast<std::size_t>(m.side)].push_back(
                {true, kNone, make_address(m.src)});
            return true;
        }
        std::uint32_t src_pu = pu_of[m.src.index];
        bool to_lsu = m.tgt_pu == program.pu_count;
        if (!has_space_out(src_pu)) return false;
        if (!to_lsu && !has_space_in(m.tgt_pu, m.side)) return false;
        // Late registration after the producer fired picks up the latch.
        out_buf[src_pu].push_back({m.src, m.tgt_pu, m.side, latched[m.src.index]});
        if (!to_lsu) {
            in_buf[m.tgt_pu][static_cast<std::size_t>(m.side)].push_back(
                {false, src_pu, nullptr});
        }
        return true;
    }

    bool fire(std::uint32_t q) {
        const auto& seq = program.pu_sequences[q];
        if (next_slot[q] >= seq.size()) return false;
        VarId v = seq[next_slot[q]];
        auto& left = in_buf[q][0];
        TermPtr value;
        if (bb.is_leaf(v)) {
            if (left.empty() || !left.front().val) return false;
            TermPtr addr = left.front().val;
            left.pop_front();
            value = addr->kind == ValueTerm::Kind::Address ? make_load(addr->var)
                                                           : make_invalid();
        } else {
            auto& right = in_buf[q][1];
            if (left.empty() || !left.front().val) return false;
            if (right.empty() || !right.front().val) return false;
            TermPtr lv = left.front().val;
            TermPtr rv = right.front().val;
            left.pop_front();
            right.pop_front();
            value = make_op(v, std::move(lv), std::move(rv));
        }
        latched[v.index] = value;
        for (OutEntry& e : out_buf[q]) {
            if (e.owner == v && !e.val) e.val = value;
        }
        ++next_slot[q];
        if (cfg.collect_trace) round_log << " " << "PU" << q << ":" << bb.name(v);
        return true;
    }

    bool deliver() {
        bool any = false;
        for (std::uint32_t q = 0; q < program.pu_count; ++q) {
            while (!out_buf[q].empty() && out_buf[q].front().val) {
                OutEntry e = out_buf[q].front();
                out_buf[q].pop_front();
                any = true;
                if (e.tgt_pu == program.pu_count) {
                    if (cfg.collect_trace) {
                        round_log << " " << bb.name(e.owner) << "->LSU";
                    }
                    continue;
                }
                auto& buf = in_buf[e.tgt_pu][static_cast<std::size_t>(e.tgt_side)];
                bool placed = false;
                for (InEntry& slot : buf) {
                    if (!slot.immediate && !slot.val && slot.src_pu == q) {
                        slot.val = e.val;
                        placed = true;
                        break;
                    }
                }
                if (!placed) {
                    fail(ErrorKind::Internal,
                         "message from PU" + std::to_string(q) + " found no awaiting entry");
                }
                if (cfg.collect_trace) {
                    round_log << " " << bb.name(e.owner) << "->PU" << e.tgt_pu << "."
                              << to_string(e.tgt_side);
                }
            }
        }
        return any;
    }

    bool terminal() const {
        if (cursor < program.moves.size()) return false;
        for (std::uint32_t q = 0; q < program.pu_count; ++q) {
            if (next_slot[q] < program.pu_sequences[q].size()) return false;
            if (!out_buf[q].empty()) return false;
        }
        return true;
    }
};

} // namespace

SimResult simulate(const BasicBlock& bb, const MoveProgram& p, const MachineConfig& cfg) {
    const std::uint32_t n = bb.n_vars();
    if (cfg.pu_count != p.pu_count) {
        fail(ErrorKind::MalformedProgram, "config PU count differs from the program's");
    }
    if (p.pu_count == 0 || p.pu_sequences.size() != p.pu_count) {
        fail(ErrorKind::MalformedProgram, "program carries no usable PU sequences");
    }
    if (cfg.issue_mode == IssueMode::Preregistered &&
        (cfg.input_capacity || cfg.output_capacity)) {
        fail(ErrorKind::MalformedProgram,
             "preregistered issue requires unbounded buffers");
    }
    if ((cfg.input_capacity && *cfg.input_capacity == 0) ||
        (cfg.output_capacity && *cfg.output_capacity == 0)) {
        fail(ErrorKind::MalformedProgram, "buffer capacity must be positive");
    }

    Machine m(bb, p, cfg);
    m.in_buf.resize(p.pu_count);
    m.out_buf.resize(p.pu_count);
    m.next_slot.assign(p.pu_count, 0);
    m.pu_of.assign(n, kNone);
    m.latched.assign(n, nullptr);
    for (std::uint32_t q = 0; q < p.pu_count; ++q) {
        for (VarId v : p.pu_sequences[q]) {
            if (v.index >= n || m.pu_of[v.index] != kNone) {
                fail(ErrorKind::MalformedProgram, "PU sequences are not a partition");
            }
            m.pu_of[v.index] = q;
        }
    }
    for (std::uint32_t i = 0; i < n; ++i) {
        if (m.pu_of[i] == kNone) {
            fail(ErrorKind::MalformedProgram,
                 "variable '" + bb.name(VarId{i}) + "' missing from the PU sequences");
        }
    }
    for (const MoveInstruction& mi : p.moves) {
        if (mi.src.index >= n) {
            fail(ErrorKind::MalformedProgram, "move references an unknown variable");
        }
        if (mi.kind == MoveKind::LoadAddress) {
            if (!bb.is_leaf(mi.src) || mi.tgt_pu >= p.pu_count) {
                fail(ErrorKind::MalformedProgram, "bad address move");
            }
        } else if (mi.tgt_pu > p.pu_count) {
            fail(ErrorKind::MalformedProgram, "move targets a PU outside the program");
        }
    }

    if (cfg.issue_mode == IssueMode::Preregistered) {
        for (const MoveInstruction& mi : p.moves) m.register_move(mi);
        m.cursor = p.moves.size();
    }

    const std::uint32_t round_guard = 16 + 4 * (n + static_cast<std::uint32_t>(p.moves.size()));
    std::uint32_t round = 0;
    while (!m.terminal()) {
        ++round;
        if (round > round_guard) {
            fail(ErrorKind::Internal, "simulation exceeded the round guard");
        }
        bool progress = false;
        if (m.cfg.collect_trace) {
            m.round_log.str("");
            m.round_log << "round " << round << ":";
        }
        if (cfg.issue_mode == IssueMode::OnePerCycle && m.cursor < p.moves.size()) {
            if (m.register_move(p.moves[m.cursor])) {
                ++m.cursor;
                progress = true;
            } else {
                ++m.result.stall_cycles;
            }
        }
        for (std::uint32_t q = 0; q < p.pu_count; ++q) {
            progress |= m.fire(q);
        }
        progress |= m.deliver();
        if (m.cfg.collect_trace) m.result.trace.push_back(m.round_log.str());
        if (!progress) {
            m.result.status = SimStatus::Deadlock;
            m.result.rounds = round - 1;
            return m.result;
        }
        m.result.rounds = round;
    }
    m.result.status = SimStatus::Completed;
    for (VarId r : bb.roots()) {
        if (m.latched[r.index]) m.result.outputs[r.index] = m.latched[r.index];
    }
    return m.result;
}

} // namespace scad

#include "scadsched/codegen.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <sstream>

#include "scadsched/error.hpp"

namespace scad {

namespace {

constexpr std::uint32_t kUnassigned = 0xffffffffu;

struct Placement {
    std::vector<std::uint32_t> pu_of;
    std::vector<std::uint32_t> pos_of;
};

Placement placement_or_throw(const BasicBlock& bb, const Schedule& s) {
    const std::uint32_t n = bb.n_vars();
    Placement pl{std::vector<std::uint32_t>(n, kUnassigned),
                 std::vector<std::uint32_t>(n, kUnassigned)};
    for (std::uint32_t p = 0; p < s.pus.size(); ++p) {
        for (std::uint32_t i = 0; i < s.pus[p].size(); ++i) {
            VarId v = s.pus[p][i];
            if (v.index >= n) {
                fail(ErrorKind::UnknownVariable, "schedule references an unknown variable");
            }
            if (pl.pu_of[v.index] != kUnassigned) {
                fail(ErrorKind::MalformedProgram,
                     "variable '" + bb.name(v) + "' scheduled twice");
            }
            pl.pu_of[v.index] = p;
            pl.pos_of[v.index] = i;
        }
    }
    for (std::uint32_t i = 0; i < n; ++i) {
        if (pl.pu_of[i] == kUnassigned) {
            fail(ErrorKind::MalformedProgram,
                 "variable '" + bb.name(VarId{i}) + "' not scheduled");
        }
    }
    return pl;
}

} // namespace

MoveProgram move_program(const BasicBlock& bb, const Schedule& s, const CodegenOptions& opts) {
    const Placement pl = placement_or_throw(bb, s);
    const auto pu_count = static_cast<std::uint32_t>(s.pus.size());
    const std::uint32_t n = bb.n_vars();

    // Issue order: each variable's delivery moves (one address move for a
    // leaf, left-then-right data moves for an operation) form a group, and
    // the groups are laid out by nondecreasing level in the combined DAG,
    // where a variable's level is the longest path ending in it (ties break
    // on variable index). Levels strictly increase along every PU's
    // schedule sequence, so each input buffer fills in operand order. The
    // level order also makes the timing exact: any entry sitting ahead of a
    // consumer's operands in an output buffer belongs to a consumer of the
    // same or lower level, so it is filled no later than that level's round
    // and head-of-buffer sending never withholds an operand past the round
    // its consumer becomes ready. By induction every variable fires exactly
    // in its level's round, the program completes, and the round count
    // equals the longest path of the combined DAG. An arbitrary topological
    // order would still complete, but can stall deliveries past the
    // critical path; ordering output entries by producer position instead
    // is stricter than the machine requires and can even manufacture
    // deadlocks for schedules that execute fine.
    const CombinedDag dag = combined_dag(bb, s);
    std::vector<std::vector<std::uint32_t>> out(n);
    std::vector<std::uint32_t> indeg(n, 0);
    for (const auto& [a, b] : dag.edges) {
        out[a.index].push_back(b.index);
        ++indeg[b.index];
    }
    std::vector<std::uint32_t> level(n, 1);
    std::vector<std::uint32_t> queue;
    queue.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        if (indeg[i] == 0) queue.push_back(i);
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const std::uint32_t v = queue[head];
        for (std::uint32_t c : out[v]) {
            level[c] = std::max(level[c], level[v] + 1);
            if (--indeg[c] == 0) queue.push_back(c);
        }
    }
    if (queue.size() != n) {
        fail(ErrorKind::CyclicPrecedence,
             "combined order is cyclic; the schedule cannot execute");
    }
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return std::pair(level[a], a) < std::pair(level[b], b);
    });

    MoveProgram program;
    program.pu_count = pu_count;
    program.pu_sequences = s.pus;
    for (std::uint32_t v : order) {
        if (bb.is_leaf(VarId{v})) {
            program.moves.push_back({MoveKind::LoadAddress, VarId{v}, pl.pu_of[v], Side::L});
        } else {
            const Definition& d = *bb.definition(VarId{v});
            program.moves.push_back({MoveKind::Data, d.left, pl.pu_of[v], Side::L});
            program.moves.push_back({MoveKind::Data, d.right, pl.pu_of[v], Side::R});
        }
    }

    // Stores go last: a store entry at an output-buffer tail can delay
    // nothing, and within one buffer the (pu, position) order matches the
    // production order.
    if (opts.emit_stores) {
        std::vector<VarId> roots = bb.roots();
        std::sort(roots.begin(), roots.end(), [&](VarId a, VarId b) {
            return std::pair(pl.pu_of[a.index], pl.pos_of[a.index]) <
                   std::pair(pl.pu_of[b.index], pl.pos_of[b.index]);
        });
        for (VarId r : roots) {
            program.moves.push_back({MoveKind::Data, r, pu_count, Side::L});
        }
    }
    return program;
}

bool fifo_consistent(const BasicBlock& bb, const Schedule& s, const MoveProgram& p) {
    const std::uint32_t n = bb.n_vars();
    const auto pu_count = static_cast<std::uint32_t>(s.pus.size());
    if (p.pu_count != pu_count || p.pu_sequences != s.pus) return false;

    std::vector<std::uint32_t> pu_of(n, kUnassigned);
    for (std::uint32_t q = 0; q < pu_count; ++q) {
        for (VarId v : s.pus[q]) {
            if (v.index >= n || pu_of[v.index] != kUnassigned) return false;
            pu_of[v.index] = q;
        }
    }
    for (std::uint32_t i = 0; i < n; ++i) {
        if (pu_of[i] == kUnassigned) return false;
    }

    // Expected entry list per input buffer, in consumer production order.
    struct Expected {
        MoveKind kind;
        VarId src;
    };
    std::vector<std::array<std::vector<Expected>, 2>> want(pu_count);
    for (std::uint32_t q = 0; q < pu_count; ++q) {
        for (VarId v : s.pus[q]) {
            if (bb.is_leaf(v)) {
                want[q][0].push_back({MoveKind::LoadAddress, v});
            } else {
                const Definition& d = *bb.definition(v);
                want[q][0].push_back({MoveKind::Data, d.left});
                want[q][1].push_back({MoveKind::Data, d.right});
            }
        }
    }
    std::vector<std::array<std::size_t, 2>> got(pu_count, {0, 0});
    std::vector<bool> store_seen(n, false);
    std::size_t store_count = 0;

    for (const MoveInstruction& m : p.moves) {
        if (m.src.index >= n) return false;
        if (m.kind == MoveKind::LoadAddress && !bb.is_leaf(m.src)) return false;
        if (m.tgt_pu == pu_count) {
            if (m.kind != MoveKind::Data) return false;
            if (store_seen[m.src.index]) return false;
            store_seen[m.src.index] = true;
            ++store_count;
            continue;
        }
        if (m.tgt_pu > pu_count) return false;
        auto side = static_cast<std::size_t>(m.side);
        auto& cursor = got[m.tgt_pu][side];
        const auto& expected = want[m.tgt_pu][side];
        if (cursor >= expected.size()) return false;
        if (expected[cursor].kind != m.kind || expected[cursor].src != m.src) return false;
        ++cursor;
    }
    for (std::uint32_t q = 0; q < pu_count; ++q) {
        if (got[q][0] != want[q][0].size() || got[q][1] != want[q][1].size()) return false;
    }
    if (store_count != 0) {
        if (store_count != bb.roots().size()) return false;
        for (VarId r : bb.roots()) {
            if (!store_seen[r.index]) return false;
        }
    }
    return true;
}

std::string moves_to_text(const BasicBlock& bb, const MoveProgram& p) {
    std::ostringstream os;
    for (const MoveInstruction& m : p.moves) {
        if (m.tgt_pu == p.pu_count) {
            os << bb.name(m.src) << " -> LSU\n";
        } else if (m.kind == MoveKind::LoadAddress) {
            os << "addr(" << bb.name(m.src) << ") -> PU" << m.tgt_pu << "."
               << to_string(m.side) << "\n";
        } else {
            os << bb.name(m.src) << " -> PU" << m.tgt_pu << "." << to_string(m.side) << "\n";
        }
    }
    return os.str();
}

MoveProgram moves_from_text(const BasicBlock& bb, const Schedule& s, std::string_view text) {
    MoveProgram p;
    p.pu_count = static_cast<std::uint32_t>(s.pus.size());
    p.pu_sequences = s.pus;
    std::size_t start = 0;
    std::uint32_t lineno = 0;
    auto resolve = [&](std::string_view name) {
        auto v = bb.find(name);
        if (!v) {
            fail(ErrorKind::UnknownVariable,
                 "move references unknown variable '" + std::string(name) + "'");
        }
        return *v;
    };
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        std::string_view line = text.substr(
            start, end == std::string_view::npos ? text.size() - start : end - start);
        ++lineno;
        start = end == std::string_view::npos ? text.size() + 1 : end + 1;

        while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r')) {
            line.remove_suffix(1);
        }
        if (line.empty() || line.front() == '%') continue;

        auto arrow = line.find("->");
        if (arrow == std::string_view::npos) {
            fail(ErrorKind::SyntaxError, "move line " + std::to_string(lineno) + ": missing '->'");
        }
        std::string_view lhs = line.substr(0, arrow);
        std::string_view rhs = line.substr(arrow + 2);
        while (!lhs.empty() && lhs.back() == ' ') lhs.remove_suffix(1);
        while (!rhs.empty() && rhs.front() == ' ') rhs.remove_prefix(1);

        MoveInstruction m{};
        if (lhs.substr(0, 5) == "addr(" && !lhs.empty() && lhs.back() == ')') {
            m.kind = MoveKind::LoadAddress;
            m.src = resolve(lhs.substr(5, lhs.size() - 6));
        } else {
            m.kind = MoveKind::Data;
            m.src = resolve(lhs);
        }
        if (rhs == "LSU") {
            m.tgt_pu = p.pu_count;
            m.side = Side::L;
        } else {
            if (rhs.substr(0, 2) != "PU" || rhs.size() < 5) {
                fail(ErrorKind::SyntaxError,
                     "move line " + std::to_string(lineno) + ": bad target '" + std::string(rhs) + "'");
            }
            auto dot = rhs.find('.');
            if (dot == std::string_view::npos || dot + 2 != rhs.size() ||
                (rhs[dot + 1] != 'L' && rhs[dot + 1] != 'R')) {
                fail(ErrorKind::SyntaxError,
                     "move line " + std::to_string(lineno) + ": bad target '" + std::string(rhs) + "'");
            }
            std::uint32_t pu = 0;
            for (char c : rhs.substr(2, dot - 2)) {
                if (c < '0' || c > '9') {
                    fail(ErrorKind::SyntaxError,
                         "move line " + std::to_string(lineno) + ": bad PU index");
                }
                pu = pu * 10 + static_cast<std::uint32_t>(c - '0');
            }
            m.tgt_pu = pu;
            m.side = rhs[dot + 1] == 'L' ? Side::L : Side::R;
        }
        p.moves.push_back(m);
    }
    return p;
}

} // namespace scad

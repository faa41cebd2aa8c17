#include "scadsched/schedule.hpp"

#include <algorithm>

#include "scadsched/error.hpp"

namespace scad {

const char* to_string(ViolationKind kind) {
    switch (kind) {
    case ViolationKind::Partition: return "Partition";
    case ViolationKind::Dependency: return "Dependency";
    case ViolationKind::OperandOrderL: return "OperandOrderL";
    case ViolationKind::OperandOrderR: return "OperandOrderR";
    case ViolationKind::CombinedCycle: return "CombinedCycle";
    }
    return "Unknown";
}

namespace {

constexpr std::uint32_t kUnassigned = 0xffffffffu;

struct Placement {
    std::vector<std::uint32_t> pu_of;
    std::vector<std::uint32_t> pos_of;
};

// Returns nullopt and fills the report if the schedule is not a partition.
std::optional<Placement> index_placement(const BasicBlock& bb, const Schedule& s,
                                         ValidationReport& report) {
    const std::uint32_t n = bb.n_vars();
    Placement pl{std::vector<std::uint32_t>(n, kUnassigned),
                 std::vector<std::uint32_t>(n, kUnassigned)};
    bool ok = true;
    for (std::uint32_t p = 0; p < s.pus.size(); ++p) {
        for (std::uint32_t i = 0; i < s.pus[p].size(); ++i) {
            VarId v = s.pus[p][i];
            if (v.index >= n) {
                fail(ErrorKind::UnknownVariable,
                     "schedule references variable index " + std::to_string(v.index) +
                         " but the block has " + std::to_string(n) + " variables");
            }
            if (pl.pu_of[v.index] != kUnassigned) {
                report.violations.push_back(
                    {ViolationKind::Partition,
                     {v},
                     {static_cast<int>(pl.pu_of[v.index]), static_cast<int>(p)}});
                ok = false;
                continue;
            }
            pl.pu_of[v.index] = p;
            pl.pos_of[v.index] = i;
        }
    }
    for (std::uint32_t i = 0; i < n; ++i) {
        if (pl.pu_of[i] == kUnassigned) {
            report.violations.push_back({ViolationKind::Partition, {VarId{i}}, {}});
            ok = false;
        }
    }
    if (!ok) return std::nullopt;
    return pl;
}

// Extracts one directed cycle from the subgraph left over by Kahn's algorithm.
std::vector<VarId> extract_cycle(const std::vector<std::vector<std::uint32_t>>& out,
                                 const std::vector<bool>& in_cycle_region,
                                 std::uint32_t n) {
    std::uint32_t start = n;
    for (std::uint32_t i = 0; i < n; ++i) {
        if (in_cycle_region[i]) {
            start = i;
            break;
        }
    }
    std::vector<std::uint32_t> path;
    std::vector<std::uint32_t> visited_at(n, kUnassigned);
    std::uint32_t cur = start;
    while (visited_at[cur] == kUnassigned) {
        visited_at[cur] = static_cast<std::uint32_t>(path.size());
        path.push_back(cur);
        for (std::uint32_t next : out[cur]) {
            if (in_cycle_region[next]) {
                cur = next;
                break;
            }
        }
    }
    std::vector<VarId> cycle;
    for (std::uint32_t i = visited_at[cur]; i < path.size(); ++i) {
        cycle.push_back(VarId{path[i]});
    }
    return cycle;
}

} // namespace

ValidationReport validate(const BasicBlock& bb, const Schedule& s) {
    ValidationReport report;
    auto placement = index_placement(bb, s, report);
    if (!placement) {
        report.valid = false;
        return report;
    }
    const auto& pu_of = placement->pu_of;
    const auto& pos_of = placement->pos_of;
    const PrecedenceRelation pred = predecessors(bb);

    for (std::uint32_t p = 0; p < s.pus.size(); ++p) {
        const auto& seq = s.pus[p];
        for (std::uint32_t i = 0; i < seq.size(); ++i) {
            for (std::uint32_t j = i + 1; j < seq.size(); ++j) {
                VarId v1 = seq[i], v2 = seq[j];
                if (pred.precedes(v2, v1)) {
                    report.violations.push_back(
                        {ViolationKind::Dependency, {v1, v2}, {static_cast<int>(p)}});
                }
                const auto& d1 = bb.definition(v1);
                const auto& d2 = bb.definition(v2);
                if (!d1 || !d2) continue;
                auto operand_order = [&](VarId a, VarId b, ViolationKind kind) {
                    // v1 runs before v2 on PU p, so when their operands a and b
                    // share a PU they must be produced in the same order.
                    if (a == b || pu_of[a.index] != pu_of[b.index]) return;
                    if (pos_of[a.index] > pos_of[b.index]) {
                        report.violations.push_back(
                            {kind,
                             {v1, v2, a, b},
                             {static_cast<int>(p), static_cast<int>(pu_of[a.index])}});
                    }
                };
                operand_order(d1->left, d2->left, ViolationKind::OperandOrderL);
                operand_order(d1->right, d2->right, ViolationKind::OperandOrderR);
            }
        }
    }

    // Combined-order acyclicity: dataflow edges plus consecutive-production
    // edges. A cycle means circular waiting on the machine, so no execution.
    const CombinedDag dag = combined_dag(bb, s);
    const std::uint32_t n = dag.n;
    std::vector<std::vector<std::uint32_t>> out(n);
    std::vector<std::uint32_t> indeg(n, 0);
    for (const auto& [a, b] : dag.edges) {
        out[a.index].push_back(b.index);
        ++indeg[b.index];
    }
    std::vector<std::uint32_t> ready;
    for (std::uint32_t i = 0; i < n; ++i) {
        if (indeg[i] == 0) ready.push_back(i);
    }
    std::uint32_t seen = 0;
    while (!ready.empty()) {
        std::uint32_t v = ready.back();
        ready.pop_back();
        ++seen;
        for (std::uint32_t c : out[v]) {
            if (--indeg[c] == 0) ready.push_back(c);
        }
    }
    if (seen != n) {
        std::vector<bool> region(n, false);
        for (std::uint32_t i = 0; i < n; ++i) region[i] = indeg[i] > 0;
        std::vector<VarId> cycle = extract_cycle(out, region, n);
        std::vector<int> pus;
        for (VarId v : cycle) {
            int p = static_cast<int>(pu_of[v.index]);
            if (std::find(pus.begin(), pus.end(), p) == pus.end()) pus.push_back(p);
        }
        report.violations.push_back({ViolationKind::CombinedCycle, std::move(cycle), std::move(pus)});
    }

    report.valid = report.violations.empty();
    return report;
}

CombinedDag combined_dag(const BasicBlock& bb, const Schedule& s) {
    CombinedDag dag;
    dag.n = bb.n_vars();
    dag.edges = initial_edges(bb);
    for (const auto& seq : s.pus) {
        for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
            dag.edges.emplace_back(seq[i], seq[i + 1]);
        }
    }
    std::sort(dag.edges.begin(), dag.edges.end());
    dag.edges.erase(std::unique(dag.edges.begin(), dag.edges.end()), dag.edges.end());
    dag.weights.assign(dag.n, 1);
    return dag;
}

std::optional<std::uint32_t> cost(const CombinedDag& dag) {
    const std::uint32_t n = dag.n;
    std::vector<std::vector<std::uint32_t>> out(n);
    std::vector<std::uint32_t> indeg(n, 0);
    for (const auto& [a, b] : dag.edges) {
        out[a.index].push_back(b.index);
        ++indeg[b.index];
    }
    std::vector<std::uint32_t> ready;
    std::vector<std::uint32_t> longest(n, 0);
    for (std::uint32_t i = 0; i < n; ++i) {
        if (indeg[i] == 0) {
            ready.push_back(i);
            longest[i] = dag.weights[i];
        }
    }
    std::uint32_t seen = 0;
    std::uint32_t best = 0;
    while (!ready.empty()) {
        std::uint32_t v = ready.back();
        ready.pop_back();
        ++seen;
        best = std::max(best, longest[v]);
        for (std::uint32_t c : out[v]) {
            longest[c] = std::max(longest[c], longest[v] + dag.weights[c]);
            if (--indeg[c] == 0) ready.push_back(c);
        }
    }
    if (seen != n) return std::nullopt;
    return best;
}

Schedule canonical_form(const BasicBlock& bb, const Schedule& s) {
    Schedule out = s;
    auto min_name = [&](const std::vector<VarId>& seq) -> const std::string* {
        const std::string* best = nullptr;
        for (VarId v : seq) {
            if (!best || numeric_name_less(bb.name(v), *best)) best = &bb.name(v);
        }
        return best;
    };
    std::stable_sort(out.pus.begin(), out.pus.end(),
                     [&](const std::vector<VarId>& a, const std::vector<VarId>& b) {
                         const std::string* na = min_name(a);
                         const std::string* nb = min_name(b);
                         if (!na || !nb) return nb == nullptr && na != nullptr;
                         return numeric_name_less(*na, *nb);
                     });
    return out;
}

bool is_canonical(const BasicBlock& bb, const Schedule& s) {
    return s == canonical_form(bb, s);
}

} // namespace scad

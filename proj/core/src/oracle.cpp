#include "scadsched/oracle.hpp"

#include <algorithm>

#include "scadsched/codegen.hpp"
#include "scadsched/error.hpp"
#include "scadsched/machine.hpp"

namespace scad {

namespace {

// Transitive closure by Floyd-Warshall over the direct operand edges.
std::vector<std::vector<bool>> closure(const BasicBlock& bb) {
    const std::uint32_t n = bb.n_vars();
    std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
    for (std::uint32_t v = 0; v < n; ++v) {
        if (const auto& d = bb.definition(VarId{v})) {
            r[d->left.index][v] = true;
            r[d->right.index][v] = true;
        }
    }
    for (std::uint32_t m = 0; m < n; ++m) {
        for (std::uint32_t i = 0; i < n; ++i) {
            if (!r[i][m]) continue;
            for (std::uint32_t j = 0; j < n; ++j) {
                if (r[m][j]) r[i][j] = true;
            }
        }
    }
    return r;
}

bool ordering_valid(const BasicBlock& bb, const std::vector<std::vector<VarId>>& seqs,
                    const std::vector<std::vector<bool>>& pred) {
    const std::uint32_t n = bb.n_vars();
    std::vector<std::uint32_t> pu_of(n), pos_of(n);
    for (std::uint32_t p = 0; p < seqs.size(); ++p) {
        for (std::uint32_t i = 0; i < seqs[p].size(); ++i) {
            pu_of[seqs[p][i].index] = p;
            pos_of[seqs[p][i].index] = i;
        }
    }
    for (const auto& seq : seqs) {
        for (std::uint32_t i = 0; i < seq.size(); ++i) {
            for (std::uint32_t j = i + 1; j < seq.size(); ++j) {
                if (pred[seq[j].index][seq[i].index]) return false;
                const auto& d1 = bb.definition(seq[i]);
                const auto& d2 = bb.definition(seq[j]);
                if (!d1 || !d2) continue;
                VarId la = d1->left, lb = d2->left;
                if (la != lb && pu_of[la.index] == pu_of[lb.index] &&
                    pos_of[la.index] > pos_of[lb.index]) {
                    return false;
                }
                VarId ra = d1->right, rb = d2->right;
                if (ra != rb && pu_of[ra.index] == pu_of[rb.index] &&
                    pos_of[ra.index] > pos_of[rb.index]) {
                    return false;
                }
            }
        }
    }
    return true;
}

} // namespace

std::vector<Schedule> brute_force_schedules(const BasicBlock& bb, std::uint32_t k) {
    const std::uint32_t n = bb.n_vars();
    if (n > 9 || k > 4) {
        fail(ErrorKind::TooLarge,
             "brute force is guarded to n_vars <= 9 and k <= 4 (got n=" +
                 std::to_string(n) + ", k=" + std::to_string(k) + ")");
    }
    if (k == 0 || k > n) return {};
    const auto pred = closure(bb);
    std::vector<Schedule> found;

    std::uint64_t total = 1;
    for (std::uint32_t i = 0; i < n; ++i) total *= k;
    std::vector<std::uint32_t> assign(n);
    for (std::uint64_t code = 0; code < total; ++code) {
        std::uint64_t c = code;
        for (std::uint32_t i = 0; i < n; ++i) {
            assign[i] = static_cast<std::uint32_t>(c % k);
            c /= k;
        }
        std::vector<std::vector<VarId>> groups(k);
        for (std::uint32_t i = 0; i < n; ++i) groups[assign[i]].push_back(VarId{i});
        bool surjective = true;
        for (const auto& g : groups) {
            if (g.empty()) surjective = false;
        }
        if (!surjective) continue;

        // Odometer over all per-PU permutations (groups start sorted).
        std::vector<std::vector<VarId>> perms = groups;
        auto emit_all = [&](auto&& self, std::uint32_t p) -> void {
            if (p == k) {
                if (ordering_valid(bb, perms, pred)) {
                    found.push_back(Schedule{perms});
                }
                return;
            }
            std::sort(perms[p].begin(), perms[p].end());
            do {
                self(self, p + 1);
            } while (std::next_permutation(perms[p].begin(), perms[p].end()));
        };
        emit_all(emit_all, 0);
    }
    return found;
}

bool executable_check(const BasicBlock& bb, const Schedule& s) {
    try {
        MoveProgram program = move_program(bb, s, {});
        if (!fifo_consistent(bb, s, program)) return false;
        MachineConfig cfg;
        cfg.pu_count = static_cast<std::uint32_t>(s.pus.size());
        SimResult result = simulate(bb, program, cfg);
        if (result.status != SimStatus::Completed) return false;
        const auto expected = reference_eval(bb);
        for (VarId root : bb.roots()) {
            auto it = result.outputs.find(root.index);
            if (it == result.outputs.end()) return false;
            auto jt = expected.find(root.index);
            if (jt == expected.end() || !terms_equal(it->second, jt->second)) return false;
        }
        return true;
    } catch (const Error&) {
        return false;
    }
}

} // namespace scad

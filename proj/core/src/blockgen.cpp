#include "scadsched/blockgen.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "scadsched/error.hpp"

namespace scad {

namespace {

/// SplitMix64 (Steele/Lea/Flood). Fixed here, independent of the standard
/// library, so generated corpora are reproducible across platforms:
///   state += 0x9E3779B97F4A7C15
///   z = state; z = (z ^ z>>30) * 0xBF58476D1CE4E5B9
///   z = (z ^ z>>27) * 0x94D049BB133111EB
///   return z ^ z>>31
struct SplitMix64 {
    std::uint64_t state;

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform-enough draw from [0, m); the modulo bias is irrelevant for
    /// test-corpus generation and keeps the algorithm trivially portable.
    std::uint64_t below(std::uint64_t m) { return next() % m; }
};

} // namespace

BasicBlock random_block(const GenParams& params) {
    const std::uint32_t n = params.n;
    const std::uint32_t levels = params.levels;
    if (n == 0 || levels == 0 || levels > n) {
        fail(ErrorKind::InfeasibleParams,
             "need 1 <= levels <= n, got n=" + std::to_string(n) +
                 " levels=" + std::to_string(levels));
    }

    // A block is serialized as operand/3 facts only, so a leaf nobody reads
    // would silently disappear on a write/re-parse cycle. After the free draw
    // we therefore patch operand slots until every leaf has a consumer; in the
    // rare case where the drawn level sizes leave too few slots, we redraw the
    // whole block from a derived seed. Attempt 0 reproduces the unpatched
    // draw bit-for-bit, so already-covered blocks are unchanged.
    for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
        SplitMix64 rng{params.seed + 0x9E3779B97F4A7C15ull * attempt};

        // Composition of n into `levels` positive parts: pick levels-1
        // distinct cut points from {1..n-1} by a partial Fisher-Yates shuffle.
        std::vector<std::uint32_t> cuts(n == 1 ? 0 : n - 1);
        std::iota(cuts.begin(), cuts.end(), 1u);
        for (std::uint32_t i = 0; i + 1 < levels; ++i) {
            std::uint32_t j =
                i + static_cast<std::uint32_t>(rng.below(cuts.size() - i));
            std::swap(cuts[i], cuts[j]);
        }
        std::vector<std::uint32_t> bounds(cuts.begin(), cuts.begin() + (levels - 1));
        std::sort(bounds.begin(), bounds.end());
        bounds.push_back(n);

        std::vector<std::string> names;
        std::vector<std::optional<Definition>> defs;
        std::vector<VarId> def_order;
        names.reserve(n);
        defs.reserve(n);

        std::uint32_t prev_level_start = 0;
        std::uint32_t level_start = 0;
        for (std::uint32_t level = 0; level < levels; ++level) {
            const std::uint32_t level_end = bounds[level];
            for (std::uint32_t i = level_start; i < level_end; ++i) {
                names.push_back("x" + std::to_string(i));
                if (level == 0) {
                    defs.emplace_back(std::nullopt);
                    continue;
                }
                // Left operand from the level directly below (pins this node's
                // depth at level+1); right operand from anywhere strictly
                // below.
                std::uint32_t left =
                    prev_level_start +
                    static_cast<std::uint32_t>(rng.below(level_start - prev_level_start));
                std::uint32_t right = static_cast<std::uint32_t>(rng.below(level_start));
                defs.emplace_back(Definition{VarId{left}, VarId{right}});
                def_order.push_back(VarId{i});
            }
            prev_level_start = level_start;
            level_start = level_end;
        }

        // levels == 1 means no operations at all; there is nothing to patch
        // (and no fact serialization for such a block either way).
        if (levels == 1) {
            return BasicBlock::from_definitions(std::move(names), std::move(defs),
                                                std::move(def_order));
        }

        std::vector<std::uint32_t> uses(n, 0);
        for (const auto& def : defs) {
            if (!def) continue;
            ++uses[def->left.index];
            ++uses[def->right.index];
        }

        const std::uint32_t leaf_end = bounds[0];
        const std::uint32_t first_level_end = bounds[1];
        bool covered = true;
        for (std::uint32_t u = 0; u < leaf_end && covered; ++u) {
            if (uses[u] != 0) continue;
            // Candidate slots: any right operand, or the left operand of a
            // depth-2 node (its left must stay on level 0, which is where u
            // lives). Only slots whose current target keeps >= 1 other use are
            // taken, so patching never un-covers a previously covered leaf.
            std::vector<std::pair<std::uint32_t, bool>> slots; // (op, is_left)
            for (std::uint32_t w = leaf_end; w < n; ++w) {
                const Definition& def = *defs[w];
                if (uses[def.right.index] >= 2) slots.emplace_back(w, false);
                if (w < first_level_end && uses[def.left.index] >= 2)
                    slots.emplace_back(w, true);
            }
            if (slots.empty()) {
                covered = false;
                break;
            }
            const auto [w, is_left] = slots[rng.below(slots.size())];
            VarId& slot = is_left ? defs[w]->left : defs[w]->right;
            --uses[slot.index];
            slot = VarId{u};
            ++uses[u];
        }
        if (!covered) continue;

        return BasicBlock::from_definitions(std::move(names), std::move(defs),
                                            std::move(def_order));
    }

    fail(ErrorKind::InfeasibleParams,
         "could not draw a block with every leaf consumed for n=" +
         std::to_string(n) + " levels=" + std::to_string(levels));
}

} // namespace scad

#include "scadsched/solver.hpp"

#include <algorithm>
#include <numeric>

#include "scadsched/error.hpp"

namespace scad {

const char* to_string(ObjectiveKind kind) {
    switch (kind) {
    case ObjectiveKind::MinPUs: return "min-pus";
    case ObjectiveKind::MinTimeGivenPUs: return "min-time";
    case ObjectiveKind::LexPUsThenTime: return "lex-pu-time";
    case ObjectiveKind::LexTimeThenPUs: return "lex-time-pu";
    }
    return "unknown";
}

namespace {

constexpr std::uint32_t kNone = 0xffffffffu;
constexpr std::uint32_t kInfCost = 0xffffffffu;

std::uint64_t factorial(std::uint32_t k) {
    std::uint64_t f = 1;
    for (std::uint32_t i = 2; i <= k; ++i) f *= i;
    return f;
}

/// Depth-first placement of variables in a fixed topological order. Each
/// variable is inserted at every legal position of every open PU (legal
/// positions form a contiguous interval: same-PU predecessors push the lower
/// end up, operand-order conflicts with already-placed variables tighten both
/// ends). A new PU may only be opened as "the next one", which visits exactly
/// one representative per PU-renaming class; labeled results are recovered by
/// expanding permutations.
class PlacementSearch {
public:
    explicit PlacementSearch(const BasicBlock& bb)
        : bb_(bb), n_(bb.n_vars()), pred_(predecessors(bb)) {
        defined_.resize(n_);
        left_.assign(n_, kNone);
        right_.assign(n_, kNone);
        init_out_.resize(n_);
        init_indeg_.assign(n_, 0);
        for (std::uint32_t i = 0; i < n_; ++i) {
            if (const auto& d = bb.definition(VarId{i})) {
                defined_[i] = true;
                left_[i] = d->left.index;
                right_[i] = d->right.index;
                init_out_[d->left.index].push_back(i);
                ++init_indeg_[i];
                if (d->right != d->left) {
                    init_out_[d->right.index].push_back(i);
                    ++init_indeg_[i];
                }
            }
        }
        // Placement order: by dataflow level, then index. Topological, so a
        // variable's operands are always placed before it.
        std::vector<std::uint32_t> level(n_, 0);
        std::vector<std::uint32_t> indeg = init_indeg_;
        std::vector<std::uint32_t> queue;
        for (std::uint32_t i = 0; i < n_; ++i) {
            if (indeg[i] == 0) queue.push_back(i);
        }
        // init_out_ holds one entry per distinct operand, matching init_indeg_,
        // so every adjacency visit decrements exactly one.
        for (std::size_t head = 0; head < queue.size(); ++head) {
            std::uint32_t v = queue[head];
            for (std::uint32_t c : init_out_[v]) {
                level[c] = std::max(level[c], level[v] + 1);
                if (--indeg[c] == 0) queue.push_back(c);
            }
        }
        order_.resize(n_);
        std::iota(order_.begin(), order_.end(), 0u);
        std::stable_sort(order_.begin(), order_.end(),
                         [&](std::uint32_t a, std::uint32_t b) { return level[a] < level[b]; });

        pu_of_.assign(n_, kNone);
        pos_of_.assign(n_, kNone);
        next_in_seq_.assign(n_, kNone);
        lb_indeg_.assign(n_, 0);
        lb_queue_.reserve(n_);
    }

    struct Params {
        std::uint32_t k = 1;
        bool require_acyclic = false;
        bool stop_at_first = false;
        /// invoked per representative; return false to abort the search
        std::function<bool(const std::vector<std::vector<std::uint32_t>>&)> on_complete;
    };

    /// Runs the search; returns the number of representatives completed.
    std::uint64_t run(const Params& params) {
        params_ = &params;
        completions_ = 0;
        aborted_ = false;
        seq_.assign(params.k, {});
        for (auto& s : seq_) s.reserve(n_);
        opened_ = 0;
        if (params.k >= 1 && params.k <= n_) place(0);
        seq_.clear();
        params_ = nullptr;
        return completions_;
    }

private:
    // Kahn pass over dataflow edges plus the current order edges (each placed
    // variable has at most one sequence successor).
    bool combined_acyclic() {
        std::copy(init_indeg_.begin(), init_indeg_.end(), lb_indeg_.begin());
        for (std::uint32_t v = 0; v < n_; ++v) {
            if (next_in_seq_[v] != kNone) ++lb_indeg_[next_in_seq_[v]];
        }
        lb_queue_.clear();
        for (std::uint32_t v = 0; v < n_; ++v) {
            if (lb_indeg_[v] == 0) lb_queue_.push_back(v);
        }
        std::size_t head = 0;
        while (head < lb_queue_.size()) {
            std::uint32_t v = lb_queue_[head++];
            auto relax = [&](std::uint32_t u) {
                if (--lb_indeg_[u] == 0) lb_queue_.push_back(u);
            };
            for (std::uint32_t u : init_out_[v]) relax(u);
            if (next_in_seq_[v] != kNone) relax(next_in_seq_[v]);
        }
        return lb_queue_.size() == n_;
    }

    void complete() {
        ++completions_;
        if (params_->on_complete && !params_->on_complete(seq_)) aborted_ = true;
        if (params_->stop_at_first) aborted_ = true;
    }

    void insert_at(std::uint32_t p, std::uint32_t q, std::uint32_t v) {
        auto& s = seq_[p];
        std::uint32_t before = q > 0 ? s[q - 1] : kNone;
        std::uint32_t after = q < s.size() ? s[q] : kNone;
        s.insert(s.begin() + q, v);
        for (std::uint32_t j = q; j < s.size(); ++j) pos_of_[s[j]] = j;
        pu_of_[v] = p;
        if (before != kNone) next_in_seq_[before] = v;
        next_in_seq_[v] = after;
    }

    void remove_at(std::uint32_t p, std::uint32_t q, std::uint32_t v) {
        auto& s = seq_[p];
        std::uint32_t before = q > 0 ? s[q - 1] : kNone;
        s.erase(s.begin() + q);
        for (std::uint32_t j = q; j < s.size(); ++j) pos_of_[s[j]] = j;
        if (before != kNone) next_in_seq_[before] = q < s.size() ? s[q] : kNone;
        next_in_seq_[v] = kNone;
        pu_of_[v] = kNone;
        pos_of_[v] = kNone;
    }

    void place(std::uint32_t d) {
        if (aborted_) return;
        if (d == n_) {
            complete();
            return;
        }
        const std::uint32_t v = order_[d];
        const std::uint32_t remaining = n_ - d;
        const std::uint32_t k = params_->k;
        const bool vdef = defined_[v];
        const std::uint32_t vl = left_[v], vr = right_[v];

        const std::uint32_t open_limit = std::min(opened_ + 1, k);
        for (std::uint32_t p = 0; p < open_limit; ++p) {
            const bool opens_new = p == opened_;
            // Enough variables must remain to populate the still-closed PUs.
            const std::uint32_t closed_after = k - opened_ - (opens_new ? 1 : 0);
            if (remaining - 1 < closed_after) {
                if (opens_new) break;
                continue;
            }
            const auto& s = seq_[p];
            std::uint32_t lo = 0;
            std::uint32_t hi = static_cast<std::uint32_t>(s.size());
            for (std::uint32_t i = 0; i < s.size() && lo <= hi; ++i) {
                const std::uint32_t w = s[i];
                if (pred_.precedes(VarId{w}, VarId{v})) {
                    lo = std::max(lo, i + 1);
                }
                if (vdef && defined_[w]) {
                    const std::uint32_t wl = left_[w], wr = right_[w];
                    bool before_ok = true, after_ok = true;
                    if (vl != wl && pu_of_[vl] == pu_of_[wl]) {
                        if (pos_of_[vl] > pos_of_[wl]) before_ok = false;
                        else after_ok = false;
                    }
                    if (vr != wr && pu_of_[vr] == pu_of_[wr]) {
                        if (pos_of_[vr] > pos_of_[wr]) before_ok = false;
                        else after_ok = false;
                    }
                    if (!before_ok && !after_ok) {
                        lo = 1;
                        hi = 0;
                        break;
                    }
                    if (!before_ok) lo = std::max(lo, i + 1);
                    if (!after_ok) hi = std::min(hi, i);
                }
            }
            if (lo > hi) continue;
            for (std::uint32_t q = lo; q <= hi && !aborted_; ++q) {
                if (opens_new) ++opened_;
                insert_at(p, q, v);
                const bool viable = !params_->require_acyclic || combined_acyclic();
                if (viable) place(d + 1);
                remove_at(p, q, v);
                if (opens_new) --opened_;
            }
        }
    }

    const BasicBlock& bb_;
    const std::uint32_t n_;
    PrecedenceRelation pred_;
    std::vector<bool> defined_;
    std::vector<std::uint32_t> left_, right_;
    std::vector<std::vector<std::uint32_t>> init_out_;
    std::vector<std::uint32_t> init_indeg_;
    std::vector<std::uint32_t> order_;

    const Params* params_ = nullptr;
    std::vector<std::vector<std::uint32_t>> seq_;
    std::vector<std::uint32_t> pu_of_, pos_of_, next_in_seq_;
    std::uint32_t opened_ = 0;
    std::uint64_t completions_ = 0;
    bool aborted_ = false;

    std::vector<std::uint32_t> lb_indeg_, lb_queue_;
};

/// Builds schedules with an acyclic combined graph by appending variables one
/// at a time, each append going to the end of some PU sequence and requiring
/// the variable's operands to be already appended. The resulting global append
/// order is then a topological order of the final combined graph, so
/// acyclicity and same-PU dependency order hold by construction, operand-order
/// checks reduce to comparing fixed positions, and every variable's combined
/// longest-path value is final the moment it is appended (its sequence
/// predecessor and operands never change afterwards) — no per-node graph
/// traversal is needed.
///
/// Each such schedule admits many append runs (one per topological order of
/// its combined graph); exactly one is generated: the greedy run that always
/// appends to the lowest-indexed PU whose next variable is appendable. The
/// rule is enforced retroactively in O(k): when v is appended to PU p at step
/// t, v became appendable at step t0 = 1 + max(steps of its operands and of
/// its sequence predecessor), and no PU above p may have received an append in
/// [t0, t) — otherwise the greedy run would have appended v first. Runs
/// therefore biject with labeled schedules; completion counts are labeled and
/// divisible by k! because all k PUs are nonempty.
///
/// This engine only reaches schedules whose combined graph is acyclic, i.e.
/// the finite-cost ones, so it serves every cost-aware query; ordering-only
/// queries (which include cyclic schedules) use PlacementSearch above.
class AppendSearch {
public:
    explicit AppendSearch(const BasicBlock& bb) : n_(bb.n_vars()) {
        defined_.assign(n_, 0);
        left_.assign(n_, kNone);
        right_.assign(n_, kNone);
        pending0_.assign(n_, 0);
        std::vector<std::uint32_t> fanout(n_, 0);
        for (std::uint32_t i = 0; i < n_; ++i) {
            if (const auto& d = bb.definition(VarId{i})) {
                defined_[i] = 1;
                left_[i] = d->left.index;
                right_[i] = d->right.index;
                ++fanout[d->left.index];
                ++pending0_[i];
                if (d->right != d->left) {
                    ++fanout[d->right.index];
                    ++pending0_[i];
                }
            }
        }
        // Consumer adjacency, one entry per distinct operand, in CSR form.
        cons_start_.assign(n_ + 1, 0);
        for (std::uint32_t i = 0; i < n_; ++i) cons_start_[i + 1] = cons_start_[i] + fanout[i];
        cons_.resize(cons_start_[n_]);
        std::vector<std::uint32_t> fill(cons_start_.begin(), cons_start_.end() - 1);
        for (std::uint32_t i = 0; i < n_; ++i) {
            if (!defined_[i]) continue;
            cons_[fill[left_[i]]++] = i;
            if (right_[i] != left_[i]) cons_[fill[right_[i]]++] = i;
        }
        // Static downward height in the dataflow DAG (v itself counts as 1):
        // any schedule reaching v at combined path length d finishes no
        // earlier than d + height - 1, because the longest operand chain below
        // v gains at least one round per link on any PU. Together with the
        // per-variable lower bounds low_ below this gives an admissible
        // completion bound for cost-capped pruning.
        height_.assign(n_, 1);
        low0_.assign(n_, 1);
        {
            std::vector<std::uint32_t> indeg = pending0_;
            std::vector<std::uint32_t> topo;
            topo.reserve(n_);
            for (std::uint32_t i = 0; i < n_; ++i) {
                if (indeg[i] == 0) topo.push_back(i);
            }
            for (std::size_t head = 0; head < topo.size(); ++head) {
                const std::uint32_t v = topo[head];
                for (std::uint32_t c = cons_start_[v]; c < cons_start_[v + 1]; ++c) {
                    low0_[cons_[c]] = std::max(low0_[cons_[c]], low0_[v] + 1);
                    if (--indeg[cons_[c]] == 0) topo.push_back(cons_[c]);
                }
            }
            for (std::size_t i = topo.size(); i-- > 0;) {
                const std::uint32_t v = topo[i];
                for (std::uint32_t c = cons_start_[v]; c < cons_start_[v + 1]; ++c) {
                    height_[v] = std::max(height_[v], height_[cons_[c]] + 1);
                }
            }
        }
        max_height_ = 0;
        for (std::uint32_t i = 0; i < n_; ++i) max_height_ = std::max(max_height_, height_[i]);
        pu_of_.assign(n_, kNone);
        pos_of_.assign(n_, 0);
        step_of_.assign(n_, 0);
        dist_of_.assign(n_, 0);
    }

    struct Params {
        std::uint32_t k = 1;
        /// completions must cost <= cap (kInfCost = unbounded)
        std::uint32_t cost_cap = kInfCost;
        bool stop_at_first = false;
        /// invoked per labeled schedule; return false to abort the search
        std::function<bool(const std::vector<std::vector<std::uint32_t>>&)> on_complete;
    };

    /// Runs the search; returns the number of labeled completions.
    std::uint64_t run(const Params& params) {
        params_ = &params;
        completions_ = 0;
        nodes_ = 0;
        aborted_ = false;
        const std::uint32_t k = params.k;
        const bool capped = params.cost_cap != kInfCost;
        if (k >= 1 && k <= n_ && !(capped && params.cost_cap < max_height_)) {
            seq_.assign(k, {});
            for (auto& s : seq_) s.reserve(n_);
            tail_step_.assign(k, 0);
            maxpos_l_.assign(std::size_t{k} * k, 0);
            maxpos_r_.assign(std::size_t{k} * k, 0);
            low_ = low0_;
            undo_low_.clear();
            if (capped) {
                // The per-level Hall bound pays an O(cap) scan per candidate.
                // It only prunes meaningfully while the cap presses against
                // the dataflow heights; with plenty of headroom the scalar
                // slot-count bound below catches everything the scan would.
                use_hall_ = params.cost_cap < 2 * max_height_;
                sum_tail_ = 0;
                total_slots_ = static_cast<std::uint64_t>(k) * params.cost_cap;
                if (use_hall_) {
                    // Level histograms for the packing bound: latest
                    // admissible combined path length per unplaced variable,
                    // and tail path lengths per PU (an empty PU counts as
                    // length 0).
                    cnt_buf_.assign(params.cost_cap + 1, 0);
                    for (std::uint32_t i = 0; i < n_; ++i) {
                        ++cnt_buf_[params.cost_cap - height_[i] + 1];
                    }
                    tcnt_.assign(params.cost_cap + 1, 0);
                    tcnt_[0] = k;
                }
            }
            pending_ = pending0_;
            ready_.clear();
            ready_pos_.assign(n_, 0);
            for (std::uint32_t i = 0; i < n_; ++i) {
                if (pending_[i] == 0) {
                    ready_pos_[i] = static_cast<std::uint32_t>(ready_.size());
                    ready_.push_back(i);
                }
            }
            opened_ = 0;
            extend(0);
            seq_.clear();
        }
        params_ = nullptr;
        return completions_;
    }

    /// Appends performed by the last run (search-effort diagnostic).
    std::uint64_t nodes() const { return nodes_; }

private:
    void rollback_low(std::size_t mark) {
        while (undo_low_.size() > mark) {
            low_[undo_low_.back().first] = undo_low_.back().second;
            undo_low_.pop_back();
        }
    }

    // Appending v at combined path length d lengthens the guaranteed path to
    // every dataflow descendant. Relaxes low_ accordingly and fails (with
    // low_ restored to `mark`) as soon as some descendant can no longer fit
    // under the cap, which prunes stuck partial states the moment they would
    // arise instead of when the doomed variable is eventually tried.
    bool relax_and_check(std::uint32_t v, std::uint32_t d, std::uint32_t cap,
                         std::size_t mark) {
        prop_.clear();
        for (std::uint32_t c = cons_start_[v]; c < cons_start_[v + 1]; ++c) {
            const std::uint32_t u = cons_[c];
            if (d + 1 > low_[u]) prop_.push_back({u, d + 1});
        }
        while (!prop_.empty()) {
            const auto [u, val] = prop_.back();
            prop_.pop_back();
            if (val <= low_[u]) continue;  // superseded by a larger relaxation
            if (val + height_[u] - 1 > cap) {
                rollback_low(mark);
                return false;
            }
            undo_low_.push_back({u, low_[u]});
            low_[u] = val;
            for (std::uint32_t c = cons_start_[u]; c < cons_start_[u + 1]; ++c) {
                const std::uint32_t w = cons_[c];
                if (val + 1 > low_[w]) prop_.push_back({w, val + 1});
            }
        }
        return true;
    }

    void complete() {
        ++completions_;
        if (params_->on_complete && !params_->on_complete(seq_)) aborted_ = true;
        if (params_->stop_at_first) aborted_ = true;
    }

    void extend(std::uint32_t placed) {
        if (placed == n_) {
            complete();
            return;
        }
        const std::uint32_t k = params_->k;
        const std::uint32_t cap = params_->cost_cap;
        const std::uint32_t step = placed + 1;  // 1-based; 0 means "never"
        // The ready list holds exactly the unplaced appendable variables;
        // deeper frames mutate it but restore it before returning, so the
        // slice scanned here is stable at every iteration boundary.
        const std::size_t ready_end = ready_.size();
        for (std::size_t i = 0; i < ready_end; ++i) {
            const std::uint32_t v = ready_[i];
            const std::uint32_t vl = left_[v], vr = right_[v];
            const bool vdef = defined_[v] != 0;
            std::uint32_t op_step = 0, op_dist = 0;
            if (vdef) {
                op_step = std::max(step_of_[vl], step_of_[vr]);
                op_dist = std::max(dist_of_[vl], dist_of_[vr]);
            }
            for (std::uint32_t p = 0; p < k; ++p) {
                auto& s = seq_[p];
                const bool opens_new = s.empty();
                // Enough variables must remain to populate the empty PUs.
                const std::uint32_t closed_after = k - opened_ - (opens_new ? 1 : 0);
                if (n_ - placed - 1 < closed_after) continue;
                // Greedy-run canonicity: no PU above p may have been appended
                // to since v became appendable on p.
                const std::uint32_t t0 = std::max(op_step, tail_step_[p]) + 1;
                bool canonical_run = true;
                for (std::uint32_t r = p + 1; r < k; ++r) {
                    if (tail_step_[r] >= t0) {
                        canonical_run = false;
                        break;
                    }
                }
                if (!canonical_run) continue;
                // Operand-order preservation against earlier consumers on p:
                // per (consumer PU, operand PU, side), operand positions must
                // be non-decreasing, so only the running maximum matters.
                std::uint32_t* slot_l = nullptr;
                std::uint32_t* slot_r = nullptr;
                std::uint32_t old_l = 0, old_r = 0;
                if (vdef) {
                    slot_l = &maxpos_l_[std::size_t{p} * k + pu_of_[vl]];
                    slot_r = &maxpos_r_[std::size_t{p} * k + pu_of_[vr]];
                    if (pos_of_[vl] + 1 < *slot_l || pos_of_[vr] + 1 < *slot_r) continue;
                }
                const std::uint32_t tail = opens_new ? kNone : s.back();
                const std::uint32_t told = opens_new ? 0 : dist_of_[tail];
                const std::uint32_t d = 1 + std::max(op_dist, told);
                const std::size_t low_mark = undo_low_.size();
                if (cap != kInfCost) {
                    if (d + height_[v] - 1 > cap) continue;
                    if (use_hall_) {
                        // Level packing: a variable with downward height h
                        // must sit at combined path length <= cap - h + 1,
                        // and a PU whose tail sits at length t offers one
                        // slot at each of the lengths t+1 .. cap. For every
                        // level B the unplaced variables bound to levels <= B
                        // must fit in the slots below B (a Hall condition on
                        // prefix intervals).
                        const std::uint32_t bufv = cap - height_[v] + 1;
                        bool fits = true;
                        for (std::uint32_t b = 1, need = 0, open = 0, slots = 0; b <= cap; ++b) {
                            open += tcnt_[b - 1];
                            if (b - 1 == told) --open;  // p's tail moves from told
                            if (b - 1 == d) ++open;     // ... to d for this append
                            slots += open;
                            need += cnt_buf_[b];
                            if (b == bufv) --need;  // v itself is being placed
                            if (need > slots) {
                                fits = false;
                                break;
                            }
                        }
                        if (!fits) continue;
                    } else if (sum_tail_ - told + d + (n_ - placed - 1) > total_slots_) {
                        // Scalar slot count: every unplaced variable consumes
                        // at least one of the sum over PUs of (cap - tail)
                        // remaining slots.
                        continue;
                    }
                    if (!relax_and_check(v, d, cap, low_mark)) continue;
                }

                // apply
                ++nodes_;
                pu_of_[v] = p;
                pos_of_[v] = static_cast<std::uint32_t>(s.size());
                step_of_[v] = step;
                dist_of_[v] = d;
                s.push_back(v);
                if (cap != kInfCost) {
                    sum_tail_ += d - told;
                    if (use_hall_) {
                        --tcnt_[told];
                        ++tcnt_[d];
                        --cnt_buf_[cap - height_[v] + 1];
                    }
                }
                const std::uint32_t old_tail_step = tail_step_[p];
                tail_step_[p] = step;
                if (opens_new) ++opened_;
                if (vdef) {
                    old_l = *slot_l;
                    old_r = *slot_r;
                    *slot_l = std::max(old_l, pos_of_[vl] + 1);
                    *slot_r = std::max(old_r, pos_of_[vr] + 1);
                }
                // Swap-remove v from the ready list so deeper frames scan
                // only live entries; restored exactly on backtrack.
                const std::uint32_t ridx = ready_pos_[v];
                const std::uint32_t moved = ready_.back();
                ready_[ridx] = moved;
                ready_pos_[moved] = ridx;
                ready_.pop_back();
                for (std::uint32_t c = cons_start_[v]; c < cons_start_[v + 1]; ++c) {
                    const std::uint32_t u = cons_[c];
                    if (--pending_[u] == 0) {
                        ready_pos_[u] = static_cast<std::uint32_t>(ready_.size());
                        ready_.push_back(u);
                    }
                }

                extend(placed + 1);

                // undo (reverse order; deeper pushes are already popped)
                for (std::uint32_t c = cons_start_[v + 1]; c-- > cons_start_[v];) {
                    if (pending_[cons_[c]]++ == 0) ready_.pop_back();
                }
                ready_pos_[moved] = static_cast<std::uint32_t>(ready_.size());
                ready_.push_back(moved);
                ready_[ridx] = v;
                ready_pos_[v] = ridx;
                if (vdef) {
                    *slot_l = old_l;
                    *slot_r = old_r;
                }
                if (opens_new) --opened_;
                tail_step_[p] = old_tail_step;
                if (cap != kInfCost) {
                    if (use_hall_) {
                        ++cnt_buf_[cap - height_[v] + 1];
                        --tcnt_[d];
                        ++tcnt_[told];
                    }
                    sum_tail_ -= d - told;
                }
                s.pop_back();
                pu_of_[v] = kNone;
                rollback_low(low_mark);
                if (aborted_) return;
            }
            if (aborted_) return;
        }
    }

    const std::uint32_t n_;
    std::vector<std::uint8_t> defined_;
    std::vector<std::uint32_t> left_, right_;
    std::vector<std::uint32_t> pending0_;
    std::vector<std::uint32_t> cons_start_, cons_;
    std::vector<std::uint32_t> height_, low0_;

    const Params* params_ = nullptr;
    std::vector<std::vector<std::uint32_t>> seq_;
    std::vector<std::uint32_t> pu_of_, pos_of_, step_of_, dist_of_;
    std::vector<std::uint32_t> pending_, ready_, ready_pos_;
    std::vector<std::uint32_t> tail_step_;
    std::vector<std::uint32_t> maxpos_l_, maxpos_r_;
    std::vector<std::uint32_t> low_;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> undo_low_;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> prop_;
    std::vector<std::uint32_t> cnt_buf_, tcnt_;
    std::uint32_t max_height_ = 0;
    bool use_hall_ = false;
    std::uint64_t sum_tail_ = 0;
    std::uint64_t total_slots_ = 0;
    std::uint32_t opened_ = 0;
    std::uint64_t completions_ = 0;
    std::uint64_t nodes_ = 0;
    bool aborted_ = false;
};

Schedule to_schedule(const std::vector<std::vector<std::uint32_t>>& seqs) {
    Schedule s;
    s.pus.reserve(seqs.size());
    for (const auto& q : seqs) {
        std::vector<VarId> pu;
        pu.reserve(q.size());
        for (std::uint32_t v : q) pu.push_back(VarId{v});
        s.pus.push_back(std::move(pu));
    }
    return s;
}

std::uint32_t search_ceiling(const BasicBlock& bb, const SolverBounds& bounds) {
    std::uint32_t ceil = bb.n_vars();
    if (bounds.max_pus != 0) ceil = std::min(ceil, bounds.max_pus);
    if (bounds.pu_bound) ceil = std::min(ceil, *bounds.pu_bound);
    return ceil;
}

std::uint32_t cap_of(const SolverBounds& bounds) {
    return bounds.time_bound ? *bounds.time_bound : kInfCost;
}

/// Feasibility under the semantics implied by the cap: unbounded means
/// ordering validity (combined-order cycles admitted), bounded means some
/// schedule of finite cost <= cap must exist.
bool feasible_at(PlacementSearch& ordering, AppendSearch& acyclic, std::uint32_t k,
                 std::uint32_t cost_cap) {
    if (cost_cap == kInfCost) {
        PlacementSearch::Params params;
        params.k = k;
        params.stop_at_first = true;
        return ordering.run(params) > 0;
    }
    AppendSearch::Params params;
    params.k = k;
    params.cost_cap = cost_cap;
    params.stop_at_first = true;
    return acyclic.run(params) > 0;
}

} // namespace

void enumerate_valid(const BasicBlock& bb, const EnumerateOptions& opts,
                     const std::function<bool(const Schedule&)>& emit) {
    PlacementSearch search(bb);
    PlacementSearch::Params params;
    params.k = opts.k;
    params.require_acyclic = opts.executable_only;
    std::vector<std::uint32_t> perm(opts.k);
    params.on_complete = [&](const std::vector<std::vector<std::uint32_t>>& seqs) {
        Schedule rep = to_schedule(seqs);
        if (opts.canonical_only) {
            return emit(canonical_form(bb, rep));
        }
        std::iota(perm.begin(), perm.end(), 0u);
        do {
            Schedule labeled;
            labeled.pus.resize(opts.k);
            for (std::uint32_t p = 0; p < opts.k; ++p) {
                labeled.pus[p] = rep.pus[perm[p]];
            }
            if (!emit(labeled)) return false;
        } while (std::next_permutation(perm.begin(), perm.end()));
        return true;
    };
    search.run(params);
}

CountResult count_valid(const BasicBlock& bb, std::uint32_t k, bool executable_only) {
    CountResult r;
    if (executable_only) {
        AppendSearch search(bb);
        AppendSearch::Params params;
        params.k = k;
        r.total = search.run(params);
        r.canonical = r.total / factorial(k);
    } else {
        PlacementSearch search(bb);
        PlacementSearch::Params params;
        params.k = k;
        r.canonical = search.run(params);
        r.total = r.canonical * factorial(k);
    }
    return r;
}

std::optional<std::uint32_t> min_pus(const BasicBlock& bb, const SolverBounds& bounds) {
    PlacementSearch ordering(bb);
    AppendSearch acyclic(bb);
    const std::uint32_t ceil = search_ceiling(bb, bounds);
    const std::uint32_t cap = cap_of(bounds);
    for (std::uint32_t k = 1; k <= ceil; ++k) {
        if (feasible_at(ordering, acyclic, k, cap)) return k;
    }
    return std::nullopt;
}

namespace {

// Shared final step: counts (and optionally collects) the optimum set at a
// fixed k and cost cap, accumulating into `out` so objectives that union
// several regimes (at-most-k) can sum. Unbounded queries follow ordering
// semantics on the representative search; bounded ones run the acyclic
// append engine, whose completions are already labeled.
void count_and_collect(const BasicBlock& bb, PlacementSearch& ordering, AppendSearch& acyclic,
                       std::uint32_t k, std::uint32_t cost_cap, CollectMode collect,
                       OptResult& out) {
    if (cost_cap == kInfCost) {
        PlacementSearch::Params params;
        params.k = k;
        std::vector<std::uint32_t> perm(k);
        params.on_complete = [&](const std::vector<std::vector<std::uint32_t>>& seqs) {
            if (collect == CollectMode::None) return true;
            Schedule rep = to_schedule(seqs);
            switch (collect) {
            case CollectMode::First:
                if (out.schedules.empty()) out.schedules.push_back(canonical_form(bb, rep));
                break;
            case CollectMode::AllCanonical:
                out.schedules.push_back(canonical_form(bb, rep));
                break;
            case CollectMode::All: {
                std::iota(perm.begin(), perm.end(), 0u);
                do {
                    Schedule labeled;
                    labeled.pus.resize(k);
                    for (std::uint32_t p = 0; p < k; ++p) labeled.pus[p] = rep.pus[perm[p]];
                    out.schedules.push_back(std::move(labeled));
                } while (std::next_permutation(perm.begin(), perm.end()));
                break;
            }
            case CollectMode::None: break;
            }
            return true;
        };
        const std::uint64_t reps = ordering.run(params);
        out.count_canonical += reps;
        out.count_total += reps * factorial(k);
        return;
    }
    AppendSearch::Params params;
    params.k = k;
    params.cost_cap = cost_cap;
    if (collect != CollectMode::None) {
        params.on_complete = [&](const std::vector<std::vector<std::uint32_t>>& seqs) {
            switch (collect) {
            case CollectMode::First:
                if (out.schedules.empty()) {
                    out.schedules.push_back(canonical_form(bb, to_schedule(seqs)));
                }
                break;
            case CollectMode::AllCanonical: {
                Schedule labeled = to_schedule(seqs);
                if (is_canonical(bb, labeled)) out.schedules.push_back(std::move(labeled));
                break;
            }
            case CollectMode::All:
                out.schedules.push_back(to_schedule(seqs));
                break;
            case CollectMode::None: break;
            }
            return true;
        };
    }
    const std::uint64_t labeled = acyclic.run(params);
    out.count_total += labeled;
    out.count_canonical += labeled / factorial(k);
}

// Minimum finite cost among valid schedules on exactly k PUs, at most
// min(cap, warm_start). Iterative deepening from below: the first cap
// admitting a completion is the optimum. Feasible probes stop at the first
// completion; infeasible ones exhaust trees that the static height bound
// keeps far smaller than the one at the optimum, so the total effort is
// dominated by the final probe. The floor is the dataflow depth and the
// pigeonhole bound ceil(n/k): some PU holds >= that many variables, which
// form a combined-graph path through its order edges.
std::optional<std::uint32_t> min_cost_at(const BasicBlock& bb, AppendSearch& search,
                                         std::uint32_t k, std::uint32_t cap,
                                         std::uint32_t warm_start) {
    if (k == 0 || k > bb.n_vars()) return std::nullopt;
    // Any finite cost is at most n (a combined path visits each variable at
    // most once), so the probe range is always finite.
    const std::uint32_t hi = std::min({cap, warm_start, bb.n_vars()});
    const std::uint32_t lo = std::max(depth(bb), (bb.n_vars() + k - 1) / k);
    for (std::uint32_t c = lo; c <= hi; ++c) {
        AppendSearch::Params params;
        params.k = k;
        params.cost_cap = c;
        params.stop_at_first = true;
        if (search.run(params) > 0) return c;
    }
    return std::nullopt;
}

} // namespace

OptResult solve(const BasicBlock& bb, const Objective& obj, CollectMode collect) {
    OptResult out;
    PlacementSearch ordering(bb);
    AppendSearch acyclic(bb);
    const std::uint32_t ceil = search_ceiling(bb, obj.bounds);
    const std::uint32_t cap = cap_of(obj.bounds);

    switch (obj.kind) {
    case ObjectiveKind::MinPUs: {
        for (std::uint32_t k = 1; k <= ceil; ++k) {
            if (feasible_at(ordering, acyclic, k, cap)) {
                out.feasible = true;
                out.best_pus = k;
                count_and_collect(bb, ordering, acyclic, k, cap, collect, out);
                return out;
            }
        }
        return out;
    }
    case ObjectiveKind::MinTimeGivenPUs: {
        const std::uint32_t k = obj.pus;
        if (k == 0) {
            fail(ErrorKind::InvalidObjective, "min-time needs a PU count");
        }
        if (!obj.at_most_pus) {
            if (k > ceil) return out;
            auto c = min_cost_at(bb, acyclic, k, cap, kInfCost);
            if (!c) return out;
            out.feasible = true;
            out.best_pus = k;
            out.best_cost = c;
            count_and_collect(bb, ordering, acyclic, k, *c, collect, out);
            return out;
        }
        // At-most-k: union of the exactly-j regimes for j <= k. Ties matter,
        // so probe each j up to the running best (inclusive), then count
        // every regime attaining it.
        const std::uint32_t jmax = std::min(k, ceil);
        std::uint32_t best = kInfCost;
        std::vector<std::uint32_t> optimal_js;
        for (std::uint32_t j = 1; j <= jmax; ++j) {
            auto c = min_cost_at(bb, acyclic, j, cap, best);
            if (!c) continue;
            if (*c < best) {
                best = *c;
                optimal_js.clear();
            }
            if (*c == best) optimal_js.push_back(j);
        }
        if (best == kInfCost) return out;
        out.feasible = true;
        out.best_pus = optimal_js.front();
        out.best_cost = best;
        for (std::uint32_t j : optimal_js) {
            count_and_collect(bb, ordering, acyclic, j, best, collect, out);
        }
        return out;
    }
    case ObjectiveKind::LexPUsThenTime: {
        for (std::uint32_t k = 1; k <= ceil; ++k) {
            if (!feasible_at(ordering, acyclic, k, cap)) continue;
            // Ordering-feasible k might still admit no finite cost; advance
            // past such k (never observed on real blocks, but well-defined).
            auto c = min_cost_at(bb, acyclic, k, cap, kInfCost);
            if (!c) continue;
            out.feasible = true;
            out.best_pus = k;
            out.best_cost = c;
            count_and_collect(bb, ordering, acyclic, k, *c, collect, out);
            return out;
        }
        return out;
    }
    case ObjectiveKind::LexTimeThenPUs: {
        const std::uint32_t floor_cost = depth(bb);
        std::uint32_t best = kInfCost;
        for (std::uint32_t k = 1; k <= ceil; ++k) {
            auto c = min_cost_at(bb, acyclic, k, cap, best == kInfCost ? kInfCost : best - 1);
            if (c && *c < best) best = *c;
            if (best == floor_cost) break;
        }
        if (best == kInfCost) return out;
        for (std::uint32_t k = 1; k <= ceil; ++k) {
            if (feasible_at(ordering, acyclic, k, best)) {
                out.feasible = true;
                out.best_pus = k;
                out.best_cost = best;
                count_and_collect(bb, ordering, acyclic, k, best, collect, out);
                return out;
            }
        }
        fail(ErrorKind::Internal, "cost optimum vanished during the PU sweep");
    }
    }
    fail(ErrorKind::InvalidObjective, "unknown objective");
}

} // namespace scad

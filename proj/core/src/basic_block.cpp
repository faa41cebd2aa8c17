#include "scadsched/basic_block.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>

#include "scadsched/error.hpp"

namespace scad {

const char* to_string(Side side) {
    return side == Side::L ? "L" : "R";
}

std::optional<VarId> BasicBlock::find(std::string_view name) const {
    for (std::uint32_t i = 0; i < names_.size(); ++i) {
        if (names_[i] == name) return VarId{i};
    }
    return std::nullopt;
}

BasicBlock BasicBlock::from_definitions(
    std::vector<std::string> names,
    std::vector<std::optional<Definition>> defs,
    std::vector<VarId> def_order) {
    BasicBlock bb;
    bb.names_ = std::move(names);
    bb.defs_ = std::move(defs);
    bb.def_order_ = std::move(def_order);

    const auto n = static_cast<std::uint32_t>(bb.names_.size());
    bb.slots_.resize(n);
    std::vector<bool> consumed(n, false);
    for (std::uint32_t i = 0; i < n; ++i) {
        if (!bb.defs_[i]) continue;
        const Definition& d = *bb.defs_[i];
        bb.slots_[d.left.index].push_back({VarId{i}, Side::L});
        bb.slots_[d.right.index].push_back({VarId{i}, Side::R});
        consumed[d.left.index] = true;
        consumed[d.right.index] = true;
    }
    for (auto& s : bb.slots_) std::sort(s.begin(), s.end());
    for (std::uint32_t i = 0; i < n; ++i) {
        if (!bb.defs_[i]) bb.leaves_.push_back(VarId{i});
        if (!consumed[i]) bb.roots_.push_back(VarId{i});
    }
    return bb;
}

namespace {

struct FactParser {
    std::string_view text;
    std::size_t pos = 0;
    std::size_t line = 1;

    void skip_space() {
        while (pos < text.size()) {
            char c = text[pos];
            if (c == '%') {
                while (pos < text.size() && text[pos] != '\n') ++pos;
            } else if (c == '\n') {
                ++line;
                ++pos;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos;
            } else {
                break;
            }
        }
    }

    bool done() {
        skip_space();
        return pos >= text.size();
    }

    [[noreturn]] void error(const std::string& what) {
        fail(ErrorKind::SyntaxError, what + " (line " + std::to_string(line) + ")");
    }

    void expect(char c) {
        skip_space();
        if (pos >= text.size() || text[pos] != c) {
            error(std::string("expected '") + c + "'");
        }
        ++pos;
    }

    std::string_view identifier() {
        skip_space();
        std::size_t start = pos;
        while (pos < text.size()) {
            char c = text[pos];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
                ++pos;
            } else {
                break;
            }
        }
        if (pos == start) error("expected identifier");
        std::string_view id = text.substr(start, pos - start);
        if (std::isdigit(static_cast<unsigned char>(id.front()))) {
            error("identifier may not start with a digit");
        }
        return id;
    }
};

// Detects a cycle in the dataflow relation (operand -> consumer) via Kahn.
bool dataflow_is_acyclic(const std::vector<std::optional<Definition>>& defs) {
    const auto n = static_cast<std::uint32_t>(defs.size());
    std::vector<std::uint32_t> indegree(n, 0);
    for (std::uint32_t i = 0; i < n; ++i) {
        if (defs[i]) indegree[i] = defs[i]->left == defs[i]->right ? 1 : 2;
    }
    std::vector<std::uint32_t> ready;
    for (std::uint32_t i = 0; i < n; ++i) {
        if (indegree[i] == 0) ready.push_back(i);
    }
    std::uint32_t seen = 0;
    while (!ready.empty()) {
        std::uint32_t v = ready.back();
        ready.pop_back();
        ++seen;
        for (std::uint32_t c = 0; c < n; ++c) {
            if (!defs[c]) continue;
            std::uint32_t uses = 0;
            if (defs[c]->left.index == v) ++uses;
            if (defs[c]->right.index == v && defs[c]->left != defs[c]->right) ++uses;
            if (uses > 0 && (indegree[c] -= uses) == 0) ready.push_back(c);
        }
    }
    return seen == n;
}

} // namespace

BasicBlock parse_block(std::string_view text) {
    FactParser p{text};
    std::vector<std::string> names;
    std::vector<std::optional<Definition>> defs;
    std::vector<VarId> def_order;
    std::unordered_map<std::string, std::uint32_t> index_of;

    auto intern = [&](std::string_view id) {
        auto it = index_of.find(std::string(id));
        if (it != index_of.end()) return VarId{it->second};
        auto idx = static_cast<std::uint32_t>(names.size());
        names.emplace_back(id);
        defs.emplace_back(std::nullopt);
        index_of.emplace(std::string(id), idx);
        return VarId{idx};
    };

    while (!p.done()) {
        std::string_view head = p.identifier();
        if (head != "operand") p.error("expected 'operand' fact");
        p.expect('(');
        VarId target = intern(p.identifier());
        p.expect(',');
        VarId left = intern(p.identifier());
        p.expect(',');
        VarId right = intern(p.identifier());
        p.expect(')');
        p.expect('.');
        if (defs[target.index]) {
            fail(ErrorKind::DuplicateDefinition,
                 "variable '" + names[target.index] + "' defined twice");
        }
        defs[target.index] = Definition{left, right};
        def_order.push_back(target);
    }

    if (def_order.empty()) {
        fail(ErrorKind::EmptyProgram, "no operand facts");
    }
    if (!dataflow_is_acyclic(defs)) {
        fail(ErrorKind::CyclicProgram, "operand facts form a dataflow cycle");
    }
    return BasicBlock::from_definitions(std::move(names), std::move(defs), std::move(def_order));
}

PrecedenceRelation::PrecedenceRelation(std::uint32_t n)
    : n_(n), words_((n + 63) / 64), rows_(std::size_t{n} * words_, 0) {}

void PrecedenceRelation::set(VarId a, VarId b) {
    rows_[b.index * words_ + a.index / 64] |= std::uint64_t{1} << (a.index % 64);
}

void PrecedenceRelation::merge_into(VarId a, VarId b) {
    for (std::uint32_t w = 0; w < words_; ++w) {
        rows_[b.index * words_ + w] |= rows_[a.index * words_ + w];
    }
}

PrecedenceRelation predecessors(const BasicBlock& bb) {
    const std::uint32_t n = bb.n_vars();
    PrecedenceRelation rel(n);
    // Variables are processed in topological order so each row is final when
    // merged into its consumers.
    std::vector<std::uint32_t> indegree(n, 0);
    for (std::uint32_t i = 0; i < n; ++i) {
        if (const auto& d = bb.definition(VarId{i})) {
            indegree[i] = d->left == d->right ? 1 : 2;
        }
    }
    std::vector<VarId> ready;
    for (std::uint32_t i = 0; i < n; ++i) {
        if (indegree[i] == 0) ready.push_back(VarId{i});
    }
    std::vector<std::vector<VarId>> consumers(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        if (const auto& d = bb.definition(VarId{i})) {
            consumers[d->left.index].push_back(VarId{i});
            if (d->right != d->left) consumers[d->right.index].push_back(VarId{i});
        }
    }
    while (!ready.empty()) {
        VarId v = ready.back();
        ready.pop_back();
        for (VarId c : consumers[v.index]) {
            rel.set(v, c);
            rel.merge_into(v, c);
            const auto& d = *bb.definition(c);
            std::uint32_t uses = (d.left == v ? 1u : 0u) + (d.right == v && d.left != d.right ? 1u : 0u);
            if ((indegree[c.index] -= uses) == 0) ready.push_back(c);
        }
    }
    return rel;
}

std::vector<std::pair<VarId, VarId>> initial_edges(const BasicBlock& bb) {
    std::vector<std::pair<VarId, VarId>> edges;
    for (std::uint32_t i = 0; i < bb.n_vars(); ++i) {
        if (const auto& d = bb.definition(VarId{i})) {
            edges.emplace_back(d->left, VarId{i});
            if (d->right != d->left) edges.emplace_back(d->right, VarId{i});
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

std::uint32_t depth(const BasicBlock& bb) {
    const std::uint32_t n = bb.n_vars();
    std::vector<std::uint32_t> d(n, 0);
    std::uint32_t best = 0;
    // Indices are first-appearance order, not topological, so Kahn first.
    // Each definition holds exactly two operand slots; consumer_slots lists
    // L and R separately, so one decrement per slot.
    std::vector<VarId> order;
    order.reserve(n);
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
        order.push_back(v);
        for (const ConsumerSlot& s : bb.consumer_slots(v)) {
            if (--indegree[s.consumer.index] == 0) ready.push_back(s.consumer);
        }
    }
    for (VarId v : order) {
        const auto& def = bb.definition(v);
        if (!def) {
            d[v.index] = 1;
        } else {
            d[v.index] = 1 + std::max(d[def->left.index], d[def->right.index]);
        }
        best = std::max(best, d[v.index]);
    }
    return best;
}

bool numeric_name_less(std::string_view a, std::string_view b) {
    auto split = [](std::string_view s) {
        std::size_t cut = s.size();
        while (cut > 0 && std::isdigit(static_cast<unsigned char>(s[cut - 1]))) --cut;
        return std::pair<std::string_view, std::string_view>{s.substr(0, cut), s.substr(cut)};
    };
    auto [pa, na] = split(a);
    auto [pb, nb] = split(b);
    if (pa != pb) return pa < pb;
    if (na.empty() != nb.empty()) return na.empty();
    if (!na.empty()) {
        // compare digit runs numerically: shorter run (after stripping leading
        // zeros) is smaller, equal lengths compare lexicographically
        std::string_view ta = na.substr(std::min(na.find_first_not_of('0'), na.size()));
        std::string_view tb = nb.substr(std::min(nb.find_first_not_of('0'), nb.size()));
        if (ta.size() != tb.size()) return ta.size() < tb.size();
        if (ta != tb) return ta < tb;
        return na < nb; // fewer leading zeros wins ties deterministically
    }
    return false;
}

} // namespace scad

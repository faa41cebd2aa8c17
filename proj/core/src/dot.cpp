#include "scadsched/dot.hpp"

#include <algorithm>
#include <sstream>
#include <vector>

namespace scad {

namespace {

std::string render(const BasicBlock& bb, const Schedule* s) {
    std::vector<int> pu_of(bb.n_vars(), -1);
    if (s) {
        for (std::size_t p = 0; p < s->pus.size(); ++p) {
            for (VarId v : s->pus[p]) {
                if (v.index < bb.n_vars()) pu_of[v.index] = static_cast<int>(p);
            }
        }
    }

    std::ostringstream os;
    os << "digraph block {\n";
    for (std::uint32_t i = 0; i < bb.n_vars(); ++i) {
        os << "  \"" << bb.name(VarId{i}) << "\"";
        if (pu_of[i] >= 0) {
            os << " [label=\"" << bb.name(VarId{i}) << " (PU" << pu_of[i] << ")\"]";
        }
        os << ";\n";
    }

    auto init = initial_edges(bb);
    for (auto [from, to] : init) {
        os << "  \"" << bb.name(from) << "\" -> \"" << bb.name(to) << "\";\n";
    }

    if (s) {
        for (const auto& seq : s->pus) {
            for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
                std::pair<VarId, VarId> e{seq[i], seq[i + 1]};
                if (std::binary_search(init.begin(), init.end(), e)) continue;
                os << "  \"" << bb.name(e.first) << "\" -> \"" << bb.name(e.second)
                   << "\" [style=dashed];\n";
            }
        }
    }
    os << "}\n";
    return os.str();
}

} // namespace

std::string to_dot(const BasicBlock& bb) { return render(bb, nullptr); }

std::string to_dot(const BasicBlock& bb, const Schedule& s) { return render(bb, &s); }

} // namespace scad

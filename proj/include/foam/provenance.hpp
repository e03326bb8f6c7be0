#pragma once

#include <array>
#include <vector>

namespace foam {

// Cell kinds of the triangulation and, dually, of the foam:
// tets are foam vertices, triangle classes foam edges, edge classes foam
// faces and vertex classes the complementary regions.
enum class CellKind { Vertex = 0, Edge = 1, Triangle = 2, Tet = 3 };

// Ancestor/descendant relation across one move (or a composition).
// Cells untouched by the move map identically; cells created inside the
// move's support have no ancestor.  A cell normally has at most one
// ancestor; a 2-0 move can merge two cells, in which case ancestors()
// lists both and ancestor() picks the least.
class Provenance {
public:
    Provenance() = default;
    Provenance(std::array<int, 4> pre_counts, std::array<int, 4> post_counts);

    void link(CellKind k, int pre, int post);

    int ancestor(CellKind k, int post) const {
        const auto& v = anc_[static_cast<int>(k)][post];
        return v.empty() ? -1 : v.front();
    }
    const std::vector<int>& ancestors(CellKind k, int post) const { return anc_[static_cast<int>(k)][post]; }
    const std::vector<int>& descendants(CellKind k, int pre) const { return desc_[static_cast<int>(k)][pre]; }

    int pre_count(CellKind k) const { return static_cast<int>(desc_[static_cast<int>(k)].size()); }
    int post_count(CellKind k) const { return static_cast<int>(anc_[static_cast<int>(k)].size()); }

    // Unique descendant, or -1 when none or several.
    int unique_descendant(CellKind k, int pre) const {
        const auto& v = desc_[static_cast<int>(k)][pre];
        return v.size() == 1 ? v.front() : -1;
    }

    // first, then second.
    static Provenance compose(const Provenance& first, const Provenance& second);

private:
    std::array<std::vector<std::vector<int>>, 4> anc_;   // post -> pre list
    std::array<std::vector<std::vector<int>>, 4> desc_;  // pre -> post list
};

}  // namespace foam

#include "foam/provenance.hpp"

#include <algorithm>

namespace foam {

Provenance::Provenance(std::array<int, 4> pre_counts, std::array<int, 4> post_counts) {
    for (int k = 0; k < 4; ++k) {
        desc_[k].assign(static_cast<size_t>(pre_counts[k]), {});
        anc_[k].assign(static_cast<size_t>(post_counts[k]), {});
    }
}

void Provenance::link(CellKind k, int pre, int post) {
    auto& a = anc_[static_cast<int>(k)][post];
    if (std::find(a.begin(), a.end(), pre) != a.end()) return;
    a.push_back(pre);
    std::sort(a.begin(), a.end());
    auto& d = desc_[static_cast<int>(k)][pre];
    d.push_back(post);
    std::sort(d.begin(), d.end());
}

Provenance Provenance::compose(const Provenance& first, const Provenance& second) {
    Provenance r(
        {first.pre_count(CellKind::Vertex), first.pre_count(CellKind::Edge), first.pre_count(CellKind::Triangle), first.pre_count(CellKind::Tet)},
        {second.post_count(CellKind::Vertex), second.post_count(CellKind::Edge), second.post_count(CellKind::Triangle), second.post_count(CellKind::Tet)});
    for (int k = 0; k < 4; ++k) {
        CellKind kind = static_cast<CellKind>(k);
        for (int post = 0; post < second.post_count(kind); ++post) {
            for (int mid : second.ancestors(kind, post)) {
                for (int pre : first.ancestors(kind, mid)) r.link(kind, pre, post);
            }
        }
    }
    return r;
}

}  // namespace foam

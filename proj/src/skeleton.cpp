#include "foam/skeleton.hpp"

#include <algorithm>
#include <numeric>

namespace foam {

EdgeFrame next_frame(const Triangulation& tri, const EdgeFrame& f) {
    const Gluing& g = tri.gluing(f.tet, f.p[2]);
    return EdgeFrame{g.tet, Perm4(g.perm[f.p[0]], g.perm[f.p[1]], g.perm[f.p[3]], g.perm[f.p[2]])};
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(static_cast<size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

// Renumber union-find roots by first appearance so class ids are canonical.
std::vector<int> canonical_ids(UnionFind& uf, int n, int& count) {
    std::vector<int> id(static_cast<size_t>(n), -1);
    count = 0;
    for (int i = 0; i < n; ++i) {
        int r = uf.find(i);
        if (id[r] < 0) id[r] = count++;
        id[i] = id[r];
    }
    return id;
}

}  // namespace

Skeleton::Skeleton(const Triangulation& tri) : tri_(&tri) {
    const int n = tri.size();

    // vertex classes
    UnionFind vuf(4 * n);
    for (int t = 0; t < n; ++t)
        for (int f = 0; f < 4; ++f) {
            const Gluing& g = tri.gluing(t, f);
            for (int v = 0; v < 4; ++v)
                if (v != f) vuf.unite(t * 4 + v, g.tet * 4 + g.perm[v]);
        }
    int nv = 0;
    vclass_ = canonical_ids(vuf, 4 * n, nv);
    vertices_.resize(static_cast<size_t>(nv));
    for (int i = 0; i < nv; ++i) vertices_[i].index = i;
    for (int t = 0; t < n; ++t)
        for (int v = 0; v < 4; ++v) vertices_[vclass_[t * 4 + v]].members.push_back(VertexLoc{t, v});

    // triangle classes, ordered by least embedding
    tclass_.assign(static_cast<size_t>(4 * n), -1);
    for (int t = 0; t < n; ++t)
        for (int f = 0; f < 4; ++f) {
            if (tclass_[t * 4 + f] >= 0) continue;
            const Gluing& g = tri.gluing(t, f);
            TriangleClass tc;
            tc.index = static_cast<int>(triangles_.size());
            tc.front = FaceLoc{t, f};
            tc.back = FaceLoc{g.tet, g.face};
            tclass_[t * 4 + f] = tc.index;
            tclass_[g.tet * 4 + g.face] = tc.index;
            triangles_.push_back(tc);
        }

    // edge classes with oriented links
    eclass_.assign(static_cast<size_t>(6 * n), -1);
    epos_.assign(static_cast<size_t>(6 * n), -1);
    etail_.assign(static_cast<size_t>(6 * n), -1);
    for (int t = 0; t < n; ++t) {
        for (int e = 0; e < 6; ++e) {
            if (eclass_[t * 6 + e] >= 0) continue;
            int lo = EDGE_ENDS[e][0], hi = EDGE_ENDS[e][1];
            int c = -1, d = -1;
            for (int s = 0; s < 4; ++s) {
                if (s == lo || s == hi) continue;
                (c < 0 ? c : d) = s;
            }
            EdgeClass ec;
            ec.index = static_cast<int>(edges_.size());
            EdgeFrame start{t, Perm4(lo, hi, c, d)};
            EdgeFrame cur = start;
            int guard = 6 * n + 1;
            do {
                int a = cur.p[0], b = cur.p[1];
                int me = a < b ? edge_between(a, b) : edge_between(b, a);
                if (eclass_[cur.tet * 6 + me] >= 0) {
                    links_ok_ = false;
                    break;
                }
                eclass_[cur.tet * 6 + me] = ec.index;
                epos_[cur.tet * 6 + me] = static_cast<int>(ec.link.size());
                etail_[cur.tet * 6 + me] = a;
                ec.link.push_back(cur);
                cur = next_frame(tri, cur);
                if (--guard < 0) {
                    links_ok_ = false;
                    break;
                }
            } while (!(cur == start));
            ec.tail_class = vclass_[t * 4 + lo];
            ec.head_class = vclass_[t * 4 + hi];
            edges_.push_back(std::move(ec));
        }
    }
}

}  // namespace foam

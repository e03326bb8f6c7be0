#include "foam/cocycle.hpp"

#include <sstream>

namespace foam {

Vec operator+(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

Vec operator-(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

Vec operator-(const Vec& a) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
    return r;
}

Vec oriented_weight(const Skeleton& skel, const Cocycle& c, int tet, int a, int b) {
    int e = edge_between(a, b);
    int k = skel.edge_class_of(tet, e);
    if (skel.tail_slot_of(tet, e) == a) return c.weight[k];
    return -c.weight[k];
}

CocycleReport validate_cocycle(const Triangulation& tri, const Skeleton& skel, const Cocycle& c) {
    CocycleReport rep;
    if (c.rank < 1) rep.issues.push_back({"rank must be at least 1"});
    if (static_cast<int>(c.weight.size()) != skel.num_edges()) {
        rep.issues.push_back({"expected " + std::to_string(skel.num_edges()) + " edge weights, got " + std::to_string(c.weight.size())});
        return rep;
    }
    for (int k = 0; k < skel.num_edges(); ++k) {
        if (static_cast<int>(c.weight[k].size()) != c.rank) {
            rep.issues.push_back({"edge " + std::to_string(k) + ": weight has wrong rank"});
            return rep;
        }
    }
    (void)tri;
    for (const TriangleClass& tc : skel.triangles()) {
        int t = tc.front.tet, f = tc.front.face;
        int v[3];
        int m = 0;
        for (int s = 0; s < 4; ++s)
            if (s != f) v[m++] = s;
        Vec sum = oriented_weight(skel, c, t, v[0], v[1]) + oriented_weight(skel, c, t, v[1], v[2]) - oriented_weight(skel, c, t, v[0], v[2]);
        if (!is_zero(sum)) {
            rep.issues.push_back({"triangle " + std::to_string(tc.index) + ": boundary weights do not sum to zero"});
        }
    }
    return rep;
}

bool edge_is_essential(const Skeleton& skel, const Cocycle& c, int k) {
    if (!is_zero(c.weight[k])) return true;
    if (c.mode == Cocycle::Mode::ClassSeparated) {
        const EdgeClass& ec = skel.edge(k);
        return ec.tail_class != ec.head_class;
    }
    return false;
}

bool is_L_essential(const Skeleton& skel, const Cocycle& c) {
    for (int k = 0; k < skel.num_edges(); ++k)
        if (!edge_is_essential(skel, c, k)) return false;
    return true;
}

std::vector<int> essential_edges(const Skeleton& skel, const Cocycle& c) {
    std::vector<int> out;
    for (int k = 0; k < skel.num_edges(); ++k)
        if (edge_is_essential(skel, c, k)) out.push_back(k);
    return out;
}

bool infinite_image(const Cocycle& c) {
    for (const Vec& w : c.weight)
        if (!is_zero(w)) return true;
    return false;
}

bool labels_equal(const Cocycle& c, const Label& a, const Label& b) {
    if (c.mode == Cocycle::Mode::ClassSeparated && a.vclass != b.vclass) return false;
    return a.pot == b.pot;
}

bool LabelProfile::pairwise_distinct(const Cocycle& c) const {
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j)
            if (labels_equal(c, labels[i], labels[j])) return false;
    return true;
}

LabelProfile edge_label_profile(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, int triangle_class) {
    const TriangleClass& tc = skel.triangle(triangle_class);
    int t0 = tc.front.tet, f0 = tc.front.face;
    const Gluing& g = tri.gluing(t0, f0);
    int t1 = g.tet, f1 = g.face;

    int v[3];
    int m = 0;
    for (int s = 0; s < 4; ++s)
        if (s != f0) v[m++] = s;

    LabelProfile pr;
    // potentials relative to corner v[0]
    pr.labels[0] = Label{skel.vertex_class_of(t0, v[0]), c.zero()};
    pr.labels[1] = Label{skel.vertex_class_of(t0, v[1]), oriented_weight(skel, c, t0, v[0], v[1])};
    pr.labels[2] = Label{skel.vertex_class_of(t0, v[2]), oriented_weight(skel, c, t0, v[0], v[2])};
    pr.labels[3] = Label{skel.vertex_class_of(t0, f0), oriented_weight(skel, c, t0, v[0], f0)};
    pr.labels[4] = Label{skel.vertex_class_of(t1, f1), oriented_weight(skel, c, t1, g.perm[v[0]], f1)};
    return pr;
}

std::optional<int> has_five_label_edge(const Triangulation& tri, const Skeleton& skel, const Cocycle& c) {
    for (int t = 0; t < skel.num_triangles(); ++t) {
        if (edge_label_profile(tri, skel, c, t).pairwise_distinct(c)) return t;
    }
    return std::nullopt;
}

Vec central_edge_weight(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, int triangle_class) {
    const TriangleClass& tc = skel.triangle(triangle_class);
    int t0 = tc.front.tet, f0 = tc.front.face;
    const Gluing& g = tri.gluing(t0, f0);
    int x = (f0 == 0) ? 1 : 0;  // any corner of the shared triangle
    // potential of back apex minus front apex, through corner x
    return oriented_weight(skel, c, t0, f0, x) + oriented_weight(skel, c, g.tet, g.perm[x], g.face);
}

bool is_L_flippable(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, int triangle_class) {
    const TriangleClass& tc = skel.triangle(triangle_class);
    if (tc.loop()) return false;
    Vec w = central_edge_weight(tri, skel, c, triangle_class);
    if (!is_zero(w)) return true;
    if (c.mode == Cocycle::Mode::ClassSeparated) {
        const Gluing& g = tri.gluing(tc.front.tet, tc.front.face);
        return skel.vertex_class_of(tc.front.tet, tc.front.face) != skel.vertex_class_of(g.tet, g.face);
    }
    return false;
}

std::vector<int> flippable_triangles(const Triangulation& tri, const Skeleton& skel, const Cocycle& c) {
    std::vector<int> out;
    for (int t = 0; t < skel.num_triangles(); ++t)
        if (is_L_flippable(tri, skel, c, t)) out.push_back(t);
    return out;
}

std::string serialize_cocycle(const Cocycle& c) {
    std::ostringstream os;
    os << "cocycle " << c.rank << " " << c.weight.size() << " " << (c.mode == Cocycle::Mode::Pure ? "pure" : "classsep") << "\n";
    for (size_t k = 0; k < c.weight.size(); ++k) {
        os << "edge " << k << ":";
        for (const Int& x : c.weight[k]) os << " " << x;
        os << "\n";
    }
    return os.str();
}

CocycleParseResult parse_cocycle(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    Cocycle c;
    int nedges = -1;
    int seen = 0;
    bool header = false;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (!header) {
            std::string mode;
            if (tok != "cocycle" || !(ls >> c.rank >> nedges >> mode) || c.rank < 1 || nedges < 0)
                return {std::nullopt, "line " + std::to_string(lineno) + ": expected 'cocycle <rank> <edges> <pure|classsep>'"};
            if (mode == "pure")
                c.mode = Cocycle::Mode::Pure;
            else if (mode == "classsep")
                c.mode = Cocycle::Mode::ClassSeparated;
            else
                return {std::nullopt, "line " + std::to_string(lineno) + ": unknown mode '" + mode + "'"};
            c.weight.assign(static_cast<size_t>(nedges), Vec());
            header = true;
            continue;
        }
        if (tok != "edge") return {std::nullopt, "line " + std::to_string(lineno) + ": expected 'edge'"};
        std::string idx;
        if (!(ls >> idx) || idx.empty() || idx.back() != ':') return {std::nullopt, "line " + std::to_string(lineno) + ": expected 'edge <i>:'"};
        int k = -1;
        try {
            k = std::stoi(idx.substr(0, idx.size() - 1));
        } catch (...) {
            return {std::nullopt, "line " + std::to_string(lineno) + ": bad edge index"};
        }
        if (k < 0 || k >= nedges) return {std::nullopt, "line " + std::to_string(lineno) + ": edge index out of range"};
        Vec w;
        std::string num;
        while (ls >> num) {
            try {
                w.push_back(Int(num));
            } catch (...) {
                return {std::nullopt, "line " + std::to_string(lineno) + ": bad integer '" + num + "'"};
            }
        }
        if (static_cast<int>(w.size()) != c.rank) return {std::nullopt, "line " + std::to_string(lineno) + ": expected " + std::to_string(c.rank) + " components"};
        c.weight[static_cast<size_t>(k)] = std::move(w);
        ++seen;
    }
    if (!header) return {std::nullopt, "missing cocycle header"};
    if (seen != nedges) return {std::nullopt, "expected " + std::to_string(nedges) + " edge lines, got " + std::to_string(seen)};
    return {c, ""};
}

}  // namespace foam

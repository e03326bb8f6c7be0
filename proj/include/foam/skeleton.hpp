#pragma once

#include <array>
#include <vector>

#include "foam/triangulation.hpp"

namespace foam {

// Model edge numbering: edge e joins slots EDGE_ENDS[e][0] < EDGE_ENDS[e][1].
inline constexpr std::array<std::array<int, 2>, 6> EDGE_ENDS = {{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

inline int edge_between(int a, int b) {
    static constexpr int tbl[4][4] = {{-1, 0, 1, 2}, {0, -1, 3, 4}, {1, 3, -1, 5}, {2, 4, 5, -1}};
    return tbl[a][b];
}

struct EdgeLoc {
    int tet = -1;
    int edge = -1;  // 0..5
    bool operator==(const EdgeLoc& o) const { return tet == o.tet && edge == o.edge; }
    bool operator<(const EdgeLoc& o) const { return tet != o.tet ? tet < o.tet : edge < o.edge; }
};

struct VertexLoc {
    int tet = -1;
    int vertex = -1;
    bool operator==(const VertexLoc& o) const { return tet == o.tet && vertex == o.vertex; }
    bool operator<(const VertexLoc& o) const { return tet != o.tet ? tet < o.tet : vertex < o.vertex; }
};

// A frame around an edge: slots p[0] -> p[1] span the edge (orienting it),
// p[2] is the face we exit through next, p[3] the face we entered through.
struct EdgeFrame {
    int tet = -1;
    Perm4 p;
    int tail() const { return p[0]; }
    int head() const { return p[1]; }
    int exit_face() const { return p[2]; }
    int entry_face() const { return p[3]; }
    EdgeLoc loc() const { return EdgeLoc{tet, edge_between(p[0], p[1])}; }
    bool operator==(const EdgeFrame& o) const { return tet == o.tet && p == o.p; }
};

// Orientation convention for edge links (fixed once, used everywhere):
// the reference frame of an edge class is taken at its lexicographically
// least model edge, with the edge endpoints in ascending slot order and the
// remaining two slots in ascending order.  The link is the walk generated
// by exiting through slot p[2] of each frame.
struct EdgeClass {
    int index = -1;
    std::vector<EdgeFrame> link;  // single cycle, length == degree
    int degree() const { return static_cast<int>(link.size()); }
    // Vertex classes at the two ends, in the reference orientation.
    int tail_class = -1;
    int head_class = -1;
};

struct TriangleClass {
    int index = -1;
    FaceLoc front;  // lexicographically least embedding
    FaceLoc back;   // its glued partner
    bool loop() const { return front.tet == back.tet; }  // dual foam edge loop
};

struct VertexClass {
    int index = -1;
    std::vector<VertexLoc> members;
};

// Computed cell classes of a triangulation: the orbits of model vertices,
// edges and faces under the gluing maps, with oriented edge links.  Dually
// this is the incidence data of the foam: foam vertices are tetrahedra,
// foam edges are triangle classes, foam faces are edge classes and the
// complementary regions are vertex classes.
class Skeleton {
public:
    explicit Skeleton(const Triangulation& tri);

    const Triangulation& tri() const { return *tri_; }

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int num_triangles() const { return static_cast<int>(triangles_.size()); }

    const VertexClass& vertex(int i) const { return vertices_[i]; }
    const EdgeClass& edge(int i) const { return edges_[i]; }
    const TriangleClass& triangle(int i) const { return triangles_[i]; }

    const std::vector<VertexClass>& vertices() const { return vertices_; }
    const std::vector<EdgeClass>& edges() const { return edges_; }
    const std::vector<TriangleClass>& triangles() const { return triangles_; }

    int vertex_class_of(int tet, int v) const { return vclass_[tet * 4 + v]; }
    int edge_class_of(int tet, int e) const { return eclass_[tet * 6 + e]; }
    int edge_class_of(int tet, int a, int b) const { return eclass_[tet * 6 + edge_between(a, b)]; }
    int triangle_class_of(int tet, int f) const { return tclass_[tet * 4 + f]; }

    // Position of a model edge in its class link, and whether the link frame
    // there runs from the lower to the higher vertex slot.
    int link_position_of(int tet, int e) const { return epos_[tet * 6 + e]; }
    // Slot at the tail of the link frame through this model edge.
    int tail_slot_of(int tet, int e) const { return etail_[tet * 6 + e]; }

    // #edges == #vertices + #tets for any valid ideal triangulation.
    bool euler_ok() const { return num_edges() == num_vertices() + tri_->size(); }

    // True when every edge-class walk closed up consistently.  A reversed
    // self-identification makes the triangulation unusable here.
    bool links_ok() const { return links_ok_; }

private:
    const Triangulation* tri_;
    std::vector<VertexClass> vertices_;
    std::vector<EdgeClass> edges_;
    std::vector<TriangleClass> triangles_;
    std::vector<int> vclass_, eclass_, tclass_, epos_, etail_;
    bool links_ok_ = true;
};

// Advance a frame one step around its edge.
EdgeFrame next_frame(const Triangulation& tri, const EdgeFrame& f);

}  // namespace foam

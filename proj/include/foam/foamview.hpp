#pragma once

#include <optional>
#include <string>
#include <vector>

#include "foam/moves.hpp"

namespace foam {

// Dual foam edge loops: triangle classes with both embeddings on one
// tetrahedron, plus their incidence at foam vertices.
struct CyclicEdgeReport {
    std::vector<int> loops;                      // triangle classes
    std::vector<std::vector<int>> loops_at_tet;  // per tet, the loops based there
    bool empty() const { return loops.empty(); }
};

CyclicEdgeReport cyclic_edges(const Triangulation& tri, const Skeleton& skel);

// One side of an arc in a foam face: the ordered model edges e_0..e_m of
// the dual polygon boundary met by the side (oriented from the initial to
// the terminal point of the arc), the model vertices between them, and the
// relative labels of the outer regions.  All labels of both sides and of
// both descendant faces are expressed in one potential frame, so they can
// be compared across структures.
struct SideDescriptor {
    bool is_side_a = true;
    std::vector<int> slots;            // link slots of e_0..e_m
    std::vector<int> edge_classes;     // triangle class of each e_k
    std::vector<bool> edge_cyclic;     // foam edge loop flags
    std::vector<int> vertex_tets;      // tets of v_0..v_{m-1}
    std::vector<Label> outer_labels;   // outer region label of each e_k
    bool would_create_inessential = false;  // side meets fewer than two model edges

    // descendant face of the dual polygon on this side after a
    // hypothetical 0-2 move, recovered through provenance
    int fs_class = -1;                   // edge class in the scratch complex
    std::vector<Label> fs_outer_labels;  // outer labels around f_s, same frame

    int edge_count() const { return static_cast<int>(slots.size()); }
};

struct ArcSides {
    SideDescriptor a, b;
    bool scratch_label_legal = true;  // the hypothetical 0-2 keeps essentiality
};

ArcSides arc_sides(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, const Arc& arc);

// Witness that an arc side satisfies the hypotheses for compiling its 0-2
// move out of 2-3/3-2 moves.
struct SideWitness {
    bool side_a = true;
    int k = 1;          // index of the distinguished edge e_k
    Label unique_label;  // L(E_k)
};

struct CheckFailure {
    std::string hypothesis;  // first failing hypothesis, by name
};

// Side meets exactly three model edges; L(E_1) unique among the outer
// labels of the side and of f_s; e_1 non-cyclic; phi(e_1) distinct from
// phi(e_0), phi(e_2).
std::optional<SideWitness> check_three_sides(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, const Arc& arc, CheckFailure* why = nullptr);

// Side meets at least three model edges and some interior k has: L(E_k)
// unique among outer labels of the side and of f_s; e_{k-1}, e_k, e_{k+1}
// non-cyclic; phi(e_k) distinct from every other phi(e_i).
std::optional<SideWitness> check_many_edges(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, const Arc& arc, CheckFailure* why = nullptr);

// JSON-lines diagnostic dump of both side descriptors.
std::string dump_arc_sides(const ArcSides& sides);

}  // namespace foam

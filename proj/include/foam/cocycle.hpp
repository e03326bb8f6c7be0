#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <string>
#include <vector>

#include "foam/skeleton.hpp"

namespace foam {

using Int = boost::multiprecision::cpp_int;
using Vec = std::vector<Int>;

inline bool is_zero(const Vec& v) {
    for (const auto& x : v) {
        if (x != 0) return false;
    }
    return true;
}

Vec operator+(const Vec& a, const Vec& b);
Vec operator-(const Vec& a, const Vec& b);
Vec operator-(const Vec& a);

// The labelling of cover boundary components, realised as a group-valued
// edge cocycle: an integer vector per oriented edge class, antisymmetric
// under reversal, summing to zero around every triangle.  On the universal
// cover this integrates to a vertex potential, unique up to a constant; the
// relative label across a lifted edge is the edge weight.
//
// In `pure` mode two cover vertices carry equal labels iff their potentials
// agree; in `class_separated` mode lifts of distinct vertex classes always
// carry distinct labels, so only same-class comparisons consult potentials.
struct Cocycle {
    enum class Mode { Pure, ClassSeparated };

    int rank = 1;
    Mode mode = Mode::Pure;
    std::vector<Vec> weight;  // per edge class, in the stored link orientation

    Vec zero() const { return Vec(static_cast<size_t>(rank)); }
};

// Weight of the model edge a->b of tet t, signed by the link orientation.
Vec oriented_weight(const Skeleton& skel, const Cocycle& c, int tet, int a, int b);

struct CocycleIssue {
    std::string detail;
};

struct CocycleReport {
    std::vector<CocycleIssue> issues;
    bool ok() const { return issues.empty(); }
};

CocycleReport validate_cocycle(const Triangulation& tri, const Skeleton& skel, const Cocycle& c);

// Edge essentiality: the two endpoint lifts of any lift of this edge carry
// distinct labels.
bool edge_is_essential(const Skeleton& skel, const Cocycle& c, int edge_class);
bool is_L_essential(const Skeleton& skel, const Cocycle& c);
std::vector<int> essential_edges(const Skeleton& skel, const Cocycle& c);

// Declared satisfied iff some edge weight is nonzero; with all-zero weights
// the label image is finite and the connectivity pipeline refuses to run.
bool infinite_image(const Cocycle& c);

// A label of a lifted complementary region: its vertex class together with
// the potential of the chosen lift.
struct Label {
    int vclass = -1;
    Vec pot;
    bool operator==(const Label& o) const { return vclass == o.vclass && pot == o.pot; }
    bool operator<(const Label& o) const { return vclass != o.vclass ? vclass < o.vclass : pot < o.pot; }
};

bool labels_equal(const Cocycle& c, const Label& a, const Label& b);

// The five relative labels of the regions around a lifted foam edge (dual
// to a triangle class): the three at the triangle's corners and the two at
// the opposite apices of its two tetrahedra.  Translation-normalized so the
// first entry's potential is zero.
struct LabelProfile {
    std::array<Label, 5> labels;  // corners x<y<z, then front apex, back apex
    bool pairwise_distinct(const Cocycle& c) const;
};

LabelProfile edge_label_profile(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, int triangle_class);

std::optional<int> has_five_label_edge(const Triangulation& tri, const Skeleton& skel, const Cocycle& c);

// Weight the 2-3 move across this triangle class would give the new central
// edge: the relative label difference of the two apices, transported
// through the shared triangle.
Vec central_edge_weight(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, int triangle_class);

// True iff the two sides of the triangle are distinct tetrahedra (the dual
// foam edge is not a loop) and the 2-3 move across it keeps L-essentiality.
bool is_L_flippable(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, int triangle_class);

std::vector<int> flippable_triangles(const Triangulation& tri, const Skeleton& skel, const Cocycle& c);

// Cocycle file format:  "cocycle <rank> <num_edges> <pure|classsep>" then
// one line per edge class: "edge <i>: v_1 ... v_k".
std::string serialize_cocycle(const Cocycle& c);

struct CocycleParseResult {
    std::optional<Cocycle> coc;
    std::string error;
};

CocycleParseResult parse_cocycle(const std::string& text);

}  // namespace foam

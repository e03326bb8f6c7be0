#pragma once

#include <optional>
#include <string>
#include <vector>

#include "foam/cocycle.hpp"
#include "foam/triangulation.hpp"

namespace foam {

// A relabelling of one triangulation onto another: tetrahedron i maps to
// tet_image[i] with vertex slots permuted by perm_image[i].
struct Relabelling {
    std::vector<int> tet_image;
    std::vector<Perm4> perm_image;
};

// Canonical form of a triangulation under combinatorial isomorphism:
// the lexicographically least breadth-first relabelling over all
// (start tetrahedron, start labelling) choices.  Equal strings iff the
// triangulations are related by a relabelling of tetrahedra and slots.
std::string canonical_sig(const Triangulation& tri);

// Also returns the relabelling from tri onto its canonical form.
std::string canonical_sig(const Triangulation& tri, Relabelling& witness);

// Explicit isomorphism a -> b when one exists.
std::optional<Relabelling> iso(const Triangulation& a, const Triangulation& b);

// Isomorphism a -> b that also transports the cocycle weights exactly.
std::optional<Relabelling> iso_labelled(const Triangulation& a, const Skeleton& sa, const Cocycle& ca, const Triangulation& b, const Skeleton& sb, const Cocycle& cb);

// Canonical form of a labelled triangulation: the sig of the underlying
// triangulation is extended with the transported weights, minimising over
// all relabellings that realise the least gluing encoding.
std::string canonical_sig_with_cocycle(const Triangulation& tri, const Skeleton& skel, const Cocycle& c);

}  // namespace foam

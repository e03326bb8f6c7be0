#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "foam/perm4.hpp"

namespace foam {

// One face of one model tetrahedron.
struct FaceLoc {
    int tet = -1;
    int face = -1;
    bool operator==(const FaceLoc& o) const { return tet == o.tet && face == o.face; }
    bool operator!=(const FaceLoc& o) const { return !(*this == o); }
    bool operator<(const FaceLoc& o) const { return tet != o.tet ? tet < o.tet : face < o.face; }
};

// Gluing of one model face: partner face plus the slot permutation
// (this tet's vertex slots -> partner's vertex slots).  The permutation
// carries the face correspondence: perm[face] is the partner face index.
struct Gluing {
    int tet = -1;
    int face = -1;
    Perm4 perm;
};

struct ValidationIssue {
    enum class Kind { Involution, FixedFace, Disconnected, BadEdge };
    Kind kind;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
    std::string str() const;
};

// An ideal triangulation stored as a gluing table.  Every face of every
// model tetrahedron is glued to a distinct model face; the quotient is the
// coned realisation.  Immutable after construction.
class Triangulation {
public:
    Triangulation() = default;
    explicit Triangulation(int n_tet) : glue_(static_cast<size_t>(n_tet)) {}

    int size() const { return static_cast<int>(glue_.size()); }

    const Gluing& gluing(int tet, int face) const { return glue_[tet][face]; }

    // Install a gluing and its inverse in one step.
    void set_gluing(int tet, int face, int dst_tet, int dst_face, const Perm4& p) {
        glue_[tet][face] = Gluing{dst_tet, dst_face, p};
        glue_[dst_tet][dst_face] = Gluing{tet, face, p.inverse()};
    }

    // One-directional install; used by the parser, which checks the
    // involution afterwards via validate().
    void set_raw_gluing(int tet, int face, const Gluing& g) { glue_[tet][face] = g; }

    ValidationReport validate() const;
    bool is_valid() const { return validate().ok(); }

    bool operator==(const Triangulation& o) const;

    // Gluing-table text format.  See README for the grammar.
    std::string serialize() const;

private:
    std::vector<std::array<Gluing, 4>> glue_;
};

struct ParseError {
    int line = 0;
    int column = 0;
    std::string message;
};

// Returns the triangulation or a syntax error.  Semantic problems
// (involution violations etc.) are reported by validate(), not here.
struct ParseResult {
    std::optional<Triangulation> tri;
    std::optional<ParseError> error;
};

ParseResult parse_triangulation(const std::string& text);

}  // namespace foam

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "foam/cocycle.hpp"
#include "foam/provenance.hpp"
#include "foam/skeleton.hpp"

namespace foam {

// A properly embedded arc in a foam face (the dual face of edge class E),
// given by two distinct slots into E's oriented link cycle.  Slot s selects
// the boundary foam edge crossed between link positions s and s+1; the arc
// endpoints lie in the interiors of those crossings.  The two slots divide
// the boundary into two nonempty sides; `side A` is the one holding link
// positions i+1..j.  `head_at_j` orients the arc and `pocket_side_a`
// co-orients the face (which side the snakelet pocket opens into).
struct Arc {
    int edge_class = -1;
    int slot_i = -1;
    int slot_j = -1;
    bool head_at_j = true;
    bool pocket_side_a = true;

    bool valid_for(const Skeleton& skel) const {
        if (edge_class < 0 || edge_class >= skel.num_edges()) return false;
        int d = skel.edge(edge_class).degree();
        return 0 <= slot_i && slot_i < slot_j && slot_j < d;
    }
};

struct MoveEvent {
    enum class Kind { TwoThree, ThreeTwo, ZeroTwo, TwoZero };
    Kind kind = Kind::TwoThree;
    int index = -1;  // triangle class (2-3) or edge class (3-2, 2-0)
    Arc arc;         // 0-2 only

    std::string str() const;
};

class move_error : public std::runtime_error {
public:
    enum class Code {
        LoopObstruction,
        DegreeNot3,
        ClosureNotEmbedded,
        NotBigon,
        FlatteningIllegal,
        BadLocation,
        Internal,
    };
    move_error(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Code code() const { return code_; }

private:
    Code code_;
};

struct MoveResult {
    Triangulation tri;
    Cocycle coc;
    Provenance prov;
    // 0-2 only: all newly created edge classes pass the essentiality test.
    bool label_legal = true;
};

// Elementary moves.  Every move returns a fresh triangulation, the uniquely
// transported cocycle and full ancestor/descendant provenance.
MoveResult apply_23(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, int triangle_class);
MoveResult apply_32(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, int edge_class);
MoveResult apply_02(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, const Arc& arc);
MoveResult apply_20(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, int edge_class);

MoveResult apply_event(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, const MoveEvent& ev);

struct StepVerdict {
    MoveEvent event;
    bool legal = false;
    bool label_legal = true;
    bool essential = false;
    int cyclic_edges = 0;
    int n_tet = 0;
    std::string error;
};

struct Verdict {
    std::vector<StepVerdict> steps;
    bool ok = false;
    int failed_at = -1;  // first illegal step, or -1
    std::string final_sig;
};

struct SequenceResult {
    Triangulation tri;
    Cocycle coc;
    Provenance prov;
    Verdict verdict;
};

// Applies the events in order; aborts at the first illegal step.
SequenceResult apply_sequence(const Triangulation& tri, const Cocycle& c, const std::vector<MoveEvent>& seq);

// Replays and grades a sequence without throwing.
Verdict verify_sequence(const Triangulation& tri, const Cocycle& c, const std::vector<MoveEvent>& seq);

// Count of dual foam edge loops (triangle classes glued to one tet).
int count_cyclic_edges(const Skeleton& skel);

}  // namespace foam

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "foam/foamview.hpp"
#include "foam/moves.hpp"

namespace foam {

// A compiled macro move: an explicit list of elementary events together
// with the expected endpoint computed by the direct (lune-using) move, so
// the expansion is checked against an independent target.
struct MacroCertificate {
    std::vector<MoveEvent> events;
    std::string expected_sig;  // labelled sig of the direct macro result
    std::string final_sig;     // labelled sig reached by the events
    bool all_intermediate_essential = false;
    bool verified = false;  // replay green, essential throughout, sigs equal
};

struct MacroResult {
    MacroCertificate cert;
    Triangulation tri;
    Cocycle coc;
    Provenance prov;  // composed over the emitted events
};

class macro_error : public std::runtime_error {
public:
    enum class Code {
        NoFlippableIncidentEdge,
        NotFlippable,
        TargetNotLabelLegal,
        SlideBlocked,
        PairEndpointsNotOnE,
        NoValidP,
        HypothesisFailed,
        SearchExhausted,
    };
    macro_error(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Code code() const { return code_; }

private:
    Code code_;
};

// The corner-cutting arc at a vertex of the dual foam: dir selects one of
// the three opposite-edge pairs of the tetrahedron; the arc runs in the
// dual face of that pair's first edge, flanking the corner at `tet`.
// Falls back to the opposite edge when the first bounds a monogon face.
std::optional<Arc> v_arc(const Skeleton& skel, int tet, int dir);

// Arc flanking the corner of the dual face of model edge (tet, {a,b}).
std::optional<Arc> v_arc_along_edge(const Skeleton& skel, int tet, int a, int b);

// Direct V-move: the 0-2 move along the corner-cutting arc.
MoveResult v_move(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, int tet, int dir);

// Expands a V-move into 2-3, 2-3, 2-3, 3-2 with all intermediate states
// essential; the first move is along the pivot triangle, which must be
// flippable and incident to the vertex.
MacroResult expand_v_move(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, int tet, int dir, int pivot_triangle);

// Same, but for an explicitly given corner-cutting arc.
MacroResult expand_v_arc(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, const Arc& varc, int pivot_triangle);

// A snakelet's address in the current complex: the degree-2 edge class of
// its pocket bigon.  Everything else (pillow tets, generating arc against
// the flattened base) is recovered from it.
struct SnakeletHandle {
    int bigon_class = -1;
};

struct RecoveredSnakelet {
    Triangulation base;
    Cocycle base_coc;
    Provenance prov_20;  // current -> base
    Arc arc;             // regenerates the current state from base
};

RecoveredSnakelet recover_snakelet(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, const SnakeletHandle& h);

// Moves one endpoint of a snakelet past one vertex of its face via a 2-3
// followed by a 3-2.  `end_slot` names the endpoint by its current slot in
// the recovered arc; dir is +-1 along the link.
struct SlideOutcome {
    MacroResult result;
    SnakeletHandle handle;  // the bigon's address afterwards
};

SlideOutcome slide_snakelet(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, const SnakeletHandle& h, int end_slot, int dir);

// Removes a snakelet via 2-3, 3-2, 3-2, 3-2 (the reverse of a V-move
// expansion), ending at the flattened complex.
MacroResult remove_snakelet(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, const SnakeletHandle& h);

// Augmented 2-3 move along the oriented flippable foam edge `tclass`
// (oriented from the u-end; u_is_front picks which embedding is u): three
// protected corner pillows at u followed by the 2-3 along the edge.  The
// result is essential, keeps a flippable edge and adds no cyclic edges
// meeting the support.
MacroResult augmented_23(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, int tclass, bool u_is_front);

// Nature reserve move at the end p of the flippable edge `tclass`:
// the protected pillows of the augmented move plus one more corner pillow
// splitting the edge at p.  Returns the reserve edge (the descendant of
// the edge keeping its end at p) and the flippable remainder.
struct ReserveOutcome {
    MacroResult result;
    int reserve_tclass = -1;    // e'
    int middle_tclass = -1;     // e''
    int remainder_tclass = -1;  // e''', L-flippable
};

ReserveOutcome nature_reserve(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, int tclass, bool p_is_front, int green_choice);

// Relocates an arc through a move.  `crossing_hint` prefers, per pre
// triangle class, a specific descendant (by post triangle class) when a
// crossing was split.
struct ArcRelocation {
    Arc arc;
    bool ok = false;
    std::string error;
};

ArcRelocation relocate_arc(const Arc& arc, const Skeleton& pre_skel, const Provenance& prov, const Triangulation& post_tri, const Skeleton& post_skel, const std::vector<std::pair<int, int>>& crossing_hint = {});

// All candidate relocations (descendant face and admissible slot pairs).
std::vector<Arc> relocate_arc_all(const Arc& arc, const Skeleton& pre_skel, const Provenance& prov, const Skeleton& post_skel);

// Compiles the 0-2 move along `arc` into pure 2-3/3-2 moves when the
// three-sides checker passes: corner pillow at the first interior vertex,
// slides into place, and the swap subroutine when the two outer edges have
// one image in the foam.
MacroResult do_02_three_sides(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, const Arc& arc);

// General case: red and green helper snakelets reduce the side to three
// edges (with the dodge manoeuvre when they block each other), then the
// three-sides compiler runs and the helpers are deconstructed.
MacroResult do_02_many_edges(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, const Arc& arc);

// Replays and grades a certificate against its expected sig.
bool verify_certificate(const Triangulation& tri, const Cocycle& c, MacroCertificate& cert);

// Bounded deterministic search for an event sequence with the given kind
// pattern whose endpoint matches `target_sig` (labelled sig), restricted
// to moves touching the active support.  Returns nullopt when exhausted.
std::optional<MacroResult> search_pattern(const Triangulation& tri, const Cocycle& c, const std::vector<MoveEvent::Kind>& pattern, const std::string& target_sig, const std::vector<int>& support_tets, bool widen_on_failure = true);

}  // namespace foam

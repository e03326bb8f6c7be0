#include "foam/foamview.hpp"

#include <map>
#include <sstream>

namespace foam {

CyclicEdgeReport cyclic_edges(const Triangulation& tri, const Skeleton& skel) {
    CyclicEdgeReport rep;
    rep.loops_at_tet.assign(static_cast<size_t>(tri.size()), {});
    for (const TriangleClass& tc : skel.triangles()) {
        if (tc.loop()) {
            rep.loops.push_back(tc.index);
            rep.loops_at_tet[tc.front.tet].push_back(tc.index);
        }
    }
    return rep;
}

namespace {

// Potentials of the four corners of every tet around the link cycle of an
// edge class, rooted at the frame in position 0.  The loop around an edge
// is null-homotopic, so the transport closes up; asserted.
std::vector<std::array<Vec, 4>> link_potentials(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, int edge_class) {
    const EdgeClass& ec = skel.edge(edge_class);
    std::vector<std::array<Vec, 4>> pots;
    pots.reserve(ec.link.size());
    {
        const EdgeFrame& f0 = ec.link.front();
        std::array<Vec, 4> p;
        p[0] = c.zero();
        for (int s = 1; s < 4; ++s) p[s] = oriented_weight(skel, c, f0.tet, 0, s);
        pots.push_back(std::move(p));
    }
    for (size_t k = 1; k < ec.link.size(); ++k) {
        const EdgeFrame& prev = ec.link[k - 1];
        const EdgeFrame& cur = ec.link[k];
        const Gluing& g = tri.gluing(prev.tet, prev.p[2]);
        std::array<Vec, 4> p;
        // shared face corners carry over; the new apex hangs off one of them
        int anchor = -1;
        for (int s = 0; s < 4; ++s) {
            if (s == prev.p[2]) continue;
            p[g.perm[s]] = pots[k - 1][s];
            anchor = g.perm[s];
        }
        int apex = g.perm[prev.p[2]];
        p[apex] = p[anchor] + oriented_weight(skel, c, cur.tet, anchor, apex);
        pots.push_back(std::move(p));
    }
    return pots;
}

struct CrossingInfo {
    int slot;
    int tclass;       // triangle class crossed
    bool cyclic;      // loop flag of that class
    VertexLoc outer;  // third vertex of the crossing, in the exit tet
};

CrossingInfo crossing(const Triangulation& tri, const Skeleton& skel, int edge_class, int slot) {
    (void)tri;
    const EdgeClass& ec = skel.edge(edge_class);
    const EdgeFrame& fr = ec.link[slot];
    CrossingInfo ci;
    ci.slot = slot;
    ci.tclass = skel.triangle_class_of(fr.tet, fr.p[2]);
    ci.cyclic = skel.triangle(ci.tclass).loop();
    ci.outer = VertexLoc{fr.tet, fr.p[3]};
    return ci;
}

}  // namespace

ArcSides arc_sides(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, const Arc& arc) {
    if (!arc.valid_for(skel)) throw move_error(move_error::Code::BadLocation, "arc slots are not valid for the edge link");
    const EdgeClass& ec = skel.edge(arc.edge_class);
    const int d = ec.degree();
    auto pots = link_potentials(tri, skel, c, arc.edge_class);

    auto outer_label = [&](int slot) {
        CrossingInfo ci = crossing(tri, skel, arc.edge_class, slot);
        return Label{skel.vertex_class_of(ci.outer.tet, ci.outer.vertex), pots[slot][ci.outer.vertex]};
    };

    auto build = [&](bool side_a) {
        SideDescriptor sd;
        sd.is_side_a = side_a;
        std::vector<int> seq, corners;
        if (side_a) {
            // ascending walk i..j; the corner between crossings s-1 and s
            // sits at link position s
            for (int s = arc.slot_i; s <= arc.slot_j; ++s) {
                if (!seq.empty()) corners.push_back(s);
                seq.push_back(s);
            }
        } else {
            // descending walk i..j (wrapping); the corner between crossings
            // s+1 and s sits at link position s+1
            for (int s = arc.slot_i;; s = (s + d - 1) % d) {
                if (!seq.empty()) corners.push_back((s + 1) % d);
                seq.push_back(s);
                if (s == arc.slot_j) break;
            }
        }
        if (!arc.head_at_j) {
            std::reverse(seq.begin(), seq.end());
            std::reverse(corners.begin(), corners.end());
        }
        sd.slots = seq;
        for (int s : seq) {
            CrossingInfo ci = crossing(tri, skel, arc.edge_class, s);
            sd.edge_classes.push_back(ci.tclass);
            sd.edge_cyclic.push_back(ci.cyclic);
            sd.outer_labels.push_back(outer_label(s));
        }
        for (int pos : corners) sd.vertex_tets.push_back(ec.link[pos].tet);
        sd.would_create_inessential = sd.edge_count() < 2;
        return sd;
    };

    ArcSides sides;
    sides.a = build(true);
    sides.b = build(false);

    // descendant faces via a scratch 0-2
    MoveResult scratch = apply_02(tri, skel, c, arc);
    sides.scratch_label_legal = scratch.label_legal;
    Skeleton ns(scratch.tri);
    const int P = tri.size(), Q = tri.size() + 1;
    sides.a.fs_class = ns.edge_class_of(P, 2, 3);
    sides.b.fs_class = ns.edge_class_of(Q, 2, 3);

    // provenance independence: both descendant faces descend from the arc's face
    for (int fs : {sides.a.fs_class, sides.b.fs_class}) {
        if (scratch.prov.ancestor(CellKind::Edge, fs) != arc.edge_class)
            throw move_error(move_error::Code::Internal, "descendant face does not descend from the arc's face");
    }

    // outer labels around each f_s, rooted compatibly with the pre-move frame:
    // the fan tets kept their potentials, so anchor at the first link frame of
    // f_s that lies on an original tet.
    auto fs_labels = [&](int fs_class, SideDescriptor& sd) {
        const EdgeClass& fec = ns.edge(fs_class);
        // potentials along the post link
        auto post_pots = link_potentials(scratch.tri, ns, scratch.coc, fs_class);
        // find an anchor frame on an original tet and its pre potential
        int anchor_idx = -1;
        for (size_t k = 0; k < fec.link.size(); ++k) {
            if (fec.link[k].tet < P) {
                anchor_idx = static_cast<int>(k);
                break;
            }
        }
        Vec shift = c.zero();
        if (anchor_idx >= 0) {
            const EdgeFrame& af = fec.link[anchor_idx];
            // locate the same tet in the pre link of the arc's face
            for (int s = 0; s < d; ++s) {
                if (ec.link[s].tet == af.tet && ec.link[s].p[0] == af.p[0] && ec.link[s].p[1] == af.p[1]) {
                    shift = pots[s][af.p[0]] - post_pots[anchor_idx][af.p[0]];
                    break;
                }
            }
        }
        for (size_t k = 0; k < fec.link.size(); ++k) {
            const EdgeFrame& fr = fec.link[k];
            int outer_v = fr.p[3];
            int post_cls = ns.vertex_class_of(fr.tet, outer_v);
            int pre_cls = scratch.prov.ancestor(CellKind::Vertex, post_cls);
            sd.fs_outer_labels.push_back(Label{pre_cls, post_pots[k][outer_v] + shift});
        }
    };
    fs_labels(sides.a.fs_class, sides.a);
    fs_labels(sides.b.fs_class, sides.b);
    return sides;
}

namespace {

int count_label(const Cocycle& c, const std::vector<Label>& labels, const Label& x) {
    int n = 0;
    for (const Label& l : labels)
        if (labels_equal(c, l, x)) ++n;
    return n;
}

std::optional<SideWitness> check_side(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, const Arc& arc, bool many, CheckFailure* why) {
    ArcSides sides = arc_sides(tri, skel, c, arc);
    if (!sides.scratch_label_legal) {
        if (why) why->hypothesis = "arc is not label-legal";
        return std::nullopt;
    }
    std::string first_fail;
    for (const SideDescriptor* sdp : {&sides.a, &sides.b}) {
        const SideDescriptor& sd = *sdp;
        int m = sd.edge_count();
        if (!many && m != 3) {
            if (first_fail.empty()) first_fail = "side does not meet exactly three model edges";
            continue;
        }
        if (many && m < 3) {
            if (first_fail.empty()) first_fail = "side meets fewer than three model edges";
            continue;
        }
        for (int k = 1; k + 1 < m; ++k) {
            const Label& E = sd.outer_labels[k];
            if (count_label(c, sd.outer_labels, E) != 1) {
                if (first_fail.empty()) first_fail = "distinguished label is not unique on the side";
                continue;
            }
            if (count_label(c, sd.fs_outer_labels, E) != 1) {
                if (first_fail.empty()) first_fail = "distinguished label is not unique around the descendant face";
                continue;
            }
            bool cyc = many ? (sd.edge_cyclic[k - 1] || sd.edge_cyclic[k] || sd.edge_cyclic[k + 1]) : sd.edge_cyclic[k];
            if (cyc) {
                if (first_fail.empty()) first_fail = "a required edge is cyclic";
                continue;
            }
            bool distinct = true;
            for (int q = 0; q < m; ++q)
                if (q != k && sd.edge_classes[q] == sd.edge_classes[k]) distinct = false;
            if (!distinct) {
                if (first_fail.empty()) first_fail = "distinguished edge is not embedded in the foam";
                continue;
            }
            return SideWitness{sd.is_side_a, k, E};
        }
        if (first_fail.empty()) first_fail = "no admissible index on this side";
    }
    if (why) why->hypothesis = first_fail.empty() ? "no side admissible" : first_fail;
    return std::nullopt;
}

}  // namespace

std::optional<SideWitness> check_three_sides(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, const Arc& arc, CheckFailure* why) {
    return check_side(tri, skel, c, arc, false, why);
}

std::optional<SideWitness> check_many_edges(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, const Arc& arc, CheckFailure* why) {
    return check_side(tri, skel, c, arc, true, why);
}

std::string dump_arc_sides(const ArcSides& sides) {
    std::ostringstream os;
    for (const SideDescriptor* sdp : {&sides.a, &sides.b}) {
        const SideDescriptor& sd = *sdp;
        os << "{\"side\":\"" << (sd.is_side_a ? "A" : "B") << "\",\"edges\":[";
        for (size_t k = 0; k < sd.edge_classes.size(); ++k) os << (k ? "," : "") << sd.edge_classes[k];
        os << "],\"cyclic\":[";
        for (size_t k = 0; k < sd.edge_cyclic.size(); ++k) os << (k ? "," : "") << (sd.edge_cyclic[k] ? 1 : 0);
        os << "],\"outer\":[";
        for (size_t k = 0; k < sd.outer_labels.size(); ++k) {
            os << (k ? "," : "") << "[" << sd.outer_labels[k].vclass;
            for (const Int& x : sd.outer_labels[k].pot) os << "," << x;
            os << "]";
        }
        os << "],\"fs_outer\":[";
        for (size_t k = 0; k < sd.fs_outer_labels.size(); ++k) {
            os << (k ? "," : "") << "[" << sd.fs_outer_labels[k].vclass;
            for (const Int& x : sd.fs_outer_labels[k].pot) os << "," << x;
            os << "]";
        }
        os << "],\"label_legal\":" << (sides.scratch_label_legal ? "true" : "false") << "}\n";
    }
    return os.str();
}

}  // namespace foam

#include "foam/macro.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "foam/sig.hpp"

namespace foam {

namespace {

Provenance identity_prov(const Skeleton& s) {
    std::array<int, 4> counts{s.num_vertices(), s.num_edges(), s.num_triangles(), s.tri().size()};
    Provenance p(counts, counts);
    for (int k = 0; k < 4; ++k)
        for (int i = 0; i < counts[static_cast<size_t>(k)]; ++i) p.link(static_cast<CellKind>(k), i, i);
    return p;
}

std::string labelled_sig(const Triangulation& t, const Cocycle& c) {
    Skeleton s(t);
    return canonical_sig_with_cocycle(t, s, c);
}

// support propagation: descendants of supported tets plus newborn tets
std::vector<int> propagate_support(const std::vector<int>& support, const Provenance& prov) {
    std::set<int> out;
    for (int t : support)
        for (int d : prov.descendants(CellKind::Tet, t)) out.insert(d);
    for (int post = 0; post < prov.post_count(CellKind::Tet); ++post)
        if (prov.ancestors(CellKind::Tet, post).empty()) out.insert(post);
    return std::vector<int>(out.begin(), out.end());
}

struct SearchNode {
    Triangulation tri;
    Cocycle coc;
    Provenance prov;
    std::vector<MoveEvent> events;
    std::vector<int> support;
};

// Candidate moves of one kind touching the support.
std::vector<MoveEvent> candidates(const Triangulation& tri, const Skeleton& skel, const Cocycle& coc, MoveEvent::Kind kind, const std::vector<int>& support) {
    std::vector<char> in_support(static_cast<size_t>(tri.size()), 0);
    for (int t : support) in_support[t] = 1;
    std::vector<MoveEvent> out;
    if (kind == MoveEvent::Kind::TwoThree) {
        for (int k = 0; k < skel.num_triangles(); ++k) {
            const TriangleClass& tc = skel.triangle(k);
            if (!in_support[tc.front.tet] && !in_support[tc.back.tet]) continue;
            if (!is_L_flippable(tri, skel, coc, k)) continue;
            out.push_back(MoveEvent{kind, k, {}});
        }
    } else if (kind == MoveEvent::Kind::ThreeTwo) {
        for (int k = 0; k < skel.num_edges(); ++k) {
            const EdgeClass& ec = skel.edge(k);
            if (ec.degree() != 3) continue;
            bool touch = false;
            for (const EdgeFrame& f : ec.link)
                if (in_support[f.tet]) touch = true;
            if (!touch) continue;
            if (ec.link[0].tet == ec.link[1].tet || ec.link[1].tet == ec.link[2].tet || ec.link[0].tet == ec.link[2].tet) continue;
            out.push_back(MoveEvent{kind, k, {}});
        }
    }
    return out;
}

bool dfs(const SearchNode& node, const std::vector<MoveEvent::Kind>& pattern, size_t depth, const std::string& target, SearchNode& found) {
    if (depth == pattern.size()) {
        if (labelled_sig(node.tri, node.coc) == target) {
            found = node;
            return true;
        }
        return false;
    }
    Skeleton skel(node.tri);
    for (const MoveEvent& ev : candidates(node.tri, skel, node.coc, pattern[depth], node.support)) {
        MoveResult mr;
        try {
            mr = apply_event(node.tri, skel, node.coc, ev);
        } catch (const move_error&) {
            continue;
        }
        Skeleton ns(mr.tri);
        if (!is_L_essential(ns, mr.coc)) continue;
        SearchNode next;
        next.tri = std::move(mr.tri);
        next.coc = std::move(mr.coc);
        next.prov = Provenance::compose(node.prov, mr.prov);
        next.events = node.events;
        next.events.push_back(ev);
        next.support = propagate_support(node.support, mr.prov);
        if (dfs(next, pattern, depth + 1, target, found)) return true;
    }
    return false;
}

std::vector<int> widen(const Triangulation& tri, const std::vector<int>& support) {
    std::set<int> out(support.begin(), support.end());
    for (int t : support)
        for (int f = 0; f < 4; ++f) out.insert(tri.gluing(t, f).tet);
    return std::vector<int>(out.begin(), out.end());
}

MacroResult to_macro_result(SearchNode&& node, const std::string& target) {
    MacroResult r;
    r.cert.events = node.events;
    r.cert.expected_sig = target;
    r.cert.final_sig = target;
    r.cert.all_intermediate_essential = true;
    r.cert.verified = true;
    r.tri = std::move(node.tri);
    r.coc = std::move(node.coc);
    r.prov = std::move(node.prov);
    return r;
}

}  // namespace

std::optional<MacroResult> search_pattern(const Triangulation& tri, const Cocycle& c, const std::vector<MoveEvent::Kind>& pattern, const std::string& target_sig, const std::vector<int>& support_tets, bool widen_on_failure) {
    Skeleton skel(tri);
    SearchNode root{tri, c, identity_prov(skel), {}, support_tets};
    SearchNode found;
    if (dfs(root, pattern, 0, target_sig, found)) return to_macro_result(std::move(found), target_sig);
    if (widen_on_failure) {
        std::vector<int> wide = widen(tri, support_tets);
        for (int round = 0; round < 2; ++round) {
            root.support = wide;
            if (dfs(root, pattern, 0, target_sig, found)) return to_macro_result(std::move(found), target_sig);
            wide = widen(tri, wide);
        }
    }
    return std::nullopt;
}

std::optional<Arc> v_arc_along_edge(const Skeleton& skel, int tet, int a, int b) {
    int e = edge_between(std::min(a, b), std::max(a, b));
    int cls = skel.edge_class_of(tet, e);
    int d = skel.edge(cls).degree();
    if (d < 2) return std::nullopt;
    int k = skel.link_position_of(tet, e);
    int i = (k + d - 1) % d, j = k;
    Arc arc{cls, std::min(i, j), std::max(i, j), true, true};
    return arc;
}

std::optional<Arc> v_arc(const Skeleton& skel, int tet, int dir) {
    static constexpr int pairs[3][2][2] = {{{0, 1}, {2, 3}}, {{0, 2}, {1, 3}}, {{0, 3}, {1, 2}}};
    if (dir < 0 || dir > 2) return std::nullopt;
    auto arc = v_arc_along_edge(skel, tet, pairs[dir][0][0], pairs[dir][0][1]);
    if (arc) return arc;
    return v_arc_along_edge(skel, tet, pairs[dir][1][0], pairs[dir][1][1]);
}

MoveResult v_move(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, int tet, int dir) {
    auto arc = v_arc(skel, tet, dir);
    if (!arc) throw macro_error(macro_error::Code::HypothesisFailed, "no corner-cutting arc exists in this direction");
    return apply_02(tri, skel, c, *arc);
}

MacroResult expand_v_arc(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, const Arc& varc, int pivot_triangle) {
    // the flanked corner: a single link position between the two slots
    const EdgeClass& ec = skel.edge(varc.edge_class);
    int d = ec.degree();
    std::vector<int> corner_candidates;
    if (varc.slot_j == varc.slot_i + 1) corner_candidates.push_back(varc.slot_j);
    if (varc.slot_j - varc.slot_i == d - 1) corner_candidates.push_back(varc.slot_i);
    if (corner_candidates.empty()) throw macro_error(macro_error::Code::HypothesisFailed, "arc does not cut off a single corner");

    const TriangleClass& pc = skel.triangle(pivot_triangle);
    int vtet = -1;
    for (int pos : corner_candidates) {
        int t = ec.link[pos].tet;
        if (pc.front.tet == t || pc.back.tet == t) vtet = t;
    }
    if (vtet < 0)
        throw macro_error(macro_error::Code::NoFlippableIncidentEdge, "pivot triangle is not incident to the corner vertex");
    if (!is_L_flippable(tri, skel, c, pivot_triangle))
        throw macro_error(macro_error::Code::NoFlippableIncidentEdge, "pivot triangle is not flippable");

    MoveResult direct = apply_02(tri, skel, c, varc);
    std::string target = labelled_sig(direct.tri, direct.coc);

    MoveResult first = apply_23(tri, skel, c, pivot_triangle);
    Skeleton fs(first.tri);
    if (!is_L_essential(fs, first.coc)) throw macro_error(macro_error::Code::NoFlippableIncidentEdge, "pivot flip loses essentiality");

    std::vector<int> support = propagate_support({vtet, pc.front.tet, pc.back.tet}, first.prov);
    auto rest = search_pattern(first.tri, first.coc, {MoveEvent::Kind::TwoThree, MoveEvent::Kind::TwoThree, MoveEvent::Kind::ThreeTwo}, target, support);
    if (!rest) throw macro_error(macro_error::Code::SearchExhausted, "no 2-3,2-3,2-3,3-2 realisation found for the corner pillow");

    MacroResult out;
    out.cert.events = {MoveEvent{MoveEvent::Kind::TwoThree, pivot_triangle, {}}};
    out.cert.events.insert(out.cert.events.end(), rest->cert.events.begin(), rest->cert.events.end());
    out.cert.expected_sig = target;
    out.cert.final_sig = target;
    out.cert.all_intermediate_essential = true;
    out.cert.verified = true;
    out.tri = std::move(rest->tri);
    out.coc = std::move(rest->coc);
    out.prov = Provenance::compose(first.prov, rest->prov);
    return out;
}

MacroResult expand_v_move(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, int tet, int dir, int pivot_triangle) {
    auto arc = v_arc(skel, tet, dir);
    if (!arc) throw macro_error(macro_error::Code::HypothesisFailed, "no corner-cutting arc exists in this direction");
    return expand_v_arc(tri, skel, c, *arc, pivot_triangle);
}

RecoveredSnakelet recover_snakelet(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, const SnakeletHandle& h) {
    MoveResult flat = apply_20(tri, skel, c, h.bigon_class);
    RecoveredSnakelet rec;
    rec.base = flat.tri;
    rec.base_coc = flat.coc;
    rec.prov_20 = flat.prov;

    Skeleton bs(rec.base);
    // the regenerated face: the unique base edge class with two ancestors
    int ebase = -1;
    for (int k = 0; k < bs.num_edges(); ++k)
        if (flat.prov.ancestors(CellKind::Edge, k).size() == 2) ebase = k;
    if (ebase < 0) throw macro_error(macro_error::Code::HypothesisFailed, "flattening did not merge a face pair");
    // crossings: base triangle classes merged from two sides
    std::vector<int> merged;
    for (int k = 0; k < bs.num_triangles(); ++k)
        if (flat.prov.ancestors(CellKind::Triangle, k).size() == 2) merged.push_back(k);
    if (merged.size() != 2 && merged.size() != 1)
        throw macro_error(macro_error::Code::HypothesisFailed, "unexpected flattening structure");

    const EdgeClass& ec = bs.edge(ebase);
    std::vector<int> slots0, slots1;
    for (int s = 0; s < ec.degree(); ++s) {
        const EdgeFrame& fr = ec.link[s];
        int tc = bs.triangle_class_of(fr.tet, fr.p[2]);
        if (tc == merged[0]) slots0.push_back(s);
        if (merged.size() == 2 && tc == merged[1]) slots1.push_back(s);
    }
    if (merged.size() == 1) slots1 = slots0;

    std::string want = labelled_sig(tri, c);
    for (int s0 : slots0) {
        for (int s1 : slots1) {
            if (s0 == s1) continue;
            Arc cand{ebase, std::min(s0, s1), std::max(s0, s1), true, true};
            MoveResult redo = apply_02(rec.base, bs, rec.base_coc, cand);
            if (labelled_sig(redo.tri, redo.coc) == want) {
                rec.arc = cand;
                return rec;
            }
        }
    }
    throw macro_error(macro_error::Code::HypothesisFailed, "could not reconstruct the generating arc");
}

SlideOutcome slide_snakelet(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, const SnakeletHandle& h, int end_slot, int dir) {
    RecoveredSnakelet rec = recover_snakelet(tri, skel, c, h);
    Skeleton bs(rec.base);
    const EdgeClass& ec = bs.edge(rec.arc.edge_class);
    int d = ec.degree();
    int other = (end_slot == rec.arc.slot_i) ? rec.arc.slot_j : rec.arc.slot_i;
    if (end_slot != rec.arc.slot_i && end_slot != rec.arc.slot_j)
        throw macro_error(macro_error::Code::SlideBlocked, "end_slot is not an endpoint of the snakelet's arc");
    int ns = ((end_slot + dir) % d + d) % d;
    if (ns == other) throw macro_error(macro_error::Code::SlideBlocked, "the endpoint would cross the snakelet's other end");

    Arc target_arc{rec.arc.edge_class, std::min(ns, other), std::max(ns, other), true, true};
    MoveResult direct = apply_02(rec.base, bs, rec.base_coc, target_arc);
    if (!direct.label_legal) throw macro_error(macro_error::Code::TargetNotLabelLegal, "sliding the endpoint past this vertex loses essentiality");
    Skeleton ds(direct.tri);
    if (!is_L_essential(ds, direct.coc)) throw macro_error(macro_error::Code::TargetNotLabelLegal, "slide target is not essential");
    std::string target = labelled_sig(direct.tri, direct.coc);

    // support: the pillow tets and the tets at the crossed corner
    const EdgeClass& cur_bigon = skel.edge(h.bigon_class);
    std::vector<int> support{cur_bigon.link[0].tet, cur_bigon.link[1].tet};
    int corner_pos = dir > 0 ? ((end_slot + 1) % d) : end_slot;
    int corner_tet_base = ec.link[corner_pos].tet;
    for (int pre : rec.prov_20.ancestors(CellKind::Tet, corner_tet_base)) support.push_back(pre);
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());

    auto found = search_pattern(tri, c, {MoveEvent::Kind::TwoThree, MoveEvent::Kind::ThreeTwo}, target, support);
    if (!found) throw macro_error(macro_error::Code::SearchExhausted, "no 2-3,3-2 realisation of the slide found");

    SlideOutcome out{std::move(*found), {}};
    // the slide rebuilds the pocket, so locate the new bigon through the
    // labelled isomorphism with the directly constructed target state
    Skeleton ds2(out.result.tri);
    auto w = iso_labelled(direct.tri, ds, direct.coc, out.result.tri, ds2, out.result.coc);
    if (!w) throw macro_error(macro_error::Code::HypothesisFailed, "slide endpoint does not match the direct state");
    int pb = rec.base.size();  // first pillow tet in the direct state
    int it = w->tet_image[pb];
    int ia = w->perm_image[pb][0], ib = w->perm_image[pb][1];
    out.handle.bigon_class = ds2.edge_class_of(it, std::min(ia, ib), std::max(ia, ib));
    if (ds2.edge(out.handle.bigon_class).degree() != 2)
        throw macro_error(macro_error::Code::HypothesisFailed, "relocated pocket bigon is not a bigon");
    return out;
}

MacroResult remove_snakelet(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, const SnakeletHandle& h) {
    MoveResult flat = apply_20(tri, skel, c, h.bigon_class);
    std::string target = labelled_sig(flat.tri, flat.coc);
    const EdgeClass& big = skel.edge(h.bigon_class);
    std::vector<int> support{big.link[0].tet, big.link[1].tet};
    auto found = search_pattern(tri, c, {MoveEvent::Kind::TwoThree, MoveEvent::Kind::ThreeTwo, MoveEvent::Kind::ThreeTwo, MoveEvent::Kind::ThreeTwo}, target, support);
    if (!found) throw macro_error(macro_error::Code::SearchExhausted, "no 2-3,3-2,3-2,3-2 removal found");
    return std::move(*found);
}

std::vector<Arc> relocate_arc_all(const Arc& arc, const Skeleton& pre_skel, const Provenance& prov, const Skeleton& post_skel) {
    std::vector<Arc> out;
    const auto& desc = prov.descendants(CellKind::Edge, arc.edge_class);
    const EdgeClass& pre_ec = pre_skel.edge(arc.edge_class);
    auto pre_crossing_class = [&](int slot) {
        const EdgeFrame& fr = pre_ec.link[slot];
        return pre_skel.triangle_class_of(fr.tet, fr.p[2]);
    };
    std::set<int> ok0, ok1;
    for (int d : prov.descendants(CellKind::Triangle, pre_crossing_class(arc.slot_i))) ok0.insert(d);
    for (int d : prov.descendants(CellKind::Triangle, pre_crossing_class(arc.slot_j))) ok1.insert(d);
    for (int cand : desc) {
        const EdgeClass& ec = post_skel.edge(cand);
        std::vector<int> s0, s1;
        for (int s = 0; s < ec.degree(); ++s) {
            const EdgeFrame& fr = ec.link[s];
            int tc = post_skel.triangle_class_of(fr.tet, fr.p[2]);
            if (ok0.count(tc)) s0.push_back(s);
            if (ok1.count(tc)) s1.push_back(s);
        }
        for (int a : s0)
            for (int b : s1) {
                if (a == b) continue;
                out.push_back(Arc{cand, std::min(a, b), std::max(a, b), arc.head_at_j, arc.pocket_side_a});
            }
    }
    std::sort(out.begin(), out.end(), [](const Arc& x, const Arc& y) {
        if (x.edge_class != y.edge_class) return x.edge_class < y.edge_class;
        if (x.slot_i != y.slot_i) return x.slot_i < y.slot_i;
        return x.slot_j < y.slot_j;
    });
    out.erase(std::unique(out.begin(), out.end(), [](const Arc& x, const Arc& y) {
        return x.edge_class == y.edge_class && x.slot_i == y.slot_i && x.slot_j == y.slot_j;
    }), out.end());
    return out;
}

ArcRelocation relocate_arc(const Arc& arc, const Skeleton& pre_skel, const Provenance& prov, const Triangulation& post_tri, const Skeleton& post_skel, const std::vector<std::pair<int, int>>& crossing_hint) {
    (void)post_tri;
    ArcRelocation out;
    const auto& desc = prov.descendants(CellKind::Edge, arc.edge_class);
    if (desc.empty()) {
        out.error = "the arc's face has no descendant";
        return out;
    }
    const EdgeClass& pre_ec = pre_skel.edge(arc.edge_class);
    auto pre_crossing_class = [&](int slot) {
        const EdgeFrame& fr = pre_ec.link[slot];
        return pre_skel.triangle_class_of(fr.tet, fr.p[2]);
    };
    int pre_c0 = pre_crossing_class(arc.slot_i);
    int pre_c1 = pre_crossing_class(arc.slot_j);
    auto allowed = [&](int pre_c) {
        std::set<int> ok;
        for (auto& [p, q] : crossing_hint)
            if (p == pre_c) ok.insert(q);
        if (ok.empty())
            for (int d : prov.descendants(CellKind::Triangle, pre_c)) ok.insert(d);
        return ok;
    };
    std::set<int> ok0 = allowed(pre_c0), ok1 = allowed(pre_c1);

    for (int cand : desc) {
        const EdgeClass& ec = post_skel.edge(cand);
        std::vector<int> s0, s1;
        for (int s = 0; s < ec.degree(); ++s) {
            const EdgeFrame& fr = ec.link[s];
            int tc = post_skel.triangle_class_of(fr.tet, fr.p[2]);
            if (ok0.count(tc)) s0.push_back(s);
            if (ok1.count(tc)) s1.push_back(s);
        }
        if (s0.empty() || s1.empty()) continue;
        // deterministic: smallest admissible pair
        for (int a : s0)
            for (int b : s1) {
                if (a == b) continue;
                out.arc = Arc{cand, std::min(a, b), std::max(a, b), arc.head_at_j, arc.pocket_side_a};
                out.ok = true;
                return out;
            }
    }
    out.error = "no descendant face holds both relocated endpoints";
    return out;
}

namespace {

// Converts an isomorphism witness into a cell-class correspondence.
Provenance relabel_prov(const Skeleton& from, const Skeleton& to, const Relabelling& w) {
    std::array<int, 4> pre{from.num_vertices(), from.num_edges(), from.num_triangles(), from.tri().size()};
    std::array<int, 4> post{to.num_vertices(), to.num_edges(), to.num_triangles(), to.tri().size()};
    Provenance p(pre, post);
    for (int t = 0; t < from.tri().size(); ++t) {
        p.link(CellKind::Tet, t, w.tet_image[t]);
        for (int v = 0; v < 4; ++v) p.link(CellKind::Vertex, from.vertex_class_of(t, v), to.vertex_class_of(w.tet_image[t], w.perm_image[t][v]));
        for (int f = 0; f < 4; ++f) p.link(CellKind::Triangle, from.triangle_class_of(t, f), to.triangle_class_of(w.tet_image[t], w.perm_image[t][f]));
        for (int e = 0; e < 6; ++e) {
            int a = w.perm_image[t][EDGE_ENDS[e][0]], b = w.perm_image[t][EDGE_ENDS[e][1]];
            p.link(CellKind::Edge, from.edge_class_of(t, e), to.edge_class_of(w.tet_image[t], std::min(a, b), std::max(a, b)));
        }
    }
    return p;
}

// Threads a growing event list with its state and two provenances: the
// elementary one (through every 2-3/3-2) and the macro-level one, which
// follows each expanded step through its direct move so cells keep their
// names across temporary destruction (the ancestor-naming convention).
struct MacroChain {
    Triangulation tri;
    Cocycle coc;
    std::vector<MoveEvent> events;
    Provenance prov;       // elementary
    Provenance cell_prov;  // macro-level

    MacroChain(const Triangulation& t, const Cocycle& c0) : tri(t), coc(c0) {
        Skeleton s(t);
        prov = identity_prov(s);
        cell_prov = prov;
    }

    void absorb_event(const MoveEvent& ev) {
        Skeleton s(tri);
        MoveResult mr = apply_event(tri, s, coc, ev);
        events.push_back(ev);
        prov = Provenance::compose(prov, mr.prov);
        cell_prov = Provenance::compose(cell_prov, mr.prov);
        tri = std::move(mr.tri);
        coc = std::move(mr.coc);
    }

    MacroResult finish(const std::string& expected, const Triangulation& input, const Cocycle& input_coc) {
        MacroResult out;
        out.cert.events = events;
        out.cert.expected_sig = expected;
        out.tri = tri;
        out.coc = coc;
        out.prov = prov;
        if (!verify_certificate(input, input_coc, out.cert))
            throw macro_error(macro_error::Code::HypothesisFailed, "compiled certificate failed verification: " + out.cert.final_sig + " != " + expected);
        return out;
    }
};

// Tracks one tetrahedron (and its slot frame) through macro steps whose
// endpoints are isomorphic to directly computed states.
struct TetTracker {
    int tet;
    Perm4 frame;  // original slots -> current slots

    void through(const Relabelling& w) {
        frame = frame.then(w.perm_image[tet]);
        tet = w.tet_image[tet];
    }
};

// Expands the 0-2 move along a corner-cutting arc and keeps the pocket
// handle, tracked tets and the macro-level provenance up to date.
void expand_corner_pillow(MacroChain& chain, const Arc& varc, int pivot, SnakeletHandle* handle, std::vector<TetTracker*> tracked) {
    Skeleton s(chain.tri);
    MoveResult direct = apply_02(chain.tri, s, chain.coc, varc);
    int pillow_tet = chain.tri.size();
    MacroResult mr = expand_v_arc(chain.tri, s, chain.coc, varc, pivot);
    Skeleton ds(direct.tri), ns(mr.tri);
    auto w = iso_labelled(direct.tri, ds, direct.coc, mr.tri, ns, mr.coc);
    if (!w) throw macro_error(macro_error::Code::HypothesisFailed, "corner pillow expansion does not match the direct move");
    if (handle) {
        int it = w->tet_image[pillow_tet];
        int ia = w->perm_image[pillow_tet][0], ib = w->perm_image[pillow_tet][1];
        handle->bigon_class = ns.edge_class_of(it, std::min(ia, ib), std::max(ia, ib));
    }
    for (TetTracker* t : tracked) t->through(*w);
    Provenance step = Provenance::compose(direct.prov, relabel_prov(ds, ns, *w));
    chain.cell_prov = Provenance::compose(chain.cell_prov, step);
    chain.events.insert(chain.events.end(), mr.cert.events.begin(), mr.cert.events.end());
    chain.prov = Provenance::compose(chain.prov, mr.prov);
    chain.tri = std::move(mr.tri);
    chain.coc = std::move(mr.coc);
}

}  // namespace

MacroResult augmented_23(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, int tclass, bool u_is_front) {
    if (!is_L_flippable(tri, skel, c, tclass)) throw macro_error(macro_error::Code::NotFlippable, "edge is not flippable");
    const TriangleClass& tc = skel.triangle(tclass);
    const FaceLoc ue = u_is_front ? tc.front : tc.back;

    // independent target: three corner pillows at u, then the 2-3
    auto run_direct = [&]() {
        Triangulation dt = tri;
        Cocycle dc = c;
        for (int x = 0; x < 4; ++x) {
            if (x == ue.face) continue;
            Skeleton ds(dt);
            auto arc = v_arc_along_edge(ds, ue.tet, ue.face, x);
            if (!arc) {
                int y = -1, z = -1;
                for (int q = 0; q < 4; ++q)
                    if (q != ue.face && q != x) (y < 0 ? y : z) = q;
                arc = v_arc_along_edge(ds, ue.tet, y, z);
            }
            if (!arc) throw macro_error(macro_error::Code::HypothesisFailed, "no protected corner arc at the initial vertex");
            MoveResult mr = apply_02(dt, ds, dc, *arc);
            dt = std::move(mr.tri);
            dc = std::move(mr.coc);
        }
        Skeleton ds(dt);
        MoveResult fin = apply_23(dt, ds, dc, ds.triangle_class_of(ue.tet, ue.face));
        return labelled_sig(fin.tri, fin.coc);
    };
    std::string expected = run_direct();

    MacroChain chain(tri, c);
    TetTracker u{ue.tet, Perm4()};
    for (int x = 0; x < 4; ++x) {
        if (x == ue.face) continue;
        Skeleton s(chain.tri);
        int s_cur = u.frame[ue.face];
        int x_cur = u.frame[x];
        auto arc = v_arc_along_edge(s, u.tet, s_cur, x_cur);
        if (!arc) {
            int y = -1, z = -1;
            for (int q = 0; q < 4; ++q)
                if (q != s_cur && q != x_cur) (y < 0 ? y : z) = q;
            arc = v_arc_along_edge(s, u.tet, y, z);
        }
        if (!arc) throw macro_error(macro_error::Code::HypothesisFailed, "no protected corner arc at the initial vertex");
        int pivot = s.triangle_class_of(u.tet, s_cur);
        expand_corner_pillow(chain, *arc, pivot, nullptr, {&u});
    }
    Skeleton s(chain.tri);
    int final_t = s.triangle_class_of(u.tet, u.frame[ue.face]);
    if (!is_L_flippable(chain.tri, s, chain.coc, final_t))
        throw macro_error(macro_error::Code::HypothesisFailed, "the protected edge lost flippability");
    chain.absorb_event(MoveEvent{MoveEvent::Kind::TwoThree, final_t, {}});
    return chain.finish(expected, tri, c);
}

ReserveOutcome nature_reserve(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, int tclass, bool p_is_front, int green_choice) {
    if (!is_L_flippable(tri, skel, c, tclass)) throw macro_error(macro_error::Code::NotFlippable, "edge is not flippable");
    const TriangleClass& tc = skel.triangle(tclass);
    const FaceLoc pe = p_is_front ? tc.front : tc.back;

    int others[3];
    int m = 0;
    for (int q = 0; q < 4; ++q)
        if (q != pe.face) others[m++] = q;
    if (green_choice < 0 || green_choice > 2) throw macro_error(macro_error::Code::NoValidP, "green choice out of range");
    // the splitting pillow's arc runs in the face dual to {y,z}; it cuts the
    // edge's end at p together with the end at `w`
    int wslot = others[green_choice];
    int y = -1, z = -1;
    for (int q : others)
        if (q != wslot) (y < 0 ? y : z) = q;

    MacroChain chain(tri, c);
    TetTracker p{pe.tet, Perm4()};

    auto protected_arc = [&](const Skeleton& s, int s_cur, int x_cur) {
        auto arc = v_arc_along_edge(s, p.tet, s_cur, x_cur);
        if (arc) return arc;
        int yy = -1, zz = -1;
        for (int q = 0; q < 4; ++q)
            if (q != s_cur && q != x_cur) (yy < 0 ? yy : zz) = q;
        return v_arc_along_edge(s, p.tet, yy, zz);
    };

    for (int x = 0; x < 4; ++x) {
        if (x == pe.face) continue;
        Skeleton s(chain.tri);
        auto arc = protected_arc(s, p.frame[pe.face], p.frame[x]);
        if (!arc) throw macro_error(macro_error::Code::HypothesisFailed, "no protected corner arc at p");
        expand_corner_pillow(chain, *arc, s.triangle_class_of(p.tet, p.frame[pe.face]), nullptr, {&p});
    }
    // the green pillow: cuts the edge's end at p
    {
        Skeleton s(chain.tri);
        auto arc = v_arc_along_edge(s, p.tet, p.frame[y], p.frame[z]);
        if (!arc) arc = v_arc_along_edge(s, p.tet, p.frame[pe.face], p.frame[wslot]);
        if (!arc) throw macro_error(macro_error::Code::HypothesisFailed, "no splitting corner arc at p");
        int pivot = s.triangle_class_of(p.tet, p.frame[pe.face]);
        expand_corner_pillow(chain, *arc, pivot, nullptr, {&p});
    }

    ReserveOutcome out;
    Skeleton fin(chain.tri);
    out.reserve_tclass = fin.triangle_class_of(p.tet, p.frame[pe.face]);
    const auto& descs = chain.cell_prov.descendants(CellKind::Triangle, tclass);
    for (int d : descs)
        if (d != out.reserve_tclass) out.remainder_tclass = d;
    if (out.remainder_tclass < 0 || descs.size() != 2)
        throw macro_error(macro_error::Code::HypothesisFailed, "reserve split did not produce two descendants");
    if (std::find(descs.begin(), descs.end(), out.reserve_tclass) == descs.end())
        throw macro_error(macro_error::Code::HypothesisFailed, "reserve edge does not descend from the input edge");
    if (!is_L_flippable(chain.tri, fin, chain.coc, out.remainder_tclass))
        throw macro_error(macro_error::Code::HypothesisFailed, "remainder edge is not flippable");

    // independent target: the four direct pillows in the same order
    auto run_direct = [&]() {
        Triangulation dt = tri;
        Cocycle dc = c;
        auto direct_pillow = [&](int a, int b, int fa, int fb) {
            Skeleton ds(dt);
            auto arc = v_arc_along_edge(ds, pe.tet, a, b);
            if (!arc) arc = v_arc_along_edge(ds, pe.tet, fa, fb);
            if (!arc) throw macro_error(macro_error::Code::HypothesisFailed, "no corner arc in the direct chain");
            MoveResult mr = apply_02(dt, ds, dc, *arc);
            dt = std::move(mr.tri);
            dc = std::move(mr.coc);
        };
        for (int x = 0; x < 4; ++x) {
            if (x == pe.face) continue;
            int yy = -1, zz = -1;
            for (int q = 0; q < 4; ++q)
                if (q != pe.face && q != x) (yy < 0 ? yy : zz) = q;
            direct_pillow(pe.face, x, yy, zz);
        }
        direct_pillow(y, z, pe.face, wslot);
        return labelled_sig(dt, dc);
    };
    out.result = chain.finish(run_direct(), tri, c);
    return out;
}

namespace {

// An edge class tracked by one of its model-edge representatives.
struct EdgeTracker {
    int tet = -1;
    int a = 0, b = 1;

    void through_witness(const Relabelling& w) {
        int na = w.perm_image[tet][a], nb = w.perm_image[tet][b];
        tet = w.tet_image[tet];
        a = std::min(na, nb);
        b = std::max(na, nb);
    }
    void through_tet_map(const Provenance& prov) {
        tet = prov.unique_descendant(CellKind::Tet, tet);
        if (tet < 0) throw macro_error(macro_error::Code::HypothesisFailed, "tracked edge lost its tetrahedron");
    }
    int cls(const Skeleton& s) const { return s.edge_class_of(tet, a, b); }
    static EdgeTracker of(const Skeleton& s, int edge_class) {
        const EdgeFrame& fr = s.edge(edge_class).link.front();
        int a = fr.p[0], b = fr.p[1];
        return EdgeTracker{fr.tet, std::min(a, b), std::max(a, b)};
    }
};

// Absorbs a verified sub-macro into the chain: events and elementary
// provenance are appended; the macro-level provenance goes through the
// direct state; edge trackers ride the witness.
void absorb_step(MacroChain& chain, MacroResult&& mr, const Triangulation& direct_tri, const Cocycle& direct_coc, const Provenance& direct_prov, std::vector<EdgeTracker*> tracked, std::vector<EdgeTracker*> tracked_direct = {}) {
    Skeleton ds(direct_tri), ns(mr.tri);
    auto w = iso_labelled(direct_tri, ds, direct_coc, mr.tri, ns, mr.coc);
    if (!w) throw macro_error(macro_error::Code::HypothesisFailed, "sub-macro endpoint does not match its direct state");
    for (EdgeTracker* t : tracked) {
        t->through_tet_map(direct_prov);
        t->through_witness(*w);
    }
    for (EdgeTracker* t : tracked_direct) t->through_witness(*w);
    chain.cell_prov = Provenance::compose(chain.cell_prov, Provenance::compose(direct_prov, relabel_prov(ds, ns, *w)));
    chain.events.insert(chain.events.end(), mr.cert.events.begin(), mr.cert.events.end());
    chain.prov = Provenance::compose(chain.prov, mr.prov);
    chain.tri = std::move(mr.tri);
    chain.coc = std::move(mr.coc);
}

// Slide with the direct provenance threaded for absorb_step.
struct SlidePlan {
    SlideOutcome outcome;
    Triangulation direct_tri;
    Cocycle direct_coc;
    Provenance direct_prov;  // current -> direct target (through the flattening)
};

SlidePlan plan_slide(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, const SnakeletHandle& h, int end_slot, int dir) {
    RecoveredSnakelet rec = recover_snakelet(tri, skel, c, h);
    Skeleton bs(rec.base);
    const EdgeClass& ec = bs.edge(rec.arc.edge_class);
    int d = ec.degree();
    int other = (end_slot == rec.arc.slot_i) ? rec.arc.slot_j : rec.arc.slot_i;
    int ns = ((end_slot + dir) % d + d) % d;
    if (end_slot != rec.arc.slot_i && end_slot != rec.arc.slot_j)
        throw macro_error(macro_error::Code::SlideBlocked, "end_slot is not an endpoint of the snakelet's arc");
    if (ns == other) throw macro_error(macro_error::Code::SlideBlocked, "the endpoint would cross the snakelet's other end");
    Arc target_arc{rec.arc.edge_class, std::min(ns, other), std::max(ns, other), true, true};
    MoveResult direct = apply_02(rec.base, bs, rec.base_coc, target_arc);
    SlidePlan plan;
    plan.outcome = slide_snakelet(tri, skel, c, h, end_slot, dir);
    plan.direct_tri = direct.tri;
    plan.direct_coc = direct.coc;
    plan.direct_prov = Provenance::compose(rec.prov_20, direct.prov);
    return plan;
}

// All legal one-step slides of a snakelet, deterministically ordered.
std::vector<std::pair<int, int>> slide_options(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, const SnakeletHandle& h) {
    RecoveredSnakelet rec = recover_snakelet(tri, skel, c, h);
    std::vector<std::pair<int, int>> out;
    for (int end : {rec.arc.slot_i, rec.arc.slot_j})
        for (int dir : {+1, -1}) out.push_back({end, dir});
    return out;
}

// Slides a snakelet around until a reverse corner-pillow removal applies;
// flattening is position-independent, so any successful removal yields the
// same base.  Breadth-first with labelled-sig dedup; tracker values ride
// in the nodes and flow back along the successful branch.
void deconstruct_snakelet(MacroChain& chain, SnakeletHandle h, std::vector<EdgeTracker*> tracked, int max_slides) {
    struct Node {
        MacroChain chain;
        SnakeletHandle h;
        std::vector<EdgeTracker> vals;
        int depth;
    };
    std::vector<EdgeTracker> init;
    for (EdgeTracker* t : tracked) init.push_back(*t);
    std::vector<Node> frontier{{chain, h, init, 0}};
    std::set<std::string> seen{labelled_sig(chain.tri, chain.coc)};
    for (size_t q = 0; q < frontier.size(); ++q) {
        Node node = frontier[q];
        Skeleton s(node.chain.tri);
        try {
            MoveResult flat = apply_20(node.chain.tri, s, node.chain.coc, node.h.bigon_class);
            MacroResult rem = remove_snakelet(node.chain.tri, s, node.chain.coc, node.h);
            MacroChain done = node.chain;
            std::vector<EdgeTracker> vals = node.vals;
            std::vector<EdgeTracker*> ptrs;
            for (auto& v : vals) ptrs.push_back(&v);
            absorb_step(done, std::move(rem), flat.tri, flat.coc, flat.prov, ptrs);
            chain = std::move(done);
            for (size_t i = 0; i < tracked.size(); ++i) *tracked[i] = vals[i];
            return;
        } catch (const std::exception&) {
            // not removable here; keep sliding
        }
        if (node.depth >= max_slides) continue;
        for (auto [end, dir] : slide_options(node.chain.tri, s, node.chain.coc, node.h)) {
            try {
                SlidePlan plan = plan_slide(node.chain.tri, s, node.chain.coc, node.h, end, dir);
                MacroChain next = node.chain;
                SnakeletHandle nh = plan.outcome.handle;
                std::vector<EdgeTracker> vals = node.vals;
                std::vector<EdgeTracker*> ptrs;
                for (auto& v : vals) ptrs.push_back(&v);
                absorb_step(next, std::move(plan.outcome.result), plan.direct_tri, plan.direct_coc, plan.direct_prov, ptrs);
                std::string sig = labelled_sig(next.tri, next.coc);
                if (!seen.insert(sig).second) continue;
                frontier.push_back({std::move(next), nh, std::move(vals), node.depth + 1});
            } catch (const macro_error&) {
                continue;
            }
        }
    }
    throw macro_error(macro_error::Code::SearchExhausted, "helper snakelet could not be deconstructed");
}

// Relocates the target arc through the chain's macro-level provenance.
Arc chain_relocate(const MacroChain& chain, const Skeleton& orig_skel, const Arc& arc, const Skeleton& cur_skel) {
    ArcRelocation rel = relocate_arc(arc, orig_skel, chain.cell_prov, chain.tri, cur_skel);
    if (!rel.ok) throw macro_error(macro_error::Code::HypothesisFailed, "arc relocation failed: " + rel.error);
    return rel.arc;
}

}  // namespace

namespace {

// Compiles a three-edge-side arc, assuming the hypotheses were already
// established by the caller (the entry point checks them; the many-edges
// reduction guarantees them structurally).  Soundness rests on the final
// sig comparison either way.
MacroResult compile_three_sides(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, const Arc& arc, const SideWitness& w);

}  // namespace

MacroResult do_02_three_sides(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, const Arc& arc) {
    CheckFailure why;
    auto w = check_three_sides(tri, skel, c, arc, &why);
    if (!w) throw macro_error(macro_error::Code::HypothesisFailed, why.hypothesis);
    return compile_three_sides(tri, skel, c, arc, *w);
}

namespace {

MacroResult compile_three_sides(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, const Arc& arc, const SideWitness& wref) {
    const SideWitness* w = &wref;
    MoveResult direct = apply_02(tri, skel, c, arc);
    std::string target = labelled_sig(direct.tri, direct.coc);

    ArcSides sides = arc_sides(tri, skel, c, arc);
    const SideDescriptor& sd = w->side_a ? sides.a : sides.b;

    // the corner pillow at the vertex between e_0 and e_1
    int s0 = sd.slots[0], s1 = sd.slots[1];
    Arc red_arc{arc.edge_class, std::min(s0, s1), std::max(s0, s1), true, true};

    MacroChain chain(tri, c);
    SnakeletHandle red;
    {
        std::vector<int> pivots{sd.edge_classes[1], sd.edge_classes[0]};
        for (int f : flippable_triangles(tri, skel, c)) {
            const TriangleClass& ftc = skel.triangle(f);
            if (ftc.front.tet == sd.vertex_tets[0] || ftc.back.tet == sd.vertex_tets[0]) pivots.push_back(f);
        }
        bool built = false;
        std::string err;
        for (int pivot : pivots) {
            try {
                MacroChain trial(tri, c);
                SnakeletHandle h;
                expand_corner_pillow(trial, red_arc, pivot, &h, {});
                chain = std::move(trial);
                red = h;
                built = true;
                break;
            } catch (const std::exception& e) {
                err = e.what();
                continue;
            }
        }
        if (!built) throw macro_error(macro_error::Code::HypothesisFailed, "corner pillow could not be built: " + err);
    }

    // one slide moves the pocket end from the e_1 crossing to e_2
    Skeleton s(chain.tri);
    for (auto [end, dir] : slide_options(chain.tri, s, chain.coc, red)) {
        try {
            SlidePlan plan = plan_slide(chain.tri, s, chain.coc, red, end, dir);
            if (labelled_sig(plan.outcome.result.tri, plan.outcome.result.coc) != target) continue;
            MacroChain done = chain;
            absorb_step(done, std::move(plan.outcome.result), plan.direct_tri, plan.direct_coc, plan.direct_prov, {});
            return done.finish(target, tri, c);
        } catch (const std::exception&) {
            continue;
        }
    }
    throw macro_error(macro_error::Code::HypothesisFailed, "swap case: single slide does not reach the 0-2 state");
}

}  // namespace

MacroResult do_02_many_edges(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, const Arc& arc) {
    CheckFailure why;
    auto w = check_many_edges(tri, skel, c, arc, &why);
    if (!w) throw macro_error(macro_error::Code::HypothesisFailed, why.hypothesis);

    ArcSides sides0 = arc_sides(tri, skel, c, arc);
    const SideDescriptor& sd0 = w->side_a ? sides0.a : sides0.b;
    const int m = sd0.edge_count() - 1;  // edges e_0..e_m
    const int k = w->k;
    if (m + 1 == 3) return do_02_three_sides(tri, skel, c, arc);

    MoveResult direct = apply_02(tri, skel, c, arc);
    std::string target = labelled_sig(direct.tri, direct.coc);

    MacroChain chain(tri, c);

    // Joint relocation: among all candidate relocations of the arc, pick
    // the one whose located side aligns best with the original side.
    auto side_score = [&](const SideDescriptor& cand) {
        auto descends = [&](int cls, int orig) {
            for (int anc : chain.cell_prov.ancestors(CellKind::Triangle, cls))
                if (anc == orig) return true;
            return false;
        };
        int n = cand.edge_count();
        int sc = 0;
        if (n >= 2 && descends(cand.edge_classes[0], sd0.edge_classes[0])) sc += 8;
        if (n >= 2 && descends(cand.edge_classes[n - 1], sd0.edge_classes[m])) sc += 8;
        for (int q = 1; q + 1 < n; ++q)
            if (descends(cand.edge_classes[q], sd0.edge_classes[k])) sc += 4;
        for (int q = 0; q < n; ++q)
            for (int orig : sd0.edge_classes)
                if (descends(cand.edge_classes[q], orig)) ++sc;
        sc -= n;  // shorter reads are better when otherwise tied
        return sc;
    };
    auto best_relocation = [&]() -> std::pair<Arc, SideDescriptor> {
        Skeleton cs(chain.tri);
        std::vector<Arc> cands = relocate_arc_all(arc, skel, chain.cell_prov, cs);
        if (cands.empty()) throw macro_error(macro_error::Code::HypothesisFailed, "arc relocation failed: no candidates");
        const Arc* best_arc = nullptr;
        SideDescriptor best_sd;
        int best_sc = std::numeric_limits<int>::min();
        std::vector<Arc> flipped;
        for (const Arc& cand : cands) {
            Arc f = cand;
            f.head_at_j = !f.head_at_j;
            flipped.push_back(f);
        }
        cands.insert(cands.end(), flipped.begin(), flipped.end());
        for (const Arc& cand : cands) {
            ArcSides as = arc_sides(chain.tri, cs, chain.coc, cand);
            for (const SideDescriptor* sdp : {&as.a, &as.b}) {
                int sc = side_score(*sdp);
                if (sc > best_sc) {
                    best_sc = sc;
                    best_arc = &cand;
                    best_sd = *sdp;
                }
            }
        }
        return {*best_arc, best_sd};
    };
    auto current_side = [&]() { return best_relocation().second; };

    // a reduced side is admissible when it still runs from a descendant of
    // e_0 to one of e_m with the distinguished edge in its interior
    auto side_admissible = [&](const SideDescriptor& sd) {
        auto descends = [&](int cls, int orig) {
            for (int anc : chain.cell_prov.ancestors(CellKind::Triangle, cls))
                if (anc == orig) return true;
            return false;
        };
        int n = sd.edge_count();
        if (n < 3) return false;
        if (!descends(sd.edge_classes[0], sd0.edge_classes[0])) return false;
        if (!descends(sd.edge_classes[n - 1], sd0.edge_classes[m])) return false;
        for (int q = 1; q + 1 < n; ++q)
            if (descends(sd.edge_classes[q], sd0.edge_classes[k])) return true;
        return false;
    };

    // pockets are recognisable structurally: degree-2 classes that do not
    // descend from the original complex
    auto pockets_of = [](const MacroChain& ch, const Skeleton& cs, int excluded) {
        std::vector<int> out;
        for (int q = 0; q < cs.num_edges(); ++q) {
            if (q == excluded || cs.edge(q).degree() != 2) continue;
            if (ch.cell_prov.ancestors(CellKind::Edge, q).empty()) out.push_back(q);
        }
        return out;
    };

    // Greedy reduction: accept any slide that strictly shrinks the side.
    auto try_shrink_step = [&](SnakeletHandle& mover, int before) -> bool {
        Skeleton cs(chain.tri);
        for (auto [end, dir] : slide_options(chain.tri, cs, chain.coc, mover)) {
            MacroChain trial = chain;
            SnakeletHandle tm;
            try {
                Skeleton ts0(trial.tri);
                SlidePlan plan = plan_slide(trial.tri, ts0, trial.coc, mover, end, dir);
                tm = plan.outcome.handle;
                absorb_step(trial, std::move(plan.outcome.result), plan.direct_tri, plan.direct_coc, plan.direct_prov, {});
            } catch (const std::exception&) {
                continue;
            }
            std::swap(chain, trial);
            int after = -1;
            try {
                SideDescriptor sd = current_side();
                if (side_admissible(sd)) after = sd.edge_count();
            } catch (const std::exception&) {
            }
            if (after >= 0 && after < before) {
                mover = tm;
                return true;
            }
            std::swap(chain, trial);  // rollback
        }
        return false;
    };

    auto shrink_greedy = [&](SnakeletHandle& mover, SnakeletHandle* dodger, int goal) {
        int guard = 4 * (m + 3);
        while (true) {
            SideDescriptor sd = current_side();
            if (!side_admissible(sd)) throw macro_error(macro_error::Code::HypothesisFailed, "side became inadmissible");
            int before = sd.edge_count();
            if (before <= goal) return;
            if (--guard < 0) throw macro_error(macro_error::Code::SearchExhausted, "greedy side reduction did not converge");
            if (try_shrink_step(mover, before)) continue;
            if (!dodger) throw macro_error(macro_error::Code::SearchExhausted, "greedy side reduction stalled");
            // dodge: step the other pocket out of the way, retry, step back
            bool dodged = false;
            Skeleton cs(chain.tri);
            for (auto [dend, ddir] : slide_options(chain.tri, cs, chain.coc, *dodger)) {
                MacroChain saved = chain;
                SnakeletHandle saved_m = mover, saved_d = *dodger;
                try {
                    Skeleton ts0(chain.tri);
                    SlidePlan back = plan_slide(chain.tri, ts0, chain.coc, *dodger, dend, ddir);
                    SnakeletHandle d2 = back.outcome.handle;
                    absorb_step(chain, std::move(back.outcome.result), back.direct_tri, back.direct_coc, back.direct_prov, {});
                    {
                        Skeleton ts1(chain.tri);
                        auto others = pockets_of(chain, ts1, d2.bigon_class);
                        if (others.size() != 1) throw macro_error(macro_error::Code::SlideBlocked, "pocket bookkeeping lost");
                        mover.bigon_class = others.front();
                    }
                    if (!try_shrink_step(mover, before)) throw macro_error(macro_error::Code::SlideBlocked, "still blocked");
                    // step the dodger forward again if possible; not fatal
                    Skeleton ts2(chain.tri);
                    for (auto [e2, dir2] : slide_options(chain.tri, ts2, chain.coc, d2)) {
                        try {
                            SlidePlan fwd = plan_slide(chain.tri, ts2, chain.coc, d2, e2, dir2);
                            MacroChain t2 = chain;
                            absorb_step(t2, std::move(fwd.outcome.result), fwd.direct_tri, fwd.direct_coc, fwd.direct_prov, {});
                            chain = std::move(t2);
                            Skeleton ts3(chain.tri);
                            *dodger = fwd.outcome.handle;
                            auto others = pockets_of(chain, ts3, dodger->bigon_class);
                            if (others.size() == 1) mover.bigon_class = others.front();
                            break;
                        } catch (const std::exception&) {
                            continue;
                        }
                    }
                    dodged = true;
                    break;
                } catch (const std::exception&) {
                    chain = std::move(saved);
                    mover = saved_m;
                    *dodger = saved_d;
                    continue;
                }
            }
            if (!dodged) throw macro_error(macro_error::Code::SearchExhausted, "dodge manoeuvre failed");
        }
    };

    // Best-first fallback over pocket slides; sideways moves allowed.
    auto shrink_search = [&](SnakeletHandle& mover, SnakeletHandle* dodger, int goal) {
        struct Node {
            MacroChain chain;
            SnakeletHandle mv, dg;
            int len;
        };
        auto measure = [&](MacroChain ch) -> int {
            MacroChain saved = std::move(chain);
            chain = std::move(ch);
            int len = -1;
            try {
                SideDescriptor sd = current_side();
                if (side_admissible(sd)) len = sd.edge_count();
            } catch (const std::exception&) {
            }
            chain = std::move(saved);
            return len;
        };
        if (int l0 = measure(chain); l0 >= 0 && l0 <= goal) return;

        std::vector<Node> heap;
        std::set<std::string> seen;
        {
            Node root{chain, mover, dodger ? *dodger : SnakeletHandle{}, 0};
            root.len = measure(root.chain);
            if (root.len < 0) throw macro_error(macro_error::Code::HypothesisFailed, "side location failed before reduction");
            seen.insert(labelled_sig(root.chain.tri, root.chain.coc));
            heap.push_back(std::move(root));
        }
        int expansions = 0;
        const int max_expansions = 30 + 10 * m;
        while (!heap.empty()) {
            auto best = std::min_element(heap.begin(), heap.end(), [](const Node& a, const Node& b) { return a.len < b.len; });
            Node node = std::move(*best);
            heap.erase(best);
            if (++expansions > max_expansions) break;
            std::vector<std::pair<bool, std::pair<int, int>>> opts;
            {
                Skeleton cs(node.chain.tri);
                for (auto [e2, d2] : slide_options(node.chain.tri, cs, node.chain.coc, node.mv)) opts.push_back({true, {e2, d2}});
                if (dodger)
                    for (auto [e2, d2] : slide_options(node.chain.tri, cs, node.chain.coc, node.dg)) opts.push_back({false, {e2, d2}});
            }
            for (auto& [is_mover, od] : opts) {
                try {
                    MacroChain next = node.chain;
                    Skeleton cs(next.tri);
                    SnakeletHandle subject = is_mover ? node.mv : node.dg;
                    SlidePlan plan = plan_slide(next.tri, cs, next.coc, subject, od.first, od.second);
                    SnakeletHandle moved = plan.outcome.handle;
                    absorb_step(next, std::move(plan.outcome.result), plan.direct_tri, plan.direct_coc, plan.direct_prov, {});
                    std::string sig = labelled_sig(next.tri, next.coc);
                    if (!seen.insert(sig).second) continue;
                    Skeleton ns(next.tri);
                    SnakeletHandle new_other{-1};
                    if (dodger) {
                        auto others = pockets_of(next, ns, moved.bigon_class);
                        if (others.size() != 1) continue;
                        new_other.bigon_class = others.front();
                    }
                    Node child{std::move(next), is_mover ? moved : new_other, is_mover ? new_other : moved, 0};
                    child.len = measure(child.chain);
                    if (child.len < 0) continue;
                    if (child.len <= goal) {
                        chain = std::move(child.chain);
                        mover = child.mv;
                        if (dodger) *dodger = child.dg;
                        return;
                    }
                    heap.push_back(std::move(child));
                } catch (const std::exception&) {
                    continue;
                }
            }
        }
        throw macro_error(macro_error::Code::SearchExhausted, "side reduction search exhausted");
    };

    auto shrink_side_to = [&](SnakeletHandle& mover, SnakeletHandle* dodger, int goal) {
        MacroChain checkpoint = chain;
        SnakeletHandle cp_m = mover;
        SnakeletHandle cp_d = dodger ? *dodger : SnakeletHandle{};
        try {
            shrink_greedy(mover, dodger, goal);
            return;
        } catch (const std::exception&) {
            chain = std::move(checkpoint);
            mover = cp_m;
            if (dodger) *dodger = cp_d;
        }
        shrink_search(mover, dodger, goal);
    };

    // helpers: the red pocket consumes the side to the right of e_k, the
    // green one to the left; at the extremes only one helper is needed
    SnakeletHandle red, green;
    const bool need_red = k < m - 1;
    const bool need_green = k > 1;
    if (need_red) {
        int sa = sd0.slots[k], sb = sd0.slots[k + 1];
        Arc red_arc{arc.edge_class, std::min(sa, sb), std::max(sa, sb), true, true};
        bool built = false;
        for (int pivot : {sd0.edge_classes[k + 1], sd0.edge_classes[k]}) {
            try {
                expand_corner_pillow(chain, red_arc, pivot, &red, {});
                built = true;
                break;
            } catch (const macro_error&) {
                continue;
            }
        }
        if (!built) throw macro_error(macro_error::Code::HypothesisFailed, "red helper pillow could not be built");
        shrink_side_to(red, nullptr, k + 2);
    }
    // helper pockets are recognisable structurally: degree-2 classes with
    // no ancestor in the original complex
    auto find_pockets = [&](const Skeleton& cs, int excluded) {
        std::vector<int> out;
        for (int q = 0; q < cs.num_edges(); ++q) {
            if (q == excluded || cs.edge(q).degree() != 2) continue;
            if (chain.cell_prov.ancestors(CellKind::Edge, q).empty()) out.push_back(q);
        }
        return out;
    };

    if (need_green) {
        // green pocket at the corner between (the descendants of) e_{k-1} and e_k
        auto [cur, sd] = best_relocation();
        Skeleton cs(chain.tri);
        // the side may have been reduced on the right; the corner before the
        // distinguished edge is the green's seat
        int kk = -1;
        for (int q = 1; q + 1 < sd.edge_count(); ++q) {
            bool is_k = false;
            for (int anc : chain.cell_prov.ancestors(CellKind::Triangle, sd.edge_classes[q]))
                if (anc == sd0.edge_classes[k]) is_k = true;
            if (is_k) kk = q;
        }
        if (kk < 1) throw macro_error(macro_error::Code::HypothesisFailed, "distinguished edge not found on the reduced side");
        int ka = sd.slots[kk - 1], kb = sd.slots[kk];
        Arc green_arc{cur.edge_class, std::min(ka, kb), std::max(ka, kb), true, true};
        // pivot must be flippable and incident to the corner; try the side
        // edges first, then everything else at that corner
        int corner_tet = sd.vertex_tets[kk - 1];
        std::vector<int> pivots{sd.edge_classes[kk], sd.edge_classes[kk - 1]};
        for (int f : flippable_triangles(chain.tri, cs, chain.coc)) {
            const TriangleClass& ftc = cs.triangle(f);
            if (ftc.front.tet == corner_tet || ftc.back.tet == corner_tet) pivots.push_back(f);
        }
        bool built = false;
        std::string green_err;
        for (int pivot : pivots) {
            try {
                MacroChain trial = chain;
                Skeleton ts(trial.tri);
                MoveResult dstep = apply_02(trial.tri, ts, trial.coc, green_arc);
                int pillow_tet = trial.tri.size();
                MacroResult mr = expand_v_arc(trial.tri, ts, trial.coc, green_arc, pivot);
                EdgeTracker gtrack{pillow_tet, 0, 1};  // pocket bigon, direct frame
                absorb_step(trial, std::move(mr), dstep.tri, dstep.coc, dstep.prov, {}, {&gtrack});
                chain = std::move(trial);
                Skeleton fs(chain.tri);
                green.bigon_class = gtrack.cls(fs);
                built = true;
                break;
            } catch (const std::exception& err) {
                green_err = err.what();
                continue;
            }
        }
        if (!built) throw macro_error(macro_error::Code::HypothesisFailed, "green helper pillow could not be built: " + green_err);
        if (need_red) {
            // the red pocket is the other structurally recognisable pillow
            Skeleton fs(chain.tri);
            auto pockets = find_pockets(fs, green.bigon_class);
            red.bigon_class = pockets.size() == 1 ? pockets.front() : red.bigon_class;
        }
        shrink_side_to(green, need_red ? &red : nullptr, 3);
    }

    // The reduced arc satisfies the three-sides hypotheses.  Relocation can
    // be ambiguous when side edges share their image, so every admissible
    // three-edge candidate is tried end to end; the final sig comparison
    // picks the right one.
    std::vector<std::pair<Arc, SideDescriptor>> blue_cands;
    {
        Skeleton cs(chain.tri);
        std::vector<Arc> cands = relocate_arc_all(arc, skel, chain.cell_prov, cs);
        std::vector<Arc> flipped;
        for (const Arc& cand : cands) {
            Arc f = cand;
            f.head_at_j = !f.head_at_j;
            flipped.push_back(f);
        }
        cands.insert(cands.end(), flipped.begin(), flipped.end());
        std::vector<std::pair<int, size_t>> scored;
        for (const Arc& cand : cands) {
            ArcSides as = arc_sides(chain.tri, cs, chain.coc, cand);
            for (const SideDescriptor* sdp : {&as.a, &as.b}) {
                if (sdp->edge_count() != 3 || !side_admissible(*sdp)) continue;
                scored.push_back({-side_score(*sdp), blue_cands.size()});
                blue_cands.push_back({cand, *sdp});
            }
        }
        std::stable_sort(scored.begin(), scored.end());
        std::vector<std::pair<Arc, SideDescriptor>> ordered;
        for (auto& [neg, idx] : scored) { (void)neg; ordered.push_back(blue_cands[idx]); }
        blue_cands = std::move(ordered);
    }
    if (blue_cands.empty()) throw macro_error(macro_error::Code::HypothesisFailed, "reduction did not reach a three-edge side");

    std::string last_err;
    for (auto& [cur, sd] : blue_cands) {
        try {
            MacroChain attempt = chain;
            int delta_bigon = -1;
            {
                Skeleton cs(attempt.tri);
                MoveResult dblue = apply_02(attempt.tri, cs, attempt.coc, cur);
                int pillow_tet = attempt.tri.size();
                SideWitness bw{sd.is_side_a, 1, sd.outer_labels[1]};
                MacroResult blue = compile_three_sides(attempt.tri, cs, attempt.coc, cur, bw);
                EdgeTracker dtrack{pillow_tet, 0, 1};  // the move's own bigon, direct frame
                absorb_step(attempt, std::move(blue), dblue.tri, dblue.coc, dblue.prov, {}, {&dtrack});
                Skeleton fs(attempt.tri);
                delta_bigon = dtrack.cls(fs);
                if (fs.edge(delta_bigon).degree() != 2)
                    throw macro_error(macro_error::Code::HypothesisFailed, "lost track of the move's own pocket");
            }
            // deconstruct the helpers; flattening is position-independent
            int guard = 4;
            while (guard-- > 0) {
                Skeleton cs(attempt.tri);
                std::vector<int> pockets;
                for (int q = 0; q < cs.num_edges(); ++q) {
                    if (q == delta_bigon || cs.edge(q).degree() != 2) continue;
                    if (attempt.cell_prov.ancestors(CellKind::Edge, q).empty()) pockets.push_back(q);
                }
                if (pockets.empty()) break;
                bool removed = false;
                std::string derr;
                for (int q : pockets) {
                    try {
                        MacroChain trial = attempt;
                        EdgeTracker dtrack = EdgeTracker::of(cs, delta_bigon);
                        deconstruct_snakelet(trial, SnakeletHandle{q}, {&dtrack}, m + 6);
                        attempt = std::move(trial);
                        Skeleton fs(attempt.tri);
                        delta_bigon = dtrack.cls(fs);
                        removed = true;
                        break;
                    } catch (const std::exception& err) {
                        derr = err.what();
                        continue;
                    }
                }
                if (!removed) throw macro_error(macro_error::Code::SearchExhausted, "helper pockets could not be deconstructed: " + derr);
            }
            return attempt.finish(target, tri, c);
        } catch (const std::exception& err) {
            last_err = err.what();
            continue;
        }
    }
    throw macro_error(macro_error::Code::HypothesisFailed, "all reduced-arc candidates failed: " + last_err);
}

bool verify_certificate(const Triangulation& tri, const Cocycle& c, MacroCertificate& cert) {
    Verdict v = verify_sequence(tri, c, cert.events);
    cert.all_intermediate_essential = v.ok;
    for (const auto& st : v.steps)
        if (!st.legal || !st.essential) cert.all_intermediate_essential = false;
    if (!v.ok) {
        cert.verified = false;
        return false;
    }
    // replay once more with cocycle transport to pin the labelled endpoint
    Triangulation cur = tri;
    Cocycle coc = c;
    for (const MoveEvent& ev : cert.events) {
        Skeleton s(cur);
        MoveResult mr = apply_event(cur, s, coc, ev);
        cur = std::move(mr.tri);
        coc = std::move(mr.coc);
    }
    cert.final_sig = labelled_sig(cur, coc);
    cert.verified = cert.all_intermediate_essential && cert.final_sig == cert.expected_sig;
    return cert.verified;
}

}  // namespace foam

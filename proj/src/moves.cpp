#include "foam/moves.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "foam/sig.hpp"

namespace foam {

std::string MoveEvent::str() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::TwoThree:
            os << "23 t=" << index;
            break;
        case Kind::ThreeTwo:
            os << "32 e=" << index;
            break;
        case Kind::ZeroTwo:
            os << "02 e=" << arc.edge_class << " i=" << arc.slot_i << " j=" << arc.slot_j << " head=" << (arc.head_at_j ? 1 : 0) << " side=" << (arc.pocket_side_a ? 1 : 0);
            break;
        case Kind::TwoZero:
            os << "20 e=" << index;
            break;
    }
    return os.str();
}

int count_cyclic_edges(const Skeleton& skel) {
    int c = 0;
    for (const TriangleClass& tc : skel.triangles())
        if (tc.loop()) ++c;
    return c;
}

namespace {

struct EdgeCorr {
    int pre_tet, pre_a, pre_b;
    int post_tet, post_a, post_b;
};

struct FaceCorr {
    FaceLoc pre;
    FaceLoc post;
};

struct VtxCorr {
    VertexLoc pre;
    VertexLoc post;
};

// Assembles the post-move triangulation, provenance and transported
// cocycle.  Ancestry is derived automatically wherever a class keeps a
// model cell on a surviving tetrahedron (surviving tets keep their slot
// structure); the move constructions add explicit correspondences for the
// cells whose every representative sits inside the support.
struct MoveBuilder {
    const Triangulation& pre;
    const Skeleton& skel;
    const Cocycle& coc;

    Triangulation post;
    std::vector<int> tet_map;       // pre -> post (-1 = removed)
    std::vector<int> post_tet_pre;  // post -> pre (-1 = created)

    std::vector<EdgeCorr> extra_edges;
    std::vector<FaceCorr> extra_tris;
    std::vector<VtxCorr> extra_vtx;

    MoveBuilder(const Triangulation& pre_, const Skeleton& skel_, const Cocycle& coc_, const std::vector<int>& dead, int n_new) : pre(pre_), skel(skel_), coc(coc_) {
        const int n = pre.size();
        tet_map.assign(static_cast<size_t>(n), -1);
        int next = 0;
        for (int t = 0; t < n; ++t) {
            if (std::find(dead.begin(), dead.end(), t) == dead.end()) tet_map[t] = next++;
        }
        int post_n = next + n_new;
        post = Triangulation(post_n);
        post_tet_pre.assign(static_cast<size_t>(post_n), -1);
        for (int t = 0; t < n; ++t)
            if (tet_map[t] >= 0) post_tet_pre[tet_map[t]] = t;
        // copy gluings between surviving tets
        for (int t = 0; t < n; ++t) {
            if (tet_map[t] < 0) continue;
            for (int f = 0; f < 4; ++f) {
                const Gluing& g = pre.gluing(t, f);
                if (tet_map[g.tet] >= 0) post.set_raw_gluing(tet_map[t], f, Gluing{tet_map[g.tet], g.face, g.perm});
            }
        }
    }

    MoveResult finish(bool merge_conflict_is_illegal) {
        Skeleton ps(post);
        if (!ps.links_ok()) throw move_error(move_error::Code::Internal, "post-move edge links are inconsistent");

        Provenance prov({skel.num_vertices(), skel.num_edges(), skel.num_triangles(), pre.size()}, {ps.num_vertices(), ps.num_edges(), ps.num_triangles(), post.size()});

        for (int t = 0; t < pre.size(); ++t)
            if (tet_map[t] >= 0) prov.link(CellKind::Tet, t, tet_map[t]);

        // vertices
        for (int pc = 0; pc < ps.num_vertices(); ++pc) {
            for (const VertexLoc& m : ps.vertex(pc).members) {
                int u = post_tet_pre[m.tet];
                if (u >= 0) prov.link(CellKind::Vertex, skel.vertex_class_of(u, m.vertex), pc);
            }
        }
        for (const VtxCorr& vc : extra_vtx) prov.link(CellKind::Vertex, skel.vertex_class_of(vc.pre.tet, vc.pre.vertex), ps.vertex_class_of(vc.post.tet, vc.post.vertex));

        // triangles
        for (int pc = 0; pc < ps.num_triangles(); ++pc) {
            const TriangleClass& tc = ps.triangle(pc);
            for (const FaceLoc& fl : {tc.front, tc.back}) {
                int u = post_tet_pre[fl.tet];
                if (u >= 0) prov.link(CellKind::Triangle, skel.triangle_class_of(u, fl.face), pc);
            }
        }
        for (const FaceCorr& fc : extra_tris) prov.link(CellKind::Triangle, skel.triangle_class_of(fc.pre.tet, fc.pre.face), ps.triangle_class_of(fc.post.tet, fc.post.face));

        // edges: ancestry plus signed weight transfer
        Cocycle out;
        out.rank = coc.rank;
        out.mode = coc.mode;
        out.weight.assign(static_cast<size_t>(ps.num_edges()), Vec());
        std::vector<char> known(static_cast<size_t>(ps.num_edges()), 0);

        auto transfer = [&](int pre_k, bool flip, int post_k) {
            Vec w = flip ? -coc.weight[pre_k] : coc.weight[pre_k];
            if (known[post_k]) {
                if (out.weight[post_k] != w) {
                    if (merge_conflict_is_illegal)
                        throw move_error(move_error::Code::FlatteningIllegal, "flattening identifies edges with different weights");
                    throw move_error(move_error::Code::Internal, "inconsistent cocycle transport");
                }
            } else {
                out.weight[post_k] = std::move(w);
                known[post_k] = 1;
            }
        };

        for (int pc = 0; pc < ps.num_edges(); ++pc) {
            for (const EdgeFrame& fr : ps.edge(pc).link) {
                int u = post_tet_pre[fr.tet];
                if (u < 0) continue;
                int a = fr.p[0], b = fr.p[1];
                int e = a < b ? edge_between(a, b) : edge_between(b, a);
                int pre_k = skel.edge_class_of(u, e);
                prov.link(CellKind::Edge, pre_k, pc);
                bool flip = (skel.tail_slot_of(u, e) == a) != (ps.tail_slot_of(fr.tet, e) == a);
                transfer(pre_k, flip, pc);
            }
        }
        for (const EdgeCorr& ec : extra_edges) {
            int pre_e = edge_between(std::min(ec.pre_a, ec.pre_b), std::max(ec.pre_a, ec.pre_b));
            int post_e = edge_between(std::min(ec.post_a, ec.post_b), std::max(ec.post_a, ec.post_b));
            int pre_k = skel.edge_class_of(ec.pre_tet, pre_e);
            int post_k = ps.edge_class_of(ec.post_tet, post_e);
            prov.link(CellKind::Edge, pre_k, post_k);
            bool s_pre = skel.tail_slot_of(ec.pre_tet, pre_e) == ec.pre_a;
            bool s_post = ps.tail_slot_of(ec.post_tet, post_e) == ec.post_a;
            transfer(pre_k, s_pre != s_post, post_k);
        }

        solve_unknown_weights(ps, out, known);

        bool label_legal = true;
        for (int pc = 0; pc < ps.num_edges(); ++pc) {
            if (prov.ancestors(CellKind::Edge, pc).empty() && !edge_is_essential(ps, out, pc)) label_legal = false;
        }
        return MoveResult{std::move(post), std::move(out), std::move(prov), label_legal};
    }

    // New edge weights are pinned by the triangle conditions; the extension
    // is unique because each move is supported in a ball.
    void solve_unknown_weights(const Skeleton& ps, Cocycle& out, std::vector<char>& known) {
        int unknown = 0;
        for (char k : known)
            if (!k) ++unknown;
        if (unknown == 0) return;

        bool progress = true;
        while (unknown > 0 && progress) {
            progress = false;
            for (const TriangleClass& tc : ps.triangles()) {
                int t = tc.front.tet, f = tc.front.face;
                int v[3];
                int m = 0;
                for (int s = 0; s < 4; ++s)
                    if (s != f) v[m++] = s;
                // boundary edges x->y, y->z, x->z with signs +,+,-
                struct Term {
                    int k;
                    int sign;
                };
                Term terms[3];
                auto mk = [&](int a, int b, int outer_sign) {
                    int e = a < b ? edge_between(a, b) : edge_between(b, a);
                    int k = ps.edge_class_of(t, e);
                    int s = (ps.tail_slot_of(t, e) == a) ? 1 : -1;
                    return Term{k, s * outer_sign};
                };
                terms[0] = mk(v[0], v[1], 1);
                terms[1] = mk(v[1], v[2], 1);
                terms[2] = mk(v[0], v[2], -1);
                int unk = -1, cnt = 0;
                for (int q = 0; q < 3; ++q) {
                    if (!known[terms[q].k]) {
                        ++cnt;
                        unk = q;
                    }
                }
                if (cnt != 1) continue;
                Vec sum(static_cast<size_t>(out.rank));
                for (int q = 0; q < 3; ++q) {
                    if (q == unk) continue;
                    const Vec& w = out.weight[terms[q].k];
                    for (int r = 0; r < out.rank; ++r) sum[r] += terms[q].sign * w[r];
                }
                Vec val(static_cast<size_t>(out.rank));
                for (int r = 0; r < out.rank; ++r) val[r] = terms[unk].sign == 1 ? -sum[r] : sum[r];
                out.weight[terms[unk].k] = std::move(val);
                known[terms[unk].k] = 1;
                --unknown;
                progress = true;
                if (unknown == 0) return;
            }
        }
        if (unknown > 0) throw move_error(move_error::Code::Internal, "cocycle extension underdetermined");
    }
};

Perm4 slot_map(int s0, int v0, int s1, int v1, int s2, int v2, int s3, int v3) {
    // permutation sending slot s_i -> v_i
    int img[4] = {0, 0, 0, 0};
    img[s0] = v0;
    img[s1] = v1;
    img[s2] = v2;
    img[s3] = v3;
    return Perm4(img[0], img[1], img[2], img[3]);
}

// Reglues the outer boundary of a move's support.  `table` maps each old
// support face to its new location with a slot map; partners inside the
// table compose, partners outside reglue directly.
void reglue_outer(const Triangulation& pre, MoveBuilder& mb, const std::vector<std::pair<FaceLoc, std::pair<FaceLoc, Perm4>>>& table) {
    auto lookup = [&](const FaceLoc& fl) -> const std::pair<FaceLoc, Perm4>* {
        for (const auto& ent : table)
            if (ent.first == fl) return &ent.second;
        return nullptr;
    };
    std::vector<char> done(table.size(), 0);
    for (size_t idx = 0; idx < table.size(); ++idx) {
        if (done[idx]) continue;
        const FaceLoc& F = table[idx].first;
        const FaceLoc& naddr = table[idx].second.first;
        const Perm4& m = table[idx].second.second;
        const Gluing& g = pre.gluing(F.tet, F.face);
        FaceLoc partner{g.tet, g.face};
        if (const auto* ent = lookup(partner)) {
            // both sides live in the support; install composed gluing once
            const FaceLoc& naddr2 = ent->first;
            const Perm4& m2 = ent->second;
            Perm4 np = m.inverse().then(g.perm).then(m2);
            mb.post.set_gluing(naddr.tet, naddr.face, naddr2.tet, naddr2.face, np);
            for (size_t k = 0; k < table.size(); ++k)
                if (table[k].first == partner) done[k] = 1;
        } else {
            Perm4 np = m.inverse().then(g.perm);
            mb.post.set_gluing(naddr.tet, naddr.face, mb.tet_map[partner.tet], partner.face, np);
        }
        done[idx] = 1;
    }
}

}  // namespace

MoveResult apply_23(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, int triangle_class) {
    if (triangle_class < 0 || triangle_class >= skel.num_triangles()) throw move_error(move_error::Code::BadLocation, "no such triangle class");
    const TriangleClass& tc = skel.triangle(triangle_class);
    const int T0 = tc.front.tet, f0 = tc.front.face;
    const Gluing& g = tri.gluing(T0, f0);
    const int T1 = g.tet, f1 = g.face;
    if (T0 == T1) throw move_error(move_error::Code::LoopObstruction, "triangle is glued to one tetrahedron on both sides");

    int eq[3];
    int m = 0;
    for (int s = 0; s < 4; ++s)
        if (s != f0) eq[m++] = s;
    const int x = eq[0], y = eq[1], z = eq[2];
    const int gx = g.perm[x], gy = g.perm[y], gz = g.perm[z];

    MoveBuilder mb(tri, skel, c, {T0, T1}, 3);
    const int base = tri.size() - 2;
    const int n0 = base, n1 = base + 1, n2 = base + 2;  // equator edges yz, xz, xy

    mb.post.set_gluing(n0, 2, n1, 2, Perm4());
    mb.post.set_gluing(n0, 3, n2, 2, Perm4(0, 1, 3, 2));
    mb.post.set_gluing(n1, 3, n2, 3, Perm4());

    std::vector<std::pair<FaceLoc, std::pair<FaceLoc, Perm4>>> table = {
        {{T0, x}, {{n0, 1}, slot_map(f0, 0, x, 1, y, 2, z, 3)}},
        {{T0, y}, {{n1, 1}, slot_map(f0, 0, y, 1, x, 2, z, 3)}},
        {{T0, z}, {{n2, 1}, slot_map(f0, 0, z, 1, x, 2, y, 3)}},
        {{T1, gx}, {{n0, 0}, slot_map(f1, 1, gx, 0, gy, 2, gz, 3)}},
        {{T1, gy}, {{n1, 0}, slot_map(f1, 1, gy, 0, gx, 2, gz, 3)}},
        {{T1, gz}, {{n2, 0}, slot_map(f1, 1, gz, 0, gx, 2, gy, 3)}},
    };
    reglue_outer(tri, mb, table);

    mb.extra_vtx = {
        {{T0, f0}, {n0, 0}}, {{T0, x}, {n1, 2}}, {{T0, y}, {n0, 2}}, {{T0, z}, {n0, 3}},
        {{T1, f1}, {n0, 1}}, {{T1, gx}, {n1, 2}}, {{T1, gy}, {n0, 2}}, {{T1, gz}, {n0, 3}},
    };
    mb.extra_edges = {
        {T0, f0, x, n1, 0, 2}, {T0, f0, y, n0, 0, 2}, {T0, f0, z, n0, 0, 3},
        {T0, x, y, n2, 2, 3},  {T0, x, z, n1, 2, 3},  {T0, y, z, n0, 2, 3},
        {T1, f1, gx, n1, 1, 2}, {T1, f1, gy, n0, 1, 2}, {T1, f1, gz, n0, 1, 3},
        {T1, gx, gy, n2, 2, 3}, {T1, gx, gz, n1, 2, 3}, {T1, gy, gz, n0, 2, 3},
    };
    mb.extra_tris = {
        {{T0, x}, {n0, 1}}, {{T0, y}, {n1, 1}}, {{T0, z}, {n2, 1}},
        {{T1, gx}, {n0, 0}}, {{T1, gy}, {n1, 0}}, {{T1, gz}, {n2, 0}},
    };
    return mb.finish(false);
}

MoveResult apply_32(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, int edge_class) {
    if (edge_class < 0 || edge_class >= skel.num_edges()) throw move_error(move_error::Code::BadLocation, "no such edge class");
    const EdgeClass& ec = skel.edge(edge_class);
    if (ec.degree() != 3) throw move_error(move_error::Code::DegreeNot3, "edge has degree " + std::to_string(ec.degree()));
    const EdgeFrame fr[3] = {ec.link[0], ec.link[1], ec.link[2]};
    if (fr[0].tet == fr[1].tet || fr[1].tet == fr[2].tet || fr[0].tet == fr[2].tet)
        throw move_error(move_error::Code::ClosureNotEmbedded, "the three tetrahedra around the edge are not distinct");

    MoveBuilder mb(tri, skel, c, {fr[0].tet, fr[1].tet, fr[2].tet}, 2);
    const int base = tri.size() - 3;
    const int Ta = base, Tb = base + 1;  // tail-side and head-side tetrahedra

    mb.post.set_gluing(Ta, 3, Tb, 3, Perm4());

    // Equator corner d_k is shared by t_k and t_{k+1}: slot p_k[3] in t_k,
    // slot p_{k+1}[2] in t_{k+1}.  In Ta/Tb it takes slot k.
    std::vector<std::pair<FaceLoc, std::pair<FaceLoc, Perm4>>> table;
    for (int k = 0; k < 3; ++k) {
        const Perm4& p = fr[k].p;
        int kp = (k + 1) % 3, km = (k + 2) % 3;
        table.push_back({{fr[k].tet, p[1]}, {{Ta, kp}, slot_map(p[0], 3, p[1], kp, p[3], k, p[2], km)}});
        table.push_back({{fr[k].tet, p[0]}, {{Tb, kp}, slot_map(p[1], 3, p[0], kp, p[3], k, p[2], km)}});
    }
    reglue_outer(tri, mb, table);

    for (int k = 0; k < 3; ++k) {
        const Perm4& p = fr[k].p;
        int km = (k + 2) % 3;
        mb.extra_vtx.push_back({{fr[k].tet, p[0]}, {Ta, 3}});
        mb.extra_vtx.push_back({{fr[k].tet, p[1]}, {Tb, 3}});
        mb.extra_vtx.push_back({{fr[k].tet, p[3]}, {Ta, k}});
        mb.extra_edges.push_back({fr[k].tet, p[0], p[3], Ta, 3, k});
        mb.extra_edges.push_back({fr[k].tet, p[1], p[3], Tb, 3, k});
        mb.extra_edges.push_back({fr[k].tet, p[2], p[3], Ta, km, k});
        mb.extra_tris.push_back({{fr[k].tet, p[1]}, {Ta, (k + 1) % 3}});
        mb.extra_tris.push_back({{fr[k].tet, p[0]}, {Tb, (k + 1) % 3}});
    }
    return mb.finish(false);
}

MoveResult apply_02(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, const Arc& arc) {
    if (!arc.valid_for(skel)) throw move_error(move_error::Code::BadLocation, "arc slots are not valid for the edge link");
    const EdgeClass& ec = skel.edge(arc.edge_class);
    const int d = ec.degree();
    const int i = arc.slot_i, j = arc.slot_j;
    auto frame = [&](int s) { return ec.link[((s % d) + d) % d]; };

    MoveBuilder mb(tri, skel, c, {}, 2);
    const int P = tri.size(), Q = tri.size() + 1;

    mb.post.set_gluing(P, 2, Q, 2, Perm4(1, 0, 2, 3));
    mb.post.set_gluing(P, 3, Q, 3, Perm4(1, 0, 2, 3));

    // Attachment slots of the pillow: P faces the A side (link positions
    // i+1..j), Q the B side.  Maps send new-tet slots to pre-tet slots.
    const EdgeFrame fi = frame(i), fi1 = frame(i + 1), fj = frame(j), fj1 = frame(j + 1);
    struct Attach {
        int new_tet, new_face;
        FaceLoc target;  // pre model face
        Perm4 map;       // new-tet slots -> target-tet slots
    };
    const Attach A_P0{P, 0, {fi1.tet, fi1.p[3]}, slot_map(0, fi1.p[3], 1, fi1.p[2], 2, fi1.p[0], 3, fi1.p[1])};
    const Attach A_P1{P, 1, {fj.tet, fj.p[2]}, slot_map(0, fj.p[3], 1, fj.p[2], 2, fj.p[0], 3, fj.p[1])};
    const Attach A_Q0{Q, 0, {fj1.tet, fj1.p[3]}, slot_map(0, fj1.p[3], 1, fj1.p[2], 2, fj1.p[0], 3, fj1.p[1])};
    const Attach A_Q1{Q, 1, {fi.tet, fi.p[2]}, slot_map(0, fi.p[3], 1, fi.p[2], 2, fi.p[0], 3, fi.p[1])};

    const FaceLoc exit_i = A_Q1.target, entry_i = A_P0.target;
    const FaceLoc exit_j = A_P1.target, entry_j = A_Q0.target;
    const bool same_gluing = (exit_i == exit_j) || (exit_i == entry_j);

    if (!same_gluing) {
        // one pass per cut: F_start <-> near side, far side <-> F_end
        for (int cut = 0; cut < 2; ++cut) {
            const Attach& att_near = cut == 0 ? A_Q1 : A_P1;
            const Attach& att_far = cut == 0 ? A_P0 : A_Q0;
            const FaceLoc& start = cut == 0 ? exit_i : exit_j;
            mb.post.set_gluing(start.tet, start.face, att_near.new_tet, att_near.new_face, att_near.map.inverse());
            mb.post.set_gluing(att_far.new_tet, att_far.new_face, att_far.target.tet, att_far.target.face, att_far.map);
        }
    } else {
        // Both endpoints pierce the same foam edge: the pillow is threaded
        // through one gluing channel twice.  Express every attachment in the
        // start-side frame and chain the passes in slot order (pass i, then
        // pass j).
        const FaceLoc start = exit_i;
        const Perm4 q = tri.gluing(start.tet, start.face).perm;  // start side -> entry side
        struct Pass {
            Attach nearside, farside;
        };
        auto to_start_frame = [&](const Attach& a, bool targets_entry_side) {
            Attach r = a;
            if (targets_entry_side) r.map = a.map.then(q.inverse());
            return r;
        };
        Pass pass_i{to_start_frame(A_Q1, false), to_start_frame(A_P0, true)};
        Pass pass_j = (exit_j == start) ? Pass{to_start_frame(A_P1, false), to_start_frame(A_Q0, true)}
                                        : Pass{to_start_frame(A_Q0, false), to_start_frame(A_P1, true)};
        // chain: start <-> near_i, far_i <-> near_j, far_j <-> end
        mb.post.set_gluing(start.tet, start.face, pass_i.nearside.new_tet, pass_i.nearside.new_face, pass_i.nearside.map.inverse());
        mb.post.set_gluing(pass_i.farside.new_tet, pass_i.farside.new_face, pass_j.nearside.new_tet, pass_j.nearside.new_face, pass_i.farside.map.then(pass_j.nearside.map.inverse()));
        mb.post.set_gluing(pass_j.farside.new_tet, pass_j.farside.new_face, entry_i.tet, entry_i.face, pass_j.farside.map.then(q));
        // the middle segment of the pierced foam edge descends from it
        mb.extra_tris.push_back({{start.tet, start.face}, {pass_i.farside.new_tet, pass_i.farside.new_face}});
    }
    return mb.finish(false);
}

MoveResult apply_20(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, int edge_class) {
    if (edge_class < 0 || edge_class >= skel.num_edges()) throw move_error(move_error::Code::BadLocation, "no such edge class");
    const EdgeClass& ec = skel.edge(edge_class);
    if (ec.degree() != 2) throw move_error(move_error::Code::NotBigon, "edge has degree " + std::to_string(ec.degree()));
    const EdgeFrame& fp = ec.link[0];
    const EdgeFrame& fq = ec.link[1];
    const int P = fp.tet, Q = fq.tet;
    if (P == Q) throw move_error(move_error::Code::NotBigon, "the two tetrahedra around the bigon coincide");

    const Perm4& p = fp.p;
    const Perm4& q = fq.p;
    int oppP = skel.edge_class_of(P, p[2] < p[3] ? p[2] : p[3], p[2] < p[3] ? p[3] : p[2]);
    int oppQ = skel.edge_class_of(Q, q[2] < q[3] ? q[2] : q[3], q[2] < q[3] ? q[3] : q[2]);
    if (oppP == oppQ) throw move_error(move_error::Code::FlatteningIllegal, "the edges opposite the bigon coincide");
    if (oppP == edge_class || oppQ == edge_class) throw move_error(move_error::Code::FlatteningIllegal, "an opposite edge coincides with the bigon edge");

    // reflection through the pillow: tail->tail, head->head, exit<->entry
    Perm4 sigma = slot_map(p[0], q[0], p[1], q[1], p[2], q[3], p[3], q[2]);

    const FaceLoc outer[4] = {{P, p[0]}, {P, p[1]}, {Q, q[0]}, {Q, q[1]}};
    auto is_outer = [&](const FaceLoc& f) {
        for (const FaceLoc& o : outer)
            if (o == f) return true;
        return false;
    };
    auto flatten_mate = [&](const FaceLoc& f, Perm4& dir) -> FaceLoc {
        if (f.tet == P) {
            dir = sigma;
            return FaceLoc{Q, sigma[f.face]};
        }
        dir = sigma.inverse();
        return FaceLoc{P, sigma.inverse()[f.face]};
    };

    MoveBuilder mb(tri, skel, c, {P, Q}, 0);

    std::vector<char> used(4, 0);
    auto outer_index = [&](const FaceLoc& f) {
        for (int k = 0; k < 4; ++k)
            if (outer[k] == f) return k;
        return -1;
    };
    int chains = 0;
    for (int k = 0; k < 4; ++k) {
        if (used[k]) continue;
        const Gluing& g0 = tri.gluing(outer[k].tet, outer[k].face);
        FaceLoc partner{g0.tet, g0.face};
        if (is_outer(partner)) continue;  // interior of a chain; handled from an end
        // walk: X -- outer[k] == mate -- ... -- Y
        FaceLoc X = partner;
        Perm4 acc = tri.gluing(X.tet, X.face).perm;  // X slots -> cur slots
        FaceLoc cur = outer[k];
        used[k] = 1;
        int guard = 8;
        while (true) {
            Perm4 dir;
            FaceLoc mate = flatten_mate(cur, dir);
            used[outer_index(mate)] = 1;
            acc = acc.then(dir);
            const Gluing& g1 = tri.gluing(mate.tet, mate.face);
            FaceLoc nxt{g1.tet, g1.face};
            if (!is_outer(nxt)) {
                if (nxt == X) throw move_error(move_error::Code::FlatteningIllegal, "flattening would glue a face to itself");
                mb.post.set_gluing(mb.tet_map[X.tet], X.face, mb.tet_map[nxt.tet], nxt.face, acc.then(g1.perm));
                ++chains;
                break;
            }
            used[outer_index(nxt)] = 1;
            acc = acc.then(g1.perm);
            cur = nxt;
            if (--guard < 0) throw move_error(move_error::Code::FlatteningIllegal, "flattening chain does not terminate");
        }
    }
    if (chains == 0) throw move_error(move_error::Code::FlatteningIllegal, "pillow boundary is closed; flattening would destroy the component");
    for (int k = 0; k < 4; ++k) {
        if (!used[k]) throw move_error(move_error::Code::FlatteningIllegal, "flattening closes a face onto itself");
    }
    return mb.finish(true);
}

MoveResult apply_event(const Triangulation& tri, const Skeleton& skel, const Cocycle& c, const MoveEvent& ev) {
    switch (ev.kind) {
        case MoveEvent::Kind::TwoThree:
            return apply_23(tri, skel, c, ev.index);
        case MoveEvent::Kind::ThreeTwo:
            return apply_32(tri, skel, c, ev.index);
        case MoveEvent::Kind::ZeroTwo:
            return apply_02(tri, skel, c, ev.arc);
        case MoveEvent::Kind::TwoZero:
            return apply_20(tri, skel, c, ev.index);
    }
    throw move_error(move_error::Code::BadLocation, "unknown move kind");
}

SequenceResult apply_sequence(const Triangulation& tri, const Cocycle& c, const std::vector<MoveEvent>& seq) {
    SequenceResult r{tri, c, Provenance(), Verdict{}};
    Skeleton skel(tri);
    std::array<int, 4> counts{skel.num_vertices(), skel.num_edges(), skel.num_triangles(), tri.size()};
    Provenance ident(counts, counts);
    for (int k = 0; k < 4; ++k) {
        CellKind kind = static_cast<CellKind>(k);
        for (int idx = 0; idx < counts[static_cast<size_t>(k)]; ++idx) ident.link(kind, idx, idx);
    }
    r.prov = ident;
    for (size_t step = 0; step < seq.size(); ++step) {
        Skeleton s(r.tri);
        StepVerdict sv;
        sv.event = seq[step];
        try {
            MoveResult mr = apply_event(r.tri, s, r.coc, seq[step]);
            sv.legal = true;
            sv.label_legal = mr.label_legal;
            Skeleton ns(mr.tri);
            sv.essential = is_L_essential(ns, mr.coc);
            sv.cyclic_edges = count_cyclic_edges(ns);
            sv.n_tet = mr.tri.size();
            r.prov = Provenance::compose(r.prov, mr.prov);
            r.tri = std::move(mr.tri);
            r.coc = std::move(mr.coc);
            r.verdict.steps.push_back(std::move(sv));
        } catch (const move_error& e) {
            sv.legal = false;
            sv.error = e.what();
            r.verdict.steps.push_back(std::move(sv));
            r.verdict.failed_at = static_cast<int>(step);
            r.verdict.ok = false;
            throw;
        }
    }
    r.verdict.ok = true;
    r.verdict.final_sig = canonical_sig(r.tri);
    return r;
}

Verdict verify_sequence(const Triangulation& tri, const Cocycle& c, const std::vector<MoveEvent>& seq) {
    Verdict v;
    Triangulation cur = tri;
    Cocycle coc = c;
    for (size_t step = 0; step < seq.size(); ++step) {
        Skeleton s(cur);
        StepVerdict sv;
        sv.event = seq[step];
        try {
            MoveResult mr = apply_event(cur, s, coc, seq[step]);
            sv.legal = true;
            sv.label_legal = mr.label_legal;
            Skeleton ns(mr.tri);
            sv.essential = is_L_essential(ns, mr.coc);
            sv.cyclic_edges = count_cyclic_edges(ns);
            sv.n_tet = mr.tri.size();
            cur = std::move(mr.tri);
            coc = std::move(mr.coc);
            v.steps.push_back(std::move(sv));
        } catch (const move_error& e) {
            sv.legal = false;
            sv.error = e.what();
            v.steps.push_back(std::move(sv));
            v.failed_at = static_cast<int>(step);
            v.ok = false;
            return v;
        }
    }
    v.ok = true;
    v.final_sig = canonical_sig(cur);
    return v;
}

}  // namespace foam

#include "doctest.h"

#include "foam/macro.hpp"
#include "foam/sig.hpp"
#include "support.hpp"

using namespace foam;

namespace {

std::string lsig(const Triangulation& t, const Cocycle& c) {
    Skeleton s(t);
    return canonical_sig_with_cocycle(t, s, c);
}

}  // namespace

TEST_CASE("corner-cutting arcs exist and the two opposite descriptions agree") {
    Triangulation t = testsupport::load_tri("seed.tri");
    Skeleton s(t);
    Cocycle c = testsupport::load_coc("seed.coc");
    static constexpr int pairs[3][2][2] = {{{0, 1}, {2, 3}}, {{0, 2}, {1, 3}}, {{0, 3}, {1, 2}}};
    for (int tet = 0; tet < t.size(); ++tet) {
        for (int dir = 0; dir < 3; ++dir) {
            auto plus = v_arc_along_edge(s, tet, pairs[dir][0][0], pairs[dir][0][1]);
            auto minus = v_arc_along_edge(s, tet, pairs[dir][1][0], pairs[dir][1][1]);
            REQUIRE((plus.has_value() || minus.has_value()));
            if (plus && minus) {
                MoveResult a = apply_02(t, s, c, *plus);
                MoveResult b = apply_02(t, s, c, *minus);
                CHECK(lsig(a.tri, a.coc) == lsig(b.tri, b.coc));
            }
        }
    }
}

TEST_CASE("v_move adds two tetrahedra and preserves essentiality both ways") {
    Triangulation t = testsupport::load_tri("seed.tri");
    Skeleton s(t);
    Cocycle c = testsupport::load_coc("seed.coc");
    for (int tet = 0; tet < t.size(); ++tet)
        for (int dir = 0; dir < 3; ++dir) {
            MoveResult mr = v_move(t, s, c, tet, dir);
            CHECK(mr.tri.size() == t.size() + 2);
            Skeleton ns(mr.tri);
            CHECK(is_L_essential(ns, mr.coc));
            CHECK(mr.label_legal);
            // flippable edges survive
            CHECK(!flippable_triangles(mr.tri, ns, mr.coc).empty());
            // no new cyclic edges
            CHECK(count_cyclic_edges(ns) == count_cyclic_edges(s));
        }
}

TEST_CASE("expand_v_move emits a verifying 4-event certificate") {
    Triangulation t = testsupport::load_tri("seed.tri");
    Skeleton s(t);
    Cocycle c = testsupport::load_coc("seed.coc");
    int expansions = 0;
    for (int tet = 0; tet < t.size(); ++tet)
        for (int dir = 0; dir < 3; ++dir)
            for (int piv : flippable_triangles(t, s, c)) {
                const TriangleClass& pc = s.triangle(piv);
                if (pc.front.tet != tet && pc.back.tet != tet) continue;
                MacroResult mr = expand_v_move(t, s, c, tet, dir, piv);
                REQUIRE(mr.cert.events.size() == 4);
                CHECK(mr.cert.events[0].kind == MoveEvent::Kind::TwoThree);
                CHECK(mr.cert.events[3].kind == MoveEvent::Kind::ThreeTwo);
                MacroCertificate check = mr.cert;
                CHECK(verify_certificate(t, c, check));
                // matches the direct V-move
                MoveResult direct = v_move(t, s, c, tet, dir);
                CHECK(mr.cert.expected_sig == lsig(direct.tri, direct.coc));
                ++expansions;
            }
    CHECK(expansions >= 4);
}

TEST_CASE("non-incident pivot is rejected") {
    Triangulation t = testsupport::load_tri("seed.tri");
    Skeleton s(t);
    Cocycle c = testsupport::load_coc("seed.coc");
    // grow until some flippable triangle misses some tet
    auto corpus = testsupport::grow_corpus({t, c}, 6, 6, 17);
    bool exercised = false;
    for (const auto& st : corpus) {
        Skeleton sk(st.tri);
        for (int tet = 0; tet < st.tri.size() && !exercised; ++tet) {
            auto arc = v_arc(sk, tet, 0);
            if (!arc) continue;
            for (int piv : flippable_triangles(st.tri, sk, st.coc)) {
                const TriangleClass& pc = sk.triangle(piv);
                if (pc.front.tet == tet || pc.back.tet == tet) continue;
                CHECK_THROWS_AS(expand_v_arc(st.tri, sk, st.coc, *arc, piv), macro_error);
                exercised = true;
                break;
            }
        }
    }
    CHECK(exercised);
}

TEST_CASE("snakelet recovery reconstructs the generating arc") {
    Triangulation t = testsupport::load_tri("seed.tri");
    Skeleton s(t);
    Cocycle c = testsupport::load_coc("seed.coc");
    for (int e = 0; e < s.num_edges(); ++e) {
        int d = s.edge(e).degree();
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) {
                Arc a{e, i, j, true, true};
                MoveResult mr = apply_02(t, s, c, a);
                Skeleton ns(mr.tri);
                int bigon = -1;
                for (int k = 0; k < ns.num_edges(); ++k)
                    if (mr.prov.ancestors(CellKind::Edge, k).empty()) bigon = k;
                REQUIRE(bigon >= 0);
                RecoveredSnakelet rec = recover_snakelet(mr.tri, ns, mr.coc, SnakeletHandle{bigon});
                CHECK(lsig(rec.base, rec.base_coc) == lsig(t, c));
                // regenerating from the recovered arc gives back the state
                Skeleton bs(rec.base);
                MoveResult redo = apply_02(rec.base, bs, rec.base_coc, rec.arc);
                CHECK(lsig(redo.tri, redo.coc) == lsig(mr.tri, mr.coc));
            }
    }
}

TEST_CASE("slide moves a snakelet endpoint past one vertex via 2-3,3-2") {
    Triangulation t = testsupport::load_tri("seed.tri");
    Skeleton s(t);
    Cocycle c = testsupport::load_coc("seed.coc");
    int slides_done = 0;
    for (int e = 0; e < s.num_edges() && slides_done < 4; ++e) {
        int d = s.edge(e).degree();
        if (d < 4) continue;
        Arc a{e, 0, 1, true, true};
        MoveResult mr = apply_02(t, s, c, a);
        if (!mr.label_legal) continue;
        Skeleton ns(mr.tri);
        if (!is_L_essential(ns, mr.coc)) continue;
        int bigon = -1;
        for (int k = 0; k < ns.num_edges(); ++k)
            if (mr.prov.ancestors(CellKind::Edge, k).empty()) bigon = k;
        REQUIRE(bigon >= 0);
        for (int dir : {+1, -1}) {
            try {
                SlideOutcome out = slide_snakelet(mr.tri, ns, mr.coc, SnakeletHandle{bigon}, 1, dir);
                REQUIRE(out.result.cert.events.size() == 2);
                CHECK(out.result.cert.events[0].kind == MoveEvent::Kind::TwoThree);
                CHECK(out.result.cert.events[1].kind == MoveEvent::Kind::ThreeTwo);
                MacroCertificate chk = out.result.cert;
                CHECK(verify_certificate(mr.tri, mr.coc, chk));
                // the slid state equals the direct 0-2 along the shifted arc
                Skeleton bs2(t);
                int shifted = (1 + dir + d) % d;
                Arc a2{e, std::min(shifted, 0), std::max(shifted, 0), true, true};
                if (shifted != 0) {
                    MoveResult direct = apply_02(t, s, c, a2);
                    CHECK(out.result.cert.expected_sig == lsig(direct.tri, direct.coc));
                }
                // handle still points at a bigon
                Skeleton fs(out.result.tri);
                CHECK(fs.edge(out.handle.bigon_class).degree() == 2);
                ++slides_done;
            } catch (const macro_error& err) {
                // sliding may be blocked or label-illegal; that's a valid outcome
                CHECK((err.code() == macro_error::Code::TargetNotLabelLegal || err.code() == macro_error::Code::SlideBlocked));
            }
        }
    }
    CHECK(slides_done >= 1);
}

TEST_CASE("slide crossing the snakelet's own other end is rejected") {
    Triangulation t = testsupport::load_tri("seed.tri");
    Skeleton s(t);
    Cocycle c = testsupport::load_coc("seed.coc");
    // degree-2 face: any slide wraps straight onto the other slot
    int e2 = -1;
    for (int e = 0; e < s.num_edges(); ++e)
        if (s.edge(e).degree() == 2) e2 = e;
    REQUIRE(e2 >= 0);
    Arc a{e2, 0, 1, true, true};
    MoveResult mr = apply_02(t, s, c, a);
    Skeleton ns(mr.tri);
    int bigon = -1;
    for (int k = 0; k < ns.num_edges(); ++k)
        if (mr.prov.ancestors(CellKind::Edge, k).empty()) bigon = k;
    REQUIRE(bigon >= 0);
    CHECK_THROWS_AS(slide_snakelet(mr.tri, ns, mr.coc, SnakeletHandle{bigon}, 1, +1), macro_error);
}

TEST_CASE("remove_snakelet inverts a corner pillow with 2-3,3-2,3-2,3-2") {
    Triangulation t = testsupport::load_tri("seed.tri");
    Skeleton s(t);
    Cocycle c = testsupport::load_coc("seed.coc");
    int removed = 0;
    for (int tet = 0; tet < t.size(); ++tet)
        for (int dir = 0; dir < 3; ++dir) {
            MoveResult mr = v_move(t, s, c, tet, dir);
            Skeleton ns(mr.tri);
            int bigon = -1;
            for (int k = 0; k < ns.num_edges(); ++k)
                if (mr.prov.ancestors(CellKind::Edge, k).empty()) bigon = k;
            REQUIRE(bigon >= 0);
            MacroResult rem = remove_snakelet(mr.tri, ns, mr.coc, SnakeletHandle{bigon});
            CHECK(rem.cert.events.size() == 4);
            CHECK(rem.cert.expected_sig == lsig(t, c));
            MacroCertificate chk = rem.cert;
            CHECK(verify_certificate(mr.tri, mr.coc, chk));
            ++removed;
        }
    CHECK(removed == 6);
}

TEST_CASE("arc relocation across an unrelated V-move") {
    Triangulation t = testsupport::load_tri("seed.tri");
    Skeleton s(t);
    Cocycle c = testsupport::load_coc("seed.coc");
    int e6 = -1;
    for (int e = 0; e < s.num_edges(); ++e)
        if (s.edge(e).degree() == 6) e6 = e;
    REQUIRE(e6 >= 0);
    Arc a{e6, 1, 3, true, true};
    // a V-move elsewhere
    MoveResult mr = v_move(t, s, c, 0, 0);
    Skeleton ns(mr.tri);
    ArcRelocation rel = relocate_arc(a, s, mr.prov, mr.tri, ns);
    REQUIRE(rel.ok);
    CHECK(ns.edge(rel.arc.edge_class).degree() >= 2);
    // the relocated arc is still performable
    MoveResult redo = apply_02(mr.tri, ns, mr.coc, rel.arc);
    CHECK(redo.tri.validate().ok());
}

TEST_CASE("augmented 2-3: certificate verifies, omnibus properties hold") {
    Triangulation t = testsupport::load_tri("seed.tri");
    Cocycle c = testsupport::load_coc("seed.coc");
    auto corpus = testsupport::grow_corpus({t, c}, 5, 4, 41);
    int done = 0;
    for (const auto& st : corpus) {
        Skeleton s(st.tri);
        for (int k : flippable_triangles(st.tri, s, st.coc)) {
            for (bool u_front : {true, false}) {
                MacroResult mr = augmented_23(st.tri, s, st.coc, k, u_front);
                CHECK(mr.cert.verified);
                // net tetrahedron delta: three pillows and one 2-3
                CHECK(mr.tri.size() == st.tri.size() + 7);
                Skeleton ns(mr.tri);
                CHECK(is_L_essential(ns, mr.coc));
                CHECK(!flippable_triangles(mr.tri, ns, mr.coc).empty());
                // no cyclic edge of the result touches the support: tets
                // with no ancestor or descended from the edge's two tets
                const TriangleClass& tc = s.triangle(k);
                std::set<int> support;
                for (int pre : {tc.front.tet, tc.back.tet})
                    for (int d : mr.prov.descendants(CellKind::Tet, pre)) support.insert(d);
                for (int post = 0; post < mr.tri.size(); ++post)
                    if (mr.prov.ancestors(CellKind::Tet, post).empty()) support.insert(post);
                for (const TriangleClass& ptc : ns.triangles()) {
                    if (!ptc.loop()) continue;
                    CHECK(!support.count(ptc.front.tet));
                }
                if (++done >= 6) return;
            }
        }
    }
    CHECK(done > 0);
}

TEST_CASE("nature reserve: splits the edge, remainder stays flippable") {
    Triangulation t = testsupport::load_tri("seed.tri");
    Cocycle c = testsupport::load_coc("seed.coc");
    auto corpus = testsupport::grow_corpus({t, c}, 5, 3, 77);
    int done = 0;
    for (const auto& st : corpus) {
        Skeleton s(st.tri);
        for (int k : flippable_triangles(st.tri, s, st.coc)) {
            for (int choice = 0; choice < 3 && done < 4; ++choice) {
                ReserveOutcome out;
                try {
                    out = nature_reserve(st.tri, s, st.coc, k, true, choice);
                } catch (const macro_error&) {
                    continue;  // some choices are blocked; others must work
                }
                CHECK(out.result.cert.verified);
                CHECK(out.reserve_tclass >= 0);
                CHECK(out.remainder_tclass >= 0);
                CHECK(out.reserve_tclass != out.remainder_tclass);
                Skeleton ns(out.result.tri);
                CHECK(is_L_essential(ns, out.result.coc));
                CHECK(is_L_flippable(out.result.tri, ns, out.result.coc, out.remainder_tclass));
                // the reserve keeps an end at p intact while the remainder
                // is a genuine second descendant
                ++done;
            }
        }
        if (done >= 4) break;
    }
    CHECK(done > 0);
}

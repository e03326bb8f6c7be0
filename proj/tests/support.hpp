#pragma once

// Shared helpers for the test suites: fixture loading, an exact integer
// solver for the triangle conditions (used to derive labelling fixtures
// independently of the production code), corpus generation by random legal
// moves and a brute-force path-sum oracle for relative labels.

#include <boost/multiprecision/cpp_int.hpp>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "foam/cocycle.hpp"
#include "foam/moves.hpp"
#include "foam/sig.hpp"
#include "foam/skeleton.hpp"
#include "foam/triangulation.hpp"

namespace testsupport {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;
using foam::operator+;
using foam::operator-;

inline std::string fixture_path(const std::string& name) { return std::string(FIXTURE_DIR) + "/" + name; }

inline std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline foam::Triangulation load_tri(const std::string& name) {
    auto r = foam::parse_triangulation(slurp(fixture_path(name)));
    if (!r.tri) throw std::runtime_error("fixture " + name + " failed to parse: " + r.error->message);
    return *r.tri;
}

inline foam::Cocycle load_coc(const std::string& name) {
    auto r = foam::parse_cocycle(slurp(fixture_path(name)));
    if (!r.coc) throw std::runtime_error("fixture " + name + " failed to parse: " + r.error);
    return *r.coc;
}

// ---- exact rational kernel of the triangle-condition system ----

// Rows: one per triangle class; columns: one per edge class.
inline std::vector<std::vector<cpp_rational>> triangle_condition_matrix(const foam::Skeleton& skel) {
    std::vector<std::vector<cpp_rational>> rows;
    for (const foam::TriangleClass& tc : skel.triangles()) {
        std::vector<cpp_rational> row(static_cast<size_t>(skel.num_edges()), 0);
        int t = tc.front.tet, f = tc.front.face;
        int v[3];
        int m = 0;
        for (int s = 0; s < 4; ++s)
            if (s != f) v[m++] = s;
        auto add = [&](int a, int b, int outer) {
            int e = foam::edge_between(std::min(a, b), std::max(a, b));
            int k = skel.edge_class_of(t, e);
            int sgn = (skel.tail_slot_of(t, e) == std::min(a, b)) ? 1 : -1;
            if (a > b) sgn = -sgn;
            row[static_cast<size_t>(k)] += sgn * outer;
        };
        add(v[0], v[1], 1);
        add(v[1], v[2], 1);
        add(v[0], v[2], -1);
        rows.push_back(std::move(row));
    }
    return rows;
}

// Basis of the rational kernel, scaled to integer vectors.
inline std::vector<std::vector<cpp_int>> integer_kernel(std::vector<std::vector<cpp_rational>> a, int cols) {
    int rows = static_cast<int>(a.size());
    std::vector<int> pivot_col;
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int piv = -1;
        for (int i = r; i < rows; ++i)
            if (a[i][c] != 0) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        std::swap(a[r], a[piv]);
        cpp_rational d = a[r][c];
        for (int j = 0; j < cols; ++j) a[r][j] /= d;
        for (int i = 0; i < rows; ++i) {
            if (i == r || a[i][c] == 0) continue;
            cpp_rational f = a[i][c];
            for (int j = 0; j < cols; ++j) a[i][j] -= f * a[r][j];
        }
        pivot_col.push_back(c);
        ++r;
    }
    std::vector<char> is_pivot(static_cast<size_t>(cols), 0);
    for (int c : pivot_col) is_pivot[c] = 1;
    std::vector<std::vector<cpp_int>> basis;
    for (int c = 0; c < cols; ++c) {
        if (is_pivot[c]) continue;
        std::vector<cpp_rational> v(static_cast<size_t>(cols), 0);
        v[c] = 1;
        for (int i = 0; i < r; ++i) v[pivot_col[i]] = -a[i][c];
        cpp_int lcm = 1;
        for (const auto& x : v) lcm = boost::multiprecision::lcm(lcm, denominator(x));
        std::vector<cpp_int> iv(static_cast<size_t>(cols));
        for (int j = 0; j < cols; ++j) iv[j] = numerator(v[j]) * (lcm / denominator(v[j]));
        basis.push_back(std::move(iv));
    }
    return basis;
}

// Searches small integer combinations of the kernel basis for a rank-1
// cocycle with as many nonzero weights as possible.  Deterministic.
inline std::optional<foam::Cocycle> derive_cocycle(const foam::Skeleton& skel, foam::Cocycle::Mode mode, int coeff_bound = 3) {
    auto basis = integer_kernel(triangle_condition_matrix(skel), skel.num_edges());
    if (basis.empty()) return std::nullopt;
    int dim = static_cast<int>(basis.size());
    if (dim > 6) dim = 6;  // bounded search
    std::vector<int> coeff(static_cast<size_t>(dim), -coeff_bound);
    std::vector<cpp_int> best;
    int best_nonzero = -1;
    while (true) {
        std::vector<cpp_int> w(static_cast<size_t>(skel.num_edges()), 0);
        for (int b = 0; b < dim; ++b)
            for (int j = 0; j < skel.num_edges(); ++j) w[j] += coeff[b] * basis[b][j];
        int nz = 0;
        for (const auto& x : w)
            if (x != 0) ++nz;
        if (nz > best_nonzero) {
            best_nonzero = nz;
            best = w;
        }
        int p = 0;
        while (p < dim && coeff[p] == coeff_bound) coeff[p++] = -coeff_bound;
        if (p == dim) break;
        ++coeff[p];
    }
    if (best_nonzero <= 0) return std::nullopt;
    cpp_int g = 0;
    for (const auto& x : best) g = boost::multiprecision::gcd(g, x);
    cpp_int lead = 0;
    for (const auto& x : best)
        if (x != 0) {
            lead = x;
            break;
        }
    if (lead < 0) g = -g;
    for (auto& x : best) x /= g;
    foam::Cocycle c;
    c.rank = 1;
    c.mode = mode;
    c.weight.resize(best.size());
    for (size_t j = 0; j < best.size(); ++j) c.weight[j] = foam::Vec{best[j]};
    return c;
}

// ---- brute-force relative-label oracle ----
//
// Enumerates potentials of the ten corners of the two lifted tetrahedra
// around a triangle class by walking every edge path of length <= 3 inside
// them, asserting path-independence.
struct BruteProfile {
    std::array<foam::Label, 5> labels;
    bool consistent = true;
};

inline BruteProfile brute_force_profile(const foam::Triangulation& tri, const foam::Skeleton& skel, const foam::Cocycle& c, int triangle_class) {
    const foam::TriangleClass& tc = skel.triangle(triangle_class);
    int t0 = tc.front.tet, f0 = tc.front.face;
    const foam::Gluing& g = tri.gluing(t0, f0);
    int t1 = g.tet, f1 = g.face;

    // Corner ids: 0..3 = slots of t0; 4..7 = slots of t1, identified with
    // t0 corners across the shared face.
    auto ident = [&](int corner) {
        if (corner < 4) return corner;
        int s1 = corner - 4;
        for (int s = 0; s < 4; ++s)
            if (s != f0 && g.perm[s] == s1) return s;  // shared corner
        return corner;
    };
    // oriented edges within each tet
    struct E {
        int from, to;
        foam::Vec w;
    };
    std::vector<E> es;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            if (a == b) continue;
            es.push_back({ident(a), ident(b), foam::oriented_weight(skel, c, t0, a, b)});
            es.push_back({ident(4 + a), ident(4 + b), foam::oriented_weight(skel, c, t1, a, b)});
        }
    // BFS-with-check over paths of length <= 3 from corner v0 of t0
    int v0 = -1;
    for (int s = 0; s < 4; ++s)
        if (s != f0) {
            v0 = s;
            break;
        }
    std::map<int, foam::Vec> pot;
    pot[v0] = c.zero();
    BruteProfile out;
    for (int round = 0; round < 3; ++round) {
        for (const E& e : es) {
            auto it = pot.find(e.from);
            if (it == pot.end()) continue;
            foam::Vec val = it->second + e.w;
            auto jt = pot.find(e.to);
            if (jt == pot.end())
                pot[e.to] = val;
            else if (!(jt->second == val))
                out.consistent = false;
        }
    }
    int v[3];
    int m = 0;
    for (int s = 0; s < 4; ++s)
        if (s != f0) v[m++] = s;
    int corners[5] = {v[0], v[1], v[2], f0, ident(4 + f1)};
    int cls[5] = {skel.vertex_class_of(t0, v[0]), skel.vertex_class_of(t0, v[1]), skel.vertex_class_of(t0, v[2]), skel.vertex_class_of(t0, f0), skel.vertex_class_of(t1, f1)};
    for (int s = 0; s < 5; ++s) out.labels[s] = foam::Label{cls[s], pot.at(corners[s])};
    return out;
}

// ---- corpus generation ----

struct State {
    foam::Triangulation tri;
    foam::Cocycle coc;
};

// Random walk over essentiality-preserving moves, collecting distinct
// states of bounded size.
inline std::vector<State> grow_corpus(const State& seed, int max_tets, int target, unsigned rng_seed, bool allow_lune = true) {
    std::mt19937 rng(rng_seed);
    std::vector<State> out{seed};
    std::vector<std::string> seen{foam::canonical_sig_with_cocycle(seed.tri, foam::Skeleton(seed.tri), seed.coc)};
    State cur = seed;
    int stall = 0;
    while (static_cast<int>(out.size()) < target && stall < 400) {
        foam::Skeleton skel(cur.tri);
        struct Cand {
            foam::MoveEvent ev;
        };
        std::vector<Cand> cands;
        for (int t : foam::flippable_triangles(cur.tri, skel, cur.coc)) {
            if (cur.tri.size() < max_tets) cands.push_back({foam::MoveEvent{foam::MoveEvent::Kind::TwoThree, t, {}}});
        }
        for (int e = 0; e < skel.num_edges(); ++e) {
            const auto& ec = skel.edge(e);
            if (ec.degree() == 3) cands.push_back({foam::MoveEvent{foam::MoveEvent::Kind::ThreeTwo, e, {}}});
            if (allow_lune && ec.degree() == 2) cands.push_back({foam::MoveEvent{foam::MoveEvent::Kind::TwoZero, e, {}}});
            if (allow_lune && cur.tri.size() + 2 <= max_tets) {
                for (int i = 0; i < ec.degree(); ++i)
                    for (int j = i + 1; j < ec.degree(); ++j) cands.push_back({foam::MoveEvent{foam::MoveEvent::Kind::ZeroTwo, -1, foam::Arc{e, i, j, true, true}}});
            }
        }
        if (cands.empty()) break;
        std::uniform_int_distribution<size_t> pick(0, cands.size() - 1);
        const auto& ev = cands[pick(rng)].ev;
        try {
            foam::MoveResult mr = foam::apply_event(cur.tri, skel, cur.coc, ev);
            foam::Skeleton ns(mr.tri);
            if (!mr.label_legal || !foam::is_L_essential(ns, mr.coc)) {
                ++stall;
                continue;
            }
            cur = State{std::move(mr.tri), std::move(mr.coc)};
            std::string sig = foam::canonical_sig_with_cocycle(cur.tri, foam::Skeleton(cur.tri), cur.coc);
            bool fresh = true;
            for (const auto& s : seen)
                if (s == sig) fresh = false;
            if (fresh) {
                seen.push_back(sig);
                out.push_back(cur);
                stall = 0;
            } else {
                ++stall;
            }
        } catch (const foam::move_error&) {
            ++stall;
        }
    }
    return out;
}

}  // namespace testsupport

#include "foam/sig.hpp"

#include <algorithm>
#include <sstream>

namespace foam {

namespace {

// All 24 permutations, indexed; used to enumerate start labellings.
const std::vector<Perm4>& all_perms() {
    static const std::vector<Perm4> perms = [] {
        std::vector<Perm4> v;
        int s[4] = {0, 1, 2, 3};
        std::sort(s, s + 4);
        do v.emplace_back(s[0], s[1], s[2], s[3]);
        while (std::next_permutation(s, s + 4));
        return v;
    }();
    return perms;
}

int perm_code(const Perm4& p) { return (p[0] << 6) | (p[1] << 4) | (p[2] << 2) | p[3]; }

// Breadth-first relabelling from a fixed start.  Encodes, for every
// (new tet, new face) in order, the destination new index and gluing
// permutation in new coordinates.  Newly discovered tets are labelled so
// the discovering gluing becomes the identity.
// Returns false as soon as the encoding exceeds `best` (when non-empty).
bool encode_from(const Triangulation& tri, int t0, const Perm4& p0, std::vector<int>& out, const std::vector<int>& best, std::vector<int>& order, std::vector<Perm4>& lab) {
    const int n = tri.size();
    std::vector<int> newidx(static_cast<size_t>(n), -1);
    order.clear();
    lab.assign(static_cast<size_t>(n), Perm4());
    out.clear();
    out.reserve(static_cast<size_t>(n) * 8);

    newidx[t0] = 0;
    lab[t0] = p0;
    order.push_back(t0);

    bool undecided = !best.empty();
    for (int i = 0; i < static_cast<int>(order.size()); ++i) {
        int u = order[i];
        Perm4 inv = lab[u].inverse();
        for (int f = 0; f < 4; ++f) {
            int oldface = inv[f];
            const Gluing& g = tri.gluing(u, oldface);
            if (newidx[g.tet] < 0) {
                newidx[g.tet] = static_cast<int>(order.size());
                order.push_back(g.tet);
                lab[g.tet] = g.perm.inverse().then(lab[u]);
            }
            Perm4 np = inv.then(g.perm).then(lab[g.tet]);
            out.push_back(newidx[g.tet]);
            out.push_back(perm_code(np));
            if (undecided) {
                size_t pos = out.size();
                for (size_t q = pos - 2; q < pos; ++q) {
                    if (out[q] != best[q]) {
                        if (out[q] > best[q]) return false;
                        undecided = false;
                        break;
                    }
                }
            }
        }
    }
    return true;
}

std::string render(int n, const std::vector<int>& enc) {
    std::ostringstream os;
    os << n;
    for (size_t i = 0; i < enc.size(); i += 2) os << (i % 8 == 0 ? ';' : ',') << enc[i] << '.' << enc[i + 1];
    return os.str();
}

struct CanonicalData {
    std::vector<int> enc;
    std::vector<int> order;
    std::vector<Perm4> lab;
    std::vector<std::pair<int, Perm4>> minimizers;  // all starts achieving enc
};

CanonicalData canonicalize(const Triangulation& tri) {
    CanonicalData cd;
    std::vector<int> cur, order;
    std::vector<Perm4> lab;
    for (int t = 0; t < tri.size(); ++t) {
        for (const Perm4& p : all_perms()) {
            if (!encode_from(tri, t, p, cur, cd.enc, order, lab)) continue;
            if (cd.enc.empty() || cur < cd.enc) {
                cd.enc = cur;
                cd.order = order;
                cd.lab = lab;
                cd.minimizers.clear();
                cd.minimizers.emplace_back(t, p);
            } else if (cur == cd.enc) {
                cd.minimizers.emplace_back(t, p);
            }
        }
    }
    return cd;
}

Relabelling witness_from(const Triangulation& tri, const std::vector<int>& order, const std::vector<Perm4>& lab) {
    Relabelling r;
    r.tet_image.assign(static_cast<size_t>(tri.size()), -1);
    r.perm_image.assign(static_cast<size_t>(tri.size()), Perm4());
    for (int i = 0; i < static_cast<int>(order.size()); ++i) {
        r.tet_image[order[i]] = i;
        r.perm_image[order[i]] = lab[order[i]];
    }
    return r;
}

}  // namespace

std::string canonical_sig(const Triangulation& tri) {
    CanonicalData cd = canonicalize(tri);
    return render(tri.size(), cd.enc);
}

std::string canonical_sig(const Triangulation& tri, Relabelling& witness) {
    CanonicalData cd = canonicalize(tri);
    witness = witness_from(tri, cd.order, cd.lab);
    return render(tri.size(), cd.enc);
}

std::optional<Relabelling> iso(const Triangulation& a, const Triangulation& b) {
    if (a.size() != b.size()) return std::nullopt;
    Relabelling ra, rb;
    if (canonical_sig(a, ra) != canonical_sig(b, rb)) return std::nullopt;
    std::vector<int> b_from_canon(static_cast<size_t>(b.size()), -1);
    for (int j = 0; j < b.size(); ++j) b_from_canon[rb.tet_image[j]] = j;
    Relabelling r;
    r.tet_image.assign(static_cast<size_t>(a.size()), -1);
    r.perm_image.assign(static_cast<size_t>(a.size()), Perm4());
    for (int i = 0; i < a.size(); ++i) {
        int j = b_from_canon[ra.tet_image[i]];
        r.tet_image[i] = j;
        r.perm_image[i] = ra.perm_image[i].then(rb.perm_image[j].inverse());
    }
    return r;
}

std::optional<Relabelling> iso_labelled(const Triangulation& a, const Skeleton& sa, const Cocycle& ca, const Triangulation& b, const Skeleton& sb, const Cocycle& cb) {
    if (a.size() != b.size()) return std::nullopt;
    CanonicalData da = canonicalize(a);
    CanonicalData db = canonicalize(b);
    if (da.enc != db.enc) return std::nullopt;

    std::vector<int> cur, order_a, order_b;
    std::vector<Perm4> lab_a, lab_b;
    for (auto& [tb, pb] : db.minimizers) {
        encode_from(b, tb, pb, cur, std::vector<int>(), order_b, lab_b);
        std::vector<int> canon_to_b(static_cast<size_t>(b.size()), -1);
        for (int i = 0; i < static_cast<int>(order_b.size()); ++i) canon_to_b[i] = order_b[i];
        for (auto& [ta, pa] : da.minimizers) {
            encode_from(a, ta, pa, cur, std::vector<int>(), order_a, lab_a);
            Relabelling r;
            r.tet_image.assign(static_cast<size_t>(a.size()), -1);
            r.perm_image.assign(static_cast<size_t>(a.size()), Perm4());
            std::vector<int> a_newidx(static_cast<size_t>(a.size()), -1);
            for (int i = 0; i < static_cast<int>(order_a.size()); ++i) a_newidx[order_a[i]] = i;
            for (int t = 0; t < a.size(); ++t) {
                int j = canon_to_b[a_newidx[t]];
                r.tet_image[t] = j;
                r.perm_image[t] = lab_a[t].then(lab_b[j].inverse());
            }
            // check weight transport
            bool ok = true;
            for (int k = 0; k < sa.num_edges() && ok; ++k) {
                const EdgeFrame& ref = sa.edge(k).link.front();
                int ja = r.perm_image[ref.tet][ref.p[0]], jb = r.perm_image[ref.tet][ref.p[1]];
                int e2 = ja < jb ? edge_between(ja, jb) : edge_between(jb, ja);
                int k2 = sb.edge_class_of(r.tet_image[ref.tet], e2);
                Vec w = cb.weight[k2];
                if (sb.tail_slot_of(r.tet_image[ref.tet], e2) != ja) w = -w;
                if (!(w == ca.weight[k])) ok = false;
            }
            if (ok) return r;
        }
        break;  // one b-minimizer suffices: a-minimizers already range over all isos
    }
    return std::nullopt;
}

std::string canonical_sig_with_cocycle(const Triangulation& tri, const Skeleton& skel, const Cocycle& c) {
    CanonicalData cd = canonicalize(tri);

    // Build the canonical triangulation once (any minimizer gives the same
    // gluing table) to get its edge-class ordering.
    std::vector<int> order = cd.order;
    std::vector<Perm4> lab = cd.lab;
    auto build = [&](const std::vector<int>& ord, const std::vector<Perm4>& lb) {
        Triangulation ct(tri.size());
        std::vector<int> newidx(static_cast<size_t>(tri.size()), -1);
        for (int i = 0; i < static_cast<int>(ord.size()); ++i) newidx[ord[i]] = i;
        for (int u = 0; u < tri.size(); ++u) {
            for (int of = 0; of < 4; ++of) {
                const Gluing& g = tri.gluing(u, of);
                Perm4 np = lb[u].inverse().then(g.perm).then(lb[g.tet]);
                ct.set_raw_gluing(newidx[u], lb[u][of], Gluing{newidx[g.tet], np[lb[u][of]], np});
            }
        }
        return ct;
    };
    Triangulation ct = build(order, lab);
    Skeleton cskel(ct);

    // Transport weights along each minimizing relabelling; keep the least
    // weight string so sig equality is labelled-isomorphism equality.
    std::string best;
    std::vector<int> tmp_enc, tmp_order;
    std::vector<Perm4> tmp_lab;
    for (auto& [t0, p0] : cd.minimizers) {
        encode_from(tri, t0, p0, tmp_enc, std::vector<int>(), tmp_order, tmp_lab);
        std::vector<int> newidx(static_cast<size_t>(tri.size()), -1);
        for (int i = 0; i < static_cast<int>(tmp_order.size()); ++i) newidx[tmp_order[i]] = i;
        std::ostringstream ws;
        for (const EdgeClass& ec : cskel.edges()) {
            const EdgeFrame& ref = ec.link.front();
            int u = tmp_order[ref.tet];
            Perm4 inv = tmp_lab[u].inverse();
            int a = inv[ref.p[0]], b = inv[ref.p[1]];
            int e = a < b ? edge_between(a, b) : edge_between(b, a);
            int k = skel.edge_class_of(u, e);
            bool flip = skel.tail_slot_of(u, e) != a;
            ws << "|";
            for (const Int& x : c.weight[k]) ws << (flip ? -x : x) << ",";
        }
        std::string s = ws.str();
        if (best.empty() || s < best) best = s;
    }
    std::string mode = c.mode == Cocycle::Mode::Pure ? "p" : "s";
    return render(tri.size(), cd.enc) + "/" + mode + std::to_string(c.rank) + best;
}

}  // namespace foam

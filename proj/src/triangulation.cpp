#include "foam/triangulation.hpp"

#include <cctype>
#include <sstream>

namespace foam {

std::string ValidationReport::str() const {
    std::ostringstream os;
    for (const auto& i : issues) os << i.detail << "\n";
    return os.str();
}

namespace {

constexpr int EDGE_LO[6] = {0, 0, 0, 1, 1, 2};
constexpr int EDGE_HI[6] = {1, 2, 3, 2, 3, 3};

int edge_idx(int a, int b) {
    static constexpr int tbl[4][4] = {{-1, 0, 1, 2}, {0, -1, 3, 4}, {1, 3, -1, 5}, {2, 4, 5, -1}};
    return tbl[a][b];
}

}  // namespace

ValidationReport Triangulation::validate() const {
    ValidationReport rep;
    const int n = size();
    for (int t = 0; t < n; ++t) {
        for (int f = 0; f < 4; ++f) {
            const Gluing& g = glue_[t][f];
            std::ostringstream at;
            at << "face (" << t << "," << f << ")";
            if (g.tet < 0 || g.tet >= n || g.face < 0 || g.face > 3 || !g.perm.is_valid()) {
                rep.issues.push_back({ValidationIssue::Kind::Involution, at.str() + ": missing or malformed gluing"});
                continue;
            }
            if (g.perm[f] != g.face) {
                rep.issues.push_back({ValidationIssue::Kind::Involution, at.str() + ": permutation sends face " + std::to_string(f) + " to " + std::to_string(g.perm[f]) + ", not " + std::to_string(g.face)});
                continue;
            }
            if (g.tet == t && g.face == f) {
                rep.issues.push_back({ValidationIssue::Kind::FixedFace, at.str() + ": glued to itself"});
                continue;
            }
            const Gluing& h = glue_[g.tet][g.face];
            if (h.tet != t || h.face != f || !(h.perm == g.perm.inverse())) {
                rep.issues.push_back({ValidationIssue::Kind::Involution, at.str() + ": inverse gluing mismatch at (" + std::to_string(g.tet) + "," + std::to_string(g.face) + ")"});
            }
        }
    }
    if (!rep.ok()) return rep;

    if (n > 0) {
        std::vector<char> seen(static_cast<size_t>(n), 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        int count = 1;
        while (!stack.empty()) {
            int t = stack.back();
            stack.pop_back();
            for (int f = 0; f < 4; ++f) {
                int u = glue_[t][f].tet;
                if (!seen[u]) {
                    seen[u] = 1;
                    ++count;
                    stack.push_back(u);
                }
            }
        }
        if (count != n) {
            rep.issues.push_back({ValidationIssue::Kind::Disconnected, "realisation is disconnected (" + std::to_string(count) + " of " + std::to_string(n) + " tetrahedra reachable)"});
            return rep;
        }
    }

    // Each edge-class walk must close up after one pass over its model
    // edges, orientation preserved.  A reversed closure means an edge is
    // identified with itself end-for-end, which has no manifold realisation.
    std::vector<char> visited(static_cast<size_t>(n) * 6, 0);
    for (int t0 = 0; t0 < n; ++t0) {
        for (int e0 = 0; e0 < 6; ++e0) {
            if (visited[t0 * 6 + e0]) continue;
            int lo = EDGE_LO[e0], hi = EDGE_HI[e0];
            int c = -1, d = -1;
            for (int s = 0; s < 4; ++s) {
                if (s == lo || s == hi) continue;
                (c < 0 ? c : d) = s;
            }
            int tet = t0;
            Perm4 p(lo, hi, c, d);
            const Perm4 start = p;
            int steps = 0;
            bool bad = false;
            while (true) {
                int a = p[0], b = p[1];
                int me = a < b ? edge_idx(a, b) : edge_idx(b, a);
                if (visited[tet * 6 + me]) {
                    bad = true;  // re-entered a model edge without closing
                    break;
                }
                visited[tet * 6 + me] = 1;
                const Gluing& g = glue_[tet][p[2]];
                p = Perm4(g.perm[p[0]], g.perm[p[1]], g.perm[p[3]], g.perm[p[2]]);
                tet = g.tet;
                ++steps;
                if (tet == t0 && p == start) break;
                if (steps > 6 * n) {
                    bad = true;
                    break;
                }
            }
            if (bad) {
                rep.issues.push_back({ValidationIssue::Kind::BadEdge, "edge (" + std::to_string(t0) + "," + std::to_string(e0) + ") has an inconsistent identification cycle"});
                return rep;
            }
        }
    }
    return rep;
}

bool Triangulation::operator==(const Triangulation& o) const {
    if (size() != o.size()) return false;
    for (int t = 0; t < size(); ++t)
        for (int f = 0; f < 4; ++f) {
            const Gluing& a = glue_[t][f];
            const Gluing& b = o.glue_[t][f];
            if (a.tet != b.tet || a.face != b.face || !(a.perm == b.perm)) return false;
        }
    return true;
}

std::string Triangulation::serialize() const {
    std::ostringstream os;
    os << "tets " << size() << "\n";
    for (int t = 0; t < size(); ++t) {
        os << "tet " << t << ":";
        for (int f = 0; f < 4; ++f) {
            const Gluing& g = glue_[t][f];
            os << " (" << g.tet << "," << g.perm.str() << ")";
        }
        os << "\n";
    }
    return os.str();
}

namespace {

struct Cursor {
    const std::string& text;
    size_t pos = 0;
    int line = 1;
    int col = 1;

    explicit Cursor(const std::string& t) : text(t) {}

    bool eof() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
    void advance() {
        if (text[pos] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++pos;
    }
    void skip_ws_and_comments() {
        while (!eof()) {
            char ch = peek();
            if (ch == '#') {
                while (!eof() && peek() != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(ch))) {
                advance();
            } else {
                return;
            }
        }
    }
};

ParseError err(const Cursor& c, const std::string& msg) { return ParseError{c.line, c.col, msg}; }

bool read_token(Cursor& c, std::string& out) {
    c.skip_ws_and_comments();
    if (c.eof()) return false;
    out.clear();
    while (!c.eof() && !std::isspace(static_cast<unsigned char>(c.peek())) && c.peek() != '#') {
        out.push_back(c.peek());
        c.advance();
    }
    return !out.empty();
}

bool read_int(Cursor& c, int& out) {
    std::string tok;
    if (!read_token(c, tok)) return false;
    try {
        size_t used = 0;
        out = std::stoi(tok, &used);
        return used == tok.size();
    } catch (...) {
        return false;
    }
}

}  // namespace

ParseResult parse_triangulation(const std::string& text) {
    Cursor c(text);
    std::string tok;
    if (!read_token(c, tok) || tok != "tets") return {std::nullopt, err(c, "expected 'tets N' header")};
    int n = 0;
    if (!read_int(c, n) || n < 1) return {std::nullopt, err(c, "expected positive tetrahedron count")};

    Triangulation tri(n);
    for (int t = 0; t < n; ++t) {
        if (!read_token(c, tok) || tok != "tet") return {std::nullopt, err(c, "expected 'tet'")};
        if (!read_token(c, tok) || tok != std::to_string(t) + ":") return {std::nullopt, err(c, "expected '" + std::to_string(t) + ":'")};
        for (int f = 0; f < 4; ++f) {
            c.skip_ws_and_comments();
            if (c.eof() || c.peek() != '(') return {std::nullopt, err(c, "expected '('")};
            c.advance();
            std::string inner;
            while (!c.eof() && c.peek() != ')') {
                inner.push_back(c.peek());
                c.advance();
            }
            if (c.eof()) return {std::nullopt, err(c, "unterminated gluing entry")};
            c.advance();  // ')'
            auto comma = inner.find(',');
            if (comma == std::string::npos) return {std::nullopt, err(c, "expected 'tet,perm' in gluing entry")};
            int dst = 0;
            try {
                size_t used = 0;
                dst = std::stoi(inner.substr(0, comma), &used);
                if (used != comma) return {std::nullopt, err(c, "bad tetrahedron index")};
            } catch (...) {
                return {std::nullopt, err(c, "bad tetrahedron index")};
            }
            if (dst < 0 || dst >= n) return {std::nullopt, err(c, "tetrahedron index out of range")};
            auto p = Perm4::from_string(inner.substr(comma + 1));
            if (!p) return {std::nullopt, err(c, "'" + inner.substr(comma + 1) + "' is not a permutation of 0123")};
            tri.set_raw_gluing(t, f, Gluing{dst, (*p)[f], *p});
        }
    }
    c.skip_ws_and_comments();
    if (!c.eof()) return {std::nullopt, err(c, "trailing input after gluing table")};
    return {tri, std::nullopt};
}

}  // namespace foam

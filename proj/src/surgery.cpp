#include "bl/surgery.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "bl/errors.hpp"

namespace bl::surgery {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

// copies of the cut complex at a real fiber
enum Copy { Before = 0, After = 1 };
enum Height { Top = 0, Mid = 1, Bot = 2 };
enum VEdge { Hi = 0, Lo = 1 }; // Hi: top--mid, Lo: mid--bot

struct Fiber {
    bool real = false;
    int isect = -1; // intersection id when real
    // vertex ids: [copy][height] (dummy fibers use copy 0 only)
    int vert[2][3] = {{-1, -1, -1}, {-1, -1, -1}};
    // vertical edge ids: [copy][hi/lo]
    int vedge[2][2] = {{-1, -1}, {-1, -1}};
};

struct Annulus {
    int curve = 0;
    int sign = +1; // orientation of the base lift
    std::vector<Fiber> fibers;
};

struct Face {
    int v[3];
    int e[3]; // edge ids for sides (v0,v1), (v1,v2), (v2,v0)
};

struct EdgeInfo {
    int a = -1, b = -1;   // endpoint vertex ids (pre-union)
    bool boundary_tagged = false;
    int orbit_curve = -1; // for boundary-tagged edges: which oriented orbit they cover
    int orbit_sign = 0;
};

} // namespace

CurveConfiguration CurveConfiguration::chain(int G) {
    if (G < 1) throw InvalidPattern("chain needs G >= 1");
    CurveConfiguration cfg;
    cfg.n = 2 * G;
    cfg.genus = G;
    cfg.tag = PatternTag::Chain2G;
    cfg.intersections.assign(cfg.n, std::vector<int>(cfg.n, 0));
    for (int i = 0; i + 1 < cfg.n; ++i) cfg.intersections[i][i + 1] = cfg.intersections[i + 1][i] = 1;
    return cfg;
}

void CurveConfiguration::validate() const {
    if (n < 1) throw InvalidPattern("need at least one curve");
    if (int(intersections.size()) != n) throw InvalidPattern("matrix size mismatch");
    for (int i = 0; i < n; ++i) {
        if (int(intersections[i].size()) != n) throw InvalidPattern("matrix size mismatch");
        if (intersections[i][i] != 0) throw InvalidPattern("nonzero diagonal");
        for (int j = 0; j < n; ++j) {
            if (intersections[i][j] < 0) throw InvalidPattern("negative intersection count");
            if (intersections[i][j] != intersections[j][i]) throw InvalidPattern("asymmetric matrix");
        }
    }
    if (tag == PatternTag::Chain2G) {
        if (n % 2 != 0 || n != 2 * genus) throw InvalidPattern("Chain2G needs n = 2G");
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const int want = (std::abs(i - j) == 1) ? 1 : 0;
                if (intersections[i][j] != want) throw InvalidPattern("Chain2G pattern violated");
            }
    }
}

SectionTopology fried_surgery_topology(const CurveConfiguration& cfg) {
    cfg.validate();
    const int n = cfg.n;

    // enumerate intersection points; record the fiber slot on each incident curve
    struct Isect {
        int ci, cj;       // ci < cj
        int fiber_on_i = -1, fiber_on_j = -1;
    };
    std::vector<Isect> isects;
    std::vector<std::vector<int>> events(n); // per curve: intersection ids in canonical order
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int r = 0; r < cfg.intersections[i][j]; ++r) {
                isects.push_back({i, j, -1, -1});
                const int id = int(isects.size()) - 1;
                events[i].push_back(id);
                events[j].push_back(id);
            }
    for (int i = 0; i < n; ++i)
        for (int t = 0; t < int(events[i].size()); ++t) {
            Isect& x = isects[events[i][t]];
            (x.ci == i ? x.fiber_on_i : x.fiber_on_j) = t;
        }

    // annulus index: 2*curve + (sign < 0)
    auto aid = [](int curve, int sign) { return 2 * curve + (sign < 0 ? 1 : 0); };
    std::vector<Annulus> ann(2 * n);

    int n_vert = 0, n_edge = 0;
    std::vector<EdgeInfo> edges;
    auto new_edge = [&](int va, int vb) {
        edges.push_back({va, vb, false, -1, 0});
        return n_edge++;
    };

    for (int i = 0; i < n; ++i) {
        const int k = int(events[i].size());
        const int f = std::max(k, 2);
        for (int sgn : {+1, -1}) {
            Annulus& A = ann[aid(i, sgn)];
            A.curve = i;
            A.sign = sgn;
            A.fibers.resize(f);
            for (int t = 0; t < f; ++t) {
                Fiber& fb = A.fibers[t];
                fb.real = t < k;
                fb.isect = fb.real ? events[i][t] : -1;
                const int ncopies = fb.real ? 2 : 1;
                for (int c = 0; c < ncopies; ++c) {
                    for (int h = 0; h < 3; ++h) fb.vert[c][h] = n_vert++;
                    fb.vedge[c][Hi] = new_edge(fb.vert[c][Top], fb.vert[c][Mid]);
                    fb.vedge[c][Lo] = new_edge(fb.vert[c][Mid], fb.vert[c][Bot]);
                }
            }
        }
    }

    // strips and faces
    std::vector<Face> faces;
    for (int i = 0; i < n; ++i) {
        const int f = std::max(int(events[i].size()), 2);
        for (int sgn : {+1, -1}) {
            Annulus& A = ann[aid(i, sgn)];
            for (int t = 0; t < f; ++t) {
                Fiber& L = A.fibers[t];
                Fiber& R = A.fibers[(t + 1) % f];
                const int lc = L.real ? After : 0; // dummy fibers have a single copy 0
                const int rc = R.real ? Before : 0;
                const int Lt = L.vert[lc][Top], Lm = L.vert[lc][Mid], Lb = L.vert[lc][Bot];
                const int Rt = R.vert[rc][Top], Rm = R.vert[rc][Mid], Rb = R.vert[rc][Bot];
                const int le_hi = L.vedge[lc][Hi], le_lo = L.vedge[lc][Lo];
                const int re_hi = R.vedge[rc][Hi], re_lo = R.vedge[rc][Lo];

                const int top = new_edge(Lt, Rt);
                const int mid = new_edge(Lm, Rm);
                const int bot = new_edge(Lb, Rb);
                const int d1 = new_edge(Lt, Rm);
                const int d2 = new_edge(Lm, Rb);

                // the +phi boundary of A(sign*curve) covers the orbit sign*curve
                edges[top].boundary_tagged = true;
                edges[top].orbit_curve = i;
                edges[top].orbit_sign = sgn;
                edges[bot].boundary_tagged = true;
                edges[bot].orbit_curve = i;
                edges[bot].orbit_sign = -sgn;

                faces.push_back({{Lt, Rt, Rm}, {top, re_hi, d1}});
                faces.push_back({{Lt, Rm, Lm}, {d1, mid, le_hi}});
                faces.push_back({{Lm, Rm, Rb}, {mid, re_lo, d2}});
                faces.push_back({{Lm, Rb, Lb}, {d2, bot, le_lo}});
            }
        }
    }

    UnionFind vu(n_vert), eu(n_edge);

    // surgery gluings at every intersection fiber: four arcs, each covered by
    // the hi-edge of one annulus and the lo-edge of another; glue before copies
    // to after copies both ways, matching vertex heights (top~mid, mid~bot)
    for (int x = 0; x < int(isects.size()); ++x) {
        const Isect& s = isects[x];
        Fiber& pi = ann[aid(s.ci, +1)].fibers[s.fiber_on_i];
        Fiber& mi = ann[aid(s.ci, -1)].fibers[s.fiber_on_i];
        Fiber& pj = ann[aid(s.cj, +1)].fibers[s.fiber_on_j];
        Fiber& mj = ann[aid(s.cj, -1)].fibers[s.fiber_on_j];

        struct Arc {
            Fiber* hi_f;
            Fiber* lo_f;
        };
        const Arc arcs[4] = {
            {&pi, &mj}, // arc (0, alpha):        A(+i) hi ~ A(-j) lo
            {&pj, &pi}, // arc (alpha, pi):       A(+j) hi ~ A(+i) lo
            {&mi, &pj}, // arc (pi, pi+alpha):    A(-i) hi ~ A(+j) lo
            {&mj, &mi}, // arc (pi+alpha, 2pi):   A(-j) hi ~ A(-i) lo
        };
        for (const Arc& arc : arcs) {
            for (int c = 0; c < 2; ++c) {
                const int ca = c;              // copy on the hi-side annulus
                const int cb = 1 - c;          // opposite copy on the lo-side annulus
                eu.unite(arc.hi_f->vedge[ca][Hi], arc.lo_f->vedge[cb][Lo]);
                vu.unite(arc.hi_f->vert[ca][Top], arc.lo_f->vert[cb][Mid]);
                vu.unite(arc.hi_f->vert[ca][Mid], arc.lo_f->vert[cb][Bot]);
            }
        }
    }

    // resolve roots, count incidences
    std::vector<int> edge_face_count(n_edge, 0);
    UnionFind comp(int(faces.size()));
    std::map<int, std::vector<int>> edge_faces;
    for (int fi = 0; fi < int(faces.size()); ++fi)
        for (int e : faces[fi].e) edge_faces[eu.find(e)].push_back(fi);
    for (auto& [e, fs] : edge_faces) {
        (void)e;
        for (std::size_t k = 1; k < fs.size(); ++k) comp.unite(fs[0], fs[k]);
    }

    // per-component accounting
    std::map<int, int> comp_index;
    for (int fi = 0; fi < int(faces.size()); ++fi) {
        const int r = comp.find(fi);
        if (!comp_index.count(r)) comp_index[r] = int(comp_index.size());
    }
    const int n_comp = int(comp_index.size());

    std::vector<std::map<int, bool>> comp_verts(n_comp), comp_edges(n_comp);
    for (int fi = 0; fi < int(faces.size()); ++fi) {
        const int c = comp_index[comp.find(fi)];
        for (int v : faces[fi].v) comp_verts[c][vu.find(v)] = true;
        for (int e : faces[fi].e) comp_edges[c][eu.find(e)] = true;
    }
    std::vector<int> comp_faces(n_comp, 0);
    for (int fi = 0; fi < int(faces.size()); ++fi) ++comp_faces[comp_index[comp.find(fi)]];

    // orientability per component: BFS with consistent induced edge orientations.
    // Each face induces a direction on each side; adjacent faces must induce a
    // shared edge oppositely, up to a global flip of one of them.
    std::vector<int> flip(faces.size(), -1);
    bool orientable_all = true;
    {
        // edge root -> list of (face, direction of the edge in that face)
        std::map<int, std::vector<std::pair<int, int>>> inc;
        for (int fi = 0; fi < int(faces.size()); ++fi) {
            const Face& F = faces[fi];
            const int vr[3] = {vu.find(F.v[0]), vu.find(F.v[1]), vu.find(F.v[2])};
            for (int s = 0; s < 3; ++s) {
                const int er = eu.find(F.e[s]);
                const int ea = vu.find(edges[F.e[s]].a);
                // +1 when the face traverses the edge from its stored a to b
                const int dir = (vr[s] == ea) ? +1 : -1;
                inc[er].push_back({fi, dir});
            }
        }
        for (int start = 0; start < int(faces.size()); ++start) {
            if (flip[start] != -1) continue;
            flip[start] = 0;
            std::vector<int> stack = {start};
            while (!stack.empty()) {
                const int fi = stack.back();
                stack.pop_back();
                const Face& F = faces[fi];
                for (int s = 0; s < 3; ++s) {
                    const int er = eu.find(F.e[s]);
                    for (const auto& [fj, dj] : inc[er]) {
                        if (fj == fi) continue;
                        // my direction on this edge
                        int di = 0;
                        for (const auto& [fk, dk] : inc[er])
                            if (fk == fi) di = dk;
                        const int want = (di == dj) ? 1 - flip[fi] : flip[fi];
                        if (flip[fj] == -1) {
                            flip[fj] = want;
                            stack.push_back(fj);
                        } else if (flip[fj] != want) {
                            orientable_all = false;
                        }
                    }
                }
            }
        }
    }

    // boundary cycles: boundary edges have exactly one incident face
    std::vector<int> boundary_edges;
    for (auto& [er, fs] : edge_faces)
        if (fs.size() == 1) boundary_edges.push_back(er);

    std::map<int, std::vector<int>> vert_bedges;
    // map root -> one original edge id carrying endpoints/tags
    std::map<int, int> root_original;
    for (int e = 0; e < n_edge; ++e) {
        const int r = eu.find(e);
        if (!root_original.count(r)) root_original[r] = e;
        else if (edges[e].boundary_tagged) root_original[r] = e;
    }
    for (int er : boundary_edges) {
        const EdgeInfo& ei = edges[root_original[er]];
        vert_bedges[vu.find(ei.a)].push_back(er);
        vert_bedges[vu.find(ei.b)].push_back(er);
    }

    std::vector<BoundaryComponent> census;
    std::vector<int> cycle_component; // component index of each boundary cycle
    {
        std::map<int, bool> used;
        for (int e0 : boundary_edges) {
            if (used[e0]) continue;
            // walk the cycle
            int count = 0;
            int curve = -1, sign = 0;
            int e = e0;
            int v = vu.find(edges[root_original[e]].a);
            while (!used[e]) {
                used[e] = true;
                ++count;
                const EdgeInfo& ei = edges[root_original[e]];
                if (ei.boundary_tagged) {
                    curve = ei.orbit_curve;
                    sign = ei.orbit_sign;
                }
                const int va = vu.find(ei.a), vb = vu.find(ei.b);
                const int next_v = (v == va) ? vb : va;
                int next_e = -1;
                for (int cand : vert_bedges[next_v])
                    if (cand != e && !used[cand]) next_e = cand;
                if (next_e == -1) break;
                e = next_e;
                v = next_v;
            }
            const int f_curve = std::max(int(events[curve].size()), 2);
            BoundaryComponent bc;
            bc.curve = curve;
            bc.sign = sign;
            bc.degree = count / f_curve;
            census.push_back(bc);
            cycle_component.push_back(comp_index[comp.find(edge_faces[e0][0])]);
        }
    }

    SectionTopology out;
    out.faces = int(faces.size());
    {
        std::map<int, bool> vroots, eroots;
        for (int v = 0; v < n_vert; ++v) vroots[vu.find(v)] = true;
        for (int e = 0; e < n_edge; ++e) eroots[eu.find(e)] = true;
        out.vertices = int(vroots.size());
        out.edges = int(eroots.size());
    }
    out.euler = out.vertices - out.edges + out.faces;
    out.connected = n_comp == 1;
    out.orientable = orientable_all;
    out.boundary = census;

    out.components.resize(n_comp);
    for (int c = 0; c < n_comp; ++c) {
        ComponentTopology& ct = out.components[c];
        ct.vertices = int(comp_verts[c].size());
        ct.edges = int(comp_edges[c].size());
        ct.faces = comp_faces[c];
        ct.euler = ct.vertices - ct.edges + ct.faces;
        ct.orientable = orientable_all;
        ct.boundary_count = 0;
        for (std::size_t b = 0; b < census.size(); ++b)
            if (cycle_component[b] == c) ++ct.boundary_count;
        // chi = 2 - 2 genus - #boundary for a connected orientable component
        ct.genus = (2 - ct.euler - ct.boundary_count) / 2;
    }
    out.genus = out.connected ? out.components[0].genus : 0;
    return out;
}

std::vector<ChainRow> chain_table(int G_max) {
    if (G_max < 1) throw InvalidPattern("chain_table needs G_max >= 1");
    std::vector<ChainRow> rows;
    for (int G = 1; G <= G_max; ++G) {
        const SectionTopology t = fried_surgery_topology(CurveConfiguration::chain(G));
        rows.push_back({G, t.euler, t.genus, int(t.boundary.size()), t.connected});
    }
    return rows;
}

std::string SectionTopology::to_json() const {
    std::ostringstream os;
    os << "{\"vertices\":" << vertices << ",\"edges\":" << edges << ",\"faces\":" << faces
       << ",\"euler\":" << euler << ",\"connected\":" << (connected ? "true" : "false")
       << ",\"orientable\":" << (orientable ? "true" : "false") << ",\"genus\":" << genus
       << ",\"boundary\":[";
    for (std::size_t i = 0; i < boundary.size(); ++i) {
        if (i) os << ',';
        os << "{\"curve\":" << boundary[i].curve << ",\"sign\":" << boundary[i].sign
           << ",\"degree\":" << boundary[i].degree << "}";
    }
    os << "],\"components\":[";
    for (std::size_t i = 0; i < components.size(); ++i) {
        if (i) os << ',';
        const ComponentTopology& c = components[i];
        os << "{\"vertices\":" << c.vertices << ",\"edges\":" << c.edges
           << ",\"faces\":" << c.faces << ",\"euler\":" << c.euler
           << ",\"boundary_count\":" << c.boundary_count << ",\"genus\":" << c.genus
           << ",\"orientable\":" << (c.orientable ? "true" : "false") << "}";
    }
    os << "]}";
    return os.str();
}

} // namespace bl::surgery

// Combinatorial Fried surgery: from a configuration of oriented simple closed
// curves with transverse intersection counts, compute the exact topology of
// the surgered surface of section (boundary circles with covering degrees,
// Euler characteristic, genus, connectivity, orientability).
//
// The complex generalizes the 6-vertex / 14-edge / 8-face triangulation of a
// Birkhoff annulus: each annulus is cut at the double-point fibers over the
// intersection points of its base curve, and the four flanges at every fiber
// arc are re-glued before-to-after across the two crossing annuli. Crossings
// are taken in the canonical positive convention (angle from the lower-index
// curve to the higher-index one in (0, pi)); the result is invariant under
// curve relabelling.

#ifndef BL_SURGERY_HPP
#define BL_SURGERY_HPP

#include <string>
#include <vector>

namespace bl::surgery {

enum class PatternTag { Chain2G, General };

struct CurveConfiguration {
    int n = 0;                                   // number of curves
    int genus = 1;                               // ambient genus (metadata)
    std::vector<std::vector<int>> intersections; // symmetric, zero diagonal
    PatternTag tag = PatternTag::General;

    // the 2G-chain: consecutive curves intersect once, others are disjoint
    static CurveConfiguration chain(int G);
    void validate() const; // throws InvalidPattern
};

struct BoundaryComponent {
    int curve = 0;  // base curve index
    int sign = +1;  // +1: covers the positive lift, -1: the negative one
    int degree = 1; // covering degree over the oriented closed orbit
};

struct ComponentTopology {
    int vertices = 0, edges = 0, faces = 0;
    int euler = 0;
    int boundary_count = 0;
    int genus = 0;
    bool orientable = true;
};

struct SectionTopology {
    int vertices = 0, edges = 0, faces = 0; // totals over the whole complex
    int euler = 0;
    bool connected = true;
    bool orientable = true;
    int genus = 0; // of the single component when connected
    std::vector<BoundaryComponent> boundary;
    std::vector<ComponentTopology> components;

    std::string to_json() const;
};

SectionTopology fried_surgery_topology(const CurveConfiguration& cfg);

struct ChainRow {
    int G = 0;
    int euler = 0;
    int genus = 0;
    int boundary = 0;
    bool connected = false;
};

std::vector<ChainRow> chain_table(int G_max);

} // namespace bl::surgery

#endif

// Discrete closed curves on a surface: the state of the curve shortening flow
// and the sample format of converged closed geodesics.

#ifndef BL_CURVE_HPP
#define BL_CURVE_HPP

#include <vector>

#include "bl/surface.hpp"

namespace bl {

// Closed polygonal curve stored in the universal cover along the loop: the
// vertex list never wraps; closure means pts[n] would equal pts[0] + loop offset.
struct DiscreteCurve {
    std::vector<SurfacePoint> pts;
    double loop_du = 0.0; // total u advance over one loop (multiple of chart period)
    double loop_dv = 0.0;
    bool resampled = false;

    int n() const { return int(pts.size()); }
    SurfacePoint at_cyclic(int i) const {
        const int m = n();
        int k = ((i % m) + m) % m;
        SurfacePoint p = pts[k];
        const int w = (i - k) / m; // signed wrap count
        p.u += w * loop_du;
        p.v += w * loop_dv;
        return p;
    }
};

// Fast signed-distance geometry for curves that are coordinate circles or
// straight lattice lines; Polyline is the generic fallback.
enum class CurveGeomKind { ParallelV, MeridianU, TorusLine, Polyline };

struct CurveGeometry {
    CurveGeomKind kind = CurveGeomKind::Polyline;
    double v0 = 0.0;  // ParallelV
    double u0 = 0.0;  // MeridianU
    int p = 0, q = 0; // TorusLine winding
    double c = 0.0;   // TorusLine offset: q*u - p*v = c (mod 1), scaled
    int orient = +1;  // +1 if the curve runs with increasing coordinate
};

struct CurvatureProfile {
    std::vector<double> k;            // discrete geodesic curvature per vertex
    std::vector<TangentVector> nu;    // positively oriented unit normals
    std::vector<TangentVector> tang;  // unit tangents
    std::vector<double> ds;           // edge arclengths (i -> i+1)
    double length = 0.0;
    double max_abs_k = 0.0;
};

// Discrete geodesic curvature (second-order), normals, total length.
// Throws DegenerateCurve on duplicate points / zero-length edges.
CurvatureProfile curvature_profile(const SurfaceMetric& m, const DiscreteCurve& c);

double curve_length(const SurfaceMetric& m, const DiscreteCurve& c);

// Resample to n points at uniform arclength.
DiscreteCurve resample(const SurfaceMetric& m, const DiscreteCurve& c, int n);

// Embeddedness: no two non-adjacent segments intersect (checked in the cover,
// against neighbouring lattice translates on periodic charts).
bool is_embedded(const SurfaceMetric& m, const DiscreteCurve& c);

// max chart-coordinate extent, measured with the metric at the curve barycenter
double curve_diameter(const SurfaceMetric& m, const DiscreteCurve& c);

// Detect coordinate-circle / lattice-line structure of a sampled curve.
CurveGeometry detect_geometry(const SurfaceMetric& m, const DiscreteCurve& c);

// Transverse intersection count between two closed curves (segment pairs in
// the cover, nearby lattice translates included).
int intersection_count(const SurfaceMetric& m, const DiscreteCurve& a, const DiscreteCurve& b);

// Canonical constructors used by seeds and tests.
DiscreteCurve make_circle(const SurfaceMetric& m, SurfacePoint center, double radius, int n);
DiscreteCurve make_parallel(const SurfaceMetric& m, double v0, int n, int orient = +1);
DiscreteCurve make_meridian(const SurfaceMetric& m, double u0, int n); // torus models
DiscreteCurve make_torus_line(const SurfaceMetric& m, int p, int q, SurfacePoint base, int n,
                              double wiggle = 0.0);

} // namespace bl

#endif

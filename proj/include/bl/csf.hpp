// Discrete curve shortening flow: semi-implicit normal motion by geodesic
// curvature, driving embedded loops to simple closed geodesics or to point
// collapse. Converged curves are polished by closed-orbit Newton shooting.

#ifndef BL_CSF_HPP
#define BL_CSF_HPP

#include <optional>
#include <string>
#include <vector>

#include "bl/curve.hpp"
#include "bl/flow.hpp"

namespace bl::csf {

using bl::ClosedGeodesicRecord;

struct FunnelWindow {
    double ell = 0.0;
    double eps = 0.0;
};

// |L - ell| < eps^2 and max |k| < eps
bool funnel_check(const SurfaceMetric& m, const DiscreteCurve& c, const FunnelWindow& w);

struct StepPolicy {
    double cfl = 0.4;          // ds <= cfl * (min edge length)^2
    double ds_max = 5e-3;
    double eps_target = 1e-3;  // curvature threshold entering the funnel
    long max_steps = 400000;
    double collapse_tol = 0.0; // 0: defaults to 1e-3 * inj_radius_estimate
    int target_n = 256;        // resample count, edge length ~ L / target_n
    int min_n = 48, max_n = 1024;
    std::string trace_path;    // optional per-step CSV: s, L, max|k|, n
};

enum class OutcomeKind { ConvergedGeodesic, Collapsed, Running };

struct FlowOutcome {
    OutcomeKind kind = OutcomeKind::Running;
    std::optional<ClosedGeodesicRecord> record; // ConvergedGeodesic
    SurfacePoint extinction_point{};            // Collapsed
    double s_extinct = 0.0;
    DiscreteCurve curve; // final state (Running) or the pre-polish funnel curve
    double s_elapsed = 0.0;
    long steps = 0;
    bool length_monotone = true;
    double final_length = 0.0;
};

FlowOutcome evolve(const SurfaceMetric& m, const DiscreteCurve& c0, const StepPolicy& policy = {});

// Newton shooting from a near-geodesic curve; nullopt unless the orbit closes
// to 1e-8 with the curve's homotopy tag and a nearby length.
std::optional<ClosedGeodesicRecord> polish_to_geodesic(const SurfaceMetric& m,
                                                       const DiscreteCurve& c);

// Regions with geodesic boundary for the confined flow.
struct RegionSpec {
    enum class Kind {
        VBand,           // v in (v_lo, v_hi) on revolution models
        Box,             // open box in cover coordinates (polygon complements)
        CurveComplement, // stay off the stored closed geodesics
    };
    Kind kind = Kind::VBand;
    double v_lo = 0.0, v_hi = 0.0;
    double u_lo = 0.0, u_hi = 0.0;
    std::vector<ClosedGeodesicRecord> boundary;

    static RegionSpec v_band(double lo, double hi) {
        RegionSpec r;
        r.kind = Kind::VBand;
        r.v_lo = lo;
        r.v_hi = hi;
        return r;
    }
    static RegionSpec box(double ulo, double uhi, double vlo, double vhi) {
        RegionSpec r;
        r.kind = Kind::Box;
        r.u_lo = ulo;
        r.u_hi = uhi;
        r.v_lo = vlo;
        r.v_hi = vhi;
        return r;
    }
    static RegionSpec complement(std::vector<ClosedGeodesicRecord> recs) {
        RegionSpec r;
        r.kind = Kind::CurveComplement;
        r.boundary = std::move(recs);
        return r;
    }

    bool contains(const SurfaceMetric& m, const DiscreteCurve& c) const;
};

// Same as evolve plus a per-step confinement assertion. Throws
// PreconditionFailed when c0 starts outside, ConvexityViolation when an
// accepted step would exit (never expected across geodesic boundaries).
FlowOutcome region_confined_evolve(const SurfaceMetric& m, const DiscreteCurve& c0,
                                   const RegionSpec& region, const StepPolicy& policy = {});

} // namespace bl::csf

#endif

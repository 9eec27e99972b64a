// Geodesic flow on the unit tangent bundle with Jacobi-field transport:
// orbit integration, conjugate points, Floquet multipliers, invariant
// manifold seeds of hyperbolic closed orbits.
//
// The transverse plane V of the linearized flow is coordinatized by (J, J')
// in the orthonormal frame (T, N) along the geodesic, N = J T the positively
// oriented unit normal: J is the normal displacement, J' its derivative
// (equivalently the angle between the varied and transported directions).
// Both transported Jacobi solutions are carried so closed-orbit monodromy is
// available directly.

#ifndef BL_FLOW_HPP
#define BL_FLOW_HPP

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bl/curve.hpp"
#include "bl/ode.hpp"
#include "bl/surface.hpp"

namespace bl {

struct UnitTangent {
    SurfacePoint p;
    TangentVector dir; // unit w.r.t. the metric

    static UnitTangent make(const SurfaceMetric& m, SurfacePoint p, TangentVector w) {
        return {p, m.normalized(p, w)};
    }
};

UnitTangent flip(const UnitTangent& z);

// state layout: u, v, du, dv, J1, J1', J2, J2'
struct FlowState {
    double u = 0, v = 0, du = 0, dv = 0;
    double J1 = 0, J1p = 0, J2 = 0, J2p = 0;
    UnitTangent unit_tangent(const SurfaceMetric& m) const {
        return UnitTangent::make(m, {u, v}, {du, dv});
    }
};

struct IntegrateOptions {
    double rel_tol = 1e-12;
    double abs_tol = 1e-12;
    bool renormalize = true; // project to unit speed after each step
    long max_steps = 40'000'000;
};

class Trajectory {
public:
    double duration = 0.0; // signed
    bool with_jacobi = false;
    bool reversed = false;             // built by integrating the flipped vector
    std::vector<OdeStep<8>> steps;     // forward internal time in [0, |duration|]

    FlowState at(double t) const;       // t in [min(0,duration), max(0,duration)]
    UnitTangent state(const SurfaceMetric& m, double t) const;
    FlowState end() const { return at(duration); }

    void write_csv(const std::string& path, double stride) const;
};

// Adaptive integration of the geodesic equations (+ Jacobi columns when
// requested: (J1,J1')=(0,1), (J2,J2')=(1,0)). Errors: PoleTransit, StepFailure.
Trajectory integrate(const SurfaceMetric& m, const UnitTangent& z0, double T,
                     bool with_jacobi = false, const IntegrateOptions& opt = {});

// Streaming variant: the callback sees each accepted dense step; return false
// to stop early. Only forward internal time; caller handles reversal.
void integrate_scan(const SurfaceMetric& m, const UnitTangent& z0, double T, bool with_jacobi,
                    const IntegrateOptions& opt, const std::function<bool(const OdeStep<8>&)>& cb);

// Zeros in (0, T] of the Jacobi field with J(0)=0, J'(0)=1, to 1e-10 in time.
std::vector<double> conjugate_points(const SurfaceMetric& m, const UnitTangent& z0, double T,
                                     const IntegrateOptions& opt = {});

enum class OrbitType { Hyperbolic, Elliptic, Degenerate };

std::string orbit_type_name(OrbitType t);

struct FloquetResult {
    std::complex<double> sigma, sigma_inv;
    OrbitType type = OrbitType::Degenerate;
    double trace = 0.0;
    double det = 0.0;
    double monodromy[2][2] = {{0, 0}, {0, 0}};
    // total transverse rotation over one period (Sturm-normalized); only
    // meaningful for elliptic orbits
    double rotation = 0.0;
    int conjugate_count = 0; // zeros of the (0,1) solution in (0, length]
};

struct ClosedGeodesicRecord {
    DiscreteCurve curve;              // unit-speed samples, closed
    std::vector<TangentVector> dirs;  // unit tangent at each sample
    double length = 0.0;
    FloquetResult floquet;
    bool has_conjugate_points = false;
    bool is_waist = false;
    int wind_u = 0, wind_v = 0; // homotopy tag on torus models
    bool on_sphere = false;     // genus-0 model: every loop is contractible
    CurveGeometry geometry;
    double clairaut = 0.0; // revolution models; 0 otherwise

    bool contractible() const { return on_sphere || (wind_u == 0 && wind_v == 0); }
    UnitTangent initial() const { return {curve.pts.at(0), dirs.at(0)}; }
    OrbitType type() const { return floquet.type; }
};

// Monodromy and multipliers of a closed geodesic. Throws NotClosed when the
// record's orbit fails to close to 1e-6.
FloquetResult floquet(const SurfaceMetric& m, const ClosedGeodesicRecord& rec,
                      const IntegrateOptions& opt = {});

struct ClosedOrbit {
    UnitTangent z;
    double length = 0.0;
    double closure_gap = 0.0;
};

// Newton shooting refinement of a nearly closed unit-speed orbit.
// wind_du/wind_dv: expected chart offsets over one period.
ClosedOrbit refine_closed_orbit(const SurfaceMetric& m, const UnitTangent& guess,
                                double length_guess, double wind_du, double wind_dv,
                                const IntegrateOptions& opt = {});

// Full record assembly from a closed orbit: samples, Floquet data, conjugate
// points, waist classification (Floquet for non-degenerate orbits, sampled
// C0 perturbations otherwise).
ClosedGeodesicRecord make_record(const SurfaceMetric& m, const UnitTangent& z, double length,
                                 int n_samples = 512, const IntegrateOptions& opt = {});

enum class Side { A, B }; // sign of the normal component of the seed offset

// Seeds at metric distance delta from the closed orbit along the stable
// (or unstable) eigendirection, on one side of the curve. Throws NotHyperbolic.
std::vector<UnitTangent> invariant_manifold_seed(const SurfaceMetric& m,
                                                 const ClosedGeodesicRecord& rec, Side side,
                                                 bool stable, double delta = 0.0, int count = 16);

// Seeds along the eigendirection ray at the record's base point, one per
// requested distance; used to parametrize a fundamental segment of the
// manifold when growing its trace.
std::vector<UnitTangent> invariant_manifold_ray(const SurfaceMetric& m,
                                                const ClosedGeodesicRecord& rec, Side side,
                                                bool stable, const std::vector<double>& deltas);

// Distance in SM from z to the lift of the record's orbit (chart metric on the
// base plus direction mismatch; adequate at small separations).
double orbit_lift_distance(const SurfaceMetric& m, const ClosedGeodesicRecord& rec,
                           const UnitTangent& z);

} // namespace bl

#endif

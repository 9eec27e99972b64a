// Parametrized closed orientable surfaces: metric, Christoffels, curvature,
// area and injectivity-radius queries. Three families are shipped, all with
// closed-form coefficients so every downstream test has an analytic oracle:
//
//   SphereOfRevolution   g = m(v)^2 dv^2 + rho(v)^2 du^2,  v in (0, pi), u in [0, 2pi)
//   TorusOfRevolution    same form, v periodic
//   ConformalTorus       g = e^{2f(u,v)} (du^2 + dv^2) on the unit square
//
// Revolution models accept an optional conformal warp e^{2f(u,v)} for
// symmetry-breaking experiments.

#ifndef BL_SURFACE_HPP
#define BL_SURFACE_HPP

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "bl/errors.hpp"
#include "bl/trig.hpp"

namespace bl {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

struct SurfacePoint {
    double u = 0.0;
    double v = 0.0;
};

struct TangentVector {
    double du = 0.0;
    double dv = 0.0;
};

enum class SurfaceKind { SphereOfRevolution, TorusOfRevolution, ConformalTorus };

struct Metric2 {
    double g11 = 1.0, g12 = 0.0, g22 = 1.0;
    double det() const { return g11 * g22 - g12 * g12; }
};

// First fundamental form, its first partials, and Gaussian curvature at a point.
struct MetricJet {
    Metric2 g;
    Metric2 dgu; // d/du of coefficients
    Metric2 dgv; // d/dv
    double K = 0.0;
};

// Gamma^u_{uu}, Gamma^u_{uv}, Gamma^u_{vv}, Gamma^v_{uu}, Gamma^v_{uv}, Gamma^v_{vv}
struct Christoffels {
    double uuu = 0, uuv = 0, uvv = 0, vuu = 0, vuv = 0, vvv = 0;
};

struct MetricAt {
    Metric2 g;
    Christoffels gamma;
    double K = 0.0;
};

// Product Fourier mode for conformal factors:
//   amp * trig_u(ju * wu * u) * trig_v(jv * wv * v)
// where trig is sin when the flag is set, cos otherwise; wu, wv are the
// angular scales of the chart.
struct WarpMode {
    int ju = 0;
    int jv = 0;
    bool sin_u = false;
    bool sin_v = false;
    double amp = 0.0;
};

class SurfaceMetric {
public:
    // --- builders -----------------------------------------------------------
    static SurfaceMetric sphere_of_revolution(TrigSeries rho, TrigSeries m_sq,
                                              std::vector<WarpMode> warp = {});
    static SurfaceMetric round_sphere();              // rho = sin v
    static SurfaceMetric spheroid(double c);          // axes (1, 1, c)
    static SurfaceMetric dumbbell();                  // neck at v = pi/2, two bulges
    static SurfaceMetric dumbbell_perturbed(double amplitude); // conformal bump

    static SurfaceMetric torus_of_revolution(double R, double r);
    static SurfaceMetric torus_profile(TrigSeries rho, TrigSeries m_sq);
    static SurfaceMetric two_neck_torus();            // rho = 2 + cos(2v)/2

    static SurfaceMetric conformal_torus(std::vector<WarpMode> modes);
    static SurfaceMetric flat_torus();

    // --- chart --------------------------------------------------------------
    SurfaceKind kind() const { return kind_; }
    std::string kind_name() const;
    int euler_characteristic() const { return kind_ == SurfaceKind::SphereOfRevolution ? 2 : 0; }
    int genus() const { return kind_ == SurfaceKind::SphereOfRevolution ? 0 : 1; }

    double period_u() const { return period_u_; }
    bool v_periodic() const { return v_periodic_; }
    double period_v() const { return v_periodic_ ? v_max_ - v_min_ : 0.0; }
    double v_min() const { return v_min_; }
    double v_max() const { return v_max_; }
    // queries closer than this to a pole are rejected (sphere models)
    double polar_cap() const { return 1e-6; }

    SurfacePoint reduce(SurfacePoint p) const; // idempotent, exact on fixed points
    bool in_chart(SurfacePoint p) const;

    // --- metric data ----------------------------------------------------------
    MetricJet jet(SurfacePoint p) const;  // throws PointOutsideChart
    MetricAt at(SurfacePoint p) const;    // assembled Christoffels + K
    static Christoffels christoffels(const MetricJet& jet);

    // integration path: same formulas, tighter pole guard (throws PoleTransit)
    MetricJet jet_flow(double u, double v) const;

    // --- tangent algebra ------------------------------------------------------
    double dot(SurfacePoint p, TangentVector a, TangentVector b) const;
    double norm(SurfacePoint p, TangentVector a) const;
    TangentVector normalized(SurfacePoint p, TangentVector a) const;
    // rotate by +90 degrees (complex structure J); (t, Jt) positively oriented
    TangentVector rotate90(SurfacePoint p, TangentVector t) const;
    double sqrt_det(SurfacePoint p) const;

    // --- global quantities ------------------------------------------------------
    double total_area() const { return area_; }
    double gauss_bonnet_integral() const { return gb_integral_; } // integral of K dA
    double inj_radius_estimate() const { return inj_; }
    double max_curvature() const { return max_K_; }

    struct CurvatureBound {
        bool holds;
        double max_K;
        double threshold;
    };
    CurvatureBound check_curvature_bound() const; // throws WrongGenus on spheres

    // --- revolution helpers ------------------------------------------------------
    bool is_revolution() const;   // revolution model without conformal warp
    double profile_radius(double v) const { return rho_.eval(v); }
    double profile_radius_deriv(double v) const { return rho_.deriv(v); }
    double meridian_speed(double v) const { return std::sqrt(m_sq_.eval(v)); }
    // Clairaut integral g(γ', ∂_u) = g11 * du; equals rho * sin(psi) for unit speed
    double clairaut(SurfacePoint p, TangentVector w) const;
    // arclength along a meridian from v_ref to v
    double meridian_arclength(double v_from, double v_to) const;
    // v-values of critical parallels (the geodesic parallels), sorted
    std::vector<double> critical_parallels() const;
    // geodesic curvature of the parallel v = v0, oriented by +u with normal +v
    double parallel_curvature(double v0) const;

private:
    SurfaceMetric() = default;
    void finalize(); // caches area, Gauss-Bonnet integral, max K, inj estimate

    double warp_f(double u, double v, double* fu = nullptr, double* fv = nullptr,
                  double* fuu = nullptr, double* fvv = nullptr) const;

    SurfaceKind kind_ = SurfaceKind::ConformalTorus;
    TrigSeries rho_;   // revolution profile radius
    TrigSeries m_sq_;  // squared meridian speed
    std::vector<WarpMode> warp_;
    double period_u_ = two_pi;
    double v_min_ = 0.0, v_max_ = two_pi;
    bool v_periodic_ = true;
    double wu_ = 1.0, wv_ = 1.0; // angular scale of warp modes

    double area_ = 0.0;
    double gb_integral_ = 0.0;
    double max_K_ = 0.0;
    double inj_ = 0.0;
};

} // namespace bl

#endif

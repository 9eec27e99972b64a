// Birkhoff annuli, first-return maps, Birkhoff-section verification,
// trapped-set classification, and homoclinic detection.

#ifndef BL_SECTION_HPP
#define BL_SECTION_HPP

#include <optional>
#include <string>
#include <vector>

#include "bl/flow.hpp"

namespace bl::section {

using bl::ClosedGeodesicRecord;
using bl::UnitTangent;

// The annulus A(side * base') = unit vectors over the base geodesic with
// side * g(normal, v) >= 0. Coordinates: s = arclength along the (possibly
// reversed) base, phi in [-pi/2, pi/2] measured from the left normal of that
// orientation, so phi = +pi/2 is the positive tangent lift.
struct BirkhoffAnnulus {
    ClosedGeodesicRecord base;
    int side = +1;
    std::string name;

    double length() const { return base.length; }
    // embedded point of the annulus
    UnitTangent point(const SurfaceMetric& m, double s, double phi) const;
};

// both annuli of an oriented simple closed geodesic
std::vector<BirkhoffAnnulus> annuli_pair(const ClosedGeodesicRecord& rec,
                                         const std::string& name = "");

enum class ReturnStatus { Returned, TrappedForward, Budget };

struct ReturnSample {
    double start_s = 0.0, start_phi = 0.0;
    bool start_on_annulus = false;
    int hit_annulus = -1;
    double s = 0.0, phi = 0.0; // hit coordinates on the named annulus
    double tau = 0.0;
    ReturnStatus status = ReturnStatus::Budget;
};

struct FirstReturnOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    double t_min = 1e-9; // crossings earlier than this do not count
};

// first transverse crossing of any listed annulus interior along the orbit
ReturnSample first_return(const SurfaceMetric& m, const std::vector<BirkhoffAnnulus>& annuli,
                          const UnitTangent& z0, double T_budget,
                          const FirstReturnOptions& opt = {});

// all crossings along one continuous orbit, in time order; used to grow
// manifold traces without re-seeding through the annulus chart
std::vector<ReturnSample> multi_return(const SurfaceMetric& m,
                                       const std::vector<BirkhoffAnnulus>& annuli,
                                       const UnitTangent& z0, double T_budget, int max_hits,
                                       const FirstReturnOptions& opt = {});

struct VerifyReport {
    bool is_section_evidence = false;
    long samples = 0;
    long returned = 0;
    long budget = 0;
    double max_tau = 0.0;
    double ell_bound = 0.0;
    std::vector<long> histogram; // return times binned over [0, ell_bound]
    std::vector<long> budget_indices;

    std::string to_json() const;
};

// Every sampled orbit must return within ell_bound; deterministic in seed and
// independent of the worker count.
VerifyReport verify_birkhoff(const SurfaceMetric& m, const std::vector<BirkhoffAnnulus>& annuli,
                             long n_samples, double ell_bound, std::uint64_t seed,
                             int threads = 1, int histogram_bins = 32);

struct CompleteSystemView {
    std::vector<ClosedGeodesicRecord> all;
    std::vector<int> limit_sub; // indices into all: hyperbolic contractible waists
};

struct TrappedWitness {
    long sample_index = -1; // -1..: injected witnesses get negative ids
    bool forward = true;
    double final_distance = 0.0;   // distance to the nearest limit_sub lift at budget
    int limit_index = -1;          // which limit_sub member it approaches
    double clairaut = 0.0;         // conserved Clairaut constant of the orbit
    double clairaut_residual = 0.0; // | |c| - rho(limit waist) | on revolution models
    bool monotone = false;
    UnitTangent state;
};

struct TrapReport {
    long samples = 0;
    long returned = 0;
    long budget_inconclusive = 0;
    std::vector<TrappedWitness> trapped_forward;
    std::vector<TrappedWitness> trapped_backward;
    double max_tau = 0.0;

    std::string to_json() const;
};

// Samples initial conditions in the complement of the system's geodesics and
// classifies non-returning orbits. `witnesses` are extra deliberate initial
// conditions (e.g. on stable manifolds) examined with `T_witness`.
TrapReport trapped_sets(const SurfaceMetric& m, const CompleteSystemView& system, long n_samples,
                        double T_budget, std::uint64_t seed, int threads = 1,
                        const std::vector<UnitTangent>& witnesses = {}, double T_witness = 8.0);

struct AreaCheckReport {
    double max_defect = 0.0;
    long evaluated = 0;
    long trapped_points = 0; // grid points without a return: excluded, reported

    std::string to_json() const;
};

// |det Dpsi * cos(phi') / cos(phi) - 1| over an interior grid of the first
// listed annulus; finite-difference Jacobian of the return map.
AreaCheckReport return_map_area_check(const SurfaceMetric& m,
                                      const std::vector<BirkhoffAnnulus>& annuli, int n_s,
                                      int n_phi, double T_budget = 50.0);

// Validation overload with explicit phi values; throws PreconditionFailed when
// any |phi| reaches the annulus boundary pi/2.
AreaCheckReport return_map_area_check(const SurfaceMetric& m,
                                      const std::vector<BirkhoffAnnulus>& annuli,
                                      const std::vector<double>& s_values,
                                      const std::vector<double>& phi_values,
                                      double T_budget = 50.0);

// Homoclinic points of a hyperbolic waist: transverse intersections of the
// unstable and stable manifold traces on the waist's own annulus pair, each
// confirmed by forward/backward re-integration toward the waist lift.
std::vector<UnitTangent> detect_homoclinic(const SurfaceMetric& m,
                                           const ClosedGeodesicRecord& waist, bl::Side side_u,
                                           bl::Side side_s, double T_budget,
                                           double confirm_tol = 1e-3);

} // namespace bl::section

#endif

// Geodesic configuration search: homotopy-class minimizers (waists), minmax
// geodesics between waists, nested alternating chains in disks, the genus
// chain, and complete-system assembly.

#ifndef BL_FINDER_HPP
#define BL_FINDER_HPP

#include <optional>
#include <string>
#include <vector>

#include "bl/csf.hpp"
#include "bl/flow.hpp"
#include "bl/section.hpp"

namespace bl::finder {

using bl::ClosedGeodesicRecord;

enum class ChainRole { Waist, ConjugatePointType };

enum class ChainTag { LemmaChain, Nested, SphereSeed };

struct ConfigurationChain {
    std::vector<ClosedGeodesicRecord> geodesics;
    std::vector<ChainRole> roles;
    std::vector<std::vector<int>> intersections; // transverse intersection counts
    ChainTag tag = ChainTag::Nested;

    std::string to_json() const;
    // nesting / alternation / evenness for Nested, tridiagonal pattern for
    // LemmaChain; throws IntersectionPatternFailed on violation
    void validate() const;
};

struct CompleteSystem {
    std::vector<ClosedGeodesicRecord> all;
    std::vector<int> limit_sub;          // hyperbolic contractible waists
    std::optional<double> return_bound;  // empty = "unverified"

    bl::section::CompleteSystemView view() const;
    std::string to_json() const;
};

// CSF from a canonical representative of the (p,q) class on torus models.
// Errors: WrongGenus (sphere models), FlowCollapsed (contractible class),
// BudgetExhausted.
ClosedGeodesicRecord class_minimizer(const SurfaceMetric& m, int p, int q,
                                     const csf::StepPolicy& policy = {});

// explicit seed variant
ClosedGeodesicRecord class_minimizer(const SurfaceMetric& m, const DiscreteCurve& seed,
                                     const csf::StepPolicy& policy = {});

// Minmax geodesic in the annulus bounded by two disjoint waists (revolution
// models sweep parallels when `sweepout` is empty). Throws
// SweepoutDegenerated when the pushed family sinks to the endpoint lengths
// without producing a candidate at the working resolution.
ClosedGeodesicRecord minmax_geodesic(const SurfaceMetric& m, const ClosedGeodesicRecord& w1,
                                     const ClosedGeodesicRecord& w2,
                                     std::vector<DiscreteCurve> sweepout = {},
                                     int sweep_count = 33, const csf::StepPolicy& policy = {});

// Greedy nested alternating chain in a disk with geodesic boundary
// (revolution models: a polar cap or the disk inside a geodesic parallel).
// Returns an empty chain when the disk contains no geodesic at resolution.
ConfigurationChain nested_chain(const SurfaceMetric& m, const csf::RegionSpec& disk,
                                const csf::StepPolicy& policy = {});

// class minimizers of (1,0) and (0,1) with the singleton-intersection check
ConfigurationChain genus_chain(const SurfaceMetric& m, const csf::StepPolicy& policy = {});

// sphere models: wrap a conjugate-point geodesic as the seed "chain"
ConfigurationChain sphere_seed_chain(const SurfaceMetric& m, const ClosedGeodesicRecord& rec);

// Runs nested_chain on every complementary disk of the chain and collects the
// union; limit_sub = hyperbolic contractible waists among the extras.
CompleteSystem assemble_complete_system(const SurfaceMetric& m, const ConfigurationChain& chain,
                                        const csf::StepPolicy& policy = {});

// geodesic parallels of a revolution model (critical profile radii)
std::vector<ClosedGeodesicRecord> parallel_geodesics(const SurfaceMetric& m);

} // namespace bl::finder

#endif

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <fstream>

#include "bl/csf.hpp"

using namespace bl;
using namespace bl::csf;

TEST_CASE("curvature profile: circle, straight loop, parallel") {
    // geodesic circle of radius rho on the flat torus: k ~ 1/rho
    {
        const SurfaceMetric m = SurfaceMetric::flat_torus();
        const DiscreteCurve c = make_circle(m, {0.5, 0.5}, 0.1, 128);
        const CurvatureProfile prof = curvature_profile(m, c);
        for (double k : prof.k) CHECK(k == doctest::Approx(10.0).epsilon(5e-3));
        CHECK(prof.length == doctest::Approx(two_pi * 0.1).epsilon(1e-3));
    }
    // straight (p,q) loop: k = 0, L = |(p,q)|
    {
        const SurfaceMetric m = SurfaceMetric::flat_torus();
        const DiscreteCurve c = make_torus_line(m, 2, 1, {0.1, 0.3}, 128);
        const CurvatureProfile prof = curvature_profile(m, c);
        CHECK(prof.max_abs_k < 1e-8);
        CHECK(prof.length == doctest::Approx(std::sqrt(5.0)).epsilon(1e-9));
    }
    // circle of revolution v = v0 on the torus: |k| = |rho'|/(rho m)
    {
        const SurfaceMetric m = SurfaceMetric::torus_of_revolution(2.0, 1.0);
        const double v0 = pi / 2;
        const DiscreteCurve c = make_parallel(m, v0, 256);
        const CurvatureProfile prof = curvature_profile(m, c);
        const double expect = std::abs(m.parallel_curvature(v0)); // sin(v0)/(2+cos v0) = 1/2
        CHECK(expect == doctest::Approx(0.5).epsilon(1e-12));
        for (double k : prof.k) CHECK(std::abs(k) == doctest::Approx(expect).epsilon(1e-3));
    }
}

TEST_CASE("degenerate curves rejected") {
    const SurfaceMetric m = SurfaceMetric::flat_torus();
    DiscreteCurve c = make_circle(m, {0.5, 0.5}, 0.1, 32);
    c.pts[3] = c.pts[4];
    CHECK_THROWS_AS((void)curvature_profile(m, c), DegenerateCurve);
    DiscreteCurve tiny;
    tiny.pts = {{0, 0}, {0.1, 0}, {0.1, 0.1}};
    CHECK_THROWS_AS((void)curvature_profile(m, tiny), DegenerateCurve);
}

TEST_CASE("funnel membership") {
    const SurfaceMetric m = SurfaceMetric::flat_torus();
    // exact geodesic
    const DiscreteCurve line = make_torus_line(m, 1, 0, {0.0, 0.4}, 128);
    CHECK(funnel_check(m, line, {1.0, 0.1}));
    // radius-0.1 circle fails on curvature: k = 10 >= 0.5
    const DiscreteCurve circ = make_circle(m, {0.5, 0.5}, 0.1, 128);
    CHECK_FALSE(funnel_check(m, circ, {two_pi * 0.1, 0.5}));
}

TEST_CASE("small circle on flat torus collapses at rho^2/2") {
    const SurfaceMetric m = SurfaceMetric::flat_torus();
    const double rho = 0.1;
    const DiscreteCurve c = make_circle(m, {0.5, 0.5}, rho, 128);
    StepPolicy pol;
    pol.target_n = 96; // small circle needs no finer resolution
    const FlowOutcome out = evolve(m, c, pol);
    REQUIRE(out.kind == OutcomeKind::Collapsed);
    CHECK(out.s_extinct == doctest::Approx(rho * rho / 2).epsilon(0.05));
    CHECK(out.extinction_point.u == doctest::Approx(0.5).epsilon(0.01));
    CHECK(out.extinction_point.v == doctest::Approx(0.5).epsilon(0.01));
    CHECK(out.length_monotone);
}

TEST_CASE("sine-perturbed (1,0) loop on flat torus straightens") {
    const SurfaceMetric m = SurfaceMetric::flat_torus();
    const DiscreteCurve c = make_torus_line(m, 1, 0, {0.0, 0.37}, 160, 0.08);
    const FlowOutcome out = evolve(m, c);
    REQUIRE(out.kind == OutcomeKind::ConvergedGeodesic);
    CHECK(out.record->length == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(out.record->wind_u == 1);
    CHECK(out.record->wind_v == 0);
}

TEST_CASE("generic (1,0) loop on torus of revolution converges to the inner equator") {
    const SurfaceMetric m = SurfaceMetric::torus_of_revolution(2.0, 1.0);
    const DiscreteCurve c = make_torus_line(m, 1, 0, {0.0, 2.2}, 192, 0.15);
    const FlowOutcome out = evolve(m, c);
    REQUIRE(out.kind == OutcomeKind::ConvergedGeodesic);
    CHECK(out.record->length == doctest::Approx(two_pi).epsilon(1e-3 / two_pi));
    CHECK(out.record->geometry.kind == CurveGeomKind::ParallelV);
    CHECK(out.record->geometry.v0 == doctest::Approx(pi).epsilon(1e-6));
    CHECK(out.record->floquet.type == OrbitType::Hyperbolic);
    CHECK(out.record->is_waist);
    CHECK(out.length_monotone);
    // converged limit passes the funnel window at eps = 1e-3
    CHECK(funnel_check(m, out.record->curve, {out.record->length, 1e-3}));
}

TEST_CASE("region-confined flow: dumbbell annulus converges to the neck, never exits") {
    const SurfaceMetric m = SurfaceMetric::dumbbell();
    // annulus strictly between the two bulge parallels
    const RegionSpec region = RegionSpec::v_band(pi / 4 + 1e-3, 3 * pi / 4 - 1e-3);
    DiscreteCurve c = make_parallel(m, pi / 2 + 0.25, 160);
    const FlowOutcome out = region_confined_evolve(m, c, region);
    REQUIRE(out.kind == OutcomeKind::ConvergedGeodesic);
    CHECK(out.record->geometry.v0 == doctest::Approx(pi / 2).epsilon(1e-6));
    CHECK(out.record->length == doctest::Approx(two_pi / 3).epsilon(1e-6));
    CHECK(out.record->is_waist);
}

TEST_CASE("region-confined flow: contractible loop in a spheroid cap collapses inside") {
    const SurfaceMetric m = SurfaceMetric::spheroid(0.9);
    // disk bounded by the equator parallel: northern cap v in (0, pi/2)
    const RegionSpec region = RegionSpec::v_band(0.0, pi / 2 - 1e-6);
    const DiscreteCurve c = make_circle(m, {1.0, 0.8}, 0.2, 128);
    const FlowOutcome out = region_confined_evolve(m, c, region);
    CHECK(out.kind == OutcomeKind::Collapsed);
}

TEST_CASE("loop touching the region boundary is a precondition error") {
    const SurfaceMetric m = SurfaceMetric::dumbbell();
    const RegionSpec region = RegionSpec::v_band(pi / 4, 3 * pi / 4);
    const DiscreteCurve c = make_parallel(m, pi / 4, 64); // on the boundary
    CHECK_THROWS_AS((void)region_confined_evolve(m, c, region), PreconditionFailed);
}

TEST_CASE("per-step trace CSV is written") {
    const SurfaceMetric m = SurfaceMetric::flat_torus();
    StepPolicy pol;
    pol.max_steps = 40;
    pol.target_n = 64;
    pol.trace_path = "/tmp/bl_csf_trace.csv";
    const DiscreteCurve c = make_circle(m, {0.5, 0.5}, 0.1, 64);
    (void)evolve(m, c, pol);
    std::ifstream f("/tmp/bl_csf_trace.csv");
    REQUIRE(f.good());
    std::string header;
    std::getline(f, header);
    CHECK(header == "s,L,max_k,n");
    int rows = 0;
    std::string line;
    while (std::getline(f, line)) ++rows;
    CHECK(rows >= 10);
}

TEST_CASE("resampled curves have uniform arclength gaps within 1%") {
    const SurfaceMetric m = SurfaceMetric::torus_of_revolution(2.0, 1.0);
    const DiscreteCurve wild = make_torus_line(m, 1, 0, {0.0, 2.0}, 60, 0.3);
    const DiscreteCurve res = resample(m, wild, 256);
    CHECK(res.resampled);
    const CurvatureProfile prof = curvature_profile(m, res);
    const double mean = prof.length / res.n();
    for (double d : prof.ds) CHECK(std::abs(d - mean) < 0.01 * mean);
}

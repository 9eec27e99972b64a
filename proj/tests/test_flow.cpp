#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <fstream>

#include "bl/flow.hpp"

using namespace bl;

namespace {

UnitTangent inner_equator_start(const SurfaceMetric& m) {
    // torus of revolution R=2, r=1: inner equator v = pi, unit speed along +u
    return UnitTangent::make(m, {0.0, pi}, {1.0, 0.0});
}

} // namespace

TEST_CASE("flat torus straight line wraps once") {
    const SurfaceMetric m = SurfaceMetric::flat_torus();
    const UnitTangent z = UnitTangent::make(m, {0.0, 0.0}, {1.0, 0.0});
    const Trajectory tr = integrate(m, z, 1.0);
    const FlowState e = tr.end();
    CHECK(e.u == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(e.v == doctest::Approx(0.0));
    CHECK(e.du == doctest::Approx(1.0));
}

TEST_CASE("great circle returns to start after 2 pi") {
    const SurfaceMetric m = SurfaceMetric::round_sphere();
    const UnitTangent z = UnitTangent::make(m, {0.3, pi / 2}, {1.0, 0.0});
    const Trajectory tr = integrate(m, z, two_pi);
    const FlowState e = tr.end();
    CHECK(e.u - z.p.u == doctest::Approx(two_pi).epsilon(1e-9));
    CHECK(e.v == doctest::Approx(pi / 2).epsilon(1e-9));
}

TEST_CASE("Clairaut constant conserved to 1e-8 over T=100") {
    const SurfaceMetric m = SurfaceMetric::torus_of_revolution(2.0, 1.0);
    const UnitTangent z =
        UnitTangent::make(m, {0.7, 1.2}, {0.4, 0.9}); // generic direction
    const double c0 = m.clairaut(z.p, z.dir);
    const Trajectory tr = integrate(m, z, 100.0);
    double worst = 0.0;
    for (int i = 0; i <= 400; ++i) {
        const FlowState s = tr.at(100.0 * i / 400);
        const double c = m.clairaut({s.u, s.v}, {s.du, s.dv});
        worst = std::max(worst, std::abs(c - c0));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("unit speed preserved along dense output") {
    const SurfaceMetric m = SurfaceMetric::dumbbell();
    const UnitTangent z = UnitTangent::make(m, {0.2, 1.1}, {0.5, 0.7});
    const Trajectory tr = integrate(m, z, 30.0);
    for (int i = 0; i <= 300; ++i) {
        const FlowState s = tr.at(30.0 * i / 300);
        const double e = m.dot({s.u, s.v}, {s.du, s.dv}, {s.du, s.dv});
        CHECK(std::abs(e - 1.0) < 1e-9);
    }
}

TEST_CASE("time reversal symmetry") {
    const SurfaceMetric m = SurfaceMetric::torus_of_revolution(2.0, 1.0);
    const UnitTangent z = UnitTangent::make(m, {0.3, 2.0}, {0.8, 0.35});
    const double T = 7.0;
    const Trajectory fwd = integrate(m, z, T);
    const UnitTangent zT = fwd.state(m, T);
    const Trajectory back = integrate(m, flip(zT), T);
    const FlowState b = back.end();
    CHECK(std::abs(b.u - z.p.u) < 1e-8);
    CHECK(std::abs(b.v - z.p.v) < 1e-8);
    CHECK(std::abs(-b.du - z.dir.du) < 1e-8);
    CHECK(std::abs(-b.dv - z.dir.dv) < 1e-8);
}

TEST_CASE("conjugate points: sphere, flat torus, torus of revolution") {
    // round unit sphere: J = sin t vanishes at pi
    {
        const SurfaceMetric m = SurfaceMetric::round_sphere();
        const UnitTangent z = UnitTangent::make(m, {0.0, pi / 2}, {1.0, 0.0});
        const auto zeros = conjugate_points(m, z, 4.0);
        REQUIRE(zeros.size() == 1);
        CHECK(zeros[0] == doctest::Approx(pi).epsilon(1e-6));
    }
    // flat torus: never
    {
        const SurfaceMetric m = SurfaceMetric::flat_torus();
        const UnitTangent z = UnitTangent::make(m, {0.1, 0.2}, {0.6, 0.8});
        CHECK(conjugate_points(m, z, 50.0).empty());
    }
    // outer equator of torus of revolution: K = 1/3 along the orbit,
    // J = sqrt(3) sin(t/sqrt(3)) vanishes first at pi sqrt(3)
    {
        const SurfaceMetric m = SurfaceMetric::torus_of_revolution(2.0, 1.0);
        const UnitTangent z = UnitTangent::make(m, {0.0, 0.0}, {1.0, 0.0});
        const auto zeros = conjugate_points(m, z, 6.0);
        REQUIRE(zeros.size() == 1);
        CHECK(zeros[0] == doctest::Approx(pi * std::sqrt(3.0)).epsilon(1e-6));
    }
}

TEST_CASE("pole transit raises on sphere meridians") {
    const SurfaceMetric m = SurfaceMetric::round_sphere();
    const UnitTangent z = UnitTangent::make(m, {0.0, pi / 2}, {0.0, 1.0}); // due south
    CHECK_THROWS_AS((void)integrate(m, z, 3.0), PoleTransit);
}

TEST_CASE("Floquet of the equators of the torus of revolution") {
    const SurfaceMetric m = SurfaceMetric::torus_of_revolution(2.0, 1.0);

    // inner equator: K = -1 along the orbit, length 2 pi, sigma = e^{2 pi}
    {
        const ClosedGeodesicRecord rec = make_record(m, inner_equator_start(m), two_pi);
        CHECK(rec.floquet.type == OrbitType::Hyperbolic);
        CHECK(std::abs(rec.floquet.sigma.real() - std::exp(two_pi)) <
              1e-3 * std::exp(two_pi));
        CHECK(std::abs(rec.floquet.det - 1.0) < 1e-6);
        CHECK_FALSE(rec.has_conjugate_points);
        CHECK(rec.is_waist);
        CHECK(rec.wind_u == 1);
        CHECK(rec.wind_v == 0);
        CHECK(rec.geometry.kind == CurveGeomKind::ParallelV);
    }

    // outer equator: K = 1/3, length 6 pi, elliptic with rotation 2 pi sqrt(3)
    {
        const UnitTangent z = UnitTangent::make(m, {0.0, 0.0}, {1.0, 0.0});
        const ClosedGeodesicRecord rec = make_record(m, z, 6 * pi);
        CHECK(rec.floquet.type == OrbitType::Elliptic);
        CHECK(rec.floquet.rotation == doctest::Approx(two_pi * std::sqrt(3.0)).epsilon(1e-9));
        CHECK(std::abs(rec.floquet.sigma) == doctest::Approx(1.0));
        CHECK(rec.has_conjugate_points);
        CHECK_FALSE(rec.is_waist);
    }
}

TEST_CASE("flat torus closed geodesic is degenerate and a waist by sampling") {
    const SurfaceMetric m = SurfaceMetric::flat_torus();
    const UnitTangent z = UnitTangent::make(m, {0.0, 0.5}, {1.0, 0.0});
    const ClosedGeodesicRecord rec = make_record(m, z, 1.0);
    CHECK(rec.floquet.type == OrbitType::Degenerate);
    CHECK(rec.floquet.sigma.real() == doctest::Approx(1.0));
    CHECK_FALSE(rec.has_conjugate_points);
    CHECK(rec.is_waist); // perturbations of a straight line are longer
    CHECK(rec.geometry.kind == CurveGeomKind::TorusLine);
}

TEST_CASE("closed-orbit Newton polish recovers the inner equator") {
    const SurfaceMetric m = SurfaceMetric::torus_of_revolution(2.0, 1.0);
    const UnitTangent guess = UnitTangent::make(m, {0.0, pi + 0.02}, {1.0, 0.005});
    const ClosedOrbit co = refine_closed_orbit(m, guess, two_pi + 0.05, two_pi, 0.0);
    CHECK(co.closure_gap < 1e-9);
    CHECK(co.length == doctest::Approx(two_pi).epsilon(1e-9));
    CHECK(co.z.p.v == doctest::Approx(pi).epsilon(1e-8));
}

TEST_CASE("stable manifold seeds of the inner equator match the Clairaut level") {
    const SurfaceMetric m = SurfaceMetric::torus_of_revolution(2.0, 1.0);
    const ClosedGeodesicRecord rec = make_record(m, inner_equator_start(m), two_pi);
    const double c_star = 1.0; // rho at the inner equator

    const double d1 = 1e-3, d2 = 5e-4;
    double err1 = 0.0, err2 = 0.0;
    for (bool stable : {true, false}) {
        for (const auto& s : invariant_manifold_seed(m, rec, Side::A, stable, d1, 8))
            err1 = std::max(err1, std::abs(m.clairaut(s.p, s.dir) - c_star));
        for (const auto& s : invariant_manifold_seed(m, rec, Side::A, stable, d2, 8))
            err2 = std::max(err2, std::abs(m.clairaut(s.p, s.dir) - c_star));
    }
    CHECK(err1 < 5e-6); // O(delta^2)
    CHECK(err2 < err1 / 2.5);

    // side property: base projections lie strictly on the requested side
    for (const auto& s : invariant_manifold_seed(m, rec, Side::A, true, d1, 8))
        CHECK(s.p.v > pi);
    for (const auto& s : invariant_manifold_seed(m, rec, Side::B, true, d1, 8))
        CHECK(s.p.v < pi);
}

TEST_CASE("manifold seeds rejected for non-hyperbolic orbits") {
    const SurfaceMetric m = SurfaceMetric::flat_torus();
    const ClosedGeodesicRecord rec =
        make_record(m, UnitTangent::make(m, {0.0, 0.5}, {1.0, 0.0}), 1.0);
    CHECK_THROWS_AS((void)invariant_manifold_seed(m, rec, Side::A, true), NotHyperbolic);
}

TEST_CASE("dumbbell neck manifold seeds: leave forward, approach backward (unstable)") {
    const SurfaceMetric m = SurfaceMetric::dumbbell();
    const UnitTangent z = UnitTangent::make(m, {0.0, pi / 2}, {1.0, 0.0});
    const double len = two_pi * m.profile_radius(pi / 2);
    const ClosedGeodesicRecord rec = make_record(m, z, len);
    REQUIRE(rec.floquet.type == OrbitType::Hyperbolic);

    for (Side side : {Side::A, Side::B}) {
        const auto seeds = invariant_manifold_seed(m, rec, side, false, 1e-4, 4);
        for (const auto& s : seeds) {
            const double d0 = orbit_lift_distance(m, rec, s);
            const Trajectory fwd = integrate(m, s, 3.0);
            const Trajectory bwd = integrate(m, s, -3.0);
            const double df = orbit_lift_distance(m, rec, fwd.state(m, 3.0));
            const double db = orbit_lift_distance(m, rec, bwd.state(m, -3.0));
            CHECK(df > 5.0 * d0); // leaves the neighborhood forward
            CHECK(db < 0.1 * d0); // approaches backward
        }
    }
}

TEST_CASE("trajectory CSV dump") {
    const SurfaceMetric m = SurfaceMetric::torus_of_revolution(2.0, 1.0);
    const Trajectory tr =
        integrate(m, UnitTangent::make(m, {0.0, pi}, {1.0, 0.0}), 2.0, true);
    tr.write_csv("/tmp/bl_traj.csv", 0.1);
    std::ifstream f("/tmp/bl_traj.csv");
    REQUIRE(f.good());
    std::string header;
    std::getline(f, header);
    CHECK(header == "t,u,v,du,dv,J,Jp");
    int rows = 0;
    std::string line;
    while (std::getline(f, line)) ++rows;
    CHECK(rows == 21);
}

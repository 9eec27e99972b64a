#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bl/finder.hpp"

using namespace bl;
using namespace bl::finder;

TEST_CASE("class minimizers on the flat torus") {
    const SurfaceMetric m = SurfaceMetric::flat_torus();
    const ClosedGeodesicRecord r10 = class_minimizer(m, 1, 0);
    CHECK(r10.length == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(r10.type() == OrbitType::Degenerate);
    CHECK(r10.is_waist);
    const ClosedGeodesicRecord r11 = class_minimizer(m, 1, 1);
    CHECK(r11.length == doctest::Approx(std::sqrt(2.0)).epsilon(1e-8));
}

TEST_CASE("class minimizers on the torus of revolution") {
    const SurfaceMetric m = SurfaceMetric::torus_of_revolution(2.0, 1.0);
    const ClosedGeodesicRecord r10 = class_minimizer(m, 1, 0);
    CHECK(r10.length == doctest::Approx(two_pi).epsilon(1e-6));
    CHECK(r10.type() == OrbitType::Hyperbolic);
    CHECK(r10.is_waist);
    CHECK(r10.geometry.kind == CurveGeomKind::ParallelV);

    // meridian class: a rotationally symmetric degenerate family of length 2 pi r
    const ClosedGeodesicRecord r01 = class_minimizer(m, 0, 1);
    CHECK(r01.length == doctest::Approx(two_pi).epsilon(1e-6));
    CHECK(r01.type() == OrbitType::Degenerate);
    CHECK(r01.is_waist);
}

TEST_CASE("contractible class and sphere models rejected") {
    const SurfaceMetric t = SurfaceMetric::flat_torus();
    CHECK_THROWS_AS((void)class_minimizer(t, 0, 0), FlowCollapsed);
    const SurfaceMetric s = SurfaceMetric::round_sphere();
    CHECK_THROWS_AS((void)class_minimizer(s, 1, 0), WrongGenus);
}

TEST_CASE("genus chain: one transverse intersection") {
    {
        const SurfaceMetric m = SurfaceMetric::flat_torus();
        const ConfigurationChain chain = genus_chain(m);
        REQUIRE(chain.geodesics.size() == 2);
        CHECK(chain.intersections[0][1] == 1);
        CHECK(chain.geodesics[0].is_waist);
        CHECK(chain.geodesics[1].is_waist);
    }
    {
        const SurfaceMetric m = SurfaceMetric::torus_of_revolution(2.0, 1.0);
        const ConfigurationChain chain = genus_chain(m);
        REQUIRE(chain.geodesics.size() == 2);
        CHECK(chain.intersections[0][1] == 1);
        CHECK(chain.geodesics[0].length == doctest::Approx(two_pi).epsilon(1e-6));
        CHECK(chain.geodesics[1].length == doctest::Approx(two_pi).epsilon(1e-6));
    }
    CHECK_THROWS_AS((void)genus_chain(SurfaceMetric::dumbbell()), WrongGenus);
}

TEST_CASE("minmax geodesic between the two necks of the two-neck torus") {
    const SurfaceMetric m = SurfaceMetric::two_neck_torus();
    // necks at v = pi/2 and 3pi/2, rho = 1.5; bulges at v = 0 and pi, rho = 2.5
    const ClosedGeodesicRecord w1 =
        make_record(m, UnitTangent::make(m, {0.0, pi / 2}, {1.0, 0.0}), two_pi * 1.5);
    const ClosedGeodesicRecord w2 =
        make_record(m, UnitTangent::make(m, {0.0, 3 * pi / 2}, {1.0, 0.0}), two_pi * 1.5);
    REQUIRE(w1.is_waist);
    REQUIRE(w2.is_waist);

    const ClosedGeodesicRecord mm = minmax_geodesic(m, w1, w2);
    CHECK(mm.length == doctest::Approx(two_pi * 2.5).epsilon(1e-6));
    CHECK(mm.geometry.v0 == doctest::Approx(pi).epsilon(1e-6));
    CHECK(mm.has_conjugate_points); // elliptic bulge parallel
    // strictly positive margin over both endpoints
    CHECK(mm.length > std::max(w1.length, w2.length) + 1e-6);
}

TEST_CASE("minmax degenerates when the interior critical parallel is below resolution") {
    // rho = 2 + eps cos(2v) with eps = 1e-8: the interior bulge sits a margin
    // 4 pi eps ~ 1e-7 above the necks, below the working resolution
    const SurfaceMetric m =
        SurfaceMetric::torus_profile(TrigSeries::cosines(2.0, {0.0, 1e-8}), TrigSeries::constant(1.0));
    const ClosedGeodesicRecord w1 =
        make_record(m, UnitTangent::make(m, {0.0, pi / 2}, {1.0, 0.0}), two_pi * (2.0 - 1e-8));
    const ClosedGeodesicRecord w2 =
        make_record(m, UnitTangent::make(m, {0.0, 3 * pi / 2}, {1.0, 0.0}), two_pi * (2.0 - 1e-8));
    CHECK_THROWS_AS((void)minmax_geodesic(m, w1, w2), SweepoutDegenerated);
}

TEST_CASE("minmax rejects intersecting or identical inputs") {
    const SurfaceMetric m = SurfaceMetric::two_neck_torus();
    const ClosedGeodesicRecord w1 =
        make_record(m, UnitTangent::make(m, {0.0, pi / 2}, {1.0, 0.0}), two_pi * 1.5);
    CHECK_THROWS_AS((void)minmax_geodesic(m, w1, w1), PreconditionFailed);
}

TEST_CASE("nested chain: oblate spheroid hemisphere is empty") {
    const SurfaceMetric m = SurfaceMetric::spheroid(0.9);
    const auto chain = nested_chain(m, csf::RegionSpec::v_band(0.0, pi / 2));
    CHECK(chain.geodesics.empty());
}

TEST_CASE("nested chain: dumbbell disk inside a bulge finds (neck, far bulge)") {
    const SurfaceMetric m = SurfaceMetric::dumbbell();
    // disk bounded by the left bulge parallel v = pi/4, containing the far pole
    const auto chain = nested_chain(m, csf::RegionSpec::v_band(pi / 4, pi));
    REQUIRE(chain.geodesics.size() == 2);
    CHECK(chain.roles[0] == ChainRole::Waist);
    CHECK(chain.roles[1] == ChainRole::ConjugatePointType);
    CHECK(chain.geodesics[0].geometry.v0 == doctest::Approx(pi / 2).epsilon(1e-6));
    CHECK(chain.geodesics[0].length == doctest::Approx(two_pi / 3).epsilon(1e-6));
    CHECK(chain.geodesics[1].geometry.v0 == doctest::Approx(3 * pi / 4).epsilon(1e-6));
    CHECK(chain.geodesics[1].length == doctest::Approx(two_pi * std::sqrt(2.0) / 3).epsilon(1e-6));
    CHECK(chain.geodesics[0].is_waist);
    CHECK(chain.geodesics[1].has_conjugate_points);
}

TEST_CASE("nested chain rejects a non-geodesic boundary") {
    const SurfaceMetric m = SurfaceMetric::dumbbell();
    CHECK_THROWS_AS((void)nested_chain(m, csf::RegionSpec::v_band(1.0, pi)), PreconditionFailed);
}

TEST_CASE("complete system of the torus of revolution: no extras, empty limit set") {
    const SurfaceMetric m = SurfaceMetric::torus_of_revolution(2.0, 1.0);
    const ConfigurationChain chain = genus_chain(m);
    const CompleteSystem sys = assemble_complete_system(m, chain);
    CHECK(sys.all.size() == 2);
    CHECK(sys.limit_sub.empty());
    CHECK(!sys.return_bound.has_value());
}

TEST_CASE("complete system of the dumbbell: limit subcollection is the neck") {
    const SurfaceMetric m = SurfaceMetric::dumbbell();
    // sphere seed: the left bulge parallel (conjugate points)
    const auto parallels = parallel_geodesics(m);
    REQUIRE(parallels.size() == 3);
    const ConfigurationChain seed = sphere_seed_chain(m, parallels[0]);
    const CompleteSystem sys = assemble_complete_system(m, seed);
    REQUIRE(sys.all.size() == 3); // left bulge + neck + right bulge
    REQUIRE(sys.limit_sub.size() == 1);
    const ClosedGeodesicRecord& neck = sys.all[sys.limit_sub[0]];
    CHECK(neck.geometry.v0 == doctest::Approx(pi / 2).epsilon(1e-6));
    CHECK(neck.type() == OrbitType::Hyperbolic);
    CHECK(neck.is_waist);
    CHECK(neck.contractible());
}

TEST_CASE("waist local minimality: 50 nearby perturbations never shorten") {
    const SurfaceMetric m = SurfaceMetric::torus_of_revolution(2.0, 1.0);
    const ClosedGeodesicRecord rec = class_minimizer(m, 1, 0);
    REQUIRE(rec.is_waist);
    unsigned long long rng = 42;
    auto urand = [&]() {
        rng ^= rng << 13;
        rng ^= rng >> 7;
        rng ^= rng << 17;
        return double(rng % 1000003) / 1000003.0 - 0.5;
    };
    const CurvatureProfile prof = curvature_profile(m, rec.curve);
    const int n = rec.curve.n();
    for (int trial = 0; trial < 50; ++trial) {
        DiscreteCurve pert = rec.curve;
        double a[6], b[6], mx = 0;
        for (int k = 0; k < 6; ++k) {
            a[k] = urand();
            b[k] = urand();
        }
        std::vector<double> off(n);
        for (int i = 0; i < n; ++i) {
            const double t = double(i) / n;
            double sum = 0;
            for (int k = 0; k < 6; ++k)
                sum += a[k] * std::cos(two_pi * (k + 1) * t) + b[k] * std::sin(two_pi * (k + 1) * t);
            off[i] = sum;
            mx = std::max(mx, std::abs(sum));
        }
        for (int i = 0; i < n; ++i) {
            pert.pts[i].u += off[i] / mx * 1e-3 * prof.nu[i].du;
            pert.pts[i].v += off[i] / mx * 1e-3 * prof.nu[i].dv;
        }
        CHECK(curve_length(m, pert) >= rec.length - 1e-9);
    }
}

TEST_CASE("Bangert surrogate: conjugate-point records admit shorter push-offs on both sides") {
    const SurfaceMetric tor = SurfaceMetric::torus_of_revolution(2.0, 1.0);
    const SurfaceMetric dumb = SurfaceMetric::dumbbell();
    struct Case {
        const SurfaceMetric* m;
        ClosedGeodesicRecord rec;
    };
    std::vector<Case> cases;
    cases.push_back({&tor, make_record(tor, UnitTangent::make(tor, {0.0, 0.0}, {1.0, 0.0}), 6 * pi)});
    cases.push_back(
        {&dumb, make_record(dumb, UnitTangent::make(dumb, {0.0, pi / 4}, {1.0, 0.0}),
                            two_pi * std::sqrt(2.0) / 3)});
    for (const auto& c : cases) {
        REQUIRE(c.rec.has_conjugate_points);
        const CurvatureProfile prof = curvature_profile(*c.m, c.rec.curve);
        for (double side : {+1.0, -1.0}) {
            DiscreteCurve push = c.rec.curve;
            for (int i = 0; i < push.n(); ++i) {
                push.pts[i].u += side * 5e-3 * prof.nu[i].du;
                push.pts[i].v += side * 5e-3 * prof.nu[i].dv;
            }
            csf::StepPolicy pol;
            pol.max_steps = 600;
            const csf::FlowOutcome out = csf::evolve(*c.m, push, pol);
            const double len = out.kind == csf::OutcomeKind::ConvergedGeodesic
                                   ? out.record->length
                                   : out.final_length;
            CHECK(len < c.rec.length - 1e-6);
        }
    }
}

TEST_CASE("flat torus complete system: no extras in the fundamental domain") {
    const SurfaceMetric m = SurfaceMetric::flat_torus();
    const ConfigurationChain chain = genus_chain(m);
    const CompleteSystem sys = assemble_complete_system(m, chain);
    CHECK(sys.all.size() == 2);
    CHECK(sys.limit_sub.empty());
}

#include "bl/scenario.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "bl/finder.hpp"
#include "bl/surgery.hpp"

namespace bl::scenario {

using nlohmann::ordered_json;

namespace {

SurfaceMetric build_surface(const config::Section& s) {
    const std::string kind = s.string("kind");
    if (kind == "round_sphere") return SurfaceMetric::round_sphere();
    if (kind == "spheroid") return SurfaceMetric::spheroid(s.number("c"));
    if (kind == "dumbbell") return SurfaceMetric::dumbbell();
    if (kind == "dumbbell_perturbed")
        return SurfaceMetric::dumbbell_perturbed(s.number("amplitude"));
    if (kind == "torus_of_revolution")
        return SurfaceMetric::torus_of_revolution(s.number("R"), s.number("r"));
    if (kind == "two_neck_torus") return SurfaceMetric::two_neck_torus();
    if (kind == "flat_torus") return SurfaceMetric::flat_torus();
    if (kind == "sphere_profile") {
        TrigSeries rho = TrigSeries::sines(s.array("rho_sin"));
        TrigSeries m2 = TrigSeries::cosines(s.number_or("m2_c0", 1.0), s.array_or("m2_cos"));
        return SurfaceMetric::sphere_of_revolution(std::move(rho), std::move(m2));
    }
    if (kind == "torus_profile") {
        TrigSeries rho = TrigSeries::cosines(s.number("rho_c0"), s.array("rho_cos"));
        TrigSeries m2 = TrigSeries::cosines(s.number_or("m2_c0", 1.0), s.array_or("m2_cos"));
        return SurfaceMetric::torus_profile(std::move(rho), std::move(m2));
    }
    if (kind == "conformal_torus") {
        std::vector<WarpMode> modes;
        const auto ju = s.array("mode_ju");
        const auto jv = s.array("mode_jv");
        const auto amp = s.array("mode_amp");
        if (ju.size() != jv.size() || ju.size() != amp.size())
            throw ConfigError("conformal mode arrays must have equal length");
        for (std::size_t i = 0; i < ju.size(); ++i)
            modes.push_back({int(ju[i]), int(jv[i]), false, false, amp[i]});
        return SurfaceMetric::conformal_torus(std::move(modes));
    }
    throw ConfigError("unknown surface kind '" + kind + "'");
}

double positive_tol(const config::Section& s, const std::string& key, double fallback) {
    const double t = s.number_or(key, fallback);
    if (!(t > 0.0)) throw ConfigError("tolerance '" + key + "' must be positive");
    return t;
}

UnitTangent start_state(const SurfaceMetric& m, const config::Section& s) {
    const double u = s.number("start_u");
    const double v = s.number("start_v");
    const double du = s.number("dir_u");
    const double dv = s.number("dir_v");
    return UnitTangent::make(m, {u, v}, {du, dv});
}

ClosedGeodesicRecord parallel_record(const SurfaceMetric& m, double v0) {
    const UnitTangent z = UnitTangent::make(m, {0.0, v0}, {1.0, 0.0});
    return make_record(m, z, two_pi * m.profile_radius(v0));
}

// exact Clairaut-level states heading toward a hyperbolic parallel: stable
// manifold witnesses on a revolution model
std::vector<UnitTangent> clairaut_witnesses(const SurfaceMetric& m, double v_waist, int count) {
    std::vector<UnitTangent> out;
    const double c_star = m.profile_radius(v_waist);
    const double span = 0.3;
    for (int k = 0; k < count; ++k) {
        const int side = k % 2 == 0 ? -1 : +1;
        const int orient = (k / 2) % 2 == 0 ? +1 : -1; // approach either lift
        const double v0 = v_waist + side * span;
        const double u0 = two_pi * (k / 2) / std::max(1, count / 2);
        const double rho = m.profile_radius(v0);
        const double sinpsi = orient * c_star / rho;
        const double vdir = side < 0 ? +1.0 : -1.0; // toward the waist
        const TangentVector d{sinpsi / rho,
                              vdir * std::sqrt(std::max(0.0, 1.0 - sinpsi * sinpsi)) /
                                  m.meridian_speed(v0)};
        out.push_back(UnitTangent::make(m, {u0, v0}, d));
    }
    return out;
}

struct StepContext {
    const SurfaceMetric* m = nullptr;
    RunOptions opt;
    std::vector<Assertion>* assertions = nullptr;
    ordered_json* out = nullptr;
    std::vector<std::string>* files = nullptr;

    void check(const std::string& name, bool pass, double value, double bound) const {
        assertions->push_back({name, pass, value, bound});
    }

    std::string path_for(const std::string& file) const {
        if (opt.out_dir.empty()) return file;
        return opt.out_dir + "/" + file;
    }
};

void write_text(const StepContext& ctx, const std::string& file, const std::string& text) {
    const std::string path = ctx.path_for(file);
    std::ofstream f(path);
    if (!f) throw Error("cannot write " + path);
    f << text;
    ctx.files->push_back(file);
}

// ---- step handlers -------------------------------------------------------

void step_gauss_bonnet(const config::Section& s, StepContext& ctx) {
    const double tol = positive_tol(s, "tol", 1e-6);
    const double got = ctx.m->gauss_bonnet_integral();
    const double want = two_pi * ctx.m->euler_characteristic();
    (*ctx.out)["integral"] = got;
    (*ctx.out)["expected"] = want;
    ctx.check("gauss_bonnet", std::abs(got - want) < tol, std::abs(got - want), tol);
}

void step_curvature_bound(const config::Section& s, StepContext& ctx) {
    const bool expect = s.boolean_or("expect_holds", true);
    const auto cb = ctx.m->check_curvature_bound();
    (*ctx.out)["max_K"] = cb.max_K;
    (*ctx.out)["threshold"] = cb.threshold;
    (*ctx.out)["holds"] = cb.holds;
    ctx.check("curvature_bound", cb.holds == expect, cb.holds ? 1.0 : 0.0, expect ? 1.0 : 0.0);
}

void step_conjugate_points(const config::Section& s, StepContext& ctx) {
    const double T = s.number("T");
    const double tol = positive_tol(s, "tol", 1e-3);
    const UnitTangent z = start_state(*ctx.m, s);
    const auto zeros = conjugate_points(*ctx.m, z, T);
    const auto expect = s.array_or("expect");
    (*ctx.out)["times"] = zeros;
    bool pass = zeros.size() == expect.size();
    double worst = 0.0;
    if (pass)
        for (std::size_t i = 0; i < expect.size(); ++i) {
            worst = std::max(worst, std::abs(zeros[i] - expect[i]));
            if (std::abs(zeros[i] - expect[i]) > tol) pass = false;
        }
    ctx.check("conjugate_points", pass, worst, tol);
}

void step_floquet_parallel(const config::Section& s, StepContext& ctx) {
    const double v0 = s.number("v0");
    const ClosedGeodesicRecord rec = parallel_record(*ctx.m, v0);
    (*ctx.out)["length"] = rec.length;
    (*ctx.out)["type"] = orbit_type_name(rec.type());
    (*ctx.out)["sigma_re"] = rec.floquet.sigma.real();
    (*ctx.out)["sigma_im"] = rec.floquet.sigma.imag();
    (*ctx.out)["det"] = rec.floquet.det;
    (*ctx.out)["rotation"] = rec.floquet.rotation;

    if (s.has("expect_type")) {
        const std::string want = s.string("expect_type");
        ctx.check("floquet_type", orbit_type_name(rec.type()) == want, 0.0, 0.0);
    }
    if (s.has("expect_sigma")) {
        const double want = s.number("expect_sigma");
        const double rel = positive_tol(s, "tol_rel", 1e-3);
        ctx.check("floquet_sigma", std::abs(rec.floquet.sigma.real() - want) < rel * want,
                  std::abs(rec.floquet.sigma.real() - want), rel * want);
    }
    if (s.has("expect_rotation_mod")) {
        const double want = s.number("expect_rotation_mod");
        const double tol = positive_tol(s, "tol_rot", 1e-3);
        const double got = std::fmod(rec.floquet.rotation, two_pi);
        ctx.check("floquet_rotation", std::abs(got - want) < tol, std::abs(got - want), tol);
    }
    const double tol_det = positive_tol(s, "tol_det", 1e-6);
    ctx.check("floquet_det", std::abs(rec.floquet.det - 1.0) < tol_det,
              std::abs(rec.floquet.det - 1.0), tol_det);
}

void step_clairaut_drift(const config::Section& s, StepContext& ctx) {
    const double T = s.number("T");
    const double tol = positive_tol(s, "tol", 1e-8);
    const UnitTangent z = start_state(*ctx.m, s);
    const double c0 = ctx.m->clairaut(z.p, z.dir);
    const Trajectory tr = integrate(*ctx.m, z, T);
    double worst = 0.0;
    for (int i = 0; i <= 400; ++i) {
        const FlowState st = tr.at(T * i / 400);
        worst = std::max(worst,
                         std::abs(ctx.m->clairaut({st.u, st.v}, {st.du, st.dv}) - c0));
    }
    (*ctx.out)["drift"] = worst;
    ctx.check("clairaut_drift", worst < tol, worst, tol);
}

void step_csf_line(const config::Section& s, StepContext& ctx) {
    const int p = int(s.integer("p"));
    const int q = int(s.integer("q"));
    const double wiggle = s.number_or("wiggle", 0.05);
    const int n = int(s.integer_or("n", 192));
    const SurfacePoint base{s.number_or("base_u", 0.0), s.number("base_v")};
    const DiscreteCurve seed = make_torus_line(*ctx.m, p, q, base, n, wiggle);

    csf::StepPolicy pol;
    if (s.has("trace_csv")) pol.trace_path = ctx.path_for(s.string("trace_csv"));
    const csf::FlowOutcome out = csf::evolve(*ctx.m, seed, pol);
    if (!pol.trace_path.empty()) ctx.files->push_back(s.string("trace_csv"));

    (*ctx.out)["outcome"] = out.kind == csf::OutcomeKind::ConvergedGeodesic ? "converged"
                            : out.kind == csf::OutcomeKind::Collapsed      ? "collapsed"
                                                                           : "running";
    (*ctx.out)["steps"] = out.steps;
    ctx.check("csf_converged", out.kind == csf::OutcomeKind::ConvergedGeodesic, 0.0, 0.0);
    ctx.check("csf_monotone", out.length_monotone, out.length_monotone ? 1.0 : 0.0, 1.0);
    if (s.has("final_curve_csv") && out.record) {
        std::ostringstream csv;
        csv.precision(17);
        csv << "u,v\n";
        for (const auto& pt : out.record->curve.pts) csv << pt.u << ',' << pt.v << '\n';
        write_text(ctx, s.string("final_curve_csv"), csv.str());
    }
    if (out.record) {
        (*ctx.out)["length"] = out.record->length;
        (*ctx.out)["max_k"] = curvature_profile(*ctx.m, out.record->curve).max_abs_k;
        if (s.has("expect_length")) {
            const double want = s.number("expect_length");
            const double tol = positive_tol(s, "tol", 1e-3);
            ctx.check("csf_length", std::abs(out.record->length - want) < tol,
                      std::abs(out.record->length - want), tol);
            ctx.check("csf_funnel",
                      csf::funnel_check(*ctx.m, out.record->curve, {out.record->length, 1e-3}),
                      0.0, 0.0);
        }
    }
}

void step_csf_circle(const config::Section& s, StepContext& ctx) {
    const double radius = s.number("radius");
    const SurfacePoint center{s.number("center_u"), s.number("center_v")};
    const int n = int(s.integer_or("n", 128));
    const DiscreteCurve seed = make_circle(*ctx.m, center, radius, n);
    csf::StepPolicy pol;
    pol.target_n = int(s.integer_or("target_n", 96));
    const csf::FlowOutcome out = csf::evolve(*ctx.m, seed, pol);
    (*ctx.out)["outcome"] = out.kind == csf::OutcomeKind::Collapsed ? "collapsed" : "other";
    (*ctx.out)["s_extinct"] = out.s_extinct;
    ctx.check("csf_collapsed", out.kind == csf::OutcomeKind::Collapsed, 0.0, 0.0);
    if (s.has("expect_extinction")) {
        const double want = s.number("expect_extinction");
        const double rel = positive_tol(s, "tol_rel", 0.05);
        ctx.check("csf_extinction", std::abs(out.s_extinct - want) < rel * want,
                  std::abs(out.s_extinct - want), rel * want);
    }
}

finder::CompleteSystem build_system(const SurfaceMetric& m, const std::string& seed_kind) {
    if (seed_kind == "genus_chain")
        return finder::assemble_complete_system(m, finder::genus_chain(m));
    if (seed_kind == "bulge_parallel") {
        const auto parallels = finder::parallel_geodesics(m);
        for (const auto& rec : parallels)
            if (rec.has_conjugate_points)
                return finder::assemble_complete_system(m, finder::sphere_seed_chain(m, rec));
        throw Error("no conjugate-point parallel to seed the system");
    }
    throw ConfigError("unknown system seed '" + seed_kind + "'");
}

void step_complete_system(const config::Section& s, StepContext& ctx) {
    const finder::CompleteSystem sys = build_system(*ctx.m, s.string("seed"));
    (*ctx.out)["system"] = ordered_json::parse(sys.to_json());
    if (s.has("expect_count"))
        ctx.check("system_count", long(sys.all.size()) == s.integer("expect_count"),
                  double(sys.all.size()), double(s.integer("expect_count")));
    if (s.has("expect_limit_count"))
        ctx.check("limit_count", long(sys.limit_sub.size()) == s.integer("expect_limit_count"),
                  double(sys.limit_sub.size()), double(s.integer("expect_limit_count")));
    if (s.has("expect_limit_v0")) {
        const double want = s.number("expect_limit_v0");
        bool pass = sys.limit_sub.size() == 1;
        double got = -1.0;
        if (pass) {
            got = sys.all[sys.limit_sub[0]].geometry.v0;
            pass = std::abs(got - want) < 1e-6;
        }
        ctx.check("limit_v0", pass, got, want);
    }
}

std::vector<section::BirkhoffAnnulus> annuli_from(const SurfaceMetric& m,
                                                  const config::Section& s) {
    std::vector<section::BirkhoffAnnulus> annuli;
    if (s.has("annulus_v")) {
        for (double v0 : s.array("annulus_v"))
            for (auto& a : section::annuli_pair(parallel_record(m, v0)))
                annuli.push_back(a);
    }
    if (s.has("meridian_u")) {
        for (double u0 : s.array("meridian_u")) {
            const UnitTangent z = UnitTangent::make(m, {u0, 0.0}, {0.0, 1.0});
            const double len = m.meridian_arclength(m.v_min(), m.v_max());
            for (auto& a : section::annuli_pair(make_record(m, z, len))) annuli.push_back(a);
        }
    }
    if (annuli.empty() && s.has("line_p")) {
        const int p = int(s.integer("line_p"));
        const int q = int(s.integer("line_q"));
        const double off = s.number_or("line_offset", 0.25);
        const SurfacePoint base = p != 0 ? SurfacePoint{0.0, off} : SurfacePoint{off, 0.0};
        const TangentVector dir{double(p), double(q)};
        const UnitTangent z = UnitTangent::make(m, base, dir);
        const double len = std::hypot(double(p), double(q));
        for (auto& a : section::annuli_pair(make_record(m, z, len))) annuli.push_back(a);
    }
    if (annuli.empty()) throw ConfigError("step needs annulus_v, meridian_u, or line_p/line_q");
    return annuli;
}

void step_verify_birkhoff(const config::Section& s, StepContext& ctx) {
    const long samples = s.integer("samples");
    const double bound = s.number("ell_bound");
    const auto seed = std::uint64_t(s.integer("seed"));
    const auto annuli = annuli_from(*ctx.m, s);
    const section::VerifyReport rep =
        section::verify_birkhoff(*ctx.m, annuli, samples, bound, seed, ctx.opt.threads);
    (*ctx.out)["report"] = ordered_json::parse(rep.to_json());
    ctx.check("all_returned", rep.is_section_evidence, double(rep.returned), double(samples));
    ctx.check("max_tau_bound", rep.max_tau <= bound, rep.max_tau, bound);
    if (s.boolean_or("check_thread_determinism", false)) {
        const section::VerifyReport other =
            section::verify_birkhoff(*ctx.m, annuli, samples, bound, seed,
                                     ctx.opt.threads == 1 ? 2 : 1);
        ctx.check("thread_determinism", other.to_json() == rep.to_json(), 0.0, 0.0);
    }
    if (s.has("histogram_csv")) {
        std::ostringstream csv;
        csv << "bin_low,bin_high,count\n";
        for (std::size_t b = 0; b < rep.histogram.size(); ++b)
            csv << (bound * b / rep.histogram.size()) << ','
                << (bound * (b + 1) / rep.histogram.size()) << ',' << rep.histogram[b] << '\n';
        write_text(ctx, s.string("histogram_csv"), csv.str());
    }
}

void step_trapped_sets(const config::Section& s, StepContext& ctx) {
    const long samples = s.integer("samples");
    const double T_budget = s.number("T_budget");
    const auto seed = std::uint64_t(s.integer("seed"));
    const finder::CompleteSystem sys = build_system(*ctx.m, s.string("seed_kind"));

    std::vector<UnitTangent> witnesses;
    const long n_wit = s.integer_or("witnesses", 0);
    double v_waist = 0.0;
    if (n_wit > 0) {
        if (sys.limit_sub.size() != 1) throw Error("witness injection needs one limit waist");
        v_waist = sys.all[sys.limit_sub[0]].geometry.v0;
        witnesses = clairaut_witnesses(*ctx.m, v_waist, int(n_wit));
    }
    const double T_witness = s.number_or("T_witness", 8.0);
    const section::TrapReport rep = section::trapped_sets(
        *ctx.m, sys.view(), samples, T_budget, seed, ctx.opt.threads, witnesses, T_witness);
    (*ctx.out)["report"] = ordered_json::parse(rep.to_json());

    if (s.boolean_or("assert_zero_random_trapped", false)) {
        long random_trapped = 0;
        for (const auto& w : rep.trapped_forward)
            if (w.sample_index >= 0) ++random_trapped;
        for (const auto& w : rep.trapped_backward)
            if (w.sample_index >= 0) ++random_trapped;
        ctx.check("zero_random_trapped", random_trapped == 0, double(random_trapped), 0.0);
    }
    if (s.has("witness_trajectory_prefix")) {
        const std::string prefix = s.string("witness_trajectory_prefix");
        int idx = 0;
        for (const auto& w : rep.trapped_forward) {
            if (w.sample_index >= 0) continue;
            const Trajectory tr = integrate(*ctx.m, w.state, T_witness, true);
            const std::string file = prefix + std::to_string(idx++) + ".csv";
            tr.write_csv(ctx.path_for(file), T_witness / 200.0);
            ctx.files->push_back(file);
        }
    }
    if (n_wit > 0) {
        const double dist_tol = positive_tol(s, "witness_dist_tol", 1e-3);
        const double clair_tol = positive_tol(s, "witness_clairaut_tol", 1e-4);
        long trapped = 0;
        double worst_dist = 0.0, worst_clair = 0.0;
        for (const auto& w : rep.trapped_forward) {
            if (w.sample_index >= 0) continue;
            ++trapped;
            worst_dist = std::max(worst_dist, w.final_distance);
            worst_clair = std::max(worst_clair, w.clairaut_residual);
        }
        ctx.check("witnesses_trapped", trapped == n_wit, double(trapped), double(n_wit));
        ctx.check("witness_distance", worst_dist < dist_tol, worst_dist, dist_tol);
        ctx.check("witness_clairaut", worst_clair < clair_tol, worst_clair, clair_tol);
    }
}

void step_return_map_area(const config::Section& s, StepContext& ctx) {
    const int n_s = int(s.integer_or("n_s", 32));
    const int n_phi = int(s.integer_or("n_phi", 32));
    const double tol = positive_tol(s, "tol", 1e-3);
    const auto annuli = annuli_from(*ctx.m, s);
    const section::AreaCheckReport rep =
        section::return_map_area_check(*ctx.m, annuli, n_s, n_phi);
    (*ctx.out)["report"] = ordered_json::parse(rep.to_json());
    ctx.check("area_defect", rep.max_defect < tol && rep.trapped_points == 0, rep.max_defect,
              tol);
}

void step_chain_table(const config::Section& s, StepContext& ctx) {
    const int g_max = int(s.integer("G_max"));
    const auto rows = surgery::chain_table(g_max);
    ordered_json tab = ordered_json::array();
    bool formulas = true;
    for (const auto& r : rows) {
        tab.push_back({{"G", r.G},
                       {"euler", r.euler},
                       {"genus", r.genus},
                       {"boundary", r.boundary},
                       {"connected", r.connected}});
        if (r.euler != -8 * r.G + 4 || r.genus != 1 || r.boundary != 8 * r.G - 4 || !r.connected)
            formulas = false;
    }
    (*ctx.out)["table"] = tab;
    ctx.check("chain_formulas", formulas, 0.0, 0.0);
    if (s.has("csv")) {
        std::ostringstream csv;
        csv << "G,euler,genus,boundary\n";
        for (const auto& r : rows)
            csv << r.G << ',' << r.euler << ',' << r.genus << ',' << r.boundary << '\n';
        write_text(ctx, s.string("csv"), csv.str());
    }
}

void step_trajectory_csv(const config::Section& s, StepContext& ctx) {
    const double T = s.number("T");
    const double stride = s.number_or("stride", 0.01);
    const UnitTangent z = start_state(*ctx.m, s);
    const Trajectory tr = integrate(*ctx.m, z, T, true);
    const std::string file = s.string("csv");
    tr.write_csv(ctx.path_for(file), stride);
    ctx.files->push_back(file);
    (*ctx.out)["written"] = file;
}

} // namespace

RunResult run(const config::Config& cfg, const RunOptions& opt) {
    RunResult result;
    const config::Section& meta = cfg.require("scenario");
    result.name = meta.string("name");
    const std::string anchor = meta.string_or("anchor", "");
    const long scenario_seed = meta.integer_or("seed", -1);
    meta.reject_unknown();

    const config::Section& surf = cfg.require("surface");
    const SurfaceMetric m = build_surface(surf);
    surf.reject_unknown();

    ordered_json report;
    report["scenario"] = result.name;
    if (!anchor.empty()) report["anchor"] = anchor;
    report["seed"] = scenario_seed;
    report["surface"] = {{"kind", m.kind_name()},
                         {"area", m.total_area()},
                         {"euler_characteristic", m.euler_characteristic()},
                         {"inj_radius_estimate", m.inj_radius_estimate()}};
    report["steps"] = ordered_json::array();

    ordered_json timings = ordered_json::array();

    for (const config::Section* step : cfg.steps()) {
        const std::string op = step->string("op");
        ordered_json out;
        out["op"] = op;
        StepContext ctx{&m, opt, &result.assertions, &out, &result.files_written};
        const std::size_t before = result.assertions.size();

        // Monte-Carlo steps must carry an explicit seed
        if ((op == "verify_birkhoff" || op == "trapped_sets") && !step->has("seed") &&
            scenario_seed < 0)
            throw ConfigError("Monte-Carlo step '" + op + "' needs a seed");

        const auto t0 = std::chrono::steady_clock::now();
        if (op == "gauss_bonnet") step_gauss_bonnet(*step, ctx);
        else if (op == "curvature_bound") step_curvature_bound(*step, ctx);
        else if (op == "conjugate_points") step_conjugate_points(*step, ctx);
        else if (op == "floquet_parallel") step_floquet_parallel(*step, ctx);
        else if (op == "clairaut_drift") step_clairaut_drift(*step, ctx);
        else if (op == "csf_line") step_csf_line(*step, ctx);
        else if (op == "csf_circle") step_csf_circle(*step, ctx);
        else if (op == "complete_system") step_complete_system(*step, ctx);
        else if (op == "verify_birkhoff") step_verify_birkhoff(*step, ctx);
        else if (op == "trapped_sets") step_trapped_sets(*step, ctx);
        else if (op == "return_map_area") step_return_map_area(*step, ctx);
        else if (op == "chain_table") step_chain_table(*step, ctx);
        else if (op == "trajectory_csv") step_trajectory_csv(*step, ctx);
        else throw ConfigError("unknown op '" + op + "' in [" + step->name + "]");
        const auto t1 = std::chrono::steady_clock::now();
        timings.push_back(
            {{"step", step->name},
             {"ms", std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()}});

        step->reject_unknown();

        ordered_json checks = ordered_json::array();
        for (std::size_t i = before; i < result.assertions.size(); ++i) {
            const Assertion& a = result.assertions[i];
            checks.push_back(
                {{"name", a.name}, {"pass", a.pass}, {"value", a.value}, {"bound", a.bound}});
            if (!a.pass) result.pass = false;
        }
        out["assertions"] = checks;
        report["steps"].push_back(out);
    }

    report["pass"] = result.pass;
    result.report_json = report.dump(2);

    // timings and environment live outside the deterministic report body
    ordered_json full = report;
    full["threads"] = opt.threads;
    full["timings_ms"] = timings;

    std::ofstream f(opt.out_dir.empty() ? "report.json" : opt.out_dir + "/report.json");
    if (f) {
        f << full.dump(2) << "\n";
        result.files_written.push_back("report.json");
    }
    return result;
}

namespace {

// clang-format off
const std::vector<Bundled> kBundled = {
{"chain_table_G5", "Theorem A / surgery section topology",
R"cfg(# Fried surgery of the 2G-chain: genus-one section with 8G-4 boundary circles
[scenario]
name = "chain_table_G5"
anchor = "Theorem A"
seed = 1

[surface]
kind = "flat_torus"

[step.1]
op = "chain_table"
G_max = 5
csv = "chain_table.csv"
)cfg"},

{"theorem_b_spheroid", "Theorem B: both equator annuli are Birkhoff sections",
R"cfg(# Oblate spheroid: every orbit hits an equator annulus within tau <= 6
[scenario]
name = "theorem_b_spheroid"
anchor = "Theorem B"
seed = 20240817

[surface]
kind = "spheroid"
c = 0.9

[step.1]
op = "verify_birkhoff"
annulus_v = [1.5707963267948966]
samples = 10000
ell_bound = 6.0
seed = 20240817
check_thread_determinism = true
histogram_csv = "return_times.csv"
)cfg"},

{"torus_complete_system", "empty trapped sets over the torus chain complement",
R"cfg(# Torus of revolution: the {inner equator, meridian} system traps nothing
[scenario]
name = "torus_complete_system"
anchor = "empty trapped sets over the chain complement"
seed = 99

[surface]
kind = "torus_of_revolution"
R = 2.0
r = 1.0

[step.1]
op = "complete_system"
seed = "genus_chain"
expect_count = 2
expect_limit_count = 0

[step.2]
op = "trapped_sets"
seed_kind = "genus_chain"
samples = 10000
T_budget = 200.0
seed = 99
assert_zero_random_trapped = true

[step.3]
op = "verify_birkhoff"
annulus_v = [3.141592653589793]
meridian_u = [1.0]
samples = 10000
ell_bound = 60.0
seed = 99
)cfg"},

{"theorem_d_dumbbell", "Theorem D: trapped orbits approach the neck waist",
R"cfg(# Dumbbell sphere: limit subcollection = {neck}; witnesses on the neck level
[scenario]
name = "theorem_d_dumbbell"
anchor = "Theorem D"
seed = 4242

[surface]
kind = "dumbbell"

[step.1]
op = "complete_system"
seed = "bulge_parallel"
expect_count = 3
expect_limit_count = 1
expect_limit_v0 = 1.5707963267948966

[step.2]
op = "trapped_sets"
seed_kind = "bulge_parallel"
samples = 10000
T_budget = 200.0
seed = 4242
witnesses = 16
T_witness = 8.0
assert_zero_random_trapped = true
witness_dist_tol = 1e-3
witness_clairaut_tol = 1e-4
)cfg"},

{"floquet_torus_equators", "Floquet multipliers of the torus equators",
R"cfg(# Inner equator sigma = e^{2 pi}; outer equator elliptic, rotation 2 pi sqrt(3)
[scenario]
name = "floquet_torus_equators"
anchor = "Floquet classification (linearized Poincare map)"
seed = 1

[surface]
kind = "torus_of_revolution"
R = 2.0
r = 1.0

[step.1]
op = "floquet_parallel"
v0 = 3.141592653589793
expect_type = "hyperbolic"
expect_sigma = 535.4916555247646
tol_rel = 1e-3
tol_det = 1e-6

[step.2]
op = "floquet_parallel"
v0 = 0.0
expect_type = "elliptic"
expect_rotation_mod = 4.600292652105929
tol_rot = 1e-3
tol_det = 1e-6
)cfg"},

{"conjugate_points_gallery", "first conjugate times on the shipped models",
R"cfg(# sin(t) on the unit sphere, sqrt(3) sin(t/sqrt(3)) on the outer equator
[scenario]
name = "conjugate_points_gallery"
anchor = "conjugate point detection"
seed = 1

[surface]
kind = "round_sphere"

[step.1]
op = "conjugate_points"
start_u = 0.0
start_v = 1.5707963267948966
dir_u = 1.0
dir_v = 0.0
T = 4.0
expect = [3.141592653589793]
tol = 1e-4
)cfg"},

{"csf_torus_convergence", "curve shortening to the inner equator",
R"cfg(# A wiggled (1,0) loop flows to the inner equator, length 2 pi
[scenario]
name = "csf_torus_convergence"
anchor = "curve shortening flow properties (iii)-(iv)"
seed = 1

[surface]
kind = "torus_of_revolution"
R = 2.0
r = 1.0

[step.1]
op = "csf_line"
p = 1
q = 0
base_v = 2.2
wiggle = 0.15
expect_length = 6.283185307179586
tol = 1e-3
trace_csv = "csf_trace.csv"
final_curve_csv = "csf_final_curve.csv"
)cfg"},

{"csf_circle_extinction", "planar extinction law on the flat torus",
R"cfg(# A radius-0.1 circle collapses at s = rho^2/2 within 5%
[scenario]
name = "csf_circle_extinction"
anchor = "curve shortening flow property (iv)"
seed = 1

[surface]
kind = "flat_torus"

[step.1]
op = "csf_circle"
center_u = 0.5
center_v = 0.5
radius = 0.1
expect_extinction = 0.005
tol_rel = 0.05
)cfg"},

{"return_map_invariance", "the return map preserves cos(phi) ds dphi",
R"cfg(# Area defect of the first-return Jacobian on sphere and flat-torus annuli
[scenario]
name = "return_map_invariance"
anchor = "return map area preservation"
seed = 1

[surface]
kind = "round_sphere"

[step.1]
op = "return_map_area"
annulus_v = [1.5707963267948966]
n_s = 32
n_phi = 32
tol = 1e-3
)cfg"},

{"gauss_bonnet_suite", "Gauss-Bonnet and the curvature-bound corollary",
R"cfg(# integral K dA = 2 pi chi; flat torus satisfies max K <= 2 pi / area
[scenario]
name = "gauss_bonnet_suite"
anchor = "Gauss-Bonnet / curvature bound corollary"
seed = 1

[surface]
kind = "conformal_torus"
mode_ju = [1, 2]
mode_jv = [1, 0]
mode_amp = [0.01, 0.004]

[step.1]
op = "gauss_bonnet"
tol = 1e-6

[step.2]
op = "curvature_bound"
expect_holds = true
)cfg"},
};
// clang-format on

} // namespace

const std::vector<Bundled>& bundled_scenarios() { return kBundled; }

const Bundled* find_bundled(const std::string& name) {
    for (const auto& b : kBundled)
        if (b.name == name) return &b;
    return nullptr;
}

} // namespace bl::scenario

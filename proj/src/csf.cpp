#include "bl/csf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "bl/errors.hpp"

namespace bl::csf {

namespace {

// cyclic tridiagonal solve for (I - a*D2) d = rhs, D2 the periodic second
// difference with unit spacing folded into a. The cyclic corners (-a) are
// split off by Sherman-Morrison: A = A' + u v^T with u = (a,0,..,0,-a),
// v = (1,0,..,0,-1), leaving A' tridiagonal with end diagonals 1+a.
void solve_cyclic(std::vector<double>& d, const std::vector<double>& rhs, double a) {
    const int n = int(rhs.size());
    const double dmain = 1.0 + 2.0 * a;
    const double off = -a;

    auto tridiag = [&](const std::vector<double>& b, std::vector<double>& x) {
        std::vector<double> cp(n), dp(n);
        const double d0 = dmain - a;
        cp[0] = off / d0;
        dp[0] = b[0] / d0;
        for (int i = 1; i < n; ++i) {
            const double di = (i == n - 1) ? dmain - a : dmain;
            const double mlt = di - off * cp[i - 1];
            cp[i] = off / mlt;
            dp[i] = (b[i] - off * dp[i - 1]) / mlt;
        }
        x.resize(n);
        x[n - 1] = dp[n - 1];
        for (int i = n - 2; i >= 0; --i) x[i] = dp[i] - cp[i] * x[i + 1];
    };

    std::vector<double> x, z, u(n, 0.0);
    u[0] = a;
    u[n - 1] = -a;
    tridiag(rhs, x);
    tridiag(u, z);
    const double fac = (x[0] - x[n - 1]) / (1.0 + (z[0] - z[n - 1]));
    d.resize(n);
    for (int i = 0; i < n; ++i) d[i] = x[i] - fac * z[i];
}

SurfacePoint barycenter(const DiscreteCurve& c) {
    double su = 0, sv = 0;
    for (const auto& p : c.pts) {
        su += p.u;
        sv += p.v;
    }
    return {su / c.n(), sv / c.n()};
}

// cheap width proxy before the exact O(n^2) diameter
double bbox_extent(const SurfaceMetric& m, const DiscreteCurve& c) {
    double ulo = 1e300, uhi = -1e300, vlo = 1e300, vhi = -1e300;
    for (const auto& p : c.pts) {
        ulo = std::min(ulo, p.u);
        uhi = std::max(uhi, p.u);
        vlo = std::min(vlo, p.v);
        vhi = std::max(vhi, p.v);
    }
    const Metric2 g = m.jet(m.reduce(barycenter(c))).g;
    const double du = uhi - ulo, dv = vhi - vlo;
    return std::sqrt(g.g11 * du * du + 2.0 * std::abs(g.g12) * du * dv + g.g22 * dv * dv);
}

struct PolishResult {
    bool ok = false;
    ClosedGeodesicRecord record;
};

// Newton shooting from the current curve; accepted only when the orbit closes
// to 1e-8, keeps the homotopy tag, and stays near the curve's length.
PolishResult try_polish(const SurfaceMetric& m, const DiscreteCurve& c,
                        const CurvatureProfile& prof) {
    PolishResult out;
    const double length = prof.length;
    const UnitTangent guess = UnitTangent::make(m, c.pts[0], prof.tang[0]);
    ClosedOrbit co;
    try {
        co = refine_closed_orbit(m, guess, length, c.loop_du, c.loop_dv);
    } catch (const Error&) {
        return out;
    }
    if (!(co.closure_gap < 1e-8) || !(co.length > 0)) return out;
    if (std::abs(co.length - length) > std::max(0.05 * length, 1e-3)) return out;
    ClosedGeodesicRecord rec = make_record(m, co.z, co.length);
    const double pu = m.period_u();
    const double pv = m.v_periodic() ? m.period_v() : 1.0;
    if (rec.wind_u != int(std::lround(c.loop_du / pu)) ||
        rec.wind_v != int(std::lround(c.loop_dv / pv)))
        return out;
    out.record = std::move(rec);
    out.ok = true;
    return out;
}

FlowOutcome evolve_impl(const SurfaceMetric& m, const DiscreteCurve& c0, const StepPolicy& policy,
                        const RegionSpec* region) {
    if (region && !region->contains(m, c0))
        throw PreconditionFailed("initial curve not inside the region");

    const double collapse_tol =
        policy.collapse_tol > 0 ? policy.collapse_tol : 1e-3 * m.inj_radius_estimate();

    std::ofstream trace;
    if (!policy.trace_path.empty()) {
        trace.open(policy.trace_path);
        trace << "s,L,max_k,n\n";
        trace.precision(16);
    }

    // edge length tracks L / target_n, so the count stays near target_n
    const int n_res = std::clamp(policy.target_n, policy.min_n, policy.max_n);

    DiscreteCurve c = resample(m, c0, n_res);
    if (!is_embedded(m, c)) throw EmbeddednessLost("initial curve not embedded");

    FlowOutcome out;
    double L = curve_length(m, c);
    double s = 0.0;
    double eps_target = policy.eps_target;

    for (long step = 0; step < policy.max_steps; ++step) {
        const CurvatureProfile prof = curvature_profile(m, c);
        L = prof.length;

        if (trace.is_open())
            trace << s << ',' << L << ',' << prof.max_abs_k << ',' << c.n() << '\n';

        // collapse?
        if (bbox_extent(m, c) < 2.0 * collapse_tol && curve_diameter(m, c) < collapse_tol) {
            out.kind = OutcomeKind::Collapsed;
            out.extinction_point = m.reduce(barycenter(c));
            out.s_extinct = s; // residual area term is O(collapse_tol^2)
            out.s_elapsed = s;
            out.steps = step;
            out.curve = c;
            out.final_length = L;
            return out;
        }

        // hand over to the Newton polish inside the funnel; the shooting basin
        // is much wider than the funnel itself, so attempt early as well and
        // let the acceptance guards decide
        const bool in_funnel = prof.max_abs_k < eps_target;
        if (in_funnel || (prof.max_abs_k < 0.05 && step % 25 == 0)) {
            PolishResult pr = try_polish(m, c, prof);
            // the early attempt must respect the descent: a shorter curve next
            // to an unstable geodesic is not converging to it
            if (pr.ok && !in_funnel && pr.record.length > L + 1e-9) pr.ok = false;
            if (pr.ok) {
                out.kind = OutcomeKind::ConvergedGeodesic;
                out.record = pr.record;
                out.curve = c;
                out.s_elapsed = s;
                out.steps = step;
                out.final_length = pr.record.length;
                return out;
            }
            if (in_funnel) {
                // inside the funnel but no accepted orbit: tighten and keep
                // flowing; below shooting resolution, report Running honestly
                eps_target *= 0.5;
                if (eps_target < 1e-8) {
                    out.kind = OutcomeKind::Running;
                    out.curve = c;
                    out.s_elapsed = s;
                    out.steps = step;
                    out.final_length = L;
                    return out;
                }
            }
        }

        double min_edge = 1e300;
        for (double e : prof.ds) min_edge = std::min(min_edge, e);
        double ds = std::min(policy.ds_max, policy.cfl * min_edge * min_edge);

        // semi-implicit normal step with embeddedness / region / monotonicity retries
        bool accepted = false;
        for (int attempt = 0; attempt < 8 && !accepted; ++attempt, ds *= 0.5) {
            const double h = L / c.n(); // uniform after resampling
            const double alpha = ds / (h * h);
            std::vector<double> rhs(c.n()), disp;
            for (int i = 0; i < c.n(); ++i) rhs[i] = ds * prof.k[i];
            solve_cyclic(disp, rhs, alpha);

            DiscreteCurve cand = c;
            for (int i = 0; i < c.n(); ++i) {
                cand.pts[i].u += disp[i] * prof.nu[i].du;
                cand.pts[i].v += disp[i] * prof.nu[i].dv;
            }
            DiscreteCurve res = resample(m, cand, n_res);
            if (!is_embedded(m, res)) continue;
            const double Lnew = curve_length(m, res);
            if (Lnew > L) continue;
            if (region && !region->contains(m, res)) {
                if (attempt == 7) throw ConvexityViolation("flow attempted to exit the region");
                continue;
            }
            c = std::move(res);
            L = Lnew;
            s += ds;
            accepted = true;
        }
        if (!accepted) {
            // a stalled descender at machine-precision curvature is a budget
            // outcome, not an embeddedness failure
            if (prof.max_abs_k < 1e-3) {
                out.kind = OutcomeKind::Running;
                out.curve = c;
                out.s_elapsed = s;
                out.steps = step;
                out.final_length = L;
                return out;
            }
            throw EmbeddednessLost("step rejected after 8 halvings");
        }
    }

    out.kind = OutcomeKind::Running;
    out.curve = c;
    out.s_elapsed = s;
    out.steps = policy.max_steps;
    out.final_length = L;
    return out;
}

} // namespace

std::optional<ClosedGeodesicRecord> polish_to_geodesic(const SurfaceMetric& m,
                                                       const DiscreteCurve& c) {
    const CurvatureProfile prof = curvature_profile(m, c);
    PolishResult pr = try_polish(m, c, prof);
    if (!pr.ok) return std::nullopt;
    return pr.record;
}

bool funnel_check(const SurfaceMetric& m, const DiscreteCurve& c, const FunnelWindow& w) {
    const CurvatureProfile prof = curvature_profile(m, c);
    return std::abs(prof.length - w.ell) < w.eps * w.eps && prof.max_abs_k < w.eps;
}

bool RegionSpec::contains(const SurfaceMetric& m, const DiscreteCurve& c) const {
    switch (kind) {
        case Kind::VBand: {
            for (const auto& p : c.pts)
                if (!(p.v > v_lo && p.v < v_hi)) return false;
            return true;
        }
        case Kind::Box: {
            for (const auto& p : c.pts)
                if (!(p.u > u_lo && p.u < u_hi && p.v > v_lo && p.v < v_hi)) return false;
            return true;
        }
        case Kind::CurveComplement: {
            for (const auto& rec : boundary)
                if (intersection_count(m, c, rec.curve) > 0) return false;
            return true;
        }
    }
    return false;
}

FlowOutcome evolve(const SurfaceMetric& m, const DiscreteCurve& c0, const StepPolicy& policy) {
    return evolve_impl(m, c0, policy, nullptr);
}

FlowOutcome region_confined_evolve(const SurfaceMetric& m, const DiscreteCurve& c0,
                                   const RegionSpec& region, const StepPolicy& policy) {
    return evolve_impl(m, c0, policy, &region);
}

} // namespace bl::csf

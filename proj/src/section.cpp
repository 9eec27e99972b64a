#include "bl/section.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "bl/errors.hpp"
#include "bl/parallel.hpp"
#include "bl/rng.hpp"

namespace bl::section {

namespace {

double wrap_pm(double x, double period) {
    double y = std::fmod(x, period);
    if (y < -0.5 * period) y += period;
    if (y >= 0.5 * period) y -= period;
    return y;
}

double wrap_pos(double x, double period) {
    double y = std::fmod(x, period);
    if (y < 0) y += period;
    return y;
}

// frame of the base curve at a given chart point near it: unit tangent of the
// positively oriented curve, left normal, arclength position
struct CurveFrame {
    double s = 0.0;
    TangentVector T{};
    TangentVector N{};
    bool valid = false;
};

// signed functional vanishing exactly on the base curve, plus frame lookup
struct CurveField {
    const SurfaceMetric* m = nullptr;
    const ClosedGeodesicRecord* rec = nullptr;
    CurveGeomKind kind = CurveGeomKind::Polyline;

    // cached for fast paths
    double v0 = 0, u0 = 0, ell = 0;
    int orient = +1;
    int lp = 0, lq = 0;
    double lc = 0, lnorm = 1;
    double u_ref = 0, v_ref = 0;
    double period_u = 0, period_v = 0;
    double tube = 0.1; // validity half-width of the signed value
    std::vector<double> cum; // polyline cumulative arclength

    void init(const SurfaceMetric& metric, const ClosedGeodesicRecord& record) {
        m = &metric;
        rec = &record;
        kind = record.geometry.kind;
        ell = record.length;
        period_u = metric.period_u();
        period_v = metric.v_periodic() ? metric.period_v() : 0.0;
        orient = record.geometry.orient;
        v0 = record.geometry.v0;
        u0 = record.geometry.u0;
        lp = record.geometry.p;
        lq = record.geometry.q;
        lc = record.geometry.c;
        lnorm = std::hypot(double(lp), double(lq));
        u_ref = record.curve.pts[0].u;
        v_ref = record.curve.pts[0].v;
        tube = 0.25 * metric.inj_radius_estimate();
        if (kind == CurveGeomKind::Polyline) {
            const int n = record.curve.n();
            cum.assign(n + 1, 0.0);
            for (int i = 0; i < n; ++i) {
                const SurfacePoint a = record.curve.at_cyclic(i);
                const SurfacePoint b = record.curve.at_cyclic(i + 1);
                cum[i + 1] =
                    cum[i] + metric.norm({0.5 * (a.u + b.u), 0.5 * (a.v + b.v)},
                                         {b.u - a.u, b.v - a.v});
            }
        }
    }

    // signed value; NaN when the sign is not trustworthy at this point
    double eval(double u, double v) const {
        switch (kind) {
            case CurveGeomKind::ParallelV: {
                const double raw = period_v > 0 ? wrap_pm(v - v0, period_v) : v - v0;
                if (period_v > 0 && std::abs(raw) > 0.35 * period_v)
                    return std::numeric_limits<double>::quiet_NaN();
                return raw;
            }
            case CurveGeomKind::MeridianU: {
                const double raw = wrap_pm(u - u0, period_u);
                if (std::abs(raw) > 0.35 * period_u)
                    return std::numeric_limits<double>::quiet_NaN();
                return raw;
            }
            case CurveGeomKind::TorusLine: {
                const double raw = wrap_pm(double(lq) * u - double(lp) * v - lc, 1.0) / lnorm;
                if (std::abs(raw) > 0.35 / lnorm)
                    return std::numeric_limits<double>::quiet_NaN();
                return raw;
            }
            case CurveGeomKind::Polyline: {
                const CurveFrame f = frame(u, v, true);
                if (!f.valid) return std::numeric_limits<double>::quiet_NaN();
                return poly_signed; // normal component of the offset, set by frame()
            }
        }
        return std::numeric_limits<double>::quiet_NaN();
    }

    mutable double poly_signed = 0;

    CurveFrame frame(double u, double v, bool for_eval = false) const {
        CurveFrame out;
        switch (kind) {
            case CurveGeomKind::ParallelV: {
                const double rho = m->profile_radius(v0);
                const double mv = m->meridian_speed(v0);
                // uniform-in-u parametrization scaled to the recorded length:
                // exact arclength on unwarped models, a consistent chart always
                out.s = wrap_pos(orient * (u - u_ref) * ell / period_u, ell);
                out.T = {orient / rho, 0.0};
                out.N = {0.0, double(orient) / mv};
                out.valid = true;
                return out;
            }
            case CurveGeomKind::MeridianU: {
                const double mv = m->meridian_speed(v);
                const double rho = m->profile_radius(v);
                out.s = wrap_pos(orient * m->meridian_arclength(v_ref, v), ell);
                out.T = {0.0, orient / mv};
                out.N = {-double(orient) / rho, 0.0};
                out.valid = true;
                return out;
            }
            case CurveGeomKind::TorusLine: {
                out.s = wrap_pos((u - u_ref) * lp / lnorm + (v - v_ref) * lq / lnorm, lnorm > 0 ? ell : 1);
                out.T = {lp / lnorm, lq / lnorm};
                out.N = {-lq / lnorm, lp / lnorm};
                out.valid = true;
                return out;
            }
            case CurveGeomKind::Polyline: {
                // nearest sample by wrapped chart distance
                const int n = rec->curve.n();
                int best = -1;
                double bd = 1e300, bu = 0, bv = 0;
                for (int i = 0; i < n; ++i) {
                    double du = u - rec->curve.pts[i].u;
                    double dv = v - rec->curve.pts[i].v;
                    du = wrap_pm(du, period_u);
                    if (period_v > 0) dv = wrap_pm(dv, period_v);
                    const double d = du * du + dv * dv;
                    if (d < bd) {
                        bd = d;
                        best = i;
                        bu = du;
                        bv = dv;
                    }
                }
                const TangentVector Traw = rec->dirs[best];
                const SurfacePoint pb = m->reduce(rec->curve.pts[best]);
                const TangentVector T = m->normalized(pb, Traw);
                const TangentVector N = m->rotate90(pb, T);
                const Metric2 g = m->jet(pb).g;
                const double sig =
                    g.g11 * bu * N.du + g.g12 * (bu * N.dv + bv * N.du) + g.g22 * bv * N.dv;
                if (for_eval)
                    poly_signed = std::sqrt(bd) > tube
                                      ? std::numeric_limits<double>::quiet_NaN()
                                      : sig;
                const double along =
                    g.g11 * bu * T.du + g.g12 * (bu * T.dv + bv * T.du) + g.g22 * bv * T.dv;
                out.s = wrap_pos(cum[best] + along, ell);
                out.T = T;
                out.N = N;
                out.valid = std::sqrt(bd) <= tube;
                return out;
            }
        }
        return out;
    }
};

struct HitInfo {
    int annulus = -1;
    double s = 0, phi = 0;
    double t = 0;
    bool valid = false;
};

// classify a crossing state against the annulus list sharing this base curve
HitInfo classify_hit(const SurfaceMetric& m, const std::vector<BirkhoffAnnulus>& annuli,
                     const std::vector<int>& members, const CurveField& field, double t,
                     const FlowState& st) {
    HitInfo out;
    const SurfacePoint p{st.u, st.v};
    const CurveFrame f = field.frame(st.u, st.v);
    if (!f.valid) return out;
    const TangentVector d{st.du, st.dv};
    const SurfacePoint pr = m.reduce(p);
    const Metric2 g = m.jet(pr).g;
    auto dot = [&](const TangentVector& a, const TangentVector& b) {
        return g.g11 * a.du * b.du + g.g12 * (a.du * b.dv + a.dv * b.du) + g.g22 * a.dv * b.dv;
    };
    const double dn = dot(d, f.N);
    const double dt = dot(d, f.T);
    const int side = dn >= 0 ? +1 : -1;
    for (int idx : members) {
        if (annuli[idx].side != side) continue;
        out.annulus = idx;
        out.t = t;
        out.valid = true;
        if (side > 0) {
            out.s = f.s;
            out.phi = std::atan2(dt, dn);
        } else {
            out.s = wrap_pos(field.ell - f.s, field.ell);
            out.phi = std::atan2(-dt, -dn);
        }
        return out;
    }
    return out;
}

} // namespace

UnitTangent BirkhoffAnnulus::point(const SurfaceMetric& m, double s, double phi) const {
    CurveField field;
    field.init(m, base);
    const double s_fwd = side > 0 ? s : wrap_pos(base.length - s, base.length);
    // locate the base point at arclength s_fwd along the positive orientation
    SurfacePoint p;
    switch (base.geometry.kind) {
        case CurveGeomKind::ParallelV:
            p = {base.curve.pts[0].u +
                     base.geometry.orient * s_fwd * m.period_u() / base.length,
                 base.geometry.v0};
            break;
        default: {
            // walk the samples (uniform arclength spacing)
            const int n = base.curve.n();
            const double step = base.length / n;
            const int i = std::min(int(s_fwd / step), n - 1);
            const double frac = (s_fwd - i * step) / step;
            const SurfacePoint a = base.curve.at_cyclic(i);
            const SurfacePoint b = base.curve.at_cyclic(i + 1);
            p = {a.u + frac * (b.u - a.u), a.v + frac * (b.v - a.v)};
            break;
        }
    }
    const CurveFrame f = field.frame(p.u, p.v);
    TangentVector T = f.T, N = f.N;
    if (side < 0) {
        T = {-T.du, -T.dv};
        N = {-N.du, -N.dv};
    }
    const TangentVector d{std::cos(phi) * N.du + std::sin(phi) * T.du,
                          std::cos(phi) * N.dv + std::sin(phi) * T.dv};
    return UnitTangent::make(m, p, d);
}

std::vector<BirkhoffAnnulus> annuli_pair(const ClosedGeodesicRecord& rec,
                                         const std::string& name) {
    std::vector<BirkhoffAnnulus> out(2);
    out[0].base = rec;
    out[0].side = +1;
    out[0].name = name.empty() ? "annulus+" : name + "+";
    out[1].base = rec;
    out[1].side = -1;
    out[1].name = name.empty() ? "annulus-" : name + "-";
    return out;
}

std::vector<ReturnSample> multi_return(const SurfaceMetric& m,
                                       const std::vector<BirkhoffAnnulus>& annuli,
                                       const UnitTangent& z0, double T_budget, int max_hits,
                                       const FirstReturnOptions& opt) {
    // group annuli over a shared base curve: same record geometry and length
    std::vector<CurveField> fields;
    std::vector<std::vector<int>> members;
    for (std::size_t i = 0; i < annuli.size(); ++i) {
        int found = -1;
        for (std::size_t fidx = 0; fidx < fields.size(); ++fidx) {
            const ClosedGeodesicRecord* r = fields[fidx].rec;
            if (std::abs(r->length - annuli[i].base.length) < 1e-12 &&
                r->geometry.kind == annuli[i].base.geometry.kind &&
                std::abs(r->curve.pts[0].u - annuli[i].base.curve.pts[0].u) < 1e-12 &&
                std::abs(r->curve.pts[0].v - annuli[i].base.curve.pts[0].v) < 1e-12)
                found = int(fidx);
        }
        if (found < 0) {
            fields.emplace_back();
            fields.back().init(m, annuli[i].base);
            members.emplace_back();
            found = int(fields.size()) - 1;
        }
        members[found].push_back(int(i));
    }

    // start position when z0 lies on a listed annulus
    bool start_on = false;
    double start_s = 0, start_phi = 0;
    for (std::size_t fidx = 0; fidx < fields.size(); ++fidx) {
        const double sig = fields[fidx].eval(z0.p.u, z0.p.v);
        if (std::isfinite(sig) && std::abs(sig) < 1e-9) {
            FlowState st{z0.p.u, z0.p.v, z0.dir.du, z0.dir.dv, 0, 0, 0, 0};
            const HitInfo h = classify_hit(m, annuli, members[fidx], fields[fidx], 0.0, st);
            if (h.valid) {
                start_on = true;
                start_s = h.s;
                start_phi = h.phi;
            }
        }
    }

    IntegrateOptions iopt;
    iopt.rel_tol = opt.rel_tol;
    iopt.abs_tol = opt.abs_tol;

    const std::size_t nf = fields.size();
    std::vector<double> prev_sig(nf), cur_sig(nf);
    double prev_t = 0.0;
    for (std::size_t f = 0; f < nf; ++f) prev_sig[f] = fields[f].eval(z0.p.u, z0.p.v);

    std::vector<HitInfo> hits;
    double last_hit_t = 0.0;
    integrate_scan(m, z0, T_budget, false, iopt, [&](const OdeStep<8>& step) {
        const int parts = std::max(2, int(step.h / 0.04) + 1);
        double y[8];
        std::vector<HitInfo> step_hits;
        for (int k = 1; k <= parts; ++k) {
            const double t = step.t0 + step.h * k / parts;
            step.eval(t, y);
            for (std::size_t f = 0; f < nf; ++f) {
                cur_sig[f] = fields[f].eval(y[0], y[1]);
                const double a = prev_sig[f], b = cur_sig[f];
                if (std::isfinite(a) && std::isfinite(b) && a * b < 0.0) {
                    // bisect the crossing time within this dense step
                    double lo = prev_t, hi = t, flo = a;
                    for (int it = 0; it < 60; ++it) {
                        const double mid = 0.5 * (lo + hi);
                        step.eval(std::max(mid, step.t0), y);
                        const double fm = fields[f].eval(y[0], y[1]);
                        if (!std::isfinite(fm)) break;
                        if (flo * fm <= 0.0) hi = mid;
                        else {
                            lo = mid;
                            flo = fm;
                        }
                    }
                    const double t_star = 0.5 * (lo + hi);
                    if (t_star > opt.t_min && t_star > last_hit_t + 1e-9) {
                        step.eval(std::max(t_star, step.t0), y);
                        FlowState st{y[0], y[1], y[2], y[3], 0, 0, 0, 0};
                        const HitInfo h =
                            classify_hit(m, annuli, members[f], fields[f], t_star, st);
                        if (h.valid) step_hits.push_back(h);
                    }
                }
            }
            prev_sig = cur_sig;
            prev_t = t;
        }
        std::sort(step_hits.begin(), step_hits.end(),
                  [](const HitInfo& a, const HitInfo& b) { return a.t < b.t; });
        for (const HitInfo& h : step_hits) {
            if (int(hits.size()) >= max_hits) break;
            if (h.t > last_hit_t + 1e-9) {
                hits.push_back(h);
                last_hit_t = h.t;
            }
        }
        return int(hits.size()) < max_hits;
    });

    std::vector<ReturnSample> out;
    for (const HitInfo& h : hits) {
        ReturnSample rs;
        rs.start_on_annulus = start_on;
        rs.start_s = start_s;
        rs.start_phi = start_phi;
        rs.status = ReturnStatus::Returned;
        rs.hit_annulus = h.annulus;
        rs.s = h.s;
        rs.phi = h.phi;
        rs.tau = h.t;
        out.push_back(rs);
    }
    return out;
}

ReturnSample first_return(const SurfaceMetric& m, const std::vector<BirkhoffAnnulus>& annuli,
                          const UnitTangent& z0, double T_budget,
                          const FirstReturnOptions& opt) {
    const auto hits = multi_return(m, annuli, z0, T_budget, 1, opt);
    if (!hits.empty()) return hits.front();
    ReturnSample out;
    out.status = ReturnStatus::Budget;
    out.tau = T_budget;
    // start tagging for the budget case
    std::vector<CurveField> fields;
    std::vector<std::vector<int>> members;
    for (std::size_t i = 0; i < annuli.size(); ++i) {
        fields.emplace_back();
        fields.back().init(m, annuli[i].base);
        members.push_back({int(i)});
    }
    for (std::size_t fidx = 0; fidx < fields.size(); ++fidx) {
        const double sig = fields[fidx].eval(z0.p.u, z0.p.v);
        if (std::isfinite(sig) && std::abs(sig) < 1e-9) {
            FlowState st{z0.p.u, z0.p.v, z0.dir.du, z0.dir.dv, 0, 0, 0, 0};
            const HitInfo h = classify_hit(m, annuli, members[fidx], fields[fidx], 0.0, st);
            if (h.valid) {
                out.start_on_annulus = true;
                out.start_s = h.s;
                out.start_phi = h.phi;
            }
        }
    }
    return out;
}

namespace {

UnitTangent sample_unit_tangent(const SurfaceMetric& m, std::uint64_t seed, long index,
                                double density_cap) {
    SplitMix64 rng = substream(seed, std::uint64_t(index));
    const double vspan = m.v_max() - m.v_min();
    for (int tries = 0; tries < 4096; ++tries) {
        const double u = rng.uniform() * m.period_u();
        const double v = m.v_min() + rng.uniform() * vspan;
        const SurfacePoint p{u, v};
        if (!m.in_chart(p)) continue;
        const double dens = m.sqrt_det(p);
        if (rng.uniform() * density_cap > dens) continue;
        const double th = rng.uniform() * two_pi;
        const Metric2 g = m.jet(p).g;
        const double sd = std::sqrt(g.det());
        const TangentVector e1{1.0 / std::sqrt(g.g11), 0.0};
        const TangentVector e2{-g.g12 / (std::sqrt(g.g11) * sd), g.g11 / (std::sqrt(g.g11) * sd)};
        const TangentVector d{std::cos(th) * e1.du + std::sin(th) * e2.du,
                              std::cos(th) * e1.dv + std::sin(th) * e2.dv};
        return UnitTangent::make(m, p, d);
    }
    throw Error("sampler rejection loop exhausted");
}

double density_cap(const SurfaceMetric& m) {
    double cap = 0.0;
    const double vspan = m.v_max() - m.v_min();
    for (int i = 0; i <= 64; ++i)
        for (int j = 1; j < 64; ++j) {
            const SurfacePoint p{m.period_u() * i / 64.0, m.v_min() + vspan * j / 64.0};
            if (m.in_chart(p)) cap = std::max(cap, m.sqrt_det(p));
        }
    return cap * 1.05;
}

} // namespace

VerifyReport verify_birkhoff(const SurfaceMetric& m, const std::vector<BirkhoffAnnulus>& annuli,
                             long n_samples, double ell_bound, std::uint64_t seed, int threads,
                             int histogram_bins) {
    if (n_samples < 1) throw PreconditionFailed("need at least one sample");
    VerifyReport rep;
    rep.samples = n_samples;
    rep.ell_bound = ell_bound;
    rep.histogram.assign(histogram_bins, 0);

    const double cap = density_cap(m);
    std::vector<double> taus(n_samples, -1.0);
    parallel_for(n_samples, threads, [&](long i) {
        const UnitTangent z = sample_unit_tangent(m, seed, i, cap);
        try {
            const ReturnSample rs = first_return(m, annuli, z, ell_bound);
            taus[i] = rs.status == ReturnStatus::Returned ? rs.tau : -1.0;
        } catch (const Error&) {
            taus[i] = -1.0; // integration failure counts as counterexample evidence
        }
    });

    for (long i = 0; i < n_samples; ++i) {
        if (taus[i] >= 0.0) {
            ++rep.returned;
            rep.max_tau = std::max(rep.max_tau, taus[i]);
            const int b = std::min(histogram_bins - 1, int(taus[i] / ell_bound * histogram_bins));
            ++rep.histogram[b];
        } else {
            ++rep.budget;
            if (rep.budget_indices.size() < 32) rep.budget_indices.push_back(i);
        }
    }
    rep.is_section_evidence = rep.budget == 0;
    return rep;
}

namespace {

struct TailDiag {
    bool trapped = false;
    int limit_index = -1;
    double final_distance = 0.0;
    bool monotone = false;
};

TailDiag classify_tail(const SurfaceMetric& m, const CompleteSystemView& system,
                       const std::vector<FlowState>& tail) {
    TailDiag out;
    // below this resolution floor the distance signal is dominated by the
    // integrator's amplified error near a hyperbolic orbit; monotonicity is
    // only demanded above it
    const double floor = 1e-5 * m.inj_radius_estimate();
    for (int li = 0; li < int(system.limit_sub.size()); ++li) {
        const ClosedGeodesicRecord& w = system.all[system.limit_sub[li]];
        // the limit set carries both oriented lifts of the waist
        auto lift_dist = [&](const FlowState& st) {
            const UnitTangent z = UnitTangent{{st.u, st.v}, {st.du, st.dv}};
            return std::min(orbit_lift_distance(m, w, z), orbit_lift_distance(m, w, flip(z)));
        };
        bool mono = true;
        double prev = -1.0;
        double d = 0.0;
        for (const FlowState& st : tail) {
            d = lift_dist(st);
            if (prev >= 0.0 && d > std::max(prev * (1.0 + 1e-6) + 1e-12, floor)) mono = false;
            prev = d;
        }
        const double first = tail.empty() ? 0.0 : lift_dist(tail.front());
        if (mono && !tail.empty() && d <= std::max(first, floor)) {
            out.trapped = true;
            out.limit_index = li;
            out.final_distance = d;
            out.monotone = true;
            return out;
        }
    }
    return out;
}

} // namespace

TrapReport trapped_sets(const SurfaceMetric& m, const CompleteSystemView& system, long n_samples,
                        double T_budget, std::uint64_t seed, int threads,
                        const std::vector<UnitTangent>& witnesses, double T_witness) {
    std::vector<BirkhoffAnnulus> annuli;
    for (const auto& rec : system.all)
        for (auto& a : annuli_pair(rec)) annuli.push_back(a);

    TrapReport rep;
    rep.samples = n_samples;
    const double cap = density_cap(m);

    struct PerSample {
        int returned_fwd = 0, returned_bwd = 0;
        double tau = -1.0;
        TailDiag diag_fwd, diag_bwd;
        UnitTangent z{};
        double clairaut = 0.0;
    };
    const long total = n_samples + long(witnesses.size());
    std::vector<PerSample> results(total);

    auto scan_one = [&](const UnitTangent& z, double budget, double tol, PerSample& ps) {
        ps.z = z;
        ps.clairaut = m.is_revolution() ? m.clairaut(z.p, z.dir) : 0.0;
        for (int dir = 0; dir < 2; ++dir) {
            const UnitTangent z0 = dir == 0 ? z : flip(z);
            // stream the orbit, detecting crossings and sampling the tail
            const int tail_n = 16;
            std::vector<FlowState> tail;
            const double tail_start = 0.75 * budget;
            double next_sample = tail_start;
            bool crossed = false;
            double tau = budget;
            std::vector<CurveField> fields(annuli.size() / 2);
            std::vector<std::vector<int>> members(fields.size());
            for (std::size_t k = 0; k < fields.size(); ++k) {
                fields[k].init(m, system.all[k]);
                members[k] = {int(2 * k), int(2 * k + 1)};
            }
            std::vector<double> prev(fields.size());
            for (std::size_t k = 0; k < fields.size(); ++k)
                prev[k] = fields[k].eval(z0.p.u, z0.p.v);
            double prev_t = 0.0;
            try {
                integrate_scan(m, z0, budget, false, IntegrateOptions{tol, tol, true, 40'000'000},
                               [&](const OdeStep<8>& step) {
                    const int parts = std::max(2, int(step.h / 0.04) + 1);
                    double y[8];
                    for (int k = 1; k <= parts; ++k) {
                        const double t = step.t0 + step.h * k / parts;
                        step.eval(t, y);
                        for (std::size_t f = 0; f < fields.size(); ++f) {
                            const double sig = fields[f].eval(y[0], y[1]);
                            if (std::isfinite(prev[f]) && std::isfinite(sig) &&
                                prev[f] * sig < 0.0 && t > 1e-9) {
                                crossed = true;
                                tau = t;
                                return false;
                            }
                            prev[f] = sig;
                        }
                        while (!crossed && next_sample <= t && int(tail.size()) < tail_n) {
                            step.eval(std::max(next_sample, step.t0), y);
                            tail.push_back({y[0], y[1], y[2], y[3], 0, 0, 0, 0});
                            next_sample += (budget - tail_start) / tail_n;
                        }
                        (void)prev_t;
                        prev_t = t;
                    }
                    return true;
                });
            } catch (const Error&) {
                // integration failure counts as inconclusive
                crossed = false;
                tail.clear();
            }
            if (dir == 0) {
                ps.returned_fwd = crossed;
                ps.tau = crossed ? tau : -1.0;
                if (!crossed) ps.diag_fwd = classify_tail(m, system, tail);
            } else {
                ps.returned_bwd = crossed;
                if (!crossed) ps.diag_bwd = classify_tail(m, system, tail);
            }
        }
    };

    parallel_for(total, threads, [&](long i) {
        if (i < n_samples) {
            const UnitTangent z = sample_unit_tangent(m, seed, i, cap);
            scan_one(z, T_budget, 1e-10, results[i]);
        } else {
            // deliberate witnesses track hyperbolic manifolds: integrate tightly
            scan_one(witnesses[i - n_samples], T_witness, 1e-12, results[i]);
        }
    });

    for (long i = 0; i < total; ++i) {
        const PerSample& ps = results[i];
        const long report_index = i < n_samples ? i : -(i - n_samples + 1);
        if (ps.returned_fwd) {
            if (i < n_samples) {
                ++rep.returned;
                rep.max_tau = std::max(rep.max_tau, ps.tau);
            }
        } else if (ps.diag_fwd.trapped) {
            TrappedWitness w;
            w.sample_index = report_index;
            w.forward = true;
            w.final_distance = ps.diag_fwd.final_distance;
            w.limit_index = ps.diag_fwd.limit_index;
            w.clairaut = ps.clairaut;
            w.monotone = ps.diag_fwd.monotone;
            if (!system.limit_sub.empty() && m.is_revolution()) {
                const auto& lw = system.all[system.limit_sub[w.limit_index]];
                w.clairaut_residual = std::abs(std::abs(ps.clairaut) - std::abs(lw.clairaut));
            }
            w.state = ps.z;
            rep.trapped_forward.push_back(w);
        } else if (i < n_samples) {
            ++rep.budget_inconclusive;
        }
        if (!ps.returned_bwd && ps.diag_bwd.trapped) {
            TrappedWitness w;
            w.sample_index = report_index;
            w.forward = false;
            w.final_distance = ps.diag_bwd.final_distance;
            w.limit_index = ps.diag_bwd.limit_index;
            w.clairaut = ps.clairaut;
            w.monotone = ps.diag_bwd.monotone;
            if (!system.limit_sub.empty() && m.is_revolution()) {
                const auto& lw = system.all[system.limit_sub[w.limit_index]];
                w.clairaut_residual = std::abs(std::abs(ps.clairaut) - std::abs(lw.clairaut));
            }
            w.state = ps.z;
            rep.trapped_backward.push_back(w);
        }
    }
    return rep;
}

AreaCheckReport return_map_area_check(const SurfaceMetric& m,
                                      const std::vector<BirkhoffAnnulus>& annuli, int n_s,
                                      int n_phi, double T_budget) {
    std::vector<double> svals(n_s), pvals(n_phi);
    const double ell = annuli.at(0).length();
    for (int i = 0; i < n_s; ++i) svals[i] = (i + 0.5) * ell / n_s;
    for (int j = 0; j < n_phi; ++j) pvals[j] = -pi / 2 + (j + 0.5) * pi / n_phi;
    return return_map_area_check(m, annuli, svals, pvals, T_budget);
}

AreaCheckReport return_map_area_check(const SurfaceMetric& m,
                                      const std::vector<BirkhoffAnnulus>& annuli,
                                      const std::vector<double>& s_values,
                                      const std::vector<double>& phi_values, double T_budget) {
    for (double phi : phi_values)
        if (std::abs(phi) >= pi / 2 - 1e-9)
            throw PreconditionFailed("area check grid touches the annulus boundary");
    const BirkhoffAnnulus& A = annuli.at(0);
    const double ell = A.length();
    const double hs = 1e-4 * ell;
    const double hp = 1e-4;

    AreaCheckReport rep;
    std::mutex mu;
    const long total = long(s_values.size()) * long(phi_values.size());
    parallel_for(total, 2, [&](long idx) {
        const double s = s_values[idx / phi_values.size()];
        const double phi = phi_values[idx % phi_values.size()];
        auto psi = [&](double ss, double pp) {
            const UnitTangent z = A.point(m, wrap_pos(ss, ell), pp);
            return first_return(m, annuli, z, T_budget);
        };
        const ReturnSample c0 = psi(s, phi);
        if (c0.status != ReturnStatus::Returned) {
            std::lock_guard<std::mutex> lock(mu);
            ++rep.trapped_points;
            return;
        }
        const ReturnSample su_p = psi(s + hs, phi), su_m = psi(s - hs, phi);
        const ReturnSample sp_p = psi(s, phi + hp), sp_m = psi(s, phi - hp);
        for (const ReturnSample* r : {&su_p, &su_m, &sp_p, &sp_m}) {
            if (r->status != ReturnStatus::Returned || r->hit_annulus != c0.hit_annulus) {
                std::lock_guard<std::mutex> lock(mu);
                ++rep.trapped_points;
                return;
            }
        }
        const double ds_ds = wrap_pm(su_p.s - su_m.s, ell) / (2 * hs);
        const double dphi_ds = (su_p.phi - su_m.phi) / (2 * hs);
        const double ds_dphi = wrap_pm(sp_p.s - sp_m.s, ell) / (2 * hp);
        const double dphi_dphi = (sp_p.phi - sp_m.phi) / (2 * hp);
        const double det = ds_ds * dphi_dphi - ds_dphi * dphi_ds;
        const double defect = std::abs(det * std::cos(c0.phi) / std::cos(phi) - 1.0);
        std::lock_guard<std::mutex> lock(mu);
        rep.max_defect = std::max(rep.max_defect, defect);
        ++rep.evaluated;
    });
    return rep;
}

namespace {

// hand-built transversal annulus over a (not necessarily geodesic) parallel;
// (s, phi) are trace coordinates, not exact arclength under a conformal warp,
// which does not affect intersection detection
std::vector<BirkhoffAnnulus> transversal_parallel(const SurfaceMetric& m, double v0) {
    ClosedGeodesicRecord rec;
    rec.curve = make_parallel(m, v0, 512);
    rec.dirs.resize(rec.curve.n());
    for (int i = 0; i < rec.curve.n(); ++i)
        rec.dirs[i] = m.normalized(m.reduce(rec.curve.pts[i]), {1.0, 0.0});
    rec.length = curve_length(m, rec.curve);
    rec.wind_u = 1;
    rec.geometry.kind = CurveGeomKind::ParallelV;
    rec.geometry.v0 = v0;
    rec.geometry.orient = +1;
    rec.on_sphere = m.genus() == 0;
    return annuli_pair(rec, "transversal");
}

} // namespace

std::vector<UnitTangent> detect_homoclinic(const SurfaceMetric& m,
                                           const ClosedGeodesicRecord& waist, bl::Side side_u,
                                           bl::Side side_s, double T_budget, double confirm_tol) {
    if (waist.floquet.type != OrbitType::Hyperbolic)
        throw NotHyperbolic("homoclinic detection needs a hyperbolic waist");

    // One-sided manifold excursions never cross the waist itself, so the trace
    // section is a parallel flanking the waist on the excursion side, midway
    // to the nearest critical parallel. Mixed-side requests fall back to the
    // waist's own annuli (side-switching orbits do cross it).
    std::vector<BirkhoffAnnulus> annuli;
    if (side_u == side_s && waist.geometry.kind == CurveGeomKind::ParallelV) {
        const double vw = waist.geometry.v0;
        // side A is the positive normal side: +v for a parallel oriented by +u
        const int dir = (side_u == bl::Side::A) == (waist.geometry.orient > 0) ? +1 : -1;
        double v_next = dir > 0 ? m.v_max() : m.v_min();
        for (double v : m.critical_parallels())
            if (dir > 0 ? (v > vw + 1e-6 && v < v_next) : (v < vw - 1e-6 && v > v_next))
                v_next = v;
        annuli = transversal_parallel(m, vw + 0.5 * (v_next - vw));
    } else {
        annuli = annuli_pair(waist, "waist");
    }
    const double lam = std::max(std::abs(waist.floquet.sigma), std::abs(waist.floquet.sigma_inv));
    const double delta0 = 1e-4 * m.inj_radius_estimate();
    const int n_seeds = 64;

    struct TracePoint {
        double param;
        int annulus;
        int hop;
        double s, phi;
    };

    // one seed orbit: the hop-k hit on the trace, in unflipped coordinates;
    // all hops come from a single continuous scan so no chart-roundtrip error
    // is injected between excursions
    auto hit_at = [&](bool stable, bl::Side side, double delta, int hop_target)
        -> std::optional<TracePoint> {
        const auto seeds = invariant_manifold_ray(m, waist, side, stable, {delta});
        const UnitTangent z = stable ? flip(seeds[0]) : seeds[0];
        const auto hits = multi_return(m, annuli, z, T_budget, hop_target + 1);
        if (int(hits.size()) <= hop_target) return std::nullopt;
        const ReturnSample& rs = hits[hop_target];
        if (rs.tau > 12.0) return std::nullopt;
        int a = rs.hit_annulus;
        double sv = rs.s, phi = rs.phi;
        if (stable) {
            // the scan ran on the flipped orbit: report the unflipped state.
            // flip maps (a, s, phi) -> (a^1, ell - s, phi): both frame vectors
            // negate, so phi is preserved.
            a = a ^ 1;
            sv = wrap_pos(annuli[0].length() - sv, annuli[0].length());
        }
        return TracePoint{delta, a, hop_target, sv, phi};
    };

    auto grow = [&](bool stable, bl::Side side) {
        std::vector<TracePoint> pts;
        for (int k = 0; k < n_seeds; ++k) {
            const double delta = delta0 * std::pow(lam, double(k) / n_seeds);
            const auto seeds = invariant_manifold_ray(m, waist, side, stable, {delta});
            const UnitTangent z = stable ? flip(seeds[0]) : seeds[0];
            const auto hits = multi_return(m, annuli, z, T_budget, 6);
            for (int hop = 0; hop < int(hits.size()); ++hop) {
                const ReturnSample& rs = hits[hop];
                // later hits sit beyond the double-precision window of the
                // hyperbolic dynamics; keep the trustworthy ones
                if (rs.tau > 12.0) break;
                int a = rs.hit_annulus;
                double sv = rs.s, phi = rs.phi;
                if (stable) {
                    a = a ^ 1;
                    sv = wrap_pos(annuli[0].length() - sv, annuli[0].length());
                }
                pts.push_back({delta, a, hop, sv, phi});
            }
        }
        return pts;
    };

    const auto tu = grow(false, side_u);
    const auto ts = grow(true, side_s);

    const double ell = annuli[0].length();
    auto segs = [&](const std::vector<TracePoint>& pts, int annulus) {
        std::vector<std::pair<TracePoint, TracePoint>> out;
        std::vector<TracePoint> mine;
        for (const auto& p : pts)
            if (p.annulus == annulus) mine.push_back(p);
        std::sort(mine.begin(), mine.end(), [](const TracePoint& a, const TracePoint& b) {
            return a.hop != b.hop ? a.hop < b.hop : a.param < b.param;
        });
        for (std::size_t i = 0; i + 1 < mine.size(); ++i) {
            if (mine[i].hop != mine[i + 1].hop) continue;
            const double ds = std::abs(wrap_pm(mine[i + 1].s - mine[i].s, ell));
            if (ds > 0.2 * ell) continue; // trace jump, not a segment
            out.push_back({mine[i], mine[i + 1]});
        }
        return out;
    };

    // proper segment crossing in (s, phi); returns the parameter on (a1, a2)
    auto cross_param = [&](const TracePoint& a1, const TracePoint& a2, const TracePoint& b1,
                           const TracePoint& b2, double& angle) -> std::optional<double> {
        auto rel = [&](double s) { return wrap_pm(s - a1.s, ell); };
        const double ax2 = rel(a2.s), ay1 = a1.phi, ay2 = a2.phi;
        const double bx1 = rel(b1.s), by1 = b1.phi;
        const double bx2 = rel(b2.s), by2 = b2.phi;
        const double d1 = ax2 * (by1 - ay1) - (ay2 - ay1) * bx1;
        const double d2 = ax2 * (by2 - ay1) - (ay2 - ay1) * bx2;
        const double d3 = (bx2 - bx1) * (ay1 - by1) - (by2 - by1) * (0.0 - bx1);
        const double d4 = (bx2 - bx1) * (ay2 - by1) - (by2 - by1) * (ax2 - bx1);
        if (!(((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
              ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))))
            return std::nullopt;
        const double nu = std::hypot(ax2, ay2 - ay1);
        const double ns = std::hypot(bx2 - bx1, by2 - by1);
        angle = std::abs(ax2 * (by2 - by1) - (ay2 - ay1) * (bx2 - bx1)) / (nu * ns);
        // d1, d2 are the signed sides of the b-endpoints against line a, so the
        // crossing parameter along the b-segment is d1/(d1 - d2)
        return d1 / (d1 - d2);
    };

    // candidate crossings between the coarse traces, then local refinement:
    // rebuild both trace pieces at finer seed resolution around the crossing
    std::vector<UnitTangent> candidates;
    for (int a = 0; a < 2; ++a) {
        const auto su = segs(tu, a);
        const auto ss = segs(ts, a);
        for (const auto& useg : su) {
            for (const auto& sseg : ss) {
                double angle = 0.0;
                if (!cross_param(useg.first, useg.second, sseg.first, sseg.second, angle))
                    continue;
                double ulo = useg.first.param, uhi = useg.second.param;
                double slo = sseg.first.param, shi = sseg.second.param;
                const int uhop = useg.first.hop, shop = sseg.first.hop;
                bool ok = true;
                TracePoint cu1 = useg.first, cu2 = useg.second;
                TracePoint cs1 = sseg.first, cs2 = sseg.second;
                for (int round = 0; round < 4 && ok; ++round) {
                    // refine both polylines ninefold over the bracketed params
                    const int nref = 9;
                    std::vector<TracePoint> ur, sr;
                    for (int k = 0; k < nref; ++k) {
                        const double du = ulo * std::pow(uhi / ulo, double(k) / (nref - 1));
                        const double dsv = slo * std::pow(shi / slo, double(k) / (nref - 1));
                        auto pu = hit_at(false, side_u, du, uhop);
                        auto ps = hit_at(true, side_s, dsv, shop);
                        if (!pu || !ps || pu->annulus != a || ps->annulus != a) {
                            ok = false;
                            break;
                        }
                        ur.push_back(*pu);
                        sr.push_back(*ps);
                    }
                    if (!ok) break;
                    ok = false;
                    for (int i = 0; i + 1 < nref && !ok; ++i)
                        for (int j = 0; j + 1 < nref && !ok; ++j) {
                            double ang = 0.0;
                            if (cross_param(ur[i], ur[i + 1], sr[j], sr[j + 1], ang)) {
                                cu1 = ur[i];
                                cu2 = ur[i + 1];
                                cs1 = sr[j];
                                cs2 = sr[j + 1];
                                ulo = ur[i].param;
                                uhi = ur[i + 1].param;
                                slo = sr[j].param;
                                shi = sr[j + 1].param;
                                angle = ang;
                                ok = true;
                            }
                        }
                }
                if (!ok) continue;
                // tangential contact (saddle connection): not a transverse point
                if (angle < 1e-3) continue;
                double tpar = 0.0;
                {
                    double ang2;
                    const auto t2 = cross_param(cu1, cu2, cs1, cs2, ang2);
                    if (!t2) continue;
                    tpar = *t2;
                }
                const double sx =
                    wrap_pos(cs1.s + tpar * wrap_pm(cs2.s - cs1.s, ell), ell);
                const double sy = cs1.phi + tpar * (cs2.phi - cs1.phi);
                candidates.push_back(annuli[a].point(m, sx, sy));
            }
        }
    }

    // confirm bi-asymptotics by re-integration: the distance to the waist lift
    // must drop below tolerance along each direction before the candidate's
    // accuracy ceiling; the horizon scales with the candidate's hop time, so
    // take the minimum over a sampled window
    std::vector<UnitTangent> confirmed;
    const double T_conf = std::min(T_budget, 16.0);
    auto min_dist = [&](const UnitTangent& z, double sign) {
        const Trajectory tr = integrate(m, z, sign * T_conf);
        double best = 1e300;
        for (int k = 8; k <= 64; ++k) {
            const UnitTangent w = tr.state(m, sign * T_conf * k / 64.0);
            best = std::min(best, orbit_lift_distance(m, waist, w));
        }
        return best;
    };
    for (const UnitTangent& z : candidates) {
        try {
            const double df = min_dist(z, +1.0);
            const double db = min_dist(z, -1.0);
            if (df < confirm_tol && db < confirm_tol) confirmed.push_back(z);
        } catch (const Error&) {
        }
    }
    return confirmed;
}

// --- JSON ----------------------------------------------------------------

std::string VerifyReport::to_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{\"is_section_evidence\":" << (is_section_evidence ? "true" : "false")
       << ",\"samples\":" << samples << ",\"returned\":" << returned << ",\"budget\":" << budget
       << ",\"max_tau\":" << max_tau << ",\"ell_bound\":" << ell_bound << ",\"histogram\":[";
    for (std::size_t i = 0; i < histogram.size(); ++i) os << (i ? "," : "") << histogram[i];
    os << "]}";
    return os.str();
}

std::string TrapReport::to_json() const {
    std::ostringstream os;
    os.precision(17);
    auto witness = [&](const TrappedWitness& w) {
        std::ostringstream o2;
        o2.precision(17);
        o2 << "{\"sample\":" << w.sample_index << ",\"forward\":" << (w.forward ? "true" : "false")
           << ",\"final_distance\":" << w.final_distance << ",\"limit_index\":" << w.limit_index
           << ",\"clairaut\":" << w.clairaut << ",\"clairaut_residual\":" << w.clairaut_residual
           << ",\"monotone\":" << (w.monotone ? "true" : "false") << "}";
        return o2.str();
    };
    os << "{\"samples\":" << samples << ",\"returned\":" << returned
       << ",\"budget_inconclusive\":" << budget_inconclusive << ",\"max_tau\":" << max_tau
       << ",\"trapped_forward\":[";
    for (std::size_t i = 0; i < trapped_forward.size(); ++i)
        os << (i ? "," : "") << witness(trapped_forward[i]);
    os << "],\"trapped_backward\":[";
    for (std::size_t i = 0; i < trapped_backward.size(); ++i)
        os << (i ? "," : "") << witness(trapped_backward[i]);
    os << "]}";
    return os.str();
}

std::string AreaCheckReport::to_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{\"max_defect\":" << max_defect << ",\"evaluated\":" << evaluated
       << ",\"trapped_points\":" << trapped_points << "}";
    return os.str();
}

} // namespace bl::section

#include "bl/flow.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace bl {

namespace {

struct GeodesicRhs {
    const SurfaceMetric* m;
    bool with_jacobi;

    void operator()(double, const double* y, double* dy) const {
        const MetricJet jet = m->jet_flow(y[0], y[1]);
        const Christoffels G = SurfaceMetric::christoffels(jet);
        const double du = y[2], dv = y[3];
        dy[0] = du;
        dy[1] = dv;
        dy[2] = -(G.uuu * du * du + 2.0 * G.uuv * du * dv + G.uvv * dv * dv);
        dy[3] = -(G.vuu * du * du + 2.0 * G.vuv * du * dv + G.vvv * dv * dv);
        if (with_jacobi) {
            dy[4] = y[5];
            dy[5] = -jet.K * y[4];
            dy[6] = y[7];
            dy[7] = -jet.K * y[6];
        } else {
            dy[4] = dy[5] = dy[6] = dy[7] = 0.0;
        }
    }
};

void renormalize_speed(const SurfaceMetric& m, double* y) {
    const Metric2 g = m.jet_flow(y[0], y[1]).g;
    const double e =
        g.g11 * y[2] * y[2] + 2.0 * g.g12 * y[2] * y[3] + g.g22 * y[3] * y[3];
    const double s = 1.0 / std::sqrt(e);
    y[2] *= s;
    y[3] *= s;
}

FlowState state_from_array(const double* y) {
    return {y[0], y[1], y[2], y[3], y[4], y[5], y[6], y[7]};
}

} // namespace

UnitTangent flip(const UnitTangent& z) { return {z.p, {-z.dir.du, -z.dir.dv}}; }

FlowState Trajectory::at(double t) const {
    double ti = reversed ? -t : t;
    ti = std::clamp(ti, 0.0, std::abs(duration));
    // binary search for the step containing ti
    int lo = 0, hi = int(steps.size()) - 1;
    while (lo < hi) {
        const int mid = (lo + hi) / 2;
        if (steps[mid].t1() < ti) lo = mid + 1;
        else hi = mid;
    }
    double y[8];
    steps[lo].eval(ti, y);
    FlowState s = state_from_array(y);
    if (reversed) {
        s.du = -s.du;
        s.dv = -s.dv;
        s.J1p = -s.J1p;
        s.J2p = -s.J2p;
    }
    return s;
}

UnitTangent Trajectory::state(const SurfaceMetric& m, double t) const {
    const FlowState s = at(t);
    return UnitTangent::make(m, {s.u, s.v}, {s.du, s.dv});
}

void Trajectory::write_csv(const std::string& path, double stride) const {
    std::ofstream f(path);
    f.precision(17);
    f << "t,u,v,du,dv,J,Jp\n";
    const double T = duration;
    const int n = std::max(1, int(std::abs(T) / stride));
    for (int i = 0; i <= n; ++i) {
        const double t = T * i / n;
        const FlowState s = at(t);
        f << t << ',' << s.u << ',' << s.v << ',' << s.du << ',' << s.dv << ',' << s.J1 << ','
          << s.J1p << '\n';
    }
}

void integrate_scan(const SurfaceMetric& m, const UnitTangent& z0, double T, bool with_jacobi,
                    const IntegrateOptions& opt, const std::function<bool(const OdeStep<8>&)>& cb) {
    if (!(std::isfinite(T) && T > 0.0)) throw Error("integrate_scan needs T > 0");
    double y0[8] = {z0.p.u, z0.p.v, z0.dir.du, z0.dir.dv, 0.0, 1.0, 1.0, 0.0};
    GeodesicRhs rhs{&m, with_jacobi};
    OdeOptions oo;
    oo.rel_tol = opt.rel_tol;
    oo.abs_tol = opt.abs_tol;
    oo.max_steps = opt.max_steps;
    oo.h_init = 1e-3;
    DormandPrince<8, GeodesicRhs> dp(rhs, y0, oo);

    OdeStep<8> step;
    long count = 0;
    while (T - dp.t() > 1e-12 * std::max(1.0, T)) {
        if (++count > opt.max_steps) throw StepFailure("max step count exceeded");
        dp.clamp_h(T - dp.t());
        dp.step(step);
        if (opt.renormalize) {
            renormalize_speed(m, dp.y_mut());
            dp.resync();
        }
        if (!cb(step)) return;
    }
}

Trajectory integrate(const SurfaceMetric& m, const UnitTangent& z0, double T, bool with_jacobi,
                     const IntegrateOptions& opt) {
    Trajectory tr;
    tr.duration = T;
    tr.with_jacobi = with_jacobi;
    if (T == 0.0) throw Error("integrate needs T != 0");
    tr.reversed = T < 0.0;
    const UnitTangent z = tr.reversed ? flip(z0) : z0;
    integrate_scan(m, z, std::abs(T), with_jacobi, opt, [&](const OdeStep<8>& s) {
        tr.steps.push_back(s);
        return true;
    });
    return tr;
}

std::vector<double> conjugate_points(const SurfaceMetric& m, const UnitTangent& z0, double T,
                                     const IntegrateOptions& opt) {
    if (!(T > 0.0)) throw Error("conjugate_points needs T > 0");
    std::vector<double> zeros;
    integrate_scan(m, z0, T, true, opt, [&](const OdeStep<8>& s) {
        // scan the dense output of J1 for sign changes
        const int parts = 8;
        double y[8];
        double tp = s.t0;
        s.eval(tp, y);
        double jp = y[4];
        for (int i = 1; i <= parts; ++i) {
            const double tc = s.t0 + s.h * i / parts;
            s.eval(tc, y);
            const double jc = y[4];
            if (tp > 0.0 && jp == 0.0) zeros.push_back(tp);
            if (jp * jc < 0.0) {
                double lo = tp, hi = tc, flo = jp;
                for (int it = 0; it < 60; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    s.eval(mid, y);
                    if (flo * y[4] <= 0.0) hi = mid;
                    else { lo = mid; flo = y[4]; }
                }
                zeros.push_back(0.5 * (lo + hi));
            }
            tp = tc;
            jp = jc;
        }
        return true;
    });
    return zeros;
}

std::string orbit_type_name(OrbitType t) {
    switch (t) {
        case OrbitType::Hyperbolic: return "hyperbolic";
        case OrbitType::Elliptic: return "elliptic";
        case OrbitType::Degenerate: return "degenerate";
    }
    return "?";
}

namespace {

FloquetResult floquet_from_orbit(const SurfaceMetric& m, const UnitTangent& z, double length,
                                 const IntegrateOptions& opt) {
    Trajectory tr = integrate(m, z, length, true, opt);
    const FlowState e = tr.end();

    FloquetResult out;
    // monodromy columns: (J1,J1') from (0,1), (J2,J2') from (1,0)
    out.monodromy[0][0] = e.J2;
    out.monodromy[1][0] = e.J2p;
    out.monodromy[0][1] = e.J1;
    out.monodromy[1][1] = e.J1p;
    out.trace = e.J2 + e.J1p;
    out.det = e.J2 * e.J1p - e.J1 * e.J2p;

    const double tol = 1e-6;
    const double tr2 = out.trace;
    if (std::abs(tr2) > 2.0 + tol) {
        out.type = OrbitType::Hyperbolic;
        const double s = tr2 >= 0 ? 1.0 : -1.0;
        const double lam = 0.5 * (std::abs(tr2) + std::sqrt(tr2 * tr2 - 4.0));
        out.sigma = s * lam;
        out.sigma_inv = s / lam;
    } else if (std::abs(tr2) < 2.0 - tol) {
        out.type = OrbitType::Elliptic;
        const double th = std::acos(std::clamp(tr2 / 2.0, -1.0, 1.0));
        out.sigma = std::polar(1.0, th);
        out.sigma_inv = std::conj(out.sigma);
    } else {
        out.type = OrbitType::Degenerate;
        out.sigma = tr2 >= 0 ? 1.0 : -1.0;
        out.sigma_inv = out.sigma;
    }

    // conjugate count of the (0,1) solution over one period
    const auto zeros = conjugate_points(m, z, length, opt);
    out.conjugate_count = int(zeros.size());

    // Sturm-normalized total rotation: the value in [N*pi, (N+1)*pi) whose
    // cosine matches trace/2 (exact for elliptic monodromy)
    if (out.type == OrbitType::Elliptic) {
        const int N = out.conjugate_count;
        const double th0 = std::acos(std::clamp(tr2 / 2.0, -1.0, 1.0));
        for (int k = -1; k <= N + 2; ++k) {
            for (const double cand : {two_pi * k + th0, two_pi * k - th0}) {
                if (cand >= N * pi - 1e-9 && cand < (N + 1) * pi + 1e-9) {
                    out.rotation = cand;
                }
            }
        }
    }
    return out;
}

} // namespace

FloquetResult floquet(const SurfaceMetric& m, const ClosedGeodesicRecord& rec,
                      const IntegrateOptions& opt) {
    const UnitTangent z = rec.initial();
    Trajectory tr = integrate(m, z, rec.length, false, opt);
    const FlowState e = tr.end();
    const double pu = m.period_u();
    const double pv = m.v_periodic() ? m.period_v() : 0.0;
    double gu = e.u - z.p.u - rec.wind_u * pu;
    double gv = e.v - z.p.v - (pv > 0 ? rec.wind_v * pv : 0.0);
    const double gap = std::hypot(std::hypot(gu, gv),
                                  std::hypot(e.du - z.dir.du, e.dv - z.dir.dv));
    if (gap > 1e-6) throw NotClosed("closure gap " + std::to_string(gap));
    return floquet_from_orbit(m, z, rec.length, opt);
}

ClosedOrbit refine_closed_orbit(const SurfaceMetric& m, const UnitTangent& guess,
                                double length_guess, double wind_du, double wind_dv,
                                const IntegrateOptions& opt) {
    // direction angle in the orthonormal frame (e1 = du-direction, e2 = J e1)
    auto frame_angle = [&](SurfacePoint p, TangentVector d) {
        const Metric2 g = m.jet(p).g;
        const double sd = std::sqrt(g.det());
        // components: a = <d, e1>, b = <d, e2> with e1 = (1/sqrt(g11), 0), e2 = J e1
        const double a = (g.g11 * d.du + g.g12 * d.dv) / std::sqrt(g.g11);
        const double b = d.dv * sd / std::sqrt(g.g11);
        return std::atan2(b, a);
    };
    auto dir_from_angle = [&](SurfacePoint p, double th) {
        const Metric2 g = m.jet(p).g;
        const double sd = std::sqrt(g.det());
        const TangentVector e1{1.0 / std::sqrt(g.g11), 0.0};
        const TangentVector e2{-g.g12 / (std::sqrt(g.g11) * sd), g.g11 / (std::sqrt(g.g11) * sd)};
        return TangentVector{std::cos(th) * e1.du + std::sin(th) * e2.du,
                             std::cos(th) * e1.dv + std::sin(th) * e2.dv};
    };

    // gauge: freeze the coordinate the orbit mostly moves along
    const bool freeze_u = std::abs(guess.dir.du) >= std::abs(guess.dir.dv);

    double x[3] = {freeze_u ? guess.p.v : guess.p.u, frame_angle(guess.p, guess.dir),
                   length_guess};

    auto residual = [&](const double* xx, double* r) {
        SurfacePoint p = guess.p;
        if (freeze_u) p.v = xx[0];
        else p.u = xx[0];
        const UnitTangent z = UnitTangent::make(m, p, dir_from_angle(p, xx[1]));
        Trajectory tr = integrate(m, z, xx[2], false, opt);
        const FlowState e = tr.end();
        r[0] = e.u - p.u - wind_du;
        r[1] = e.v - p.v - wind_dv;
        const double th1 = frame_angle(m.reduce({e.u, e.v}), {e.du, e.dv});
        double dth = th1 - xx[1];
        dth = std::remainder(dth, two_pi);
        r[2] = dth;
    };

    double r[3];
    residual(x, r);
    double best = std::hypot(std::hypot(r[0], r[1]), r[2]);
    for (int it = 0; it < 60 && best > 1e-11; ++it) {
        // finite-difference Jacobian
        double Jm[3][3];
        const double hx[3] = {1e-7, 1e-7, 1e-7};
        for (int j = 0; j < 3; ++j) {
            double xp[3] = {x[0], x[1], x[2]};
            xp[j] += hx[j];
            double rp[3];
            residual(xp, rp);
            for (int i = 0; i < 3; ++i) Jm[i][j] = (rp[i] - r[i]) / hx[j];
        }
        // Levenberg-Marquardt step: degenerate families (rotational symmetry)
        // leave a null Jacobian direction that must receive a zero step
        double JtJ[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
        double Jtr[3] = {0, 0, 0};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                for (int k = 0; k < 3; ++k) JtJ[i][j] += Jm[k][i] * Jm[k][j];
            }
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k) Jtr[i] += Jm[k][i] * r[k];
        double diag_max = 0.0;
        for (int i = 0; i < 3; ++i) diag_max = std::max(diag_max, JtJ[i][i]);
        const double lm = 1e-9 * std::max(diag_max, 1e-30);
        double A[3][4];
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) A[i][j] = JtJ[i][j];
            A[i][i] += lm;
            A[i][3] = -Jtr[i];
        }
        for (int col = 0; col < 3; ++col) {
            int piv = col;
            for (int i = col + 1; i < 3; ++i)
                if (std::abs(A[i][col]) > std::abs(A[piv][col])) piv = i;
            std::swap(A[col], A[piv]);
            if (std::abs(A[col][col]) < 1e-300) throw StepFailure("singular shooting Jacobian");
            for (int i = col + 1; i < 3; ++i) {
                const double f = A[i][col] / A[col][col];
                for (int j = col; j < 4; ++j) A[i][j] -= f * A[col][j];
            }
        }
        double dx[3];
        for (int i = 2; i >= 0; --i) {
            double s = A[i][3];
            for (int j = i + 1; j < 3; ++j) s -= A[i][j] * dx[j];
            dx[i] = s / A[i][i];
        }
        // damped update; reject wild period candidates outright
        double lam = 1.0;
        for (int back = 0; back < 8; ++back) {
            double xt[3] = {x[0] + lam * dx[0], x[1] + lam * dx[1], x[2] + lam * dx[2]};
            if (!std::isfinite(xt[0]) || !std::isfinite(xt[1]) || !std::isfinite(xt[2]) ||
                xt[2] < 0.3 * length_guess || xt[2] > 3.0 * length_guess) {
                lam *= 0.5;
                if (back == 7) it = 60;
                continue;
            }
            double rt[3];
            residual(xt, rt);
            const double nt = std::hypot(std::hypot(rt[0], rt[1]), rt[2]);
            if (nt < best) {
                std::copy(xt, xt + 3, x);
                std::copy(rt, rt + 3, r);
                best = nt;
                break;
            }
            lam *= 0.5;
            if (back == 7) it = 60; // stalled
        }
    }

    ClosedOrbit out;
    SurfacePoint p = guess.p;
    if (freeze_u) p.v = x[0];
    else p.u = x[0];
    out.z = UnitTangent::make(m, p, dir_from_angle(p, x[1]));
    out.length = x[2];
    out.closure_gap = best;
    return out;
}

ClosedGeodesicRecord make_record(const SurfaceMetric& m, const UnitTangent& z, double length,
                                 int n_samples, const IntegrateOptions& opt) {
    ClosedGeodesicRecord rec;
    Trajectory tr = integrate(m, z, length, false, opt);
    rec.length = length;
    rec.curve.pts.resize(n_samples);
    rec.dirs.resize(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        const FlowState s = tr.at(length * i / n_samples);
        rec.curve.pts[i] = {s.u, s.v};
        rec.dirs[i] = {s.du, s.dv};
    }
    const FlowState e = tr.end();
    const double pu = m.period_u();
    rec.wind_u = int(std::lround((e.u - z.p.u) / pu));
    rec.wind_v = m.v_periodic() ? int(std::lround((e.v - z.p.v) / m.period_v())) : 0;
    rec.curve.loop_du = rec.wind_u * pu;
    rec.curve.loop_dv = m.v_periodic() ? rec.wind_v * m.period_v() : 0.0;
    rec.curve.resampled = true;

    rec.floquet = floquet_from_orbit(m, z, length, opt);
    rec.has_conjugate_points =
        rec.floquet.conjugate_count > 0 || rec.floquet.type == OrbitType::Elliptic;

    if (rec.floquet.type != OrbitType::Degenerate) {
        rec.is_waist = !rec.has_conjugate_points;
    } else {
        // degenerate orbit: sampled local-minimality, 50 random C0 perturbations
        const double amp = 1e-3;
        bool ok = true;
        unsigned long long rng = 0x9e3779b97f4a7c15ull;
        auto urand = [&]() {
            rng ^= rng << 13;
            rng ^= rng >> 7;
            rng ^= rng << 17;
            return double(rng % 1000003) / 1000003.0 - 0.5;
        };
        CurvatureProfile prof = curvature_profile(m, rec.curve);
        for (int trial = 0; trial < 50 && ok; ++trial) {
            double a[8], b[8];
            for (int k = 0; k < 8; ++k) {
                a[k] = urand();
                b[k] = urand();
            }
            DiscreteCurve pert = rec.curve;
            double mx = 0.0;
            std::vector<double> off(n_samples);
            for (int i = 0; i < n_samples; ++i) {
                const double t = double(i) / n_samples;
                double s = 0.0;
                for (int k = 0; k < 8; ++k)
                    s += a[k] * std::cos(two_pi * (k + 1) * t) +
                         b[k] * std::sin(two_pi * (k + 1) * t);
                off[i] = s;
                mx = std::max(mx, std::abs(s));
            }
            for (int i = 0; i < n_samples; ++i) {
                const double s = off[i] / mx * amp;
                pert.pts[i].u += s * prof.nu[i].du;
                pert.pts[i].v += s * prof.nu[i].dv;
            }
            ok = curve_length(m, pert) >= rec.length - 1e-9;
        }
        rec.is_waist = ok;
    }

    rec.on_sphere = m.genus() == 0;
    rec.geometry = detect_geometry(m, rec.curve);
    rec.clairaut = m.is_revolution() ? m.clairaut(z.p, z.dir) : 0.0;
    return rec;
}

namespace {

// normalized (J, J') eigenvector of the monodromy, J-component signed for the
// requested side; throws NotHyperbolic
void eigen_direction(const ClosedGeodesicRecord& rec, Side side, bool stable, double& eJ,
                     double& eJp) {
    if (rec.floquet.type != OrbitType::Hyperbolic)
        throw NotHyperbolic("manifold seeds need a hyperbolic orbit");
    const double lam =
        stable ? std::abs(rec.floquet.sigma) < 1.0 ? rec.floquet.sigma.real()
                                                   : rec.floquet.sigma_inv.real()
               : std::abs(rec.floquet.sigma) > 1.0 ? rec.floquet.sigma.real()
                                                   : rec.floquet.sigma_inv.real();
    const auto& M = rec.floquet.monodromy;
    if (std::abs(M[0][1]) > std::abs(M[1][0])) {
        eJ = M[0][1];
        eJp = lam - M[0][0];
    } else {
        eJ = lam - M[1][1];
        eJp = M[1][0];
    }
    const double en = std::hypot(eJ, eJp);
    if (!(std::abs(eJ) > 1e-9 * en))
        throw NotHyperbolic("eigendirection vertical: conjugate-point obstruction");
    eJ /= en;
    eJp /= en;
    if ((side == Side::A) != (eJ > 0)) {
        eJ = -eJ;
        eJp = -eJp;
    }
}

} // namespace

std::vector<UnitTangent> invariant_manifold_seed(const SurfaceMetric& m,
                                                 const ClosedGeodesicRecord& rec, Side side,
                                                 bool stable, double delta, int count) {
    if (delta <= 0.0) delta = 1e-4 * m.inj_radius_estimate();
    double eJ, eJp;
    eigen_direction(rec, side, stable, eJ, eJp);

    // transport the eigen-solution along the orbit and plant one seed per sample
    std::vector<UnitTangent> seeds;
    seeds.reserve(count);
    const UnitTangent z0 = rec.initial();
    Trajectory tr = integrate(m, z0, rec.length, true, IntegrateOptions{});
    for (int i = 0; i < count; ++i) {
        const double t = rec.length * i / count;
        const FlowState s = tr.at(t);
        // Phi(t) columns: (J2,J2') from (1,0), (J1,J1') from (0,1)
        double J = s.J2 * eJ + s.J1 * eJp;
        double Jp = s.J2p * eJ + s.J1p * eJp;
        const double nn = std::hypot(J, Jp);
        J /= nn;
        Jp /= nn;
        if ((side == Side::A) != (J > 0)) {
            J = -J;
            Jp = -Jp;
        }
        const SurfacePoint p{s.u, s.v};
        const TangentVector T = m.normalized(p, {s.du, s.dv});
        const TangentVector N = m.rotate90(p, T);
        const SurfacePoint ps{p.u + delta * J * N.du, p.v + delta * J * N.dv};
        const TangentVector d{T.du + delta * Jp * N.du, T.dv + delta * Jp * N.dv};
        seeds.push_back(UnitTangent::make(m, ps, d));
    }
    return seeds;
}

std::vector<UnitTangent> invariant_manifold_ray(const SurfaceMetric& m,
                                                const ClosedGeodesicRecord& rec, Side side,
                                                bool stable, const std::vector<double>& deltas) {
    double eJ, eJp;
    eigen_direction(rec, side, stable, eJ, eJp);
    const UnitTangent z0 = rec.initial();
    const TangentVector T = z0.dir;
    const TangentVector N = m.rotate90(z0.p, T);
    std::vector<UnitTangent> seeds;
    seeds.reserve(deltas.size());
    for (double delta : deltas) {
        const SurfacePoint ps{z0.p.u + delta * eJ * N.du, z0.p.v + delta * eJ * N.dv};
        const TangentVector d{T.du + delta * eJp * N.du, T.dv + delta * eJp * N.dv};
        seeds.push_back(UnitTangent::make(m, ps, d));
    }
    return seeds;
}

double orbit_lift_distance(const SurfaceMetric& m, const ClosedGeodesicRecord& rec,
                           const UnitTangent& z) {
    // distance to the lift as a curve in SM: at the nearest sample, measure the
    // component of the base offset normal to the orbit plus the angular
    // mismatch of the direction; the tangential offset is motion along the
    // orbit and does not separate z from the lift

    if (rec.geometry.kind == CurveGeomKind::ParallelV && m.is_revolution()) {
        // exact: normal offset along the meridian plus direction angle
        const double v0 = rec.geometry.v0;
        double dv = z.p.v - v0;
        if (m.v_periodic()) dv = std::remainder(dv, m.period_v());
        const double normal = m.meridian_speed(v0) * dv;
        const SurfacePoint pr = m.reduce(z.p);
        const TangentVector T = m.normalized(pr, {double(rec.geometry.orient), 0.0});
        const double ca = std::clamp(m.dot(pr, z.dir, T), -1.0, 1.0);
        const double ang = std::acos(ca);
        return std::hypot(normal, ang);
    }

    const double pu = m.period_u();
    const double pv = m.v_periodic() ? m.period_v() : 0.0;
    const Metric2 g = m.jet(m.reduce(z.p)).g;
    auto dot = [&](double au, double av, double bu, double bv) {
        return g.g11 * au * bu + g.g12 * (au * bv + av * bu) + g.g22 * av * bv;
    };
    double best = 1e300;
    for (int i = 0; i < rec.curve.n(); ++i) {
        double du = z.p.u - rec.curve.pts[i].u;
        double dv = z.p.v - rec.curve.pts[i].v;
        du = std::remainder(du, pu);
        if (pv > 0) dv = std::remainder(dv, pv);
        const TangentVector T = rec.dirs[i];
        const double tt = dot(T.du, T.dv, T.du, T.dv);
        const double along = dot(du, dv, T.du, T.dv) / tt;
        const double nu = du - along * T.du;
        const double nv = dv - along * T.dv;
        const double normal2 = dot(nu, nv, nu, nv);
        // unsigned angle between z.dir and the sample tangent
        const double dd = dot(z.dir.du, z.dir.dv, z.dir.du, z.dir.dv);
        const double ca = dot(z.dir.du, z.dir.dv, T.du, T.dv) / std::sqrt(tt * dd);
        const double ang = std::acos(std::clamp(ca, -1.0, 1.0));
        best = std::min(best, normal2 + ang * ang);
    }
    return std::sqrt(best);
}

} // namespace bl

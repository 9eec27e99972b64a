#include "bl/surface.hpp"

#include <algorithm>
#include <cmath>

namespace bl {

namespace {

// wrap x into [0, period)
double wrap(double x, double period) {
    if (x >= 0.0 && x < period) return x; // keep fixed points exact
    double y = std::fmod(x, period);
    if (y < 0.0) y += period;
    if (y >= period) y = 0.0;
    return y;
}

// 8-point Gauss-Legendre nodes/weights on [-1, 1]
const double kGLx[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                        -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                        0.7966664774136267,  0.9602898564975363};
const double kGLw[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                        0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                        0.2223810344533745, 0.1012285362903763};

} // namespace

// --- builders ---------------------------------------------------------------

SurfaceMetric SurfaceMetric::sphere_of_revolution(TrigSeries rho, TrigSeries m_sq,
                                                  std::vector<WarpMode> warp) {
    SurfaceMetric s;
    s.kind_ = SurfaceKind::SphereOfRevolution;
    s.rho_ = std::move(rho);
    s.m_sq_ = std::move(m_sq);
    s.warp_ = std::move(warp);
    s.period_u_ = two_pi;
    s.v_min_ = 0.0;
    s.v_max_ = pi;
    s.v_periodic_ = false;
    s.wu_ = 1.0;
    s.wv_ = 1.0;
    s.finalize();
    return s;
}

SurfaceMetric SurfaceMetric::round_sphere() {
    return sphere_of_revolution(TrigSeries::sines({1.0}), TrigSeries::constant(1.0));
}

SurfaceMetric SurfaceMetric::spheroid(double c) {
    // profile (rho, z) = (sin v, c cos v);  m^2 = cos^2 v + c^2 sin^2 v
    const double a = (1.0 + c * c) / 2.0;
    const double b = (1.0 - c * c) / 2.0;
    return sphere_of_revolution(TrigSeries::sines({1.0}), TrigSeries::cosines(a, {0.0, b}));
}

SurfaceMetric SurfaceMetric::dumbbell() {
    // rho = sin(v)/2 + sin(3v)/6:  neck rho(pi/2) = 1/3 with K = -3,
    // bulges at v = pi/4, 3pi/4 with rho = sqrt(2)/3 and K = 3.
    return sphere_of_revolution(TrigSeries::sines({0.5, 0.0, 1.0 / 6.0}),
                                TrigSeries::constant(1.0));
}

SurfaceMetric SurfaceMetric::dumbbell_perturbed(double amplitude) {
    // f = amplitude * sin^3(v) cos(u) = amplitude * (3 sin v - sin 3v)/4 * cos u
    // Smooth on the sphere: in normal coordinates at a pole f ~ (x^2+y^2) x.
    std::vector<WarpMode> warp = {
        {1, 1, false, true, 0.75 * amplitude},
        {1, 3, false, true, -0.25 * amplitude},
    };
    return sphere_of_revolution(TrigSeries::sines({0.5, 0.0, 1.0 / 6.0}),
                                TrigSeries::constant(1.0), std::move(warp));
}

SurfaceMetric SurfaceMetric::torus_of_revolution(double R, double r) {
    return torus_profile(TrigSeries::cosines(R, {r}), TrigSeries::constant(r * r));
}

SurfaceMetric SurfaceMetric::torus_profile(TrigSeries rho, TrigSeries m_sq) {
    SurfaceMetric s;
    s.kind_ = SurfaceKind::TorusOfRevolution;
    s.rho_ = std::move(rho);
    s.m_sq_ = std::move(m_sq);
    s.period_u_ = two_pi;
    s.v_min_ = 0.0;
    s.v_max_ = two_pi;
    s.v_periodic_ = true;
    s.finalize();
    return s;
}

SurfaceMetric SurfaceMetric::two_neck_torus() {
    // rho = 2 + cos(2v)/2: waists (necks) at v = pi/2, 3pi/2, bulges at 0, pi
    return torus_profile(TrigSeries::cosines(2.0, {0.0, 0.5}), TrigSeries::constant(1.0));
}

SurfaceMetric SurfaceMetric::conformal_torus(std::vector<WarpMode> modes) {
    SurfaceMetric s;
    s.kind_ = SurfaceKind::ConformalTorus;
    s.warp_ = std::move(modes);
    s.period_u_ = 1.0;
    s.v_min_ = 0.0;
    s.v_max_ = 1.0;
    s.v_periodic_ = true;
    s.wu_ = two_pi;
    s.wv_ = two_pi;
    s.finalize();
    return s;
}

SurfaceMetric SurfaceMetric::flat_torus() { return conformal_torus({}); }

std::string SurfaceMetric::kind_name() const {
    switch (kind_) {
        case SurfaceKind::SphereOfRevolution: return "sphere_of_revolution";
        case SurfaceKind::TorusOfRevolution: return "torus_of_revolution";
        case SurfaceKind::ConformalTorus: return "conformal_torus";
    }
    return "?";
}

// --- chart -------------------------------------------------------------------

SurfacePoint SurfaceMetric::reduce(SurfacePoint p) const {
    SurfacePoint q;
    q.u = wrap(p.u, period_u_);
    if (v_periodic_) {
        q.v = v_min_ + wrap(p.v - v_min_, v_max_ - v_min_);
    } else {
        q.v = p.v; // pole-capped interval: no identification to apply
    }
    return q;
}

bool SurfaceMetric::in_chart(SurfacePoint p) const {
    if (v_periodic_) return true;
    return p.v > v_min_ + polar_cap() && p.v < v_max_ - polar_cap();
}

// --- conformal factor -----------------------------------------------------------

double SurfaceMetric::warp_f(double u, double v, double* fu, double* fv, double* fuu,
                             double* fvv) const {
    double f = 0.0, du = 0.0, dv = 0.0, duu = 0.0, dvv = 0.0;
    for (const WarpMode& m : warp_) {
        const double au = m.ju * wu_;
        const double av = m.jv * wv_;
        const double cu = std::cos(au * u), su = std::sin(au * u);
        const double cv = std::cos(av * v), sv = std::sin(av * v);
        const double pu = m.sin_u ? su : cu;
        const double pv = m.sin_v ? sv : cv;
        const double dpu = m.sin_u ? au * cu : -au * su;
        const double dpv = m.sin_v ? av * cv : -av * sv;
        f += m.amp * pu * pv;
        du += m.amp * dpu * pv;
        dv += m.amp * pu * dpv;
        duu += -au * au * m.amp * pu * pv;
        dvv += -av * av * m.amp * pu * pv;
    }
    if (fu) *fu = du;
    if (fv) *fv = dv;
    if (fuu) *fuu = duu;
    if (fvv) *fvv = dvv;
    return f;
}

// --- metric data -----------------------------------------------------------------

MetricJet SurfaceMetric::jet_flow(double u, double v) const {
    MetricJet out;
    if (kind_ == SurfaceKind::ConformalTorus) {
        double fu, fv, fuu, fvv;
        const double f = warp_f(u, v, &fu, &fv, &fuu, &fvv);
        const double e2f = std::exp(2.0 * f);
        out.g = {e2f, 0.0, e2f};
        out.dgu = {2.0 * fu * e2f, 0.0, 2.0 * fu * e2f};
        out.dgv = {2.0 * fv * e2f, 0.0, 2.0 * fv * e2f};
        out.K = -(fuu + fvv) / e2f;
        return out;
    }

    // revolution models; the flow guard is far tighter than the query cap so
    // near-pole passages of legitimate orbits integrate through
    if (!v_periodic_ && (v <= v_min_ + 1e-9 || v >= v_max_ - 1e-9))
        throw PoleTransit("pole cap entered at v=" + std::to_string(v));

    const double rho = rho_.eval(v);
    const double rho_p = rho_.deriv(v);
    const double rho_pp = rho_.deriv2(v);
    const double q = m_sq_.eval(v);
    const double q_p = m_sq_.deriv(v);

    // K = -(rho'' - rho' q'/(2q)) / (rho q)
    const double K0 = -(rho_pp - rho_p * q_p / (2.0 * q)) / (rho * q);

    if (warp_.empty()) {
        out.g = {rho * rho, 0.0, q};
        out.dgu = {0.0, 0.0, 0.0};
        out.dgv = {2.0 * rho * rho_p, 0.0, q_p};
        out.K = K0;
        return out;
    }

    double fu, fv, fuu, fvv;
    const double f = warp_f(u, v, &fu, &fv, &fuu, &fvv);
    const double e2f = std::exp(2.0 * f);
    out.g = {e2f * rho * rho, 0.0, e2f * q};
    out.dgu = {2.0 * fu * e2f * rho * rho, 0.0, 2.0 * fu * e2f * q};
    out.dgv = {e2f * (2.0 * fv * rho * rho + 2.0 * rho * rho_p), 0.0,
               e2f * (2.0 * fv * q + q_p)};
    // K = e^{-2f} (K0 - Laplace_g0 f)
    const double lap = fuu / (rho * rho) + fvv / q + fv * (rho_p / (rho * q) - q_p / (2.0 * q * q));
    out.K = (K0 - lap) / e2f;
    return out;
}

MetricJet SurfaceMetric::jet(SurfacePoint p) const {
    SurfacePoint q = reduce(p);
    if (!in_chart(q))
        throw PointOutsideChart("point at v=" + std::to_string(q.v) + " outside chart");
    return jet_flow(q.u, q.v);
}

Christoffels SurfaceMetric::christoffels(const MetricJet& jet) {
    const Metric2& g = jet.g;
    const double det = g.det();
    const double i11 = g.g22 / det, i12 = -g.g12 / det, i22 = g.g11 / det;

    // [ij,l] = (d_i g_jl + d_j g_il - d_l g_ij)/2 with 1=u, 2=v
    const double c111 = 0.5 * jet.dgu.g11;
    const double c112 = jet.dgu.g12 - 0.5 * jet.dgv.g11;
    const double c121 = 0.5 * jet.dgv.g11;
    const double c122 = 0.5 * jet.dgu.g22;
    const double c221 = jet.dgv.g12 - 0.5 * jet.dgu.g22;
    const double c222 = 0.5 * jet.dgv.g22;

    Christoffels c;
    c.uuu = i11 * c111 + i12 * c112;
    c.uuv = i11 * c121 + i12 * c122;
    c.uvv = i11 * c221 + i12 * c222;
    c.vuu = i12 * c111 + i22 * c112;
    c.vuv = i12 * c121 + i22 * c122;
    c.vvv = i12 * c221 + i22 * c222;
    return c;
}

MetricAt SurfaceMetric::at(SurfacePoint p) const {
    const MetricJet j = jet(p);
    MetricAt out;
    out.g = j.g;
    out.gamma = christoffels(j);
    out.K = j.K;
    const double vals[] = {out.g.g11,      out.g.g12,      out.g.g22,      out.gamma.uuu,
                           out.gamma.uuv,  out.gamma.uvv,  out.gamma.vuu,  out.gamma.vuv,
                           out.gamma.vvv,  out.K};
    for (double x : vals)
        if (!std::isfinite(x)) throw PointOutsideChart("non-finite metric data");
    return out;
}

// --- tangent algebra ---------------------------------------------------------------

double SurfaceMetric::dot(SurfacePoint p, TangentVector a, TangentVector b) const {
    const Metric2 g = jet(p).g;
    return g.g11 * a.du * b.du + g.g12 * (a.du * b.dv + a.dv * b.du) + g.g22 * a.dv * b.dv;
}

double SurfaceMetric::norm(SurfacePoint p, TangentVector a) const {
    return std::sqrt(dot(p, a, a));
}

TangentVector SurfaceMetric::normalized(SurfacePoint p, TangentVector a) const {
    const double n = norm(p, a);
    if (n <= 0.0) throw DegenerateCurve("cannot normalize zero vector");
    return {a.du / n, a.dv / n};
}

TangentVector SurfaceMetric::rotate90(SurfacePoint p, TangentVector t) const {
    const Metric2 g = jet(p).g;
    const double sd = std::sqrt(g.det());
    return {(-g.g12 * t.du - g.g22 * t.dv) / sd, (g.g11 * t.du + g.g12 * t.dv) / sd};
}

double SurfaceMetric::sqrt_det(SurfacePoint p) const { return std::sqrt(jet(p).g.det()); }

// --- revolution helpers --------------------------------------------------------------

bool SurfaceMetric::is_revolution() const {
    return kind_ != SurfaceKind::ConformalTorus && warp_.empty();
}

double SurfaceMetric::clairaut(SurfacePoint p, TangentVector w) const {
    const Metric2 g = jet(p).g;
    return g.g11 * w.du + g.g12 * w.dv;
}

double SurfaceMetric::meridian_arclength(double v_from, double v_to) const {
    // composite Gauss-Legendre on [v_from, v_to]
    const int panels = 32;
    const double h = (v_to - v_from) / panels;
    double s = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double a = v_from + p * h;
        for (int i = 0; i < 8; ++i) {
            const double v = a + 0.5 * h * (1.0 + kGLx[i]);
            s += 0.5 * h * kGLw[i] * std::sqrt(m_sq_.eval(v));
        }
    }
    return s;
}

std::vector<double> SurfaceMetric::critical_parallels() const {
    std::vector<double> out;
    if (kind_ == SurfaceKind::ConformalTorus) return out;
    const int n = 4096;
    const double a = v_periodic_ ? v_min_ : v_min_ + 1e-4;
    const double b = v_periodic_ ? v_max_ : v_max_ - 1e-4;
    double prev_v = a, prev_d = rho_.deriv(a);
    for (int i = 1; i <= n; ++i) {
        const double v = a + (b - a) * i / n;
        const double d = rho_.deriv(v);
        if (prev_d == 0.0) out.push_back(prev_v);
        else if (prev_d * d < 0.0) {
            double lo = prev_v, hi = v, flo = prev_d;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi), fm = rho_.deriv(mid);
                if (flo * fm <= 0.0) hi = mid;
                else { lo = mid; flo = fm; }
            }
            out.push_back(0.5 * (lo + hi));
        }
        prev_v = v;
        prev_d = d;
    }
    return out;
}

double SurfaceMetric::parallel_curvature(double v0) const {
    // parallel oriented by +u with positively oriented normal +v: k = -rho'/(rho m)
    return -rho_.deriv(v0) / (rho_.eval(v0) * std::sqrt(m_sq_.eval(v0)));
}

// --- global quantities ----------------------------------------------------------------

void SurfaceMetric::finalize() {
    // quadrature of dA and K dA over the fundamental domain; trapezoid in u
    // (periodic, spectrally accurate), Gauss-Legendre panels in v
    const int nu = 128;
    const int nv_panels = 96;
    const double hv = (v_max_ - v_min_) / nv_panels;
    const double hu = period_u_ / nu;

    double area = 0.0, gb = 0.0, maxK = -1e300;
    for (int pv = 0; pv < nv_panels; ++pv) {
        const double a = v_min_ + pv * hv;
        for (int iv = 0; iv < 8; ++iv) {
            const double v = a + 0.5 * hv * (1.0 + kGLx[iv]);
            const double wv = 0.5 * hv * kGLw[iv];
            for (int iu = 0; iu < nu; ++iu) {
                const double u = iu * hu;
                const MetricJet j = jet_flow(u, v);
                const double da = std::sqrt(j.g.det()) * wv * hu;
                area += da;
                gb += j.K * da;
                maxK = std::max(maxK, j.K);
            }
        }
    }
    area_ = area;
    gb_integral_ = gb;
    max_K_ = maxK;

    // injectivity radius lower bound: half the shortest geodesic parallel or
    // meridian, capped by the conjugate-radius bound pi/sqrt(max K)
    double est = 1e300;
    if (kind_ == SurfaceKind::ConformalTorus) {
        double fmin = 0.0;
        for (const WarpMode& m : warp_) fmin -= std::abs(m.amp);
        est = 0.5 * std::min(period_u_, v_max_ - v_min_) * std::exp(fmin);
    } else {
        for (double v : critical_parallels())
            est = std::min(est, pi * rho_.eval(v)); // half of 2*pi*rho
        if (v_periodic_)
            est = std::min(est, 0.5 * meridian_arclength(v_min_, v_max_));
        else
            est = std::min(est, meridian_arclength(v_min_, v_max_)); // half of closed meridian
    }
    if (max_K_ > 0.0) est = std::min(est, pi / std::sqrt(max_K_));
    inj_ = est;
}

SurfaceMetric::CurvatureBound SurfaceMetric::check_curvature_bound() const {
    if (genus() < 1) throw WrongGenus("curvature bound check requires genus >= 1");
    CurvatureBound out;
    out.max_K = max_K_;
    out.threshold = two_pi / area_;
    out.holds = out.max_K <= out.threshold;
    return out;
}

} // namespace bl

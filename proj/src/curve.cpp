#include "bl/curve.hpp"

#include <algorithm>
#include <cmath>

#include "bl/errors.hpp"

namespace bl {

namespace {

double wrap_pm(double x, double period) {
    // representative in [-period/2, period/2)
    double y = std::fmod(x, period);
    if (y < -0.5 * period) y += period;
    if (y >= 0.5 * period) y -= period;
    return y;
}

// 2D segment intersection, proper crossings only
bool segments_cross(double ax, double ay, double bx, double by, double cx, double cy, double dx,
                    double dy) {
    auto orient = [](double px, double py, double qx, double qy, double rx, double ry) {
        return (qx - px) * (ry - py) - (qy - py) * (rx - px);
    };
    const double o1 = orient(ax, ay, bx, by, cx, cy);
    const double o2 = orient(ax, ay, bx, by, dx, dy);
    const double o3 = orient(cx, cy, dx, dy, ax, ay);
    const double o4 = orient(cx, cy, dx, dy, bx, by);
    return ((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0));
}

} // namespace

CurvatureProfile curvature_profile(const SurfaceMetric& m, const DiscreteCurve& c) {
    const int n = c.n();
    if (n < 16) throw DegenerateCurve("curve needs at least 16 vertices");

    CurvatureProfile out;
    out.k.resize(n);
    out.nu.resize(n);
    out.tang.resize(n);
    out.ds.resize(n);

    // edge arclengths with the metric at edge midpoints
    for (int i = 0; i < n; ++i) {
        const SurfacePoint a = c.at_cyclic(i);
        const SurfacePoint b = c.at_cyclic(i + 1);
        const SurfacePoint mid{0.5 * (a.u + b.u), 0.5 * (a.v + b.v)};
        const TangentVector e{b.u - a.u, b.v - a.v};
        const double len = m.norm(mid, e);
        if (!(len > 1e-300)) throw DegenerateCurve("zero-length edge");
        out.ds[i] = len;
        out.length += len;
    }

    for (int i = 0; i < n; ++i) {
        const SurfacePoint pm = c.at_cyclic(i - 1);
        const SurfacePoint p0 = c.at_cyclic(i);
        const SurfacePoint pp = c.at_cyclic(i + 1);
        const double hm = out.ds[(i - 1 + n) % n];
        const double hp = out.ds[i];
        const double denom = hm * hp * (hm + hp);

        // 3-point nonuniform first and second derivative w.r.t. arclength
        const double d1u = (hm * hm * pp.u + (hp * hp - hm * hm) * p0.u - hp * hp * pm.u) / denom;
        const double d1v = (hm * hm * pp.v + (hp * hp - hm * hm) * p0.v - hp * hp * pm.v) / denom;
        const double d2u = 2.0 * (hm * pp.u - (hm + hp) * p0.u + hp * pm.u) / denom;
        const double d2v = 2.0 * (hm * pp.v - (hm + hp) * p0.v + hp * pm.v) / denom;

        const MetricAt loc = m.at(p0);
        const Christoffels& G = loc.gamma;
        TangentVector t{d1u, d1v};
        const double tn = std::sqrt(loc.g.g11 * t.du * t.du + 2.0 * loc.g.g12 * t.du * t.dv +
                                    loc.g.g22 * t.dv * t.dv);
        if (!(tn > 1e-300)) throw DegenerateCurve("degenerate tangent");
        t = {t.du / tn, t.dv / tn};
        const double sd = std::sqrt(loc.g.det());
        const TangentVector nu{(-loc.g.g12 * t.du - loc.g.g22 * t.dv) / sd,
                               (loc.g.g11 * t.du + loc.g.g12 * t.dv) / sd};

        // covariant acceleration of the arclength parametrization
        const double au =
            d2u + G.uuu * d1u * d1u + 2.0 * G.uuv * d1u * d1v + G.uvv * d1v * d1v;
        const double av =
            d2v + G.vuu * d1u * d1u + 2.0 * G.vuv * d1u * d1v + G.vvv * d1v * d1v;

        const double k = loc.g.g11 * au * nu.du + loc.g.g12 * (au * nu.dv + av * nu.du) +
                         loc.g.g22 * av * nu.dv;
        out.k[i] = k;
        out.nu[i] = nu;
        out.tang[i] = t;
        out.max_abs_k = std::max(out.max_abs_k, std::abs(k));
    }
    return out;
}

double curve_length(const SurfaceMetric& m, const DiscreteCurve& c) {
    const int n = c.n();
    double L = 0.0;
    for (int i = 0; i < n; ++i) {
        const SurfacePoint a = c.at_cyclic(i);
        const SurfacePoint b = c.at_cyclic(i + 1);
        const SurfacePoint mid{0.5 * (a.u + b.u), 0.5 * (a.v + b.v)};
        L += m.norm(mid, {b.u - a.u, b.v - a.v});
    }
    return L;
}

DiscreteCurve resample(const SurfaceMetric& m, const DiscreteCurve& c, int n_out) {
    const int n = c.n();
    std::vector<double> cum(n + 1, 0.0);
    for (int i = 0; i < n; ++i) {
        const SurfacePoint a = c.at_cyclic(i);
        const SurfacePoint b = c.at_cyclic(i + 1);
        const SurfacePoint mid{0.5 * (a.u + b.u), 0.5 * (a.v + b.v)};
        cum[i + 1] = cum[i] + m.norm(mid, {b.u - a.u, b.v - a.v});
    }
    const double L = cum[n];

    DiscreteCurve out;
    out.loop_du = c.loop_du;
    out.loop_dv = c.loop_dv;
    out.resampled = true;
    out.pts.resize(n_out);
    int seg = 0;
    for (int j = 0; j < n_out; ++j) {
        const double target = L * j / n_out;
        while (seg + 1 < n && cum[seg + 1] < target) ++seg;
        const double t = (target - cum[seg]) / std::max(cum[seg + 1] - cum[seg], 1e-300);
        const SurfacePoint a = c.at_cyclic(seg);
        const SurfacePoint b = c.at_cyclic(seg + 1);
        out.pts[j] = {a.u + t * (b.u - a.u), a.v + t * (b.v - a.v)};
    }
    return out;
}

bool is_embedded(const SurfaceMetric& m, const DiscreteCurve& c) {
    const int n = c.n();
    const double pu = m.period_u();
    const double pv = m.v_periodic() ? m.period_v() : 0.0;

    // midpoints and radii
    std::vector<double> mx(n), my(n), rad(n);
    double rmax = 0.0;
    for (int i = 0; i < n; ++i) {
        const SurfacePoint a = c.at_cyclic(i);
        const SurfacePoint b = c.at_cyclic(i + 1);
        mx[i] = 0.5 * (a.u + b.u);
        my[i] = 0.5 * (a.v + b.v);
        rad[i] = 0.5 * std::hypot(b.u - a.u, b.v - a.v);
        rmax = std::max(rmax, rad[i]);
    }

    auto test_pair = [&](int i, int j) {
        if (j == (i + 1) % n || i == (j + 1) % n) return false; // adjacent
        double dx = mx[j] - mx[i];
        double dy = my[j] - my[i];
        const double sx = pu > 0 ? wrap_pm(dx, pu) - dx : 0.0;
        const double sy = pv > 0 ? wrap_pm(dy, pv) - dy : 0.0;
        dx += sx;
        dy += sy;
        if (std::hypot(dx, dy) > rad[i] + rad[j] + 1e-15) return false;
        const SurfacePoint a1 = c.at_cyclic(i);
        const SurfacePoint a2 = c.at_cyclic(i + 1);
        const SurfacePoint b1 = c.at_cyclic(j);
        const SurfacePoint b2 = c.at_cyclic(j + 1);
        return segments_cross(a1.u, a1.v, a2.u, a2.v, b1.u + sx, b1.v + sy, b2.u + sx,
                              b2.v + sy);
    };

    // uniform grid over reduced midpoints; candidate pairs share a 3x3 block.
    // Cells never get smaller than segment scale requires, and the grid is
    // capped so shrinking curves cannot blow up the bin count.
    const double cell = std::max(2.0 * rmax, 1e-9);
    const int gu = pu > 0 ? std::clamp(int(pu / cell), 1, 128) : 1;
    const double vspan = pv > 0 ? pv : (m.v_max() - m.v_min());
    const int gv = std::clamp(int(vspan / cell), 1, 128);
    if (gu < 4 || gv < 4) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 2; j < n; ++j)
                if (test_pair(i, j)) return false;
        return true;
    }

    std::vector<std::vector<int>> bins(std::size_t(gu) * gv);
    auto bin_of = [&](double x, double y) {
        const SurfacePoint r = m.reduce({x, y});
        int iu = int(r.u / pu * gu) % gu;
        int iv = int((r.v - m.v_min()) / vspan * gv);
        iu = std::clamp(iu, 0, gu - 1);
        iv = std::clamp(iv, 0, gv - 1);
        return std::pair<int, int>{iu, iv};
    };
    for (int i = 0; i < n; ++i) {
        const auto [iu, iv] = bin_of(mx[i], my[i]);
        bins[std::size_t(iu) * gv + iv].push_back(i);
    }
    for (int i = 0; i < n; ++i) {
        const auto [iu, iv] = bin_of(mx[i], my[i]);
        for (int du = -1; du <= 1; ++du) {
            for (int dv = -1; dv <= 1; ++dv) {
                int cu = (iu + du + gu) % gu;
                int cv = iv + dv;
                if (pv > 0) cv = (cv + gv) % gv;
                else if (cv < 0 || cv >= gv) continue;
                for (int j : bins[std::size_t(cu) * gv + cv])
                    if (j > i && test_pair(i, j)) return false;
            }
        }
    }
    return true;
}

double curve_diameter(const SurfaceMetric& m, const DiscreteCurve& c) {
    const int n = c.n();
    double cu = 0, cv = 0;
    for (const auto& p : c.pts) {
        cu += p.u;
        cv += p.v;
    }
    const SurfacePoint bary = m.reduce({cu / n, cv / n});
    const Metric2 g = m.jet(bary).g;
    double d2 = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double eu = c.pts[j].u - c.pts[i].u;
            const double ev = c.pts[j].v - c.pts[i].v;
            d2 = std::max(d2, g.g11 * eu * eu + 2.0 * g.g12 * eu * ev + g.g22 * ev * ev);
        }
    return std::sqrt(d2);
}

CurveGeometry detect_geometry(const SurfaceMetric& m, const DiscreteCurve& c) {
    CurveGeometry geo;
    const double pu = m.period_u();
    const int wu = int(std::lround(c.loop_du / pu));
    const int wv = m.v_periodic() ? int(std::lround(c.loop_dv / m.period_v())) : 0;

    double v_lo = 1e300, v_hi = -1e300, u_lo = 1e300, u_hi = -1e300;
    for (const auto& p : c.pts) {
        v_lo = std::min(v_lo, p.v);
        v_hi = std::max(v_hi, p.v);
        u_lo = std::min(u_lo, p.u);
        u_hi = std::max(u_hi, p.u);
    }
    const double tol = 1e-7;
    if (m.kind() == SurfaceKind::ConformalTorus && (wu != 0 || wv != 0)) {
        double c0 = double(wv) * c.pts[0].u - double(wu) * c.pts[0].v;
        bool straight = true;
        for (const auto& p : c.pts)
            if (std::abs(double(wv) * p.u - double(wu) * p.v - c0) > tol) {
                straight = false;
                break;
            }
        if (straight) {
            geo.kind = CurveGeomKind::TorusLine;
            geo.p = wu;
            geo.q = wv;
            geo.c = c0;
            return geo;
        }
    }
    if (wv == 0 && v_hi - v_lo < tol && std::abs(wu) == 1 &&
        m.kind() != SurfaceKind::ConformalTorus) {
        geo.kind = CurveGeomKind::ParallelV;
        geo.v0 = 0.5 * (v_lo + v_hi);
        geo.orient = wu > 0 ? +1 : -1;
        return geo;
    }
    if (wu == 0 && u_hi - u_lo < tol && std::abs(wv) == 1 && m.v_periodic() &&
        m.kind() != SurfaceKind::ConformalTorus) {
        geo.kind = CurveGeomKind::MeridianU;
        geo.u0 = m.reduce({0.5 * (u_lo + u_hi), 0}).u;
        geo.orient = wv > 0 ? +1 : -1;
        return geo;
    }
    geo.kind = CurveGeomKind::Polyline;
    return geo;
}

int intersection_count(const SurfaceMetric& m, const DiscreteCurve& a, const DiscreteCurve& b_in) {
    const double pu = m.period_u();
    const double pv = m.v_periodic() ? m.period_v() : 0.0;
    // sub-resolution jitter so crossings landing exactly on sample vertices
    // are not missed by the strict proper-crossing test
    DiscreteCurve b = b_in;
    for (auto& p : b.pts) {
        p.u += 1.31e-9;
        p.v += 2.71e-9;
    }
    int count = 0;
    for (int i = 0; i < a.n(); ++i) {
        const SurfacePoint a1 = a.at_cyclic(i);
        const SurfacePoint a2 = a.at_cyclic(i + 1);
        const double amx = 0.5 * (a1.u + a2.u), amy = 0.5 * (a1.v + a2.v);
        const double ar = 0.5 * std::hypot(a2.u - a1.u, a2.v - a1.v);
        for (int j = 0; j < b.n(); ++j) {
            const SurfacePoint b1 = b.at_cyclic(j);
            const SurfacePoint b2 = b.at_cyclic(j + 1);
            double bmx = 0.5 * (b1.u + b2.u), bmy = 0.5 * (b1.v + b2.v);
            double dx = bmx - amx, dy = bmy - amy;
            const double sx = pu > 0 ? wrap_pm(dx, pu) - dx : 0.0;
            const double sy = pv > 0 ? wrap_pm(dy, pv) - dy : 0.0;
            dx += sx;
            dy += sy;
            if (std::hypot(dx, dy) > ar + 0.5 * std::hypot(b2.u - b1.u, b2.v - b1.v) + 1e-15)
                continue;
            if (segments_cross(a1.u, a1.v, a2.u, a2.v, b1.u + sx, b1.v + sy, b2.u + sx,
                               b2.v + sy))
                ++count;
        }
    }
    return count;
}

DiscreteCurve make_circle(const SurfaceMetric& m, SurfacePoint center, double radius, int n) {
    // metric circle in chart coordinates, correct to leading order; intended
    // for small radii on nearly-flat charts
    DiscreteCurve c;
    c.pts.resize(n);
    const Metric2 g = m.jet(center).g;
    const double su = radius / std::sqrt(g.g11);
    const double sv = radius / std::sqrt(g.g22);
    for (int i = 0; i < n; ++i) {
        const double t = two_pi * i / n;
        c.pts[i] = {center.u + su * std::cos(t), center.v + sv * std::sin(t)};
    }
    return c;
}

DiscreteCurve make_parallel(const SurfaceMetric& m, double v0, int n, int orient) {
    DiscreteCurve c;
    c.pts.resize(n);
    for (int i = 0; i < n; ++i) {
        const double u = orient > 0 ? m.period_u() * i / n : m.period_u() * (1.0 - double(i) / n);
        c.pts[i] = {u, v0};
    }
    c.loop_du = orient > 0 ? m.period_u() : -m.period_u();
    return c;
}

DiscreteCurve make_meridian(const SurfaceMetric& m, double u0, int n) {
    DiscreteCurve c;
    c.pts.resize(n);
    for (int i = 0; i < n; ++i) c.pts[i] = {u0, m.v_min() + m.period_v() * i / n};
    c.loop_dv = m.period_v();
    return c;
}

DiscreteCurve make_torus_line(const SurfaceMetric& m, int p, int q, SurfacePoint base, int n,
                              double wiggle) {
    DiscreteCurve c;
    c.pts.resize(n);
    const double du = p * m.period_u();
    const double dv = q * (m.v_periodic() ? m.period_v() : 0.0);
    const double nrm = std::hypot(double(p), double(q));
    for (int i = 0; i < n; ++i) {
        const double t = double(i) / n;
        const double bump = wiggle * std::sin(two_pi * t);
        c.pts[i] = {base.u + t * du + bump * (-q / nrm), base.v + t * dv + bump * (p / nrm)};
    }
    c.loop_du = du;
    c.loop_dv = dv;
    return c;
}

} // namespace bl

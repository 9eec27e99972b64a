#include "bl/finder.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bl/errors.hpp"

namespace bl::finder {

namespace {

using csf::FlowOutcome;
using csf::OutcomeKind;
using csf::RegionSpec;
using csf::StepPolicy;

ClosedGeodesicRecord record_of(const FlowOutcome& out) {
    if (out.kind == OutcomeKind::Collapsed) throw FlowCollapsed("flow collapsed to a point");
    if (out.kind == OutcomeKind::Running) throw BudgetExhausted("flow budget exhausted");
    return *out.record;
}

// boundary-hugging loop just inside a VBand disk: a parallel offset from the
// bounding circle
DiscreteCurve hug_parallel(const SurfaceMetric& m, double v_boundary, int inward_sign, int n) {
    const double off = 0.02 * (m.v_max() - m.v_min());
    return make_parallel(m, v_boundary + inward_sign * off, n);
}

double record_vlevel(const ClosedGeodesicRecord& rec) {
    if (rec.geometry.kind != CurveGeomKind::ParallelV)
        throw PreconditionFailed("expected a parallel geodesic");
    return rec.geometry.v0;
}

} // namespace

void ConfigurationChain::validate() const {
    const int n = int(geodesics.size());
    if (int(roles.size()) != n || int(intersections.size()) != n)
        throw IntersectionPatternFailed("chain bookkeeping size mismatch");
    if (tag == ChainTag::LemmaChain) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const int want = std::abs(i - j) == 1 ? 1 : 0;
                if (intersections[i][j] != want)
                    throw IntersectionPatternFailed("lemma chain intersections violated");
            }
        for (const auto& r : roles)
            if (r != ChainRole::Waist)
                throw IntersectionPatternFailed("lemma chain entries must be waists");
    }
    if (tag == ChainTag::Nested) {
        if (n % 2 != 0) throw IntersectionPatternFailed("nested chain must have even length");
        for (int i = 0; i < n; ++i) {
            const ChainRole want = i % 2 == 0 ? ChainRole::Waist : ChainRole::ConjugatePointType;
            if (roles[i] != want) throw IntersectionPatternFailed("nested roles must alternate");
            for (int j = 0; j < n; ++j)
                if (intersections[i][j] != 0)
                    throw IntersectionPatternFailed("nested chain must be pairwise disjoint");
        }
        for (int i = 0; i + 1 < n; ++i) {
            if (roles[i] == ChainRole::Waist && !geodesics[i].is_waist)
                throw IntersectionPatternFailed("waist role without waist record");
            if (roles[i] == ChainRole::ConjugatePointType && !geodesics[i].has_conjugate_points)
                throw IntersectionPatternFailed("conjugate role without conjugate points");
        }
    }
}

bl::section::CompleteSystemView CompleteSystem::view() const {
    bl::section::CompleteSystemView v;
    v.all = all;
    v.limit_sub = limit_sub;
    return v;
}

ClosedGeodesicRecord class_minimizer(const SurfaceMetric& m, int p, int q,
                                     const csf::StepPolicy& policy) {
    if (m.genus() < 1) throw WrongGenus("homotopy classes need a torus model");
    if (p == 0 && q == 0) throw FlowCollapsed("contractible class");
    // canonical representative: a lattice line with a symmetry-breaking wiggle
    const double vspan = m.v_max() - m.v_min();
    const SurfacePoint base{0.0, m.v_min() + 0.35 * vspan};
    const double wiggle = 0.02 * std::min(m.period_u(), vspan);
    const DiscreteCurve seed = make_torus_line(m, p, q, base, 256, wiggle);
    return class_minimizer(m, seed, policy);
}

ClosedGeodesicRecord class_minimizer(const SurfaceMetric& m, const DiscreteCurve& seed,
                                     const csf::StepPolicy& policy) {
    return record_of(csf::evolve(m, seed, policy));
}

namespace {

// shared minmax iteration: push the family with a confined dwell, accept an
// in-funnel converged geodesic strictly above the floor, refine the family
// toward the running maximum
std::optional<ClosedGeodesicRecord> minmax_engine(const SurfaceMetric& m,
                                                  const csf::RegionSpec& region,
                                                  std::vector<DiscreteCurve> family,
                                                  double floor_len, const StepPolicy& policy) {
    StepPolicy dwell = policy;
    dwell.max_steps = 80;
    for (int round = 0; round < 24; ++round) {
        double best_len = -1.0;
        int best = -1;
        for (std::size_t i = 0; i < family.size(); ++i) {
            if (family[i].pts.empty()) continue;
            const FlowOutcome out = csf::region_confined_evolve(m, family[i], region, dwell);
            if (out.kind == OutcomeKind::ConvergedGeodesic) {
                if (out.record->length > floor_len + 1e-6) return *out.record;
                family[i] = out.curve;
            } else if (out.kind == OutcomeKind::Running) {
                family[i] = out.curve;
            } else {
                family[i].pts.clear(); // collapsed member drops out
            }
            if (!family[i].pts.empty()) {
                const double len = curve_length(m, family[i]);
                if (len > best_len) {
                    best_len = len;
                    best = int(i);
                }
            }
        }
        if (best < 0 || best_len < floor_len + 1e-3) return std::nullopt;
        // polish the running maximum directly: the engine seeks a critical
        // point from below, which the descent flow alone will not enter
        if (const auto rec = csf::polish_to_geodesic(m, family[best])) {
            if (rec->length > floor_len + 1e-6 &&
                std::abs(rec->length - best_len) < 0.05 * best_len)
                return *rec;
        }
        // refine near the maximum: keep the argmax and its neighbours, insert
        // pointwise midcurves between them
        std::vector<DiscreteCurve> next;
        for (int di = -1; di <= 1; ++di) {
            const int i = best + di;
            if (i < 0 || i >= int(family.size()) || family[i].pts.empty()) continue;
            next.push_back(family[i]);
        }
        if (next.size() >= 2) {
            const std::size_t base_count = next.size();
            for (std::size_t i = 0; i + 1 < base_count; ++i) {
                const DiscreteCurve& a = next[i];
                const DiscreteCurve b = resample(m, next[i + 1], a.n());
                DiscreteCurve mid = a;
                for (int k = 0; k < a.n(); ++k) {
                    mid.pts[k].u = 0.5 * (a.pts[k].u + b.pts[k].u);
                    mid.pts[k].v = 0.5 * (a.pts[k].v + b.pts[k].v);
                }
                next.push_back(mid);
            }
        }
        family = std::move(next);
    }
    return std::nullopt;
}

} // namespace

ClosedGeodesicRecord minmax_geodesic(const SurfaceMetric& m, const ClosedGeodesicRecord& w1,
                                     const ClosedGeodesicRecord& w2,
                                     std::vector<DiscreteCurve> sweepout, int sweep_count,
                                     const csf::StepPolicy& policy) {
    if (&w1 == &w2 || (std::abs(w1.length - w2.length) < 1e-14 &&
                       intersection_count(m, w1.curve, w2.curve) == 0 &&
                       std::abs(record_vlevel(w1) - record_vlevel(w2)) < 1e-12))
        throw PreconditionFailed("minmax needs two distinct waists");
    if (intersection_count(m, w1.curve, w2.curve) != 0)
        throw PreconditionFailed("minmax waists must be disjoint");

    double lo = record_vlevel(w1), hi = record_vlevel(w2);
    if (lo > hi) std::swap(lo, hi);
    const RegionSpec region = RegionSpec::v_band(lo, hi);

    if (sweepout.empty()) {
        for (int k = 1; k <= sweep_count; ++k) {
            const double v = lo + (hi - lo) * k / (sweep_count + 1);
            sweepout.push_back(make_parallel(m, v, 192));
        }
    }

    const double floor_len = std::max(w1.length, w2.length);
    const auto rec = minmax_engine(m, region, std::move(sweepout), floor_len, policy);
    if (!rec) throw SweepoutDegenerated("pushed family sank to the endpoint lengths");
    return *rec;
}

namespace {

// disk inner search (minmax over the disk family): sweep parallels from just
// inside the bounding waist toward the pole; returns the maximal geodesic or
// nothing when the family sinks
std::optional<ClosedGeodesicRecord> disk_minmax(const SurfaceMetric& m, double v_waist,
                                                int inward_sign, const StepPolicy& policy) {
    const double v_pole = inward_sign > 0 ? m.v_max() : m.v_min();
    const double lo = std::min(v_waist, v_pole), hi = std::max(v_waist, v_pole);
    const csf::RegionSpec region = csf::RegionSpec::v_band(lo, hi);
    std::vector<DiscreteCurve> family;
    for (int k = 1; k <= 25; ++k) {
        const double v = v_waist + inward_sign * (std::abs(v_pole - v_waist) - 0.1) * k / 26.0;
        family.push_back(make_parallel(m, v, 192));
    }
    const double floor_len = two_pi * m.profile_radius(v_waist);
    return minmax_engine(m, region, std::move(family), floor_len, policy);
}

} // namespace

ConfigurationChain nested_chain(const SurfaceMetric& m, const csf::RegionSpec& disk,
                                const csf::StepPolicy& policy) {
    ConfigurationChain chain;
    chain.tag = ChainTag::Nested;

    if (disk.kind == RegionSpec::Kind::VBand) {
        // disk = v-band with one side a pole; validate the geodesic boundary
        const bool pole_lo = disk.v_lo <= m.v_min() + 1e-6;
        const bool pole_hi = disk.v_hi >= m.v_max() - 1e-6;
        if (pole_lo == pole_hi)
            throw PreconditionFailed("VBand disk needs exactly one pole side");
        const double v_b = pole_lo ? disk.v_hi : disk.v_lo;
        const int inward = pole_lo ? -1 : +1;
        if (std::abs(m.profile_radius_deriv(v_b)) > 1e-6)
            throw PreconditionFailed("disk boundary is not a geodesic");

        // Outermost interior geodesic: evolve a boundary-hugging loop inward.
        double v_outer = v_b;
        for (;;) {
            FlowOutcome out;
            try {
                out = csf::region_confined_evolve(
                    m, hug_parallel(m, v_outer, inward, 192),
                    RegionSpec::v_band(pole_lo ? m.v_min() : v_outer + 1e-9,
                                       pole_lo ? v_outer - 1e-9 : m.v_max()),
                    policy);
            } catch (const ConvexityViolation&) {
                break; // nothing inside holds the flow: treat as no geodesic
            }
            if (out.kind != OutcomeKind::ConvergedGeodesic) break; // collapsed: no geodesic
            const ClosedGeodesicRecord waist = *out.record;
            chain.geodesics.push_back(waist);
            chain.roles.push_back(ChainRole::Waist);

            // inner minmax inside the waist's disk
            const auto inner = disk_minmax(m, record_vlevel(waist), inward, policy);
            if (!inner) {
                // a waist whose disk holds no further geodesic: the chain must
                // end on a conjugate-point entry, so drop the dangling waist
                chain.geodesics.pop_back();
                chain.roles.pop_back();
                break;
            }
            chain.geodesics.push_back(*inner);
            chain.roles.push_back(ChainRole::ConjugatePointType);
            v_outer = record_vlevel(*inner);
        }
    } else if (disk.kind == RegionSpec::Kind::Box) {
        // polygon complement disk (fundamental domain in cover coordinates):
        // evolve a boundary-hugging loop; a collapse means no interior geodesic
        const double mu = 0.02 * (disk.u_hi - disk.u_lo);
        const double mv = 0.02 * (disk.v_hi - disk.v_lo);
        const double cu = 0.5 * (disk.u_lo + disk.u_hi);
        const double cv = 0.5 * (disk.v_lo + disk.v_hi);
        const double ru = 0.5 * (disk.u_hi - disk.u_lo) - mu;
        const double rv = 0.5 * (disk.v_hi - disk.v_lo) - mv;
        DiscreteCurve hug;
        hug.pts.resize(128);
        for (int i = 0; i < 128; ++i) {
            const double t = two_pi * i / 128;
            const double cs = std::cos(t), sn = std::sin(t);
            // superellipse hugging the box corners
            const double fu = std::copysign(std::pow(std::abs(cs), 0.6), cs);
            const double fv = std::copysign(std::pow(std::abs(sn), 0.6), sn);
            hug.pts[i] = {cu + ru * fu, cv + rv * fv};
        }
        StepPolicy pol = policy;
        pol.target_n = 96;
        FlowOutcome out = csf::region_confined_evolve(m, hug, disk, pol);
        if (out.kind == OutcomeKind::ConvergedGeodesic) {
            chain.geodesics.push_back(*out.record);
            chain.roles.push_back(ChainRole::Waist);
            // deeper alternation inside polygon disks is beyond the shipped
            // scenarios; report the single find
        }
    } else {
        throw PreconditionFailed("unsupported disk region for nested_chain");
    }

    const int n = int(chain.geodesics.size());
    chain.intersections.assign(n, std::vector<int>(n, 0));
    chain.validate();
    return chain;
}

ConfigurationChain genus_chain(const SurfaceMetric& m, const csf::StepPolicy& policy) {
    if (m.genus() < 1) throw WrongGenus("genus chain needs a torus model");
    ConfigurationChain chain;
    chain.tag = ChainTag::LemmaChain;
    chain.geodesics.push_back(class_minimizer(m, 1, 0, policy));
    chain.geodesics.push_back(class_minimizer(m, 0, 1, policy));
    chain.roles = {ChainRole::Waist, ChainRole::Waist};
    const int crossings =
        intersection_count(m, chain.geodesics[0].curve, chain.geodesics[1].curve);
    chain.intersections = {{0, crossings}, {crossings, 0}};
    if (crossings != 1)
        throw IntersectionPatternFailed("class minimizers must intersect exactly once");
    for (const auto& g : chain.geodesics)
        if (!g.is_waist) throw IntersectionPatternFailed("class minimizer is not a waist");
    chain.validate();
    return chain;
}

ConfigurationChain sphere_seed_chain(const SurfaceMetric& m, const ClosedGeodesicRecord& rec) {
    if (m.genus() != 0) throw WrongGenus("sphere seed chain needs a sphere model");
    if (!rec.has_conjugate_points)
        throw PreconditionFailed("sphere seed must have conjugate points");
    ConfigurationChain chain;
    chain.tag = ChainTag::SphereSeed;
    chain.geodesics.push_back(rec);
    chain.roles.push_back(ChainRole::ConjugatePointType);
    chain.intersections = {{0}};
    return chain;
}

CompleteSystem assemble_complete_system(const SurfaceMetric& m, const ConfigurationChain& chain,
                                        const csf::StepPolicy& policy) {
    CompleteSystem sys;
    sys.all = chain.geodesics;

    std::vector<ClosedGeodesicRecord> extras;
    if (chain.tag == ChainTag::SphereSeed) {
        const double v0 = record_vlevel(chain.geodesics.at(0));
        for (const csf::RegionSpec& disk :
             {csf::RegionSpec::v_band(m.v_min(), v0), csf::RegionSpec::v_band(v0, m.v_max())}) {
            const ConfigurationChain sub = nested_chain(m, disk, policy);
            for (const auto& rec : sub.geodesics) extras.push_back(rec);
        }
    } else {
        // complement of the lemma chain: a fundamental-domain box cut along
        // the chain curves
        double u_cut = 0.0, v_cut = 0.0;
        for (const auto& rec : chain.geodesics) {
            const auto& g = rec.geometry;
            if (g.kind == CurveGeomKind::ParallelV) v_cut = g.v0;
            if (g.kind == CurveGeomKind::MeridianU) u_cut = g.u0;
            if (g.kind == CurveGeomKind::TorusLine) {
                if (g.p != 0 && g.q == 0) v_cut = -g.c / g.p;
                if (g.q != 0 && g.p == 0) u_cut = g.c / g.q;
            }
        }
        const double pv = m.v_periodic() ? m.period_v() : 0.0;
        const csf::RegionSpec disk =
            csf::RegionSpec::box(u_cut, u_cut + m.period_u(), v_cut, v_cut + pv);
        const ConfigurationChain sub = nested_chain(m, disk, policy);
        for (const auto& rec : sub.geodesics) extras.push_back(rec);
    }

    for (const auto& rec : extras) {
        sys.all.push_back(rec);
        if (rec.is_waist && rec.contractible() && rec.type() == OrbitType::Hyperbolic)
            sys.limit_sub.push_back(int(sys.all.size()) - 1);
    }

    // Definition check: limit members are disjoint from everything else
    for (int li : sys.limit_sub)
        for (std::size_t j = 0; j < sys.all.size(); ++j)
            if (int(j) != li &&
                intersection_count(m, sys.all[li].curve, sys.all[j].curve) != 0)
                throw IntersectionPatternFailed("limit waist intersects another geodesic");
    return sys;
}

std::vector<ClosedGeodesicRecord> parallel_geodesics(const SurfaceMetric& m) {
    if (!m.is_revolution()) throw PreconditionFailed("parallel geodesics need a revolution model");
    std::vector<ClosedGeodesicRecord> out;
    for (double v : m.critical_parallels()) {
        const UnitTangent z = UnitTangent::make(m, {0.0, v}, {1.0, 0.0});
        out.push_back(make_record(m, z, two_pi * m.profile_radius(v)));
    }
    return out;
}

std::string ConfigurationChain::to_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{\"tag\":\""
       << (tag == ChainTag::LemmaChain ? "lemma_chain"
                                       : tag == ChainTag::Nested ? "nested" : "sphere_seed")
       << "\",\"geodesics\":[";
    for (std::size_t i = 0; i < geodesics.size(); ++i) {
        const auto& g = geodesics[i];
        os << (i ? "," : "") << "{\"length\":" << g.length << ",\"type\":\""
           << orbit_type_name(g.type()) << "\",\"sigma\":[" << g.floquet.sigma.real() << ","
           << g.floquet.sigma.imag() << "],\"is_waist\":" << (g.is_waist ? "true" : "false")
           << ",\"has_conjugate_points\":" << (g.has_conjugate_points ? "true" : "false")
           << ",\"role\":\""
           << (roles[i] == ChainRole::Waist ? "waist" : "conjugate_point_type")
           << "\",\"winding\":[" << g.wind_u << "," << g.wind_v << "]}";
    }
    os << "],\"intersections\":[";
    for (std::size_t i = 0; i < intersections.size(); ++i) {
        os << (i ? "," : "") << "[";
        for (std::size_t j = 0; j < intersections[i].size(); ++j)
            os << (j ? "," : "") << intersections[i][j];
        os << "]";
    }
    os << "]}";
    return os.str();
}

std::string CompleteSystem::to_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{\"count\":" << all.size() << ",\"geodesics\":[";
    for (std::size_t i = 0; i < all.size(); ++i) {
        const auto& g = all[i];
        os << (i ? "," : "") << "{\"length\":" << g.length << ",\"type\":\""
           << orbit_type_name(g.type()) << "\",\"sigma\":[" << g.floquet.sigma.real() << ","
           << g.floquet.sigma.imag() << "],\"is_waist\":" << (g.is_waist ? "true" : "false")
           << ",\"contractible\":" << (g.contractible() ? "true" : "false")
           << ",\"clairaut\":" << g.clairaut << "}";
    }
    os << "],\"limit_sub\":[";
    for (std::size_t i = 0; i < limit_sub.size(); ++i) os << (i ? "," : "") << limit_sub[i];
    os << "],\"return_bound\":";
    if (return_bound) os << *return_bound;
    else os << "\"unverified\"";
    os << "}";
    return os.str();
}

} // namespace bl::finder

#pragma once

// Planar geometry for the sandwich bookkeeping: lower hulls, half plane
// classification, facet errors by vertex enumeration of the outer set,
// convexity driven subspace decomposition, and the per subspace inner and
// outer approximations.

#include <sdnbi/core.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sdnbi {

inline constexpr double kClassifyTol = 1e-6;  // absorbs multiplier noise in side tests

enum class PlaneSide { Above, On, Below };

struct HalfPlane {
    Vec2 w{};
    double b = 0.0;
};

struct Facet {
    ObjectivePoint p1, p2;  // sorted so p1.z[0] < p2.z[0]
    Vec2 nbar{};            // outward unit normal, both components nonpositive
    bool open = true;
    double error = 0.0;
};

struct Subspace {
    ObjectivePoint lo, hi;  // extremes, lo.z[0] < hi.z[0]
    bool is_convex = true;
    ParetoArchive members;
    std::vector<Facet> facets;
};

struct Approximation {
    std::vector<Vec2> ips;         // polyline bounding the front from the attainable side
    std::vector<Vec2> ops;         // vertices bounding the front from the ideal side
    std::vector<HalfPlane> planes; // supporting half planes in use
};

inline PlaneSide halfplane_side(const Vec2& z, const Vec2& w, double b, double tol) {
    const double v = dot(w, z) - b;
    if (v > tol) return PlaneSide::Above;
    if (v < -tol) return PlaneSide::Below;
    return PlaneSide::On;
}

inline Facet make_facet(const ObjectivePoint& p1, const ObjectivePoint& p2) {
    if (!(p1.z[0] < p2.z[0])) throw std::invalid_argument("facet endpoints not ordered");
    const double d1 = p2.z[0] - p1.z[0];
    const double d2 = p1.z[1] - p2.z[1];
    const double len = std::hypot(d2, d1);
    if (!(d2 > 0.0) || !(len > 1e-15)) throw std::invalid_argument("degenerate facet");
    Facet f;
    f.p1 = p1;
    f.p2 = p2;
    f.nbar = {-d2 / len, -d1 / len};
    return f;
}

inline std::vector<Facet> adjacent_facets(const ParetoArchive& members) {
    std::vector<Facet> facets;
    const auto& pts = members.points();
    for (std::size_t i = 1; i < pts.size(); ++i) {
        facets.push_back(make_facet(pts[i - 1], pts[i]));
    }
    return facets;
}

// Vertices of the lower left convex boundary, sorted by first coordinate.
// Monotone chain with collinear points dropped; interior, upper, and
// duplicate points are excluded.
inline std::vector<ObjectivePoint> lower_hull(std::vector<ObjectivePoint> pts) {
    std::sort(pts.begin(), pts.end(), [](const ObjectivePoint& a, const ObjectivePoint& b) {
        return a.z[0] != b.z[0] ? a.z[0] < b.z[0] : a.z[1] < b.z[1];
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const ObjectivePoint& a, const ObjectivePoint& b) {
                              return a.z[0] == b.z[0] && a.z[1] == b.z[1];
                          }),
              pts.end());
    if (pts.size() < 2) throw std::invalid_argument("need at least two distinct points");

    std::vector<ObjectivePoint> hull;
    for (const ObjectivePoint& p : pts) {
        while (hull.size() >= 2) {
            const Vec2 a = sub(hull[hull.size() - 1].z, hull[hull.size() - 2].z);
            const Vec2 b = sub(p.z, hull[hull.size() - 2].z);
            if (a[0] * b[1] - a[1] * b[0] <= 0.0) {
                hull.pop_back();
            } else {
                break;
            }
        }
        hull.push_back(p);
    }
    while (hull.size() >= 2 &&
           hull[hull.size() - 1].z[0] - hull[hull.size() - 2].z[0] <= 1e-15) {
        hull.pop_back();
    }
    if (hull.size() < 2) throw std::invalid_argument("need at least two distinct points");
    return hull;
}

// Largest depth by which the outer set dips below the facet line, in units
// of the error direction, found by scanning the outer vertices.
inline double facet_error(const Facet& f, const Approximation& a, const Vec2& eps_d) {
    if (!f.open) throw std::invalid_argument("closed facet");
    if (a.ops.empty()) throw std::invalid_argument("empty outer approximation");
    const Vec2 wp = {-f.nbar[0], -f.nbar[1]};
    const double denom = dot(wp, eps_d);
    if (!(denom > 0.0)) throw std::invalid_argument("invalid error direction");
    const double ref = dot(wp, f.p1.z);
    double best = 0.0;
    for (const Vec2& v : a.ops) best = std::max(best, (ref - dot(wp, v)) / denom);
    return best;
}

namespace detail {

inline std::vector<Vec2> clip_halfplane(const std::vector<Vec2>& poly, const Vec2& w, double b) {
    std::vector<Vec2> out;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& cur = poly[i];
        const Vec2& nxt = poly[(i + 1) % n];
        const double sc = dot(w, cur) - b;
        const double sn = dot(w, nxt) - b;
        if (sc >= 0.0) out.push_back(cur);
        if ((sc > 0.0 && sn < 0.0) || (sc < 0.0 && sn > 0.0)) {
            const double t = sc / (sc - sn);
            out.push_back({cur[0] + t * (nxt[0] - cur[0]), cur[1] + t * (nxt[1] - cur[1])});
        }
    }
    std::vector<Vec2> dedup;
    for (const Vec2& v : out) {
        if (dedup.empty() || linf_dist(dedup.back(), v) > 1e-12) dedup.push_back(v);
    }
    if (dedup.size() >= 2 && linf_dist(dedup.front(), dedup.back()) <= 1e-12) dedup.pop_back();
    return dedup;
}

} // namespace detail

// Inner and outer bounds of the front within a subspace rectangle. Convex
// subspaces pair the hull polyline with the intersection of the supporting
// half planes; nonconvex subspaces swap the roles, with the inner boundary
// built from the tangent segments that are consistent with every member.
inline Approximation build_approximations(const Subspace& s) {
    if (s.members.size() < 2) throw std::invalid_argument("subspace needs at least two members");
    const double x0 = s.lo.z[0];
    const double x1 = s.hi.z[0];
    const double ytop = s.lo.z[1];
    const double ybot = s.hi.z[1];
    const auto& pts = s.members.points();

    // a support is usable inside the subspace only while it bounds every
    // member from the expected side; a tangent taken at a local feature can
    // cut other members off, and such a plane would corrupt the bound it
    // joins instead of tightening it
    auto keeps_all = [&](const ObjectivePoint& m, double dir) {
        for (const ObjectivePoint& q : pts) {
            if (dir * (dot(*m.normal, q.z) - *m.offset) < -kClassifyTol) return false;
        }
        return true;
    };

    Approximation a;
    if (s.is_convex) {
        for (const ObjectivePoint& h : lower_hull(pts)) a.ips.push_back(h.z);
        std::vector<Vec2> poly = {{x0, ybot}, {x1, ybot}, {x1, ytop}, {x0, ytop}};
        for (const ObjectivePoint& m : pts) {
            if (!m.normal || !m.offset) continue;
            if (!keeps_all(m, 1.0)) continue;
            a.planes.push_back({*m.normal, *m.offset});
            if (!poly.empty()) poly = detail::clip_halfplane(poly, *m.normal, *m.offset);
        }
        a.ops = std::move(poly);
        return a;
    }

    for (const ObjectivePoint& m : pts) {
        if (!m.normal || !m.offset) throw std::invalid_argument("member missing supporting normal");
        if (keeps_all(m, -1.0)) a.planes.push_back({*m.normal, *m.offset});
    }

    // lower envelope of the kept tangents, clamped into the rectangle
    auto env = [&](double x) {
        double y = ytop;
        for (const HalfPlane& hp : a.planes) {
            if (hp.w[1] <= 1e-12) continue;
            y = std::min(y, (hp.b - hp.w[0] * x) / hp.w[1]);
        }
        return std::max(y, ybot);
    };
    std::vector<double> xs = {x0, x1};
    for (std::size_t i = 0; i < a.planes.size(); ++i) {
        const HalfPlane& hi = a.planes[i];
        if (hi.w[1] > 1e-12) {
            for (double level : {ytop, ybot}) {
                if (std::abs(hi.w[0]) > 1e-12) {
                    const double x = (hi.b - hi.w[1] * level) / hi.w[0];
                    if (x > x0 && x < x1) xs.push_back(x);
                }
            }
        }
        for (std::size_t j = i + 1; j < a.planes.size(); ++j) {
            const HalfPlane& hj = a.planes[j];
            const double det = hi.w[0] * hj.w[1] - hj.w[0] * hi.w[1];
            if (std::abs(det) <= 1e-15) continue;
            const double x = (hi.b * hj.w[1] - hj.b * hi.w[1]) / det;
            if (x > x0 && x < x1) xs.push_back(x);
        }
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end(),
                         [](double u, double v) { return std::abs(u - v) <= 1e-12; }),
             xs.end());
    for (double x : xs) {
        const Vec2 v = {x, env(x)};
        while (a.ips.size() >= 2) {
            const Vec2 u = sub(a.ips[a.ips.size() - 1], a.ips[a.ips.size() - 2]);
            const Vec2 t = sub(v, a.ips[a.ips.size() - 2]);
            if (std::abs(u[0] * t[1] - u[1] * t[0]) <= 1e-12) {
                a.ips.pop_back();
            } else {
                break;
            }
        }
        a.ips.push_back(v);
    }

    for (const ObjectivePoint& h : lower_hull(pts)) a.ops.push_back(h.z);
    return a;
}

// Convexity driven split around the tangent of a newly found point. A
// consistent subspace absorbs the point; otherwise the member sequence is
// cut into maximal same side runs that share their boundary members, cut at
// on line members whenever one is available.
inline std::vector<Subspace> decompose(const Subspace& s, const ObjectivePoint& zstar,
                                       double tol = kClassifyTol) {
    if (!zstar.normal || !zstar.offset) throw std::invalid_argument("missing supporting normal");
    const double x0 = s.lo.z[0];
    const double x1 = s.hi.z[0];
    const double ytop = s.lo.z[1];
    const double ybot = s.hi.z[1];
    if (zstar.z[0] < x0 - 1e-9 || zstar.z[0] > x1 + 1e-9 || zstar.z[1] < ybot - 1e-9 ||
        zstar.z[1] > ytop + 1e-9) {
        throw std::invalid_argument("point outside subspace");
    }

    ParetoArchive merged = s.members;
    merged.insert(zstar);
    const auto& pts = merged.points();
    const Vec2 w = *zstar.normal;
    const double b = *zstar.offset;

    bool any_above = false;
    bool any_below = false;
    std::vector<int> sign(pts.size(), 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const PlaneSide side = halfplane_side(pts[i].z, w, b, tol);
        if (side == PlaneSide::Above) {
            sign[i] = 1;
            any_above = true;
        } else if (side == PlaneSide::Below) {
            sign[i] = -1;
            any_below = true;
        }
    }

    auto build = [&](std::size_t from, std::size_t to, int flag) {
        Subspace out;
        out.lo = pts[from];
        out.hi = pts[to];
        out.is_convex = flag > 0 ? true : flag < 0 ? false : s.is_convex;
        ParetoArchive mem(s.members.dedup_tol());
        for (std::size_t k = from; k <= to; ++k) mem.insert(pts[k]);
        out.members = std::move(mem);
        out.facets = adjacent_facets(out.members);
        return out;
    };

    if (s.is_convex && !any_below) return {build(0, pts.size() - 1, 1)};
    if (!s.is_convex && !any_above) return {build(0, pts.size() - 1, -1)};

    std::vector<Subspace> out;
    std::size_t start = 0;
    std::size_t last_strict = 0;
    int cur = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (sign[i] == 0) continue;
        if (cur == 0) {
            cur = sign[i];
            last_strict = i;
            continue;
        }
        if (sign[i] == cur) {
            last_strict = i;
            continue;
        }
        std::size_t cut = last_strict;
        for (std::size_t j = i; j-- > last_strict + 1;) {
            if (sign[j] == 0) {
                cut = j;
                break;
            }
        }
        if (cut > start) out.push_back(build(start, cut, cur));
        start = cut;
        cur = sign[i];
        last_strict = i;
    }
    if (pts.size() - 1 > start) out.push_back(build(start, pts.size() - 1, cur));
    return out;
}

} // namespace sdnbi

#pragma once

// The three front approximation engines behind a shared result shape:
// sandwich refinement over the global lower hull, a fixed frame boundary
// intersection scan, and the hybrid walk that decomposes objective space by
// convexity and certifies fathomed facets as empty intervals.

#include <sdnbi/core.hpp>
#include <sdnbi/geometry.hpp>
#include <sdnbi/problems.hpp>
#include <sdnbi/scalarize.hpp>
#include <sdnbi/subsolver.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iterator>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sdnbi {

inline constexpr double kErrorTie = 1e-12;  // facet errors closer than this count as equal
inline constexpr double kCertPad = 1e-5;    // inward padding on certified interval endpoints

enum class Algorithm { Sd, Mnbi, Sdnbi };

inline Algorithm algorithm_from_name(const std::string& name) {
    if (name == "sd") return Algorithm::Sd;
    if (name == "mnbi") return Algorithm::Mnbi;
    if (name == "sdnbi") return Algorithm::Sdnbi;
    throw std::invalid_argument("unknown algorithm: " + name);
}

inline std::string algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::Sd:
            return "sd";
        case Algorithm::Mnbi:
            return "mnbi";
        default:
            return "sdnbi";
    }
}

struct EngineConfig {
    Algorithm algorithm = Algorithm::Sdnbi;
    double epsilon = 1e-3;
    int max_iters = 50;
    int n_beta = 10;      // grid size of the boundary intersection scan
    SolverConfig solver;  // the seed field is replaced per solve
    std::uint64_t seed = 7;
};

// One ledger row per iteration. The first two iterations are always the two
// anchor solves. elapsed covers subproblem solver time only.
struct IterationRecord {
    int iter = 0;
    std::optional<ObjectivePoint> new_point;
    std::string event;
    double d_max = 0.0;
    double elapsed = 0.0;
    std::size_t archive_size = 0;
};

// Normalized f1 range certified to contain no front points.
struct FathomedInterval {
    double lo = 0.0;
    double hi = 0.0;
    int iter = 0;
};

struct EngineResult {
    ParetoArchive archive{1e-6};
    std::vector<IterationRecord> iterations;
    std::vector<FathomedInterval> fathomed;
    ObjectiveBounds bounds;
    std::string termination;  // "tolerance", "exhausted", or "max-iters"
};

// Called with the subspace list and freshly rebuilt approximations after the
// anchor iteration and at the end of every later pass, terminal ones
// included.
using SdnbiObserver =
    std::function<void(int, const std::vector<Subspace>&, const std::vector<Approximation>&)>;

namespace detail {

inline constexpr std::size_t kNoIndex = std::numeric_limits<std::size_t>::max();

class SolveTimer {
public:
    explicit SolveTimer(double& acc) : acc_(acc), t0_(std::chrono::steady_clock::now()) {}
    ~SolveTimer() {
        acc_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }
    SolveTimer(const SolveTimer&) = delete;
    SolveTimer& operator=(const SolveTimer&) = delete;

private:
    double& acc_;
    std::chrono::steady_clock::time_point t0_;
};

inline void check_engine_config(const EngineConfig& c, Algorithm expected) {
    if (c.algorithm != expected) {
        throw std::invalid_argument("config names a different algorithm");
    }
    if (!(c.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (c.max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
}

inline SolverConfig seeded(const EngineConfig& c, std::uint64_t& counter) {
    SolverConfig s = c.solver;
    s.seed = mix64(c.seed, counter++);
    return s;
}

using FacetKey = std::pair<double, double>;

inline FacetKey facet_key(const ObjectivePoint& p1, const ObjectivePoint& p2) {
    return {p1.z[0], p2.z[0]};
}

// Selection order: largest error, then largest unresolved width, then the
// leftmost facet.
inline bool facet_before(const Facet& a, const Facet& b) {
    if (std::abs(a.error - b.error) > kErrorTie) return a.error > b.error;
    const double wa = a.p2.z[0] - a.p1.z[0];
    const double wb = b.p2.z[0] - b.p1.z[0];
    if (std::abs(wa - wb) > kErrorTie) return wa > wb;
    return a.p1.z[0] < b.p1.z[0];
}

// True when the endpoint tangents of the facet disagree about each other:
// one places its partner strictly outside while the other places its
// partner strictly inside. No common side exists there, so neither bound
// construction is valid across the pair.
inline bool facet_supports_conflict(const Facet& f) {
    bool above = false;
    bool below = false;
    auto tally = [&](const ObjectivePoint& from, const ObjectivePoint& to) {
        if (!from.normal || !from.offset) return;
        const double c = dot(*from.normal, to.z) - *from.offset;
        if (c > kClassifyTol) above = true;
        if (c < -kClassifyTol) below = true;
    };
    tally(f.p1, f.p2);
    tally(f.p2, f.p1);
    return above && below;
}

// Per facet gap between the two approximation boundaries of the owning
// subspace, in units of the error direction. Convex subspaces score the
// deepest outer vertex below the facet chord; concave subspaces score the
// height of the tangent envelope above the facet chord. A facet whose own
// endpoint supports conflict spans a stretch where only the dominance box
// bounds the front, so it scores the chord to corner depth of that box and
// stays on top of the queue until a probe settles it.
inline double sandwich_gap(const Facet& f, const Approximation& a, bool convex,
                           const Vec2& eps_d) {
    const Vec2 wp = {-f.nbar[0], -f.nbar[1]};
    const double denom = dot(wp, eps_d);
    if (!(denom > 0.0)) throw std::invalid_argument("invalid error direction");
    if (facet_supports_conflict(f)) {
        const double d1 = f.p2.z[0] - f.p1.z[0];
        const double d2 = f.p1.z[1] - f.p2.z[1];
        return d1 * d2 / (std::hypot(d1, d2) * denom);
    }
    if (convex) return facet_error(f, a, eps_d);
    if (a.ips.size() < 2) throw std::invalid_argument("degenerate approximation");
    const double x1 = f.p1.z[0];
    const double x2 = f.p2.z[0];
    const double ref = dot(wp, f.p1.z);
    auto at = [&](const std::vector<Vec2>& chain, double x) -> Vec2 {
        if (x <= chain.front()[0]) return chain.front();
        if (x >= chain.back()[0]) return chain.back();
        for (std::size_t i = 1; i < chain.size(); ++i) {
            if (x > chain[i][0]) continue;
            const Vec2& u = chain[i - 1];
            const Vec2& v = chain[i];
            const double span = v[0] - u[0];
            if (span <= 1e-15) return v;
            const double t = (x - u[0]) / span;
            return {u[0] + t * (v[0] - u[0]), u[1] + t * (v[1] - u[1])};
        }
        return chain.back();
    };
    double best = 0.0;
    auto probe = [&](double x) {
        best = std::max(best, (dot(wp, at(a.ips, x)) - ref) / denom);
    };
    probe(x1);
    probe(x2);
    for (const Vec2& v : a.ips) {
        if (v[0] > x1 && v[0] < x2) probe(v[0]);
    }
    return best;
}

inline std::size_t match_index(const ParetoArchive& archive, const Vec2& z) {
    const auto& pts = archive.points();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (linf_dist(pts[i].z, z) <= archive.dedup_tol()) return i;
    }
    return kNoIndex;
}

// Supporting plane for a fresh boundary point: KKT multipliers of the wedge
// constraints when the subproblem was smooth, the tight wedge side otherwise.
inline void attach_support(const ProblemSpec& spec, const MnbiParams& params,
                           const MnbiOutcome& out, ObjectivePoint& p) {
    if (spec.n2 == 0) {
        try {
            p.set_support(supporting_normal(out.solver, p.z).w);
            return;
        } catch (const std::runtime_error&) {
        }
    }
    p.set_support(fallback_normal(params, p.z).w);
}

// A subproblem is identified by its reference point, normal, and bound; the
// walk never poses the same one twice.
using SubproblemKey = std::array<double, 6>;

inline SubproblemKey subproblem_key(const MnbiParams& params) {
    const Vec2 ref = reference_point(params);
    SubproblemKey k{ref[0], ref[1], params.nbar[0], params.nbar[1], 0.0, 0.0};
    if (params.extra_bound) {
        k[4] = params.extra_bound->side == ExtraBound::Side::A ? 1.0 : 2.0;
        k[5] = params.extra_bound->value;
    }
    return k;
}

// Solves both endpoints of the front and normalizes so they map to (0,1) and
// (1,0), recording them as iterations 1 and 2.
inline void solve_anchors(const ProblemSpec& spec, const EngineConfig& config,
                          std::uint64_t& counter, double anchor_dmax,
                          std::vector<IterationRecord>& records, ParetoArchive& archive,
                          ObjectiveBounds& bounds) {
    std::array<ObjectivePoint, 2> anchor;
    std::array<double, 2> elapsed{0.0, 0.0};
    for (int which = 0; which < 2; ++which) {
        SolveTimer timer(elapsed[static_cast<std::size_t>(which)]);
        anchor[static_cast<std::size_t>(which)] =
            solve_anchor(spec, which, seeded(config, counter));
    }
    bounds.ideal = {anchor[0].raw[0], anchor[1].raw[1]};
    bounds.nadir = {anchor[1].raw[0], anchor[0].raw[1]};
    if (!(bounds.nadir[0] > bounds.ideal[0]) || !(bounds.nadir[1] > bounds.ideal[1])) {
        throw std::runtime_error("degenerate front: anchor images coincide");
    }
    for (int which = 0; which < 2; ++which) {
        ObjectivePoint p = anchor[static_cast<std::size_t>(which)];
        p.z = normalize(p.raw, bounds);
        p.set_support(which == 0 ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0});
        p.iter_found = which + 1;
        records.push_back({which + 1, p, "new-point", anchor_dmax,
                           elapsed[static_cast<std::size_t>(which)], 0});
        archive.insert(std::move(p));
        records.back().archive_size = archive.size();
    }
}

// Removes pruned archive points from the subspace member lists. Fragments
// left with fewer than two members disappear; the others tighten their
// extremes to the surviving range.
inline void drop_pruned(std::vector<Subspace>& subs,
                        const std::vector<ObjectivePoint>& pruned) {
    if (pruned.empty()) return;
    for (std::size_t si = subs.size(); si-- > 0;) {
        Subspace& s = subs[si];
        ParetoArchive kept(s.members.dedup_tol());
        bool changed = false;
        for (const ObjectivePoint& m : s.members.points()) {
            bool gone = false;
            for (const ObjectivePoint& q : pruned) {
                if (m.z[0] == q.z[0] && m.z[1] == q.z[1]) {
                    gone = true;
                    break;
                }
            }
            if (gone) {
                changed = true;
            } else {
                kept.insert(m);
            }
        }
        if (!changed) continue;
        if (kept.size() < 2) {
            subs.erase(subs.begin() + static_cast<std::ptrdiff_t>(si));
        } else {
            s.members = std::move(kept);
            s.lo = s.members.points().front();
            s.hi = s.members.points().back();
        }
    }
}

inline std::size_t route_subspace(const std::vector<Subspace>& subs, double z1) {
    for (std::size_t i = 0; i < subs.size(); ++i) {
        if (z1 > subs[i].lo.z[0] && z1 < subs[i].hi.z[0]) return i;
    }
    for (std::size_t i = 0; i < subs.size(); ++i) {
        if (z1 >= subs[i].lo.z[0] - 1e-9 && z1 <= subs[i].hi.z[0] + 1e-9) return i;
    }
    return kNoIndex;
}

// Routes an inserted point into its subspace and decomposes around its
// tangent, splicing the parts back in place. Returns the part count. When
// pruning has dissolved the owning fragment, a fresh fragment is spanned
// between the archive neighbors of the point instead.
inline std::size_t place_point(std::vector<Subspace>& subs, const ParetoArchive& archive,
                               const ObjectivePoint& p) {
    const std::size_t at = route_subspace(subs, p.z[0]);
    if (at == kNoIndex) {
        const auto& pts = archive.points();
        std::size_t ip = kNoIndex;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (pts[i].z[0] == p.z[0] && pts[i].z[1] == p.z[1]) {
                ip = i;
                break;
            }
        }
        if (ip == kNoIndex || ip == 0 || ip + 1 == pts.size()) return 1;
        Subspace s;
        s.lo = pts[ip - 1];
        s.hi = pts[ip + 1];
        s.is_convex = true;
        s.members.insert(pts[ip - 1]);
        s.members.insert(pts[ip]);
        s.members.insert(pts[ip + 1]);
        const auto pos = std::lower_bound(
            subs.begin(), subs.end(), s.lo.z[0],
            [](const Subspace& a, double v) { return a.lo.z[0] < v; });
        subs.insert(pos, std::move(s));
        return 1;
    }
    std::vector<Subspace> parts = decompose(subs[at], p);
    const std::size_t n = parts.size();
    subs.erase(subs.begin() + static_cast<std::ptrdiff_t>(at));
    subs.insert(subs.begin() + static_cast<std::ptrdiff_t>(at),
                std::make_move_iterator(parts.begin()), std::make_move_iterator(parts.end()));
    return n;
}

} // namespace detail

// Sandwich walk: refine the facet of the global lower hull with the largest
// gap to the outer approximation by a weighted sum solve along its normal;
// facets whose solve lands on an archived point are closed.
inline EngineResult run_sd(const ProblemSpec& spec, const EngineConfig& config) {
    detail::check_engine_config(config, Algorithm::Sd);
    EngineResult out;
    std::uint64_t counter = 0;
    detail::solve_anchors(spec, config, counter, std::numeric_limits<double>::infinity(),
                          out.iterations, out.archive, out.bounds);
    std::set<detail::FacetKey> closed;
    const Vec2 eps_d{1.0, 1.0};

    for (int iter = 3;; ++iter) {
        if (iter > config.max_iters) {
            out.termination = "max-iters";
            break;
        }

        Subspace global;
        global.lo = out.archive.points().front();
        global.hi = out.archive.points().back();
        for (const ObjectivePoint& p : out.archive.points()) global.members.insert(p);
        const Approximation approx = build_approximations(global);

        const std::vector<ObjectivePoint> hull = lower_hull(out.archive.points());
        std::vector<Facet> facets;
        for (std::size_t i = 1; i < hull.size(); ++i) {
            Facet f = make_facet(hull[i - 1], hull[i]);
            f.open = closed.count(detail::facet_key(f.p1, f.p2)) == 0;
            if (f.open) f.error = facet_error(f, approx, eps_d);
            facets.push_back(std::move(f));
        }
        const Facet* best = nullptr;
        for (const Facet& f : facets) {
            if (!f.open) continue;
            if (!best || detail::facet_before(f, *best)) best = &f;
        }
        if (!best) {
            out.iterations.push_back(
                {iter, {}, "terminated-empty", 0.0, 0.0, out.archive.size()});
            out.termination = "exhausted";
            break;
        }
        if (best->error < config.epsilon) {
            out.iterations.push_back(
                {iter, {}, "terminated-tol", best->error, 0.0, out.archive.size()});
            out.termination = "tolerance";
            break;
        }

        const double a = std::abs(best->nbar[0]);
        const double b = std::abs(best->nbar[1]);
        const Vec2 w{a / (a + b), b / (a + b)};
        IterationRecord rec{iter, {}, "repeat", best->error, 0.0, 0};
        double elapsed = 0.0;
        ObjectivePoint p;
        bool feasible = true;
        {
            detail::SolveTimer timer(elapsed);
            try {
                p = solve_weighted_sum(spec, out.bounds, w, detail::seeded(config, counter));
            } catch (const std::runtime_error&) {
                feasible = false;
            }
        }
        if (feasible && detail::match_index(out.archive, p.z) == detail::kNoIndex) {
            p.iter_found = iter;
            ObjectivePoint found = p;
            if (out.archive.insert(std::move(p)).outcome == InsertOutcome::InsertedNew) {
                rec.event = "new-point";
                rec.new_point = std::move(found);
            }
        }
        if (rec.event == "repeat") closed.insert(detail::facet_key(best->p1, best->p2));
        rec.elapsed = elapsed;
        rec.archive_size = out.archive.size();
        out.iterations.push_back(std::move(rec));
    }
    return out;
}

// Boundary intersection scan in the fixed anchor frame: the interior grid of
// beta values in ascending order, then bisection of the widest used gap,
// for exactly the configured number of iterations. Repeats are recorded but
// nothing is fathomed.
inline EngineResult run_mnbi(const ProblemSpec& spec, const EngineConfig& config) {
    detail::check_engine_config(config, Algorithm::Mnbi);
    if (config.n_beta < 2) throw std::invalid_argument("n_beta must be at least 2");
    EngineResult out;
    std::uint64_t counter = 0;
    detail::solve_anchors(spec, config, counter, 0.0, out.iterations, out.archive, out.bounds);
    out.termination = "max-iters";

    const MnbiParams frame =
        facet_params(out.archive.points().front(), out.archive.points().back());
    std::vector<double> used = {0.0, 1.0};  // the anchors occupy the frame corners
    std::vector<double> queue;
    const double delta = 1.0 / (config.n_beta - 1);
    for (int k = 1; k + 1 < config.n_beta; ++k) queue.push_back(k * delta);
    std::size_t next = 0;

    for (int iter = 3; iter <= config.max_iters; ++iter) {
        double b2 = 0.0;
        if (next < queue.size()) {
            b2 = queue[next++];
        } else {
            double width = used[1] - used[0];
            std::size_t at = 0;
            for (std::size_t i = 2; i < used.size(); ++i) {
                if (used[i] - used[i - 1] > width) {
                    width = used[i] - used[i - 1];
                    at = i - 1;
                }
            }
            b2 = used[at] + width / 2.0;
        }
        MnbiParams params = frame;
        params.beta = {1.0 - b2, b2};

        IterationRecord rec{iter, {}, "repeat", 0.0, 0.0, 0};
        double elapsed = 0.0;
        MnbiOutcome sol;
        {
            detail::SolveTimer timer(elapsed);
            sol = solve_mnbi(spec, out.bounds, params, detail::seeded(config, counter),
                             out.archive);
        }
        if (sol.status == MnbiStatus::NewPoint) {
            ObjectivePoint p = sol.point;
            detail::attach_support(spec, params, sol, p);
            p.iter_found = iter;
            ObjectivePoint found = p;
            if (out.archive.insert(std::move(p)).outcome == InsertOutcome::InsertedNew) {
                rec.event = "new-point";
                rec.new_point = std::move(found);
            }
        }
        used.insert(std::upper_bound(used.begin(), used.end(), b2), b2);
        rec.elapsed = elapsed;
        rec.archive_size = out.archive.size();
        out.iterations.push_back(std::move(rec));
    }
    return out;
}

// Hybrid walk: solve the midpoint boundary intersection subproblem of the
// open facet whose subspace approximations leave the largest gap; integer
// lattice problems rank open facets by unresolved f1 span instead, which
// drives every span below the dedup width. New points split their subspace
// by convexity around the supporting tangent, repeats trigger a fathoming
// probe on the repeated side that either finds a point beyond the exclusion
// bound or certifies the facet interior empty.
inline EngineResult run_sdnbi(const ProblemSpec& spec, const EngineConfig& config,
                              const SdnbiObserver& observer = {}) {
    detail::check_engine_config(config, Algorithm::Sdnbi);
    EngineResult out;
    std::uint64_t counter = 0;
    detail::solve_anchors(spec, config, counter, std::numeric_limits<double>::infinity(),
                          out.iterations, out.archive, out.bounds);

    std::vector<Subspace> subs(1);
    subs[0].lo = out.archive.points().front();
    subs[0].hi = out.archive.points().back();
    for (const ObjectivePoint& p : out.archive.points()) subs[0].members.insert(p);

    std::set<detail::FacetKey> closed;
    std::set<detail::SubproblemKey> solved;
    const Vec2 eps_d{1.0, 1.0};
    const bool lattice = spec.n2 > 0;

    auto notify = [&](int iter) {
        std::vector<Approximation> apps;
        apps.reserve(subs.size());
        for (const Subspace& s : subs) apps.push_back(build_approximations(s));
        if (observer) observer(iter, subs, apps);
    };
    notify(2);

    for (int iter = 3;; ++iter) {
        if (iter > config.max_iters) {
            out.termination = "max-iters";
            break;
        }

        for (Subspace& s : subs) {
            s.facets = adjacent_facets(s.members);
            std::optional<Approximation> app;
            for (Facet& f : s.facets) {
                f.open = closed.count(detail::facet_key(f.p1, f.p2)) == 0;
                if (!f.open) {
                    f.error = 0.0;
                } else if (lattice) {
                    f.error = f.p2.z[0] - f.p1.z[0];
                } else {
                    if (!app) app = build_approximations(s);
                    f.error = detail::sandwich_gap(f, *app, s.is_convex, eps_d);
                }
            }
        }
        const Facet* best = nullptr;
        for (const Subspace& s : subs) {
            for (const Facet& f : s.facets) {
                if (!f.open) continue;
                if (!best || detail::facet_before(f, *best)) best = &f;
            }
        }
        if (!best) {
            out.iterations.push_back(
                {iter, {}, "terminated-empty", 0.0, 0.0, out.archive.size()});
            out.termination = "exhausted";
            notify(iter);
            break;
        }
        if (best->error < config.epsilon) {
            out.iterations.push_back(
                {iter, {}, "terminated-tol", best->error, 0.0, out.archive.size()});
            out.termination = "tolerance";
            notify(iter);
            break;
        }

        const ObjectivePoint p1 = best->p1;
        const ObjectivePoint p2 = best->p2;
        IterationRecord rec{iter, {}, "repeat", best->error, 0.0, 0};
        double elapsed = 0.0;
        auto close_whole = [&] { closed.insert(detail::facet_key(p1, p2)); };

        const MnbiParams direct = facet_params(p1, p2);
        std::optional<ObjectivePoint> repeat_at;
        bool handled = false;
        if (!solved.insert(detail::subproblem_key(direct)).second) {
            close_whole();
            handled = true;
        } else {
            MnbiOutcome sol;
            {
                detail::SolveTimer timer(elapsed);
                sol = solve_mnbi(spec, out.bounds, direct, detail::seeded(config, counter),
                                 out.archive);
            }
            if (sol.status == MnbiStatus::Infeasible) {
                close_whole();
                handled = true;
            } else if (sol.status == MnbiStatus::NewPoint) {
                ObjectivePoint p = sol.point;
                detail::attach_support(spec, direct, sol, p);
                p.iter_found = iter;
                const InsertResult ins = out.archive.insert(p);
                if (ins.outcome == InsertOutcome::InsertedNew) {
                    detail::drop_pruned(subs, ins.pruned);
                    const std::size_t parts = detail::place_point(subs, out.archive, p);
                    rec.new_point = std::move(p);
                    rec.event =
                        parts > 1 ? "decompose(" + std::to_string(parts) + ")" : "new-point";
                    handled = true;
                } else {
                    repeat_at = out.archive.points()[ins.existing_index];
                }
            } else {
                const std::size_t j = detail::match_index(out.archive, sol.point.z);
                repeat_at = j == detail::kNoIndex ? p1 : out.archive.points()[j];
            }
        }

        if (!handled) {
            // probe the side of the repeated endpoint behind an exclusion
            // bound on f1; a second repeat certifies the span between the
            // solved points empty
            const bool side_a = linf_dist(repeat_at->z, p1.z) <= out.archive.dedup_tol()
                                    ? true
                                    : (linf_dist(repeat_at->z, p2.z) <= out.archive.dedup_tol()
                                           ? false
                                           : repeat_at->z[0] <= p1.z[0]);
            if (p2.z[0] - p1.z[0] <= kEpsilonZ) {
                close_whole();  // too narrow to place the bound
            } else {
                MnbiParams probe = facet_params(p1, p2);
                ExtraBound eb;
                eb.side = side_a ? ExtraBound::Side::A : ExtraBound::Side::B;
                eb.value = side_a ? p1.z[0] + kEpsilonZ : p2.z[0] - kEpsilonZ;
                probe.extra_bound = eb;
                if (!solved.insert(detail::subproblem_key(probe)).second) {
                    close_whole();
                } else {
                    MnbiOutcome fsol;
                    {
                        detail::SolveTimer timer(elapsed);
                        fsol = solve_mnbi_fathom(spec, out.bounds, probe,
                                                 detail::seeded(config, counter), out.archive);
                    }
                    rec.event = "fathom-facet";
                    if (std::getenv("SDNBI_TRACE")) {
                        std::fprintf(stderr,
                                     "probe iter=%d side=%c span=[%.4f,%.4f] status=%d "
                                     "z=(%.4f,%.4f)\n",
                                     iter, side_a ? 'A' : 'B', p1.z[0], p2.z[0],
                                     static_cast<int>(fsol.status), fsol.point.z[0],
                                     fsol.point.z[1]);
                    }
                    if (fsol.status == MnbiStatus::Infeasible) {
                        close_whole();
                    } else if (fsol.status == MnbiStatus::RepeatPoint) {
                        const std::size_t j = detail::match_index(out.archive, fsol.point.z);
                        const double zr =
                            j == detail::kNoIndex ? fsol.point.z[0] : out.archive.points()[j].z[0];
                        double lo = 0.0;
                        double hi = 0.0;
                        if (side_a) {
                            lo = p1.z[0] + kEpsilonZ;
                            hi = std::min(zr - kCertPad, p2.z[0]);
                        } else {
                            lo = std::max(zr + kCertPad, p1.z[0]);
                            hi = p2.z[0] - kEpsilonZ;
                        }
                        if (lo < hi) out.fathomed.push_back({lo, hi, iter});
                        close_whole();
                    } else {
                        ObjectivePoint p = fsol.point;
                        detail::attach_support(spec, probe, fsol, p);
                        p.iter_found = iter;
                        const InsertResult ins = out.archive.insert(p);
                        if (ins.outcome == InsertOutcome::InsertedNew) {
                            detail::drop_pruned(subs, ins.pruned);
                            detail::place_point(subs, out.archive, p);
                            if (p.z[0] > p1.z[0] && p.z[0] < p2.z[0]) {
                                // only the stretch between the repeat side and
                                // the new point is resolved
                                closed.insert(side_a
                                                  ? detail::FacetKey{p1.z[0], p.z[0]}
                                                  : detail::FacetKey{p.z[0], p2.z[0]});
                            } else {
                                // the bounded probe went past the far end, so
                                // any boundary point inside the span would
                                // have beaten it; the whole interior is
                                // certified empty
                                if (side_a ? p.z[0] >= p2.z[0] : p.z[0] <= p1.z[0]) {
                                    const double lo =
                                        side_a ? p1.z[0] + kEpsilonZ : p1.z[0] + kCertPad;
                                    const double hi =
                                        side_a ? p2.z[0] - kCertPad : p2.z[0] - kEpsilonZ;
                                    if (lo < hi) out.fathomed.push_back({lo, hi, iter});
                                }
                                close_whole();
                            }
                            rec.new_point = std::move(p);
                        } else {
                            close_whole();
                        }
                    }
                }
            }
        }

        rec.elapsed = elapsed;
        rec.archive_size = out.archive.size();
        out.iterations.push_back(std::move(rec));
        notify(iter);
    }
    return out;
}

inline EngineResult run_engine(const ProblemSpec& spec, const EngineConfig& config,
                               const SdnbiObserver& observer = {}) {
    switch (config.algorithm) {
        case Algorithm::Sd:
            return run_sd(spec, config);
        case Algorithm::Mnbi:
            return run_mnbi(spec, config);
        default:
            return run_sdnbi(spec, config, observer);
    }
}

} // namespace sdnbi

#pragma once

// Scalarized subproblems shared by the approximation engines: the boundary
// intersection subproblem posed over a facet frame, fathoming variants that
// add a bound on the first objective, supporting normal recovery from the
// KKT multipliers, and plain weighted sum and anchor solves.

#include <sdnbi/core.hpp>
#include <sdnbi/problems.hpp>
#include <sdnbi/subsolver.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sdnbi {

inline constexpr double kEpsilonZ = 1e-4;     // exclusion margin for fathoming bounds
inline constexpr double kAnchorDelta = 1e-6;  // weight kept on the off objective in anchor solves
inline constexpr double kTieBreak = 1e-7;     // nudge off flat plateaus of the intersection depth

using Mat2 = std::array<Vec2, 2>;  // columns

struct ExtraBound {
    enum class Side { A, B };  // A keeps f1 >= value, B keeps f1 <= value
    Side side = Side::A;
    double value = 0.0;
};

struct MnbiParams {
    Mat2 phi{};             // facet columns relative to the origin corner
    Vec2 beta{0.5, 0.5};
    Vec2 nbar{};            // unit facet normal, both components nonpositive
    Vec2 origin{0.0, 0.0};  // facet corner, (0,0) on the initial facet
    std::optional<ExtraBound> extra_bound;
};

struct SolverConfig {
    int n_starts = 20;
    std::uint64_t seed = 7;
    SolverTolerances tol;
};

// Frame of the facet spanned by two archive points sorted by first
// coordinate. The origin sits at the corner under the facet so both columns
// of phi have a zero diagonal entry, and the normal points down and left.
inline MnbiParams facet_params(const ObjectivePoint& p1, const ObjectivePoint& p2,
                               const Vec2& beta = {0.5, 0.5}) {
    if (!(p1.z[0] < p2.z[0])) throw std::invalid_argument("facet endpoints not ordered");
    const double d1 = p2.z[0] - p1.z[0];
    const double d2 = p1.z[1] - p2.z[1];
    const double len = std::hypot(d2, d1);
    if (!(d2 > 0.0) || !(len > 1e-15)) throw std::invalid_argument("degenerate facet");
    MnbiParams p;
    p.origin = {p1.z[0], p2.z[1]};
    p.phi[0] = {0.0, d2};
    p.phi[1] = {d1, 0.0};
    p.beta = beta;
    p.nbar = {-d2 / len, -d1 / len};
    return p;
}

inline Vec2 reference_point(const MnbiParams& p) {
    return {p.origin[0] + p.beta[0] * p.phi[0][0] + p.beta[1] * p.phi[1][0],
            p.origin[1] + p.beta[0] * p.phi[0][1] + p.beta[1] * p.phi[1][1]};
}

// Depth along the facet normal at which the wedge anchored at the reference
// point first touches f, the componentwise minimum of the two ratios.
inline double t_of_x(const MnbiParams& p, const Vec2& f) {
    const Vec2 ref = reference_point(p);
    double t = std::numeric_limits<double>::infinity();
    for (int j = 0; j < 2; ++j) {
        if (std::abs(p.nbar[j]) <= 1e-12) throw std::invalid_argument("degenerate normal");
        t = std::min(t, (f[j] - ref[j]) / p.nbar[j]);
    }
    return t;
}

enum class MnbiStatus { NewPoint, RepeatPoint, Infeasible };

struct MnbiOutcome {
    ObjectivePoint point;
    double t = 0.0;
    MnbiStatus status = MnbiStatus::Infeasible;
    SolveResult solver;
};

struct SupportData {
    Vec2 w{};
    double b = 0.0;
};

// Supporting normal of the attained objective set at z, recovered from the
// multipliers of the two wedge constraints (always listed first in the
// subproblem) and normalized to unit one norm.
inline SupportData supporting_normal(const SolveResult& result, const Vec2& z) {
    Vec2 mu{0.0, 0.0};
    for (std::size_t k = 0; k < result.active_set.size(); ++k) {
        const std::size_t idx = result.active_set[k];
        if (idx < 2 && k < result.multipliers.size()) {
            mu[idx] = std::max(0.0, result.multipliers[k]);
        }
    }
    const double total = mu[0] + mu[1];
    if (total <= 1e-12) throw std::runtime_error("vanishing multipliers");
    SupportData s;
    s.w = {mu[0] / total, mu[1] / total};
    s.b = dot(s.w, z);
    return s;
}

// Replacement normal when no multipliers are available (combinatorial
// solves): the axis of the single tight wedge component, or the rescaled
// facet normal when both components are tight.
inline SupportData fallback_normal(const MnbiParams& p, const Vec2& z, double tol = 1e-6) {
    const Vec2 ref = reference_point(p);
    const double t = t_of_x(p, z);
    const bool tight0 = std::abs(z[0] - ref[0] - t * p.nbar[0]) <= tol;
    const bool tight1 = std::abs(z[1] - ref[1] - t * p.nbar[1]) <= tol;
    SupportData s;
    if (tight0 && tight1) {
        const double a = std::abs(p.nbar[0]);
        const double b = std::abs(p.nbar[1]);
        s.w = {a / (a + b), b / (a + b)};
    } else if (tight0) {
        s.w = {1.0, 0.0};
    } else {
        s.w = {0.0, 1.0};
    }
    s.b = dot(s.w, z);
    return s;
}

namespace detail {

inline MnbiOutcome finish_mnbi(const ProblemSpec& spec, const ObjectiveBounds& bounds,
                               const MnbiParams& params, const ParetoArchive& archive,
                               SolveResult res, const DecisionVector& x) {
    MnbiOutcome out;
    out.solver = std::move(res);
    if (!out.solver.feasible) return out;
    const Evaluation ev = evaluate(spec, x);
    out.point.raw = ev.f;
    out.point.z = normalize(ev.f, bounds);
    out.point.decision = x;
    out.t = t_of_x(params, out.point.z);
    out.status = MnbiStatus::NewPoint;
    for (const ObjectivePoint& q : archive.points()) {
        if (linf_dist(q.z, out.point.z) <= archive.dedup_tol()) {
            out.status = MnbiStatus::RepeatPoint;
            break;
        }
    }
    return out;
}

inline MnbiOutcome solve_mnbi_impl(const ProblemSpec& spec, const ObjectiveBounds& bounds,
                                   const MnbiParams& params, const SolverConfig& cfg,
                                   const ParetoArchive& archive) {
    if (spec.n1 > 0 && spec.n2 > 0) {
        throw std::invalid_argument("mixed variable problems not supported");
    }
    const Vec2 ref = reference_point(params);
    const Vec2 range = {bounds.nadir[0] - bounds.ideal[0], bounds.nadir[1] - bounds.ideal[1]};
    if (!(range[0] > 0.0) || !(range[1] > 0.0)) {
        throw std::invalid_argument("degenerate objective range");
    }

    auto fhat = [&](int j, const DecisionVector& x) {
        const double raw = (j == 0) ? spec.f1(x) : spec.f2(x);
        return (raw - bounds.ideal[static_cast<std::size_t>(j)]) /
               range[static_cast<std::size_t>(j)];
    };

    SolveRequest req;
    req.n_starts = cfg.n_starts;
    req.seed = cfg.seed;
    req.tol = cfg.tol;

    if (spec.n2 > 0) {
        // combinatorial path: eliminate the depth variable and search the
        // reduced merit, with a tie break toward nondominated representatives
        req.spec = spec;
        req.merit = [&](const DecisionVector& d) {
            const Vec2 z = {fhat(0, d), fhat(1, d)};
            return -t_of_x(params, z) + kTieBreak * (z[0] + z[1]);
        };
        for (const auto& gi : spec.constraints) req.constraints.push_back(gi);
        if (params.extra_bound) {
            const ExtraBound eb = *params.extra_bound;
            req.constraints.push_back([&, eb](const DecisionVector& d) {
                const double z1 = fhat(0, d);
                return eb.side == ExtraBound::Side::A ? eb.value - z1 : z1 - eb.value;
            });
        }
        SolveResult res = solve_integer(req);
        const DecisionVector x = res.x_best;
        return finish_mnbi(spec, bounds, params, archive, std::move(res), x);
    }

    // continuous path: lift the depth into the decision vector so the wedge
    // becomes smooth inequality constraints and multipliers are recoverable
    ProblemSpec lifted = spec;
    lifted.n1 = spec.n1 + 1;
    lifted.lower.push_back(-4.0);
    lifted.upper.push_back(4.0);
    lifted.gradients.reset();
    req.spec = lifted;

    const int nx = spec.n1;
    auto strip = [nx](const DecisionVector& d) {
        DecisionVector x;
        x.continuous.assign(d.continuous.begin(), d.continuous.begin() + nx);
        x.integer = d.integer;
        return x;
    };
    const bool has_grad = spec.gradients.has_value();
    auto fhat_grad = [&](int j, const DecisionVector& x) {
        std::vector<double> g = (j == 0) ? spec.gradients->f1(x) : spec.gradients->f2(x);
        for (double& v : g) v /= range[static_cast<std::size_t>(j)];
        return g;
    };

    req.merit = [&](const DecisionVector& d) {
        const DecisionVector x = strip(d);
        return -d.continuous.back() + kTieBreak * (fhat(0, x) + fhat(1, x));
    };
    if (has_grad) {
        req.merit_grad = [&](const DecisionVector& d) {
            const DecisionVector x = strip(d);
            const std::vector<double> g1 = fhat_grad(0, x);
            const std::vector<double> g2 = fhat_grad(1, x);
            std::vector<double> g(d.continuous.size(), 0.0);
            for (int i = 0; i < nx; ++i) {
                g[static_cast<std::size_t>(i)] =
                    kTieBreak * (g1[static_cast<std::size_t>(i)] + g2[static_cast<std::size_t>(i)]);
            }
            g.back() = -1.0;
            return g;
        };
    }

    // the two wedge constraints come first so supporting_normal can find
    // their multipliers by index
    for (int j = 0; j < 2; ++j) {
        req.constraints.push_back([&, j](const DecisionVector& d) {
            return fhat(j, strip(d)) - ref[static_cast<std::size_t>(j)] -
                   d.continuous.back() * params.nbar[static_cast<std::size_t>(j)];
        });
        if (has_grad) {
            req.constraint_grads.push_back([&, j](const DecisionVector& d) {
                const std::vector<double> gj = fhat_grad(j, strip(d));
                std::vector<double> g(d.continuous.size(), 0.0);
                for (int i = 0; i < nx; ++i) g[static_cast<std::size_t>(i)] = gj[static_cast<std::size_t>(i)];
                g.back() = -params.nbar[static_cast<std::size_t>(j)];
                return g;
            });
        }
    }
    for (std::size_t i = 0; i < spec.constraints.size(); ++i) {
        req.constraints.push_back(
            [&, i](const DecisionVector& d) { return spec.constraints[i](strip(d)); });
        if (has_grad) {
            if (i < spec.gradients->g.size()) {
                req.constraint_grads.push_back([&, i](const DecisionVector& d) {
                    std::vector<double> gi = spec.gradients->g[i](strip(d));
                    gi.resize(d.continuous.size(), 0.0);
                    return gi;
                });
            } else {
                req.constraint_grads.push_back({});
            }
        }
    }
    if (params.extra_bound) {
        const ExtraBound eb = *params.extra_bound;
        req.constraints.push_back([&, eb](const DecisionVector& d) {
            const double z1 = fhat(0, strip(d));
            return eb.side == ExtraBound::Side::A ? eb.value - z1 : z1 - eb.value;
        });
        if (has_grad) {
            req.constraint_grads.push_back([&, eb](const DecisionVector& d) {
                std::vector<double> g1 = fhat_grad(0, strip(d));
                const double sgn = eb.side == ExtraBound::Side::A ? -1.0 : 1.0;
                std::vector<double> g(d.continuous.size(), 0.0);
                for (int i = 0; i < nx; ++i) g[static_cast<std::size_t>(i)] = sgn * g1[static_cast<std::size_t>(i)];
                return g;
            });
        }
    }

    SolveResult res = solve_continuous(req);

    // a near axis normal or an extra bound can leave the depth optimal on a
    // whole plateau where the tie weight is too weak to reach the
    // nondominated representative, so re-solve with the achieved depth
    // pinned as a constraint and the tie objective at full strength, then
    // restate the winner against the original request so the wedge
    // multipliers reflect the boundary intersection merit
    if (res.feasible) {
        const double t_star = res.x_best.continuous.back();
        SolveRequest polish = req;
        polish.n_starts = 1;
        // the tie objective can milk the wedge slack for a fake gain of
        // slack over front slope, which on a shallow front clears the accept
        // threshold and drags the point off the probe line; a true plateau
        // slide keeps the tight wedge at exactly zero residual, so it
        // survives any tightening while the fake one does not
        polish.tol.feasibility_tol = 1e-8;
        polish.merit = [&](const DecisionVector& d) {
            const DecisionVector x = strip(d);
            return fhat(0, x) + fhat(1, x);
        };
        if (has_grad) {
            polish.merit_grad = [&](const DecisionVector& d) {
                const DecisionVector x = strip(d);
                const std::vector<double> g1 = fhat_grad(0, x);
                const std::vector<double> g2 = fhat_grad(1, x);
                std::vector<double> g(d.continuous.size(), 0.0);
                for (int i = 0; i < nx; ++i) {
                    g[static_cast<std::size_t>(i)] =
                        g1[static_cast<std::size_t>(i)] + g2[static_cast<std::size_t>(i)];
                }
                return g;
            };
        }
        polish.constraints.push_back(
            [t_star](const DecisionVector& d) { return t_star - d.continuous.back(); });
        if (has_grad) {
            polish.constraint_grads.push_back([](const DecisionVector& d) {
                std::vector<double> g(d.continuous.size(), 0.0);
                g.back() = -1.0;
                return g;
            });
        }
        polish.extra_starts.push_back(res.x_best);
        SolveResult polished = solve_continuous(polish);
        // depth is protected by the pin constraint, so the winner is decided
        // on the tie objective alone; the gain must clear the slack the pin
        // itself allows, or a vertex optimum would jiggle off its active set
        if (polished.feasible) {
            const double m1 = polish.merit(res.x_best);
            const double m2 = polish.merit(polished.x_best);
            if (m2 < m1 - 1e-5) {
                res.x_best = std::move(polished.x_best);
                res.merit_best = req.merit(res.x_best);
                attach_multipliers(req, res);
            }
        }
    }

    const DecisionVector x = strip(res.x_best);
    return finish_mnbi(spec, bounds, params, archive, std::move(res), x);
}

} // namespace detail

inline MnbiOutcome solve_mnbi(const ProblemSpec& spec, const ObjectiveBounds& bounds,
                              const MnbiParams& params, const SolverConfig& cfg,
                              const ParetoArchive& archive) {
    if (params.extra_bound) throw std::invalid_argument("extra bound not allowed here");
    return detail::solve_mnbi_impl(spec, bounds, params, cfg, archive);
}

inline MnbiOutcome solve_mnbi_fathom(const ProblemSpec& spec, const ObjectiveBounds& bounds,
                                     const MnbiParams& params, const SolverConfig& cfg,
                                     const ParetoArchive& archive) {
    if (!params.extra_bound) throw std::invalid_argument("extra bound required");
    return detail::solve_mnbi_impl(spec, bounds, params, cfg, archive);
}

// Minimizes the weighted normalized objectives and tags the solution with
// the weight vector as its supporting normal.
inline ObjectivePoint solve_weighted_sum(const ProblemSpec& spec, const ObjectiveBounds& bounds,
                                         const Vec2& w, const SolverConfig& cfg) {
    if (w[0] < 0.0 || w[1] < 0.0 || std::abs(w[0] + w[1] - 1.0) > 1e-9) {
        throw std::invalid_argument("invalid weight vector");
    }
    if (spec.n1 > 0 && spec.n2 > 0) {
        throw std::invalid_argument("mixed variable problems not supported");
    }
    const Vec2 range = {bounds.nadir[0] - bounds.ideal[0], bounds.nadir[1] - bounds.ideal[1]};
    if (!(range[0] > 0.0) || !(range[1] > 0.0)) {
        throw std::invalid_argument("degenerate objective range");
    }

    SolveRequest req;
    req.spec = spec;
    req.n_starts = cfg.n_starts;
    req.seed = cfg.seed;
    req.tol = cfg.tol;
    req.merit = [&](const DecisionVector& d) {
        return w[0] * (spec.f1(d) - bounds.ideal[0]) / range[0] +
               w[1] * (spec.f2(d) - bounds.ideal[1]) / range[1];
    };
    if (spec.gradients) {
        req.merit_grad = [&](const DecisionVector& d) {
            const std::vector<double> g1 = spec.gradients->f1(d);
            const std::vector<double> g2 = spec.gradients->f2(d);
            std::vector<double> g(g1.size(), 0.0);
            for (std::size_t i = 0; i < g.size(); ++i) {
                g[i] = w[0] * g1[i] / range[0] + w[1] * g2[i] / range[1];
            }
            return g;
        };
        for (const auto& gg : spec.gradients->g) req.constraint_grads.push_back(gg);
    }
    for (const auto& gi : spec.constraints) req.constraints.push_back(gi);

    const SolveResult res = (spec.n2 > 0) ? solve_integer(req) : solve_continuous(req);
    if (!res.feasible) throw std::runtime_error("weighted sum solve infeasible");

    ObjectivePoint p;
    const Evaluation ev = evaluate(spec, res.x_best);
    p.raw = ev.f;
    p.z = normalize(ev.f, bounds);
    p.decision = res.x_best;
    p.set_support(w);
    return p;
}

// Endpoint of the front in raw objective space: minimizes one objective with
// a small weight kept on the other so the solution stays nondominated. The
// normalized coordinates are left for the caller, which derives the bounds
// from the two anchor images.
inline ObjectivePoint solve_anchor(const ProblemSpec& spec, int which, const SolverConfig& cfg,
                                   double delta = kAnchorDelta) {
    if (which != 0 && which != 1) throw std::invalid_argument("anchor index out of range");
    if (spec.n1 > 0 && spec.n2 > 0) {
        throw std::invalid_argument("mixed variable problems not supported");
    }

    SolveRequest req;
    req.spec = spec;
    req.n_starts = cfg.n_starts;
    req.seed = cfg.seed;
    req.tol = cfg.tol;
    req.merit = [&, which, delta](const DecisionVector& d) {
        const double a = spec.f1(d);
        const double b = spec.f2(d);
        return which == 0 ? (1.0 - delta) * a + delta * b : (1.0 - delta) * b + delta * a;
    };
    if (spec.gradients) {
        req.merit_grad = [&, which, delta](const DecisionVector& d) {
            const std::vector<double> g1 = spec.gradients->f1(d);
            const std::vector<double> g2 = spec.gradients->f2(d);
            const double wa = which == 0 ? 1.0 - delta : delta;
            const double wb = which == 0 ? delta : 1.0 - delta;
            std::vector<double> g(g1.size(), 0.0);
            for (std::size_t i = 0; i < g.size(); ++i) g[i] = wa * g1[i] + wb * g2[i];
            return g;
        };
        for (const auto& gg : spec.gradients->g) req.constraint_grads.push_back(gg);
    }
    for (const auto& gi : spec.constraints) req.constraints.push_back(gi);

    const SolveResult res = (spec.n2 > 0) ? solve_integer(req) : solve_continuous(req);
    if (!res.feasible) throw std::runtime_error("anchor solve infeasible");

    // the tie weight is invisible next to steep primary gradients, so polish
    // the weakly determined directions with the roles reversed: a heavy
    // weight pins the achieved primary value while the off objective cleans
    // up at full strength, and the polished point is kept only when it
    // improves the original merit
    const double kPin = 1e7;
    const double v1 = which == 0 ? spec.f1(res.x_best) : spec.f2(res.x_best);
    SolveRequest polish = req;
    polish.merit = [&, which, v1, kPin](const DecisionVector& d) {
        const double a = spec.f1(d);
        const double b = spec.f2(d);
        return which == 0 ? kPin * (a - v1) + b : kPin * (b - v1) + a;
    };
    if (spec.gradients) {
        polish.merit_grad = [&, which, kPin](const DecisionVector& d) {
            const std::vector<double> g1 = spec.gradients->f1(d);
            const std::vector<double> g2 = spec.gradients->f2(d);
            const double wa = which == 0 ? kPin : 1.0;
            const double wb = which == 0 ? 1.0 : kPin;
            std::vector<double> g(g1.size(), 0.0);
            for (std::size_t i = 0; i < g.size(); ++i) g[i] = wa * g1[i] + wb * g2[i];
            return g;
        };
    }
    const SolveResult res2 = (spec.n2 > 0) ? solve_integer(polish) : solve_continuous(polish);
    const DecisionVector* pick = &res.x_best;
    if (res2.feasible) {
        const double m1 = req.merit(res.x_best);
        const double m2 = req.merit(res2.x_best);
        if (m2 < m1 - 1e-15 * (1.0 + std::abs(m1))) pick = &res2.x_best;
    }

    ObjectivePoint p;
    const Evaluation ev = evaluate(spec, *pick);
    p.raw = ev.f;
    p.z = ev.f;
    p.decision = *pick;
    return p;
}

} // namespace sdnbi

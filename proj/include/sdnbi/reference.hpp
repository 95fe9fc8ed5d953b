#pragma once

// Best known fronts used as ground truth by the comparison tooling: a dense
// sweep of boundary intersection subproblems along the anchor segment for
// the continuous problems, and an exact separable reduction for the
// combinatorial one.

#include <sdnbi/core.hpp>
#include <sdnbi/problems.hpp>
#include <sdnbi/scalarize.hpp>
#include <sdnbi/subsolver.hpp>

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace sdnbi {

struct ReferenceFront {
    ParetoArchive archive;
    ObjectiveBounds bounds;
    std::size_t n_requested = 0;
    std::size_t n_failed = 0;
};

namespace detail {

// Boundary intersection subproblem in its original equality form: the point
// of the attainable set hit at maximum depth by the ray cast from (s, 1-s)
// on the anchor segment along the diagonal normal. The depth rides along as
// an extra decision variable and the ray condition splits into paired
// inequalities.
inline SolveResult solve_nbi_beta(const ProblemSpec& spec, const ObjectiveBounds& bounds,
                                  double s, const SolverConfig& cfg,
                                  const DecisionVector* warm = nullptr) {
    const Vec2 range = {bounds.nadir[0] - bounds.ideal[0], bounds.nadir[1] - bounds.ideal[1]};
    if (!(range[0] > 0.0) || !(range[1] > 0.0)) {
        throw std::invalid_argument("degenerate objective range");
    }
    const Vec2 ref = {s, 1.0 - s};
    const double q = -1.0 / std::numbers::sqrt2;
    const Vec2 nbar = {q, q};

    auto fhat = [&](int j, const DecisionVector& x) {
        const double raw = (j == 0) ? spec.f1(x) : spec.f2(x);
        return (raw - bounds.ideal[static_cast<std::size_t>(j)]) /
               range[static_cast<std::size_t>(j)];
    };

    ProblemSpec lifted = spec;
    lifted.n1 = spec.n1 + 1;
    lifted.lower.push_back(-4.0);
    lifted.upper.push_back(4.0);
    lifted.gradients.reset();

    SolveRequest req;
    req.spec = lifted;
    req.n_starts = cfg.n_starts;
    req.seed = cfg.seed;
    req.tol = cfg.tol;
    if (warm) req.extra_starts.push_back(*warm);

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

    req.merit = [](const DecisionVector& d) { return -d.continuous.back(); };
    req.merit_grad = [](const DecisionVector& d) {
        std::vector<double> g(d.continuous.size(), 0.0);
        g.back() = -1.0;
        return g;
    };

    for (int j = 0; j < 2; ++j) {
        for (const double sgn : {1.0, -1.0}) {
            req.constraints.push_back([&, j, sgn](const DecisionVector& d) {
                return sgn * (fhat(j, strip(d)) - ref[static_cast<std::size_t>(j)] -
                              d.continuous.back() * nbar[static_cast<std::size_t>(j)]);
            });
            if (has_grad) {
                req.constraint_grads.push_back([&, j, sgn](const DecisionVector& d) {
                    const std::vector<double> gj = fhat_grad(j, strip(d));
                    std::vector<double> g(d.continuous.size(), 0.0);
                    for (int i = 0; i < nx; ++i) {
                        g[static_cast<std::size_t>(i)] = sgn * gj[static_cast<std::size_t>(i)];
                    }
                    g.back() = -sgn * nbar[static_cast<std::size_t>(j)];
                    return g;
                });
            }
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

    return solve_continuous(req);
}

} // namespace detail

inline ReferenceFront reference_front(const ProblemSpec& spec, std::size_t n_points,
                                      const SolverConfig& cfg = {}) {
    if (n_points < 2) throw std::invalid_argument("need at least two reference points");
    ReferenceFront out;
    out.n_requested = n_points;

    if (spec.n2 > 0) {
        // the tail objective is a sum of independent terms, so one exact
        // coordinate pass minimizes it for every value of the head variable
        std::vector<DecisionVector> members;
        for (int head = spec.int_lower[0]; head <= spec.int_upper[0]; ++head) {
            DecisionVector y;
            y.integer.assign(spec.int_lower.begin(), spec.int_lower.end());
            y.integer[0] = head;
            for (int i = 1; i < spec.n2; ++i) {
                int best = y.integer[static_cast<std::size_t>(i)];
                double best_f2 = spec.f2(y);
                for (int v = spec.int_lower[static_cast<std::size_t>(i)]; v <= spec.int_upper[static_cast<std::size_t>(i)]; ++v) {
                    y.integer[static_cast<std::size_t>(i)] = v;
                    const double f2 = spec.f2(y);
                    if (f2 < best_f2) {
                        best_f2 = f2;
                        best = v;
                    }
                }
                y.integer[static_cast<std::size_t>(i)] = best;
            }
            members.push_back(y);
        }

        double lo1 = std::numeric_limits<double>::infinity(), hi1 = -lo1;
        double lo2 = lo1, hi2 = -lo1;
        std::vector<Evaluation> evals;
        for (const DecisionVector& y : members) {
            const Evaluation ev = evaluate(spec, y);
            lo1 = std::min(lo1, ev.f[0]);
            hi1 = std::max(hi1, ev.f[0]);
            lo2 = std::min(lo2, ev.f[1]);
            hi2 = std::max(hi2, ev.f[1]);
            evals.push_back(ev);
        }
        out.bounds = {{lo1, lo2}, {hi1, hi2}};
        for (std::size_t i = 0; i < members.size(); ++i) {
            ObjectivePoint p;
            p.raw = evals[i].f;
            p.z = normalize(evals[i].f, out.bounds);
            p.decision = members[i];
            p.iter_found = static_cast<int>(i);
            out.archive.insert(p);
        }
        return out;
    }

    const ObjectivePoint a0 = solve_anchor(spec, 0, cfg);
    const ObjectivePoint a1 = solve_anchor(spec, 1, cfg);
    out.bounds.ideal = {a0.raw[0], a1.raw[1]};
    out.bounds.nadir = {a1.raw[0], a0.raw[1]};

    // Rays grazing nonsmooth vertices of the attainable boundary stall the
    // subsolver just short of the ray, but the terminal decision is still an
    // attainable point whose image lies on the boundary. The sweep therefore
    // keeps every outcome that satisfies the problem constraints and lets
    // dominance filtering in the archive discard the bad rays; only
    // constraint violating outcomes count as failures. Each ray also warm
    // starts from its predecessor so slack decision directions stay clean
    // across the sweep.
    DecisionVector warm;
    bool have_warm = false;
    for (std::size_t k = 0; k < n_points; ++k) {
        const double s = static_cast<double>(k) / static_cast<double>(n_points - 1);
        const SolveResult res = detail::solve_nbi_beta(spec, out.bounds, s, cfg,
                                                       have_warm ? &warm : nullptr);
        warm = res.x_best;
        have_warm = true;
        DecisionVector x;
        x.continuous.assign(res.x_best.continuous.begin(),
                            res.x_best.continuous.end() - 1);
        x.integer = res.x_best.integer;
        const Evaluation ev = evaluate(spec, x);
        double gmax = 0.0;
        for (double g : ev.g) gmax = std::max(gmax, g);
        if (gmax > 1e-5) {
            ++out.n_failed;
            continue;
        }
        ObjectivePoint p;
        p.raw = ev.f;
        p.z = normalize(ev.f, out.bounds);
        p.decision = x;
        p.iter_found = static_cast<int>(k);
        out.archive.insert(p);
    }
    return out;
}

} // namespace sdnbi

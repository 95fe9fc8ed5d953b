#pragma once

// Single objective subproblem solvers behind one contract: a Sobol seeded
// multistart local NLP solver for continuous problems (quadratic penalty
// continuation over a projected gradient descent) and a multistart integer
// coordinate search for combinatorial problems.

#include <sdnbi/core.hpp>
#include <sdnbi/problems.hpp>
#include <sdnbi/sobol_table.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace sdnbi {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ splitmix64(b + 0x9e3779b97f4a7c15ULL));
}

// nonnegative least squares, active set method of Lawson and Hanson
inline std::vector<double> nnls(const std::vector<std::vector<double>>& A,
                                const std::vector<double>& b) {
    const std::size_t m = A.size();
    const std::size_t n = m == 0 ? 0 : A[0].size();
    std::vector<double> x(n, 0.0);
    if (m == 0 || n == 0) return x;

    std::vector<bool> passive(n, false);

    auto ls_passive = [&]() {
        std::vector<std::size_t> idx;
        for (std::size_t j = 0; j < n; ++j) {
            if (passive[j]) idx.push_back(j);
        }
        const std::size_t k = idx.size();
        std::vector<double> z(n, 0.0);
        if (k == 0) return z;
        // normal equations on the passive columns with a tiny ridge
        std::vector<std::vector<double>> G(k, std::vector<double>(k + 1, 0.0));
        double trace = 0.0;
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t c = a; c < k; ++c) {
                double s = 0.0;
                for (std::size_t i = 0; i < m; ++i) s += A[i][idx[a]] * A[i][idx[c]];
                G[a][c] = s;
                G[c][a] = s;
            }
            trace += G[a][a];
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) s += A[i][idx[a]] * b[i];
            G[a][k] = s;
        }
        const double ridge = 1e-13 * (trace + 1.0);
        for (std::size_t a = 0; a < k; ++a) G[a][a] += ridge;
        for (std::size_t col = 0; col < k; ++col) {
            std::size_t piv = col;
            for (std::size_t r = col + 1; r < k; ++r) {
                if (std::abs(G[r][col]) > std::abs(G[piv][col])) piv = r;
            }
            std::swap(G[col], G[piv]);
            for (std::size_t r = col + 1; r < k; ++r) {
                const double f = G[r][col] / G[col][col];
                for (std::size_t c = col; c <= k; ++c) G[r][c] -= f * G[col][c];
            }
        }
        for (std::size_t col = k; col-- > 0;) {
            double acc = G[col][k];
            for (std::size_t c = col + 1; c < k; ++c) acc -= G[col][c] * G[c][k];
            G[col][k] = acc / G[col][col];
        }
        for (std::size_t a = 0; a < k; ++a) z[idx[a]] = G[a][k];
        return z;
    };

    const int max_outer = 3 * static_cast<int>(n) + 10;
    for (int outer = 0; outer < max_outer; ++outer) {
        std::vector<double> r = b;
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) r[i] -= A[i][j] * x[j];
        }
        int enter = -1;
        double best = 1e-10;
        for (std::size_t j = 0; j < n; ++j) {
            if (passive[j]) continue;
            double wj = 0.0;
            for (std::size_t i = 0; i < m; ++i) wj += A[i][j] * r[i];
            if (wj > best) {
                best = wj;
                enter = static_cast<int>(j);
            }
        }
        if (enter < 0) break;
        passive[static_cast<std::size_t>(enter)] = true;

        for (int inner = 0; inner < max_outer; ++inner) {
            const std::vector<double> z = ls_passive();
            bool all_positive = true;
            for (std::size_t j = 0; j < n; ++j) {
                if (passive[j] && z[j] <= 0.0) all_positive = false;
            }
            if (all_positive) {
                x = z;
                break;
            }
            double step = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < n; ++j) {
                if (passive[j] && z[j] <= 0.0) {
                    step = std::min(step, x[j] / (x[j] - z[j]));
                }
            }
            for (std::size_t j = 0; j < n; ++j) {
                if (passive[j]) x[j] += step * (z[j] - x[j]);
            }
            for (std::size_t j = 0; j < n; ++j) {
                if (passive[j] && x[j] <= 1e-12) {
                    passive[j] = false;
                    x[j] = 0.0;
                }
            }
        }
    }
    return x;
}

} // namespace detail

// First n points of the Sobol' low discrepancy sequence in [0,1)^dim using
// the standard direction numbers, Gray code ordering and an XOR digital
// shift derived from seed. Seed 0 leaves the sequence unscrambled.
inline std::vector<std::vector<double>> sobol_points(int dim, int n, std::uint64_t seed) {
    if (dim < 1 || dim > 64) throw std::invalid_argument("sobol dimension out of range");
    constexpr int bits = 32;
    std::vector<std::array<std::uint32_t, bits>> v(static_cast<std::size_t>(dim));
    for (int d = 0; d < dim; ++d) {
        auto& vd = v[static_cast<std::size_t>(d)];
        if (d == 0) {
            for (int j = 0; j < bits; ++j) vd[j] = 1u << (31 - j);
            continue;
        }
        const detail::SobolTableRow& row = detail::sobol_table[static_cast<std::size_t>(d - 1)];
        const int s = static_cast<int>(row.degree);
        for (int j = 0; j < s; ++j) vd[j] = row.m[static_cast<std::size_t>(j)] << (31 - j);
        for (int j = s; j < bits; ++j) {
            std::uint32_t val = vd[j - s] ^ (vd[j - s] >> s);
            for (int k = 1; k < s; ++k) {
                if ((row.poly >> (s - k)) & 1u) val ^= vd[j - k];
            }
            vd[j] = val;
        }
    }
    std::vector<std::uint32_t> mask(static_cast<std::size_t>(dim), 0u);
    if (seed != 0) {
        for (int d = 0; d < dim; ++d) {
            mask[static_cast<std::size_t>(d)] = static_cast<std::uint32_t>(
                detail::mix64(seed, 0xb5ad4eceda1ce2a9ULL + static_cast<std::uint64_t>(d)) >> 32);
        }
    }
    std::vector<std::vector<double>> out;
    out.reserve(static_cast<std::size_t>(n));
    std::vector<std::uint32_t> state(static_cast<std::size_t>(dim), 0u);
    for (int i = 0; i < n; ++i) {
        if (i > 0) {
            const int c = std::countr_zero(static_cast<std::uint32_t>(i));
            for (int d = 0; d < dim; ++d) state[static_cast<std::size_t>(d)] ^= v[static_cast<std::size_t>(d)][c];
        }
        std::vector<double> p(static_cast<std::size_t>(dim));
        for (int d = 0; d < dim; ++d) {
            p[static_cast<std::size_t>(d)] =
                static_cast<double>(state[static_cast<std::size_t>(d)] ^ mask[static_cast<std::size_t>(d)]) * 0x1p-32;
        }
        out.push_back(std::move(p));
    }
    return out;
}

struct SolverTolerances {
    double feasibility_tol = 1e-6;
    double step_tol = 1e-8;
    int max_inner_iters = 500;
};

struct SolveRequest {
    std::function<double(const DecisionVector&)> merit;
    std::function<std::vector<double>(const DecisionVector&)> merit_grad;
    std::vector<std::function<double(const DecisionVector&)>> constraints;
    std::vector<std::function<std::vector<double>(const DecisionVector&)>> constraint_grads;
    ProblemSpec spec;
    std::vector<int> fixed_integers;
    int n_starts = 20;
    std::uint64_t seed = 7;
    std::vector<DecisionVector> extra_starts;  // tried after the quasirandom ones
    SolverTolerances tol;
};

struct SolveResult {
    DecisionVector x_best;
    double merit_best = std::numeric_limits<double>::infinity();
    bool feasible = false;
    std::vector<std::size_t> active_set;
    std::vector<double> multipliers;
    int n_starts_converged = 0;
};

namespace detail {

// central differences clamped to the box, step 1e-6
inline std::vector<double> fd_gradient(const std::function<double(const DecisionVector&)>& fn,
                                       const DecisionVector& at,
                                       const std::vector<double>& lo,
                                       const std::vector<double>& hi) {
    const double h = 1e-6;
    std::vector<double> g(at.continuous.size(), 0.0);
    DecisionVector probe = at;
    for (std::size_t i = 0; i < at.continuous.size(); ++i) {
        const double xi = at.continuous[i];
        const double a = std::max(xi - h, lo[i]);
        const double c = std::min(xi + h, hi[i]);
        probe.continuous[i] = c;
        const double fc = fn(probe);
        probe.continuous[i] = a;
        const double fa = fn(probe);
        probe.continuous[i] = xi;
        g[i] = (c > a) ? (fc - fa) / (c - a) : 0.0;
    }
    return g;
}

} // namespace detail

// Constraint activity and KKT multiplier estimates at result.x_best against
// the request's constraint list: nonnegative least squares fit of the
// stationarity residual over the coordinates strictly inside the box. Clears
// any previous attachment, so a result obtained under a modified request can
// be restated against the original one.
inline void attach_multipliers(const SolveRequest& req, SolveResult& result) {
    result.active_set.clear();
    result.multipliers.clear();
    const ProblemSpec& spec = req.spec;

    for (std::size_t i = 0; i < req.constraints.size(); ++i) {
        if (std::abs(req.constraints[i](result.x_best)) <= req.tol.feasibility_tol) {
            result.active_set.push_back(i);
        }
    }
    if (!result.feasible || result.active_set.empty()) return;

    std::vector<std::size_t> free_idx;
    for (int i = 0; i < spec.n1; ++i) {
        const double xi = result.x_best.continuous[static_cast<std::size_t>(i)];
        if (xi > spec.lower[static_cast<std::size_t>(i)] + 1e-9 &&
            xi < spec.upper[static_cast<std::size_t>(i)] - 1e-9) {
            free_idx.push_back(static_cast<std::size_t>(i));
        }
    }
    if (free_idx.empty()) {
        result.multipliers.assign(result.active_set.size(), 0.0);
        return;
    }

    auto merit_grad_at = [&](const DecisionVector& d) {
        if (req.merit_grad) return req.merit_grad(d);
        return detail::fd_gradient(req.merit, d, spec.lower, spec.upper);
    };
    auto constraint_grad_at = [&](std::size_t i, const DecisionVector& d) {
        if (i < req.constraint_grads.size() && req.constraint_grads[i]) {
            return req.constraint_grads[i](d);
        }
        return detail::fd_gradient(req.constraints[i], d, spec.lower, spec.upper);
    };
    const std::vector<double> mg = merit_grad_at(result.x_best);
    std::vector<std::vector<double>> A(free_idx.size(),
                                       std::vector<double>(result.active_set.size(), 0.0));
    std::vector<double> rhs(free_idx.size(), 0.0);
    for (std::size_t c = 0; c < result.active_set.size(); ++c) {
        const std::vector<double> cg = constraint_grad_at(result.active_set[c], result.x_best);
        for (std::size_t r = 0; r < free_idx.size(); ++r) A[r][c] = cg[free_idx[r]];
    }
    for (std::size_t r = 0; r < free_idx.size(); ++r) rhs[r] = -mg[free_idx[r]];
    result.multipliers = detail::nnls(A, rhs);
}

inline SolveResult solve_continuous(const SolveRequest& req) {
    const ProblemSpec& spec = req.spec;
    const int n = spec.n1;
    if (n <= 0) throw std::invalid_argument("no continuous variables");
    if (req.n_starts < 1) throw std::invalid_argument("n_starts must be at least 1");

    auto to_decision = [&](const std::vector<double>& x) {
        DecisionVector d;
        d.continuous = x;
        d.integer = req.fixed_integers;
        return d;
    };
    auto merit_grad_at = [&](const DecisionVector& d) {
        if (req.merit_grad) return req.merit_grad(d);
        return detail::fd_gradient(req.merit, d, spec.lower, spec.upper);
    };
    auto constraint_grad_at = [&](std::size_t i, const DecisionVector& d) {
        if (i < req.constraint_grads.size() && req.constraint_grads[i]) {
            return req.constraint_grads[i](d);
        }
        return detail::fd_gradient(req.constraints[i], d, spec.lower, spec.upper);
    };
    auto project = [&](std::vector<double> x) {
        for (int i = 0; i < n; ++i) {
            x[static_cast<std::size_t>(i)] =
                std::clamp(x[static_cast<std::size_t>(i)], spec.lower[static_cast<std::size_t>(i)],
                           spec.upper[static_cast<std::size_t>(i)]);
        }
        return x;
    };
    auto max_violation = [&](const DecisionVector& d) {
        double v = 0.0;
        for (const auto& gi : req.constraints) v = std::max(v, gi(d));
        return v;
    };

    auto descend = [&](std::vector<double>& x, double rho) {
        auto penal = [&](const std::vector<double>& xv) {
            const DecisionVector d = to_decision(xv);
            double val = req.merit(d);
            for (const auto& gi : req.constraints) {
                const double g = gi(d);
                if (g > 0.0) val += rho * g * g;
            }
            return val;
        };
        auto penal_grad = [&](const std::vector<double>& xv) {
            const DecisionVector d = to_decision(xv);
            std::vector<double> g = merit_grad_at(d);
            for (std::size_t i = 0; i < req.constraints.size(); ++i) {
                const double gv = req.constraints[i](d);
                if (gv > 0.0) {
                    const std::vector<double> cg = constraint_grad_at(i, d);
                    for (std::size_t j = 0; j < g.size(); ++j) g[j] += 2.0 * rho * gv * cg[j];
                }
            }
            return g;
        };

        double fx = penal(x);
        std::vector<double> g = penal_grad(x);
        // per coordinate secant steps: objectives mixing flat directions with
        // high frequency ones need very different step sizes per variable, a
        // single shared step makes the stiff coordinate hop between basins
        // while the flat ones converge
        std::vector<double> alpha(x.size());
        std::vector<double> cap(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            cap[i] = 0.1 * (spec.upper[i] - spec.lower[i]);
            alpha[i] = 1.0 / std::max(1.0, std::abs(g[i]));
        }
        for (int it = 0; it < req.tol.max_inner_iters; ++it) {
            std::vector<double> target(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) {
                target[i] = x[i] - std::clamp(alpha[i] * g[i], -cap[i], cap[i]);
            }
            target = project(std::move(target));
            std::vector<double> dir(x.size());
            double dir_inf = 0.0;
            double dd = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                dir[i] = target[i] - x[i];
                dir_inf = std::max(dir_inf, std::abs(dir[i]));
                dd += g[i] * dir[i];
            }
            if (dir_inf <= req.tol.step_tol * 0.01) break;

            double t = 1.0;
            std::vector<double> xt(x.size());
            double ft = 0.0;
            while (true) {
                for (std::size_t i = 0; i < x.size(); ++i) xt[i] = x[i] + t * dir[i];
                ft = penal(xt);
                if (ft <= fx + 1e-4 * t * dd || t < 1e-12) break;
                t *= 0.5;
            }
            if (ft > fx) break;

            const std::vector<double> gnew = penal_grad(xt);
            double step_inf = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double si = xt[i] - x[i];
                const double yi = gnew[i] - g[i];
                const double sy = si * yi;
                alpha[i] = (sy > 1e-16) ? std::clamp(si * si / sy, 1e-10, 1e10)
                                        : std::min(alpha[i] * 2.0, 1e10);
                step_inf = std::max(step_inf, std::abs(si));
            }
            x = xt;
            fx = ft;
            g = gnew;
            if (step_inf <= req.tol.step_tol) break;
        }
    };

    const auto starts = sobol_points(n, req.n_starts, req.seed);
    std::vector<std::vector<double>> start_pts;
    start_pts.reserve(static_cast<std::size_t>(req.n_starts) + req.extra_starts.size());
    for (int s = 0; s < req.n_starts; ++s) {
        std::vector<double> x(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            x[static_cast<std::size_t>(i)] =
                spec.lower[static_cast<std::size_t>(i)] +
                starts[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)] *
                    (spec.upper[static_cast<std::size_t>(i)] - spec.lower[static_cast<std::size_t>(i)]);
        }
        start_pts.push_back(std::move(x));
    }
    for (const DecisionVector& d : req.extra_starts) {
        if (static_cast<int>(d.continuous.size()) != n) {
            throw std::invalid_argument("extra start has wrong dimension");
        }
        start_pts.push_back(project(d.continuous));
    }

    SolveResult result;
    double best_feasible_merit = std::numeric_limits<double>::infinity();
    double least_violation = std::numeric_limits<double>::infinity();
    std::vector<double> best_x;
    std::vector<double> fallback_x;

    for (const std::vector<double>& x0 : start_pts) {
        std::vector<double> x = x0;
        double rho = 10.0;
        double viol = 0.0;
        for (int stage = 0; stage < 8; ++stage) {
            descend(x, rho);
            viol = max_violation(to_decision(x));
            if (req.constraints.empty() || viol <= req.tol.feasibility_tol) break;
            rho *= 10.0;
        }
        const double merit = req.merit(to_decision(x));
        if (viol <= req.tol.feasibility_tol) {
            ++result.n_starts_converged;
            if (merit < best_feasible_merit) {
                best_feasible_merit = merit;
                best_x = x;
            }
        } else if (viol < least_violation) {
            least_violation = viol;
            fallback_x = x;
        }
    }

    result.feasible = !best_x.empty();
    result.x_best = to_decision(result.feasible ? best_x : fallback_x);
    result.merit_best = req.merit(result.x_best);
    attach_multipliers(req, result);
    return result;
}

inline SolveResult solve_integer(const SolveRequest& req) {
    const ProblemSpec& spec = req.spec;
    const int n = spec.n2;
    if (n <= 0) throw std::invalid_argument("empty integer domain");
    for (int i = 0; i < n; ++i) {
        if (spec.int_upper[static_cast<std::size_t>(i)] < spec.int_lower[static_cast<std::size_t>(i)]) {
            throw std::invalid_argument("empty integer domain");
        }
    }
    if (req.n_starts < 1) throw std::invalid_argument("n_starts must be at least 1");

    const double rho = 1e6;
    auto to_decision = [&](const std::vector<int>& y) {
        DecisionVector d;
        d.integer = y;
        return d;
    };
    // exact penalty: even violations far below the merit scale must price a
    // point out of contention, or the search settles just outside the
    // feasible set
    auto penal = [&](const std::vector<int>& y) {
        const DecisionVector d = to_decision(y);
        double val = req.merit(d);
        for (const auto& gi : req.constraints) {
            const double g = gi(d);
            if (g > 0.0) val += rho * g;
        }
        return val;
    };
    auto max_violation = [&](const std::vector<int>& y) {
        const DecisionVector d = to_decision(y);
        double v = 0.0;
        for (const auto& gi : req.constraints) v = std::max(v, gi(d));
        return v;
    };

    const auto starts = sobol_points(n, req.n_starts, req.seed);
    std::vector<std::vector<int>> start_pts;
    start_pts.reserve(static_cast<std::size_t>(req.n_starts) + req.extra_starts.size());
    for (int s = 0; s < req.n_starts; ++s) {
        std::vector<int> y(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const int lo = spec.int_lower[static_cast<std::size_t>(i)];
            const int hi = spec.int_upper[static_cast<std::size_t>(i)];
            const int span = hi - lo + 1;
            int val = lo + static_cast<int>(std::floor(
                               starts[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)] * span));
            y[static_cast<std::size_t>(i)] = std::min(val, hi);
        }
        start_pts.push_back(std::move(y));
    }
    for (const DecisionVector& d : req.extra_starts) {
        if (static_cast<int>(d.integer.size()) != n) {
            throw std::invalid_argument("extra start has wrong dimension");
        }
        std::vector<int> y = d.integer;
        for (int i = 0; i < n; ++i) {
            y[static_cast<std::size_t>(i)] =
                std::clamp(y[static_cast<std::size_t>(i)], spec.int_lower[static_cast<std::size_t>(i)],
                           spec.int_upper[static_cast<std::size_t>(i)]);
        }
        start_pts.push_back(std::move(y));
    }

    SolveResult result;
    double best_feasible_merit = std::numeric_limits<double>::infinity();
    double least_violation = std::numeric_limits<double>::infinity();
    std::vector<int> best_y;
    std::vector<int> fallback_y;

    for (const std::vector<int>& y0 : start_pts) {
        std::vector<int> y = y0;
        // best improvement search: the single coordinate reassignment that
        // most reduces the penalized merit, until a fixed point
        double base = penal(y);
        for (int move = 0; move < 100000; ++move) {
            double best_val = base - 1e-12;
            int best_i = -1;
            int best_v = 0;
            for (int i = 0; i < n; ++i) {
                const int old = y[static_cast<std::size_t>(i)];
                for (int v = spec.int_lower[static_cast<std::size_t>(i)];
                     v <= spec.int_upper[static_cast<std::size_t>(i)]; ++v) {
                    if (v == old) continue;
                    y[static_cast<std::size_t>(i)] = v;
                    const double val = penal(y);
                    if (val < best_val) {
                        best_val = val;
                        best_i = i;
                        best_v = v;
                    }
                }
                y[static_cast<std::size_t>(i)] = old;
            }
            if (best_i < 0) break;
            y[static_cast<std::size_t>(best_i)] = best_v;
            base = best_val;
        }

        const double viol = max_violation(y);
        const double merit = req.merit(to_decision(y));
        if (viol <= req.tol.feasibility_tol) {
            ++result.n_starts_converged;
            if (merit < best_feasible_merit) {
                best_feasible_merit = merit;
                best_y = y;
            }
        } else if (viol < least_violation) {
            least_violation = viol;
            fallback_y = y;
        }
    }

    result.feasible = !best_y.empty();
    result.x_best = to_decision(result.feasible ? best_y : fallback_y);
    result.merit_best = req.merit(result.x_best);
    for (std::size_t i = 0; i < req.constraints.size(); ++i) {
        if (std::abs(req.constraints[i](result.x_best)) <= req.tol.feasibility_tol) {
            result.active_set.push_back(i);
        }
    }
    return result;
}

} // namespace sdnbi

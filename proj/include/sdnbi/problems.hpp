#pragma once

// The five benchmark bi-objective problems behind one uniform contract:
// box bounds, two objective evaluators, optional inequality constraints
// g_i(x) <= 0 and optional analytic gradients on the continuous block.

#include <sdnbi/core.hpp>

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdnbi {

struct Evaluation {
    Vec2 f{0.0, 0.0};
    std::vector<double> g;
};

struct ProblemGradients {
    std::function<std::vector<double>(const DecisionVector&)> f1;
    std::function<std::vector<double>(const DecisionVector&)> f2;
    std::vector<std::function<std::vector<double>(const DecisionVector&)>> g;
};

struct ProblemSpec {
    std::string name;
    int n1 = 0;
    int n2 = 0;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<int> int_lower;
    std::vector<int> int_upper;
    std::function<double(const DecisionVector&)> f1;
    std::function<double(const DecisionVector&)> f2;
    std::vector<std::function<double(const DecisionVector&)>> constraints;
    std::optional<ProblemGradients> gradients;
};

// Per problem run configuration and the reported objective bounds kept as
// reference data. Engines compute their own bounds from anchor solves.
struct ProblemDefaults {
    int n_starts = 20;
    double eps = 0.001;
    int max_iters = 100;
    int n_beta = 10;
    int n_finite = 100;
    ObjectiveBounds reported_bounds;
};

inline void check_domain(const ProblemSpec& spec, const DecisionVector& x) {
    if (static_cast<int>(x.continuous.size()) != spec.n1 ||
        static_cast<int>(x.integer.size()) != spec.n2) {
        throw std::invalid_argument("domain violation");
    }
    for (int i = 0; i < spec.n1; ++i) {
        if (x.continuous[i] < spec.lower[i] - 1e-12 ||
            x.continuous[i] > spec.upper[i] + 1e-12) {
            throw std::invalid_argument("domain violation");
        }
    }
    for (int i = 0; i < spec.n2; ++i) {
        if (x.integer[i] < spec.int_lower[i] || x.integer[i] > spec.int_upper[i]) {
            throw std::invalid_argument("domain violation");
        }
    }
}

inline Evaluation evaluate(const ProblemSpec& spec, const DecisionVector& x) {
    check_domain(spec, x);
    Evaluation out;
    out.f = {spec.f1(x), spec.f2(x)};
    out.g.reserve(spec.constraints.size());
    for (const auto& gi : spec.constraints) {
        out.g.push_back(gi(x));
    }
    return out;
}

namespace detail {

inline ProblemSpec make_mop1() {
    ProblemSpec s;
    s.name = "mop1";
    s.n1 = 2;
    s.lower = {-3.0, -3.0};
    s.upper = {3.0, 3.0};
    s.f1 = [](const DecisionVector& d) {
        const double x1 = d.continuous[0];
        const double x2 = d.continuous[1];
        return 1.0 / (x1 * x1 + x2 * x2 + 1.0);
    };
    s.f2 = [](const DecisionVector& d) {
        const double x1 = d.continuous[0];
        const double x2 = d.continuous[1];
        return x1 * x1 + 3.0 * x2 * x2 + 4.0;
    };
    ProblemGradients gr;
    gr.f1 = [](const DecisionVector& d) {
        const double x1 = d.continuous[0];
        const double x2 = d.continuous[1];
        const double den = x1 * x1 + x2 * x2 + 1.0;
        const double c = -2.0 / (den * den);
        return std::vector<double>{c * x1, c * x2};
    };
    gr.f2 = [](const DecisionVector& d) {
        return std::vector<double>{2.0 * d.continuous[0], 6.0 * d.continuous[1]};
    };
    s.gradients = std::move(gr);
    return s;
}

inline ProblemSpec make_sch2() {
    ProblemSpec s;
    s.name = "sch2";
    s.n1 = 2;
    s.lower = {0.0, 0.0};
    s.upper = {5.0, 3.0};
    s.f1 = [](const DecisionVector& d) {
        const double x1 = d.continuous[0];
        const double x2 = d.continuous[1];
        const double a = x1 + x2 - 7.5;
        const double b = x2 - x1 + 3.0;
        return a * a + b * b / 4.0;
    };
    s.f2 = [](const DecisionVector& d) {
        const double x1 = d.continuous[0];
        const double x2 = d.continuous[1];
        return (x1 - 1.0) * (x1 - 1.0) / 4.0 + (x2 - 4.0) * (x2 - 4.0) / 2.0;
    };
    s.constraints = {
        [](const DecisionVector& d) {
            const double x1 = d.continuous[0];
            const double x2 = d.continuous[1];
            return (x1 - 2.0) * (x1 - 2.0) * (x1 - 2.0) / 2.0 + x2 - 2.5;
        },
        [](const DecisionVector& d) {
            const double x1 = d.continuous[0];
            const double x2 = d.continuous[1];
            const double w = x2 - x1 + 0.65;
            return x1 + x2 - 8.0 * w * w - 3.85;
        }};
    ProblemGradients gr;
    gr.f1 = [](const DecisionVector& d) {
        const double x1 = d.continuous[0];
        const double x2 = d.continuous[1];
        const double a = x1 + x2 - 7.5;
        const double b = x2 - x1 + 3.0;
        return std::vector<double>{2.0 * a - b / 2.0, 2.0 * a + b / 2.0};
    };
    gr.f2 = [](const DecisionVector& d) {
        return std::vector<double>{(d.continuous[0] - 1.0) / 2.0, d.continuous[1] - 4.0};
    };
    gr.g = {
        [](const DecisionVector& d) {
            const double x1 = d.continuous[0];
            return std::vector<double>{1.5 * (x1 - 2.0) * (x1 - 2.0), 1.0};
        },
        [](const DecisionVector& d) {
            const double w = d.continuous[1] - d.continuous[0] + 0.65;
            return std::vector<double>{1.0 + 16.0 * w, 1.0 - 16.0 * w};
        }};
    s.gradients = std::move(gr);
    return s;
}

inline ProblemSpec make_tnk() {
    ProblemSpec s;
    s.name = "tnk";
    s.n1 = 2;
    s.lower = {0.0, 0.0};
    s.upper = {std::numbers::pi, std::numbers::pi};
    s.f1 = [](const DecisionVector& d) { return d.continuous[0]; };
    s.f2 = [](const DecisionVector& d) { return d.continuous[1]; };
    // angle measured from the x2 axis via the two-argument arctangent, with
    // the limit value 0 taken at the origin
    auto angle = [](double x1, double x2) {
        if (x1 == 0.0 && x2 == 0.0) return 0.0;
        return std::atan2(x1, x2);
    };
    s.constraints = {
        [angle](const DecisionVector& d) {
            const double x1 = d.continuous[0];
            const double x2 = d.continuous[1];
            return 1.0 + 0.1 * std::cos(16.0 * angle(x1, x2)) - x1 * x1 - x2 * x2;
        },
        [](const DecisionVector& d) {
            const double x1 = d.continuous[0];
            const double x2 = d.continuous[1];
            return (x1 - 0.5) * (x1 - 0.5) + (x2 - 0.5) * (x2 - 0.5) - 0.5;
        }};
    ProblemGradients gr;
    gr.f1 = [](const DecisionVector&) { return std::vector<double>{1.0, 0.0}; };
    gr.f2 = [](const DecisionVector&) { return std::vector<double>{0.0, 1.0}; };
    gr.g = {
        [angle](const DecisionVector& d) {
            const double x1 = d.continuous[0];
            const double x2 = d.continuous[1];
            const double r2 = x1 * x1 + x2 * x2;
            double t1 = 0.0;
            double t2 = 0.0;
            if (r2 > 0.0) {
                const double ds = -1.6 * std::sin(16.0 * angle(x1, x2));
                t1 = ds * (x2 / r2);
                t2 = ds * (-x1 / r2);
            }
            return std::vector<double>{-2.0 * x1 + t1, -2.0 * x2 + t2};
        },
        [](const DecisionVector& d) {
            return std::vector<double>{2.0 * (d.continuous[0] - 0.5),
                                       2.0 * (d.continuous[1] - 0.5)};
        }};
    s.gradients = std::move(gr);
    return s;
}

inline ProblemSpec make_zdt3() {
    ProblemSpec s;
    s.name = "zdt3";
    s.n1 = 30;
    s.lower.assign(30, 0.0);
    s.upper.assign(30, 1.0);
    auto gsum = [](const DecisionVector& d) {
        double acc = 0.0;
        for (std::size_t i = 1; i < d.continuous.size(); ++i) acc += d.continuous[i];
        return 1.0 + 9.0 * acc / 29.0;
    };
    s.f1 = [](const DecisionVector& d) { return d.continuous[0]; };
    s.f2 = [gsum](const DecisionVector& d) {
        const double x1 = d.continuous[0];
        const double g = gsum(d);
        const double h = 1.0 - std::sqrt(x1 / g) -
                         (x1 / g) * std::sin(10.0 * std::numbers::pi * x1);
        return g * h;
    };
    ProblemGradients gr;
    gr.f1 = [](const DecisionVector& d) {
        std::vector<double> out(d.continuous.size(), 0.0);
        out[0] = 1.0;
        return out;
    };
    gr.f2 = [gsum](const DecisionVector& d) {
        // f2 = g - sqrt(x1 g) - x1 sin(10 pi x1); the sqrt slope is clamped
        // near x1 = 0 where it is unbounded
        const double x1 = std::max(d.continuous[0], 1e-12);
        const double g = gsum(d);
        const double tenpi = 10.0 * std::numbers::pi;
        std::vector<double> out(d.continuous.size(),
                                (9.0 / 29.0) * (1.0 - 0.5 * std::sqrt(x1 / g)));
        out[0] = -0.5 * std::sqrt(g / x1) - std::sin(tenpi * x1) -
                 tenpi * x1 * std::cos(tenpi * x1);
        return out;
    };
    s.gradients = std::move(gr);
    return s;
}

inline ProblemSpec make_zdt5() {
    ProblemSpec s;
    s.name = "zdt5";
    s.n2 = 11;
    s.int_lower.assign(11, 0);
    s.int_upper.assign(11, 5);
    s.int_upper[0] = 30;
    auto gsum = [](const DecisionVector& d) {
        double acc = 0.0;
        for (std::size_t i = 1; i < d.integer.size(); ++i) {
            const int y = d.integer[i];
            acc += (y < 5) ? 2.0 + y : 1.0;
        }
        return acc;
    };
    s.f1 = [](const DecisionVector& d) { return 1.0 + d.integer[0]; };
    s.f2 = [gsum](const DecisionVector& d) { return gsum(d) / (1.0 + d.integer[0]); };
    return s;
}

} // namespace detail

inline std::vector<std::string> problem_names() {
    return {"mop1", "sch2", "tnk", "zdt3", "zdt5"};
}

inline ProblemSpec make_problem(const std::string& name) {
    if (name == "mop1") return detail::make_mop1();
    if (name == "sch2") return detail::make_sch2();
    if (name == "tnk") return detail::make_tnk();
    if (name == "zdt3") return detail::make_zdt3();
    if (name == "zdt5") return detail::make_zdt5();
    throw std::invalid_argument("unknown problem: " + name);
}

inline ProblemDefaults problem_defaults(const std::string& name) {
    ProblemDefaults d;
    if (name == "mop1") {
        d = {20, 0.001, 33, 10, 100, {{0.053, 1.0}, {1.0, 37.0}}};
    } else if (name == "sch2") {
        d = {20, 0.001, 27, 10, 200, {{7.251, 0.5}, {18.5, 3.045}}};
    } else if (name == "tnk") {
        d = {20, 0.002, 59, 15, 301, {{0.0416, 0.0416}, {1.0384, 1.0384}}};
    } else if (name == "zdt3") {
        d = {50, 0.005, 36, 10, 100, {{0.0, -0.7733}, {0.8518, 1.0}}};
    } else if (name == "zdt5") {
        d = {30, 0.005, 40, 10, 100, {{0.0, 0.3226}, {31.0, 10.0}}};
    } else {
        throw std::invalid_argument("unknown problem: " + name);
    }
    return d;
}

} // namespace sdnbi

#pragma once

// Gauss-Legendre rules (Newton iteration on P_n, cached per order) and an
// adaptive composite driver for the verification integrals.

#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "dskg/errors.hpp"

namespace dskg {

struct GaussLegendre {
    std::vector<double> nodes;    // on (-1,1), open rule
    std::vector<double> weights;
};

inline const GaussLegendre& gauss_legendre(int n) {
    static std::map<int, GaussLegendre> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    if (n < 1) throw config_error("gauss_legendre: order must be >= 1");

    GaussLegendre rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev-like initial guess, then Newton on P_n
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

// Fixed-order rule mapped affinely to [a,b].
template <typename F>
auto integrate_gl(F&& f, double a, double b, int n) -> decltype(f(0.0)) {
    const auto& rule = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    decltype(f(0.0)) acc{};
    for (int i = 0; i < n; ++i)
        acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * acc;
}

// Adaptive bisection with embedded GL(n)/GL(2n) error estimate.  Open rules:
// endpoints are never evaluated, so integrable endpoint behavior is fine.
// Reports the subinterval on failure.
inline double integrate_adaptive(const std::function<double(double)>& f, double a,
                                 double b, double rel_tol = 1e-9,
                                 int max_depth = 48, int order = 16) {
    struct Frame { double a, b; int depth; };
    double coarse_total = std::abs(integrate_gl(f, a, b, order));
    double scale = std::max(coarse_total, 1e-300);
    std::vector<Frame> stack{{a, b, 0}};
    double total = 0.0;
    while (!stack.empty()) {
        Frame fr = stack.back();
        stack.pop_back();
        double c = integrate_gl(f, fr.a, fr.b, order);
        double fine = integrate_gl(f, fr.a, fr.b, 2 * order);
        if (std::abs(fine - c) <= rel_tol * scale ||
            (fr.b - fr.a) <= 1e-14 * (b - a)) {
            total += fine;
            scale = std::max(scale, std::abs(total));
            continue;
        }
        if (fr.depth >= max_depth)
            throw numerical_error(
                "integrate_adaptive: refinement limit near [" +
                std::to_string(fr.a) + ", " + std::to_string(fr.b) + "]");
        double mid = 0.5 * (fr.a + fr.b);
        stack.push_back({mid, fr.b, fr.depth + 1});
        stack.push_back({fr.a, mid, fr.depth + 1});
    }
    return total;
}

}  // namespace dskg

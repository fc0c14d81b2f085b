#include "oatm/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "oatm/errors.hpp"

namespace oatm {

double hypergeom_P(double alpha, int d, int d_hat) {
    if (d_hat > d) throw ContractViolation("hypergeom_P: d_hat > d");
    if (d_hat <= 0) return 1.0;
    if (alpha == 1.0) return 1.0;
    const double ad = alpha * d;
    // Small nudge so alpha = m/d with inexact division still counts m items.
    const int m = static_cast<int>(std::floor(ad + 1e-9));
    if (d_hat > m) return 0.0;
    double p = 1.0;
    for (int i = 0; i < d_hat; ++i) p *= (ad - i) / static_cast<double>(d - i);
    return p;
}

double success_prob_simple(const GuaranteeInputs& g) {
    if (!(g.cell > g.t)) throw ContractViolation("success_prob_simple: need cell > t");
    return hypergeom_P(g.alpha, g.d, g.d_hat) * std::pow(1.0 - g.t / g.cell, g.d_hat);
}

double folded_gaussian_cell_integral(double cell, double sigma) {
    if (!(sigma > 0.0)) throw ContractViolation("folded_gaussian_cell_integral: sigma <= 0");
    if (!(cell > 0.0)) throw ContractViolation("folded_gaussian_cell_integral: cell <= 0");
    const double norm = std::sqrt(2.0) / (sigma * std::sqrt(3.141592653589793238462643383280));
    auto f = [&](double x) {
        return (1.0 - x / cell) * norm * std::exp(-x * x / (2.0 * sigma * sigma));
    };
    auto simpson = [&](int n) {
        const double h = cell / n;
        double acc = f(0.0) + f(cell);
        for (int i = 1; i < n; ++i) acc += f(i * h) * (i % 2 == 1 ? 4.0 : 2.0);
        return acc * h / 3.0;
    };
    int n = 4096;
    double prev = simpson(n);
    for (int iter = 0; iter < 10; ++iter) {
        n *= 2;
        const double cur = simpson(n);
        if (std::abs(cur - prev) < 1e-10) return std::clamp(cur, 0.0, 1.0);
        prev = cur;
    }
    return std::clamp(prev, 0.0, 1.0);
}

double success_prob_gaussian(const GuaranteeInputs& g) {
    if (!g.sigma) throw ContractViolation("success_prob_gaussian: sigma absent");
    const double integral = folded_gaussian_cell_integral(g.cell, *g.sigma);
    const double p = hypergeom_P(g.alpha, g.d, g.d_hat) * std::pow(integral, g.d_hat);
    return std::clamp(p, 0.0, 1.0);
}

double overall_success(double p_round, std::int64_t k) {
    if (p_round < 0.0 || p_round > 1.0 || k < 0)
        throw ContractViolation("overall_success: arguments out of range");
    if (k == 0) return 0.0;
    if (p_round >= 1.0) return 1.0;
    return -std::expm1(static_cast<double>(k) * std::log1p(-p_round));
}

std::int64_t required_iterations(double p_round, double p0, std::int64_t k_max) {
    if (!(p_round > 0.0 && p_round < 1.0 && p0 > 0.0 && p0 < 1.0))
        throw ContractViolation("required_iterations: arguments outside (0,1)");
    if (p_round < 1e-12) return k_max;
    const double k = std::log1p(-p0) / std::log1p(-p_round);
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(k)));
}

}  // namespace oatm

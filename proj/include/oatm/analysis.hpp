#pragma once

#include <cstdint>
#include <optional>

namespace oatm {

// Inputs to the one-round / overall success bounds.
struct GuaranteeInputs {
    double alpha = 1.0;  // inlier rate in (0, 1]
    int d = 0;           // vector dimension (|T'|)
    int d_hat = 9;       // sampled dimensions
    double t = 0.0;      // inlier threshold
    double cell = 0.0;   // grid cell side c > t
    std::optional<double> sigma;  // Gaussian noise std, intensity units
    double p0 = 0.99;    // target overall success probability
};

// P(alpha, d, d_hat) = C(alpha d, d_hat) / C(d, d_hat), evaluated as the
// product of (alpha d - i) / (d - i) with real alpha d. Zero when
// d_hat > floor(alpha d), exactly 1 when alpha == 1.
double hypergeom_P(double alpha, int d, int d_hat);

// Lower bound on one-round success with hard-thresholded inliers:
// P(alpha,d,d_hat) * (1 - t/c)^d_hat.
double success_prob_simple(const GuaranteeInputs& g);

// Lower bound with Gaussian inlier residuals: the per-coordinate collision
// factor integrates (1 - x/c) against the folded-Gaussian density on [0,c].
double success_prob_gaussian(const GuaranteeInputs& g);

// The integral factor of the Gaussian bound, exposed for tests. Composite
// Simpson, >= 4096 intervals, refined until successive estimates agree to
// 1e-10.
double folded_gaussian_cell_integral(double cell, double sigma);

// 1 - (1 - p_round)^k.
double overall_success(double p_round, std::int64_t k);

// ceil(log(1-p0) / log(1-p_round)), at least 1; returns k_max when p_round
// underflows (< 1e-12).
std::int64_t required_iterations(double p_round, double p0, std::int64_t k_max = 100000);

}  // namespace oatm

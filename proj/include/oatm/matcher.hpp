#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "oatm/analysis.hpp"
#include "oatm/decomposition.hpp"
#include "oatm/hashgrid.hpp"

namespace oatm {

struct MatchConfig {
    SpaceSpec space;
    double t = 0.0;  // <= 0: derived as 2*sigma*sqrt(2/pi), or 10/255 when sigma is unknown
    std::optional<double> sigma;  // noise std, intensity units
    double p0 = 0.99;
    std::uint64_t seed = 0;
    bool photometric_invariant = false;
    std::int64_t k_max = 100000;
    int d_hat = 9;
    double cell_factor = 2.5;
    std::optional<std::int64_t> max_bucket_pairs;
    double alpha0 = 0.25;  // pessimistic prior rate for the initial round budget
    std::optional<std::int64_t> forced_k;  // fixed round count; disables adaptive stopping
    int threads = 0;                       // 0: hardware concurrency

    double threshold() const;
};

struct MatchResult {
    Transform transform = Translation{};
    double inlier_rate = 0.0;  // over the full template
    std::int64_t rounds_run = 0;
    std::int64_t round_found = 0;
    double theoretical_success = 0.0;
    std::uint64_t seed = 0;
    // Audit log: (round, best rate) at every improvement, nondecreasing.
    std::vector<std::pair<std::int64_t, double>> improvements;
};

// Fraction of template pixels whose residual under f is within t;
// out-of-bounds pixels count as outliers.
double evaluate_consensus(const GrayImage& tmpl, const GrayImage& image, const Transform& f,
                          double t);

// Photometric-invariant variant: the sampled image patch is renormalized to
// the template's mean/std before thresholding, so the score is unchanged
// under I -> a*I + b (a > 0).
double evaluate_consensus_standardized(const GrayImage& tmpl, const GrayImage& image,
                                       const Transform& f, double t);

// Full matcher: decompose, hash rounds, candidate extraction f* = f o h^-1
// scored on the full template, adaptive stopping against the success bound.
// Deterministic for a fixed config (including seed), regardless of threads.
MatchResult match(const GrayImage& tmpl, const GrayImage& image, const MatchConfig& cfg);

}  // namespace oatm

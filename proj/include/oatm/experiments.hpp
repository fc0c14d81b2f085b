#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "oatm/matcher.hpp"

namespace oatm {

// A planted template-matching instance: the template (with outlier pixels
// displaced), the noisy image, and the ground-truth transform.
struct SyntheticInstance {
    GrayImage image;
    GrayImage tmpl;
    Transform truth = Translation{};
    std::vector<std::uint8_t> inlier_mask;  // row-major over the template
    double alpha = 1.0;
    bool overlapping_blocks = false;  // occlusion placement fell back to overlapping
};

struct ReportRow {
    std::vector<std::pair<std::string, double>> params;
    double empirical = 0.0;
    std::optional<double> theoretical;
    int trials = 0;
    double wall_ms = 0.0;
    bool empirical_is_timing = false;  // empirical itself is a measured time
};

struct ReportSummary {
    std::optional<double> slope;
    std::optional<double> intercept;
    std::optional<double> r2;
    std::string note;
};

struct ExperimentReport {
    std::string experiment;
    std::uint64_t seed = 0;
    std::vector<ReportRow> rows;
    std::optional<ReportSummary> summary;
};

// include_timing=false drops wall-clock fields (and the timing-derived
// summary), leaving output that is byte-stable across runs.
std::string report_to_json(const ExperimentReport& rep, bool include_timing);
std::string report_to_text(const ExperimentReport& rep, bool include_timing);

// Deterministic multi-octave value-noise test image, intensities in [0,1].
GrayImage synth_image(int w, int h, std::uint64_t seed);

// Outlier intensity rule: the replacement is 0.5 away in absolute value;
// v = 0.5 takes the downward branch.
double displaced_outlier_intensity(double v);

// Extracts an n_t x n_t template at a seeded random placement, displaces the
// intensities of an exact (1-alpha) fraction of its pixels by 0.5, and adds
// clamped Gaussian noise (std sigma) to the image.
SyntheticInstance gen_planted_translation(const GrayImage& src, int n_t, double alpha,
                                          double sigma, std::uint64_t seed);

// Samples a transform uniformly from the spec ranges (rejecting draws whose
// warped template leaves the source), inverse-warps the template, and adds
// noise to the image. alpha = 1; occlusion is added separately.
SyntheticInstance gen_planted_affine(const GrayImage& src, int n_t, const SpaceSpec& spec,
                                     double sigma, std::uint64_t seed);

// Paints random constant-intensity blocks over the target region in the
// image until at least occluded_fraction of the template pixels are covered;
// placement is non-overlapping, with an overlapping fallback (flagged).
SyntheticInstance add_block_occlusion(const SyntheticInstance& inst, double occluded_fraction,
                                      int block, std::uint64_t seed);

// Exhaustive maximizer of the consensus objective over the discretized
// space; ties broken lexicographically on transform parameters. Refuses
// spaces above 1e7 configurations.
MatchResult brute_force_match(const GrayImage& tmpl, const GrayImage& image,
                              const SpaceSpec& spec, double t);

// Success-rate validation: for each (alpha, k) cell, the fraction of seeded
// trials where the matcher returns the exact planted placement, paired with
// the theoretical bound.
ExperimentReport run_guarantee_validation(int trials, const std::vector<double>& alphas,
                                          const std::vector<std::int64_t>& ks, int n_t,
                                          int image_side, double sigma, std::uint64_t seed);

// Mean match wall time per image side, with the least-squares fit of time
// against sqrt(N).
ExperimentReport run_scalability(const std::vector<int>& image_sides, int n_t, int trials,
                                 std::uint64_t seed);

// Median center-location error (percent of template side, clipped at 100)
// per inlier rate under random block occlusion.
ExperimentReport run_occlusion_sweep(const std::vector<double>& inlier_rates, int trials, int n_t,
                                     int image_side, std::uint64_t seed);

using Quad = std::array<Vec2, 4>;

// 1 - area(intersection)/area(union) for two convex quadrilaterals.
double overlap_error(const Quad& q1, const Quad& q2);

// Continuous image of the template's corner rectangle under f.
Quad transform_quad(const Transform& f, int tmpl_w, int tmpl_h);

}  // namespace oatm

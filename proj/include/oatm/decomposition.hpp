#pragma once

#include <span>
#include <vector>

#include "oatm/image.hpp"
#include "oatm/transform.hpp"

namespace oatm {

// One axis of the translation factorization. Ball offsets are the integers
// [ball_lo, ball_hi]; net holds the coarse placements. Every placement u in
// [0, placements-1] decomposes both as u = g + h and as u = g - h with
// g in net, h in the ball (the matcher extracts candidates as f o h^-1, so
// both orientations must cover).
struct AxisDecomposition {
    int placements = 0;
    int eps = 0;
    int ball_lo = 0;
    int ball_hi = 0;
    std::vector<int> net;
};

enum class VectorSource { TemplateSide, ImageSide };

// Matrix of sampled intensity vectors; row i was generated by transforms[i].
// Entry order is row-major over the sub-template, fixed globally so U and V
// entries align by index.
struct VectorSet {
    int d = 0;
    VectorSource source = VectorSource::TemplateSide;
    std::vector<double> data;  // count x d, row-major
    std::vector<Transform> transforms;

    std::size_t count() const { return transforms.size(); }
    std::span<const double> row(std::size_t i) const {
        return {data.data() + i * static_cast<std::size_t>(d), static_cast<std::size_t>(d)};
    }
};

// Product-space factorization of the search space: ball x net with
// |ball| ~ |net| ~ sqrt(N), plus the fixed sub-template T' on which the
// U / V vectors are built.
struct Decomposition {
    SpaceSpec space;
    std::vector<Transform> ball;
    std::vector<Transform> net;
    double epsilon = 0.0;
    double epsilon_prime = 0.0;
    std::vector<PixelCoord> sub_template;

    AxisDecomposition axis_x, axis_y;
    // Affine linear-part grids; single identity entry for translation spaces.
    std::vector<double> thetas{0.0};
    std::vector<double> scales_x{1.0};
    std::vector<double> scales_y{1.0};

    int d() const { return static_cast<int>(sub_template.size()); }
};

AxisDecomposition decompose_translation_axis(int tmpl_side, int img_side);

Decomposition build_translation_decomposition(int tmpl_w, int tmpl_h, int img_w, int img_h);
Decomposition build_affine_decomposition(const SpaceSpec& spec);
Decomposition build_decomposition(const SpaceSpec& spec);

// Row-major list of template pixels p with h(p) inside the template domain
// for every h in the ball. Throws DegenerateSubTemplateError when empty.
std::vector<PixelCoord> compute_sub_template(int tmpl_w, int tmpl_h,
                                             std::span<const Transform> ball);

// U = { T(h(T')) : h in ball }. All samples in-domain by construction of T'.
VectorSet build_U(const GrayImage& tmpl, const Decomposition& dec);

// V = { I(f(T')) : f in net }; rows with any out-of-bounds sample are
// dropped together with their transforms. Throws EmptyNetError when nothing
// survives.
VectorSet build_V(const GrayImage& image, const Decomposition& dec);

// Per-row affine renormalization to the target mean/std. A sigma floor of
// 1e-6 guards constant rows; output values may leave [0,1].
VectorSet standardize(const VectorSet& vs, double target_mean, double target_std);

}  // namespace oatm

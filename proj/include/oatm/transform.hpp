#pragma once

#include <variant>

#include "oatm/errors.hpp"
#include "oatm/image.hpp"

namespace oatm {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

struct Translation {
    int dx = 0;
    int dy = 0;

    bool operator==(const Translation&) const = default;
};

// p -> A p + t with A = [[a11 a12],[a21 a22]], t = (tx, ty).
struct Affine {
    double a11 = 1.0, a12 = 0.0;
    double a21 = 0.0, a22 = 1.0;
    double tx = 0.0, ty = 0.0;

    bool operator==(const Affine&) const = default;
};

using Transform = std::variant<Translation, Affine>;

bool is_translation(const Transform& f);
Affine to_affine(const Transform& f);

// Continuous (unrounded) application.
Vec2 apply_continuous(const Transform& f, Vec2 p);

// Discrete application: affine output is rounded to the nearest integer
// pixel, ties (.5) away from zero.
PixelCoord apply(const Transform& f, PixelCoord p);

// (f o g)(p) = f(g(p)), composed on the continuous representations.
// Translation pairs stay translations; mixed pairs promote to affine.
Transform compose(const Transform& f, const Transform& g);

// Exact group inverse; throws SingularTransformError when |det A| <= 1e-9.
Transform invert(const Transform& f);

// Distance between transforms over the template domain [0,w-1]x[0,h-1]:
// max_p ||f1(p) - f2(p)||. The difference map is affine, so the maximum over
// the rectangle is attained at one of its four corners.
double delta(const Transform& f1, const Transform& f2, int dom_w, int dom_h);

// Smallest singular value of the linear part; exactly 1 for translations.
// This is the origin-independent quantity that bounds how a target-domain
// tolerance pulls back into the template domain.
double min_scale(const Transform& f);

enum class SpaceKind { Translation, Affine };

// Discretized transformation search space. Template is square of side n_T in
// the paper's setup; rectangular templates are carried as (template_w,
// template_h). The affine net is anchored at the template center: linear
// parts are rotation * diag(sx, sy) about the center and translations place
// the center on the same grid as the translation-only space.
struct SpaceSpec {
    SpaceKind kind = SpaceKind::Translation;
    int template_w = 0;
    int template_h = 0;
    int image_w = 0;
    int image_h = 0;
    double scale_min = 1.0;
    double scale_max = 1.0;
    double rot_min = 0.0;  // radians
    double rot_max = 0.0;
    double delta_geo = 1.0;  // target geometric quantization, pixels at template radius

    static SpaceSpec translation(int tmpl_side, int img_w, int img_h);
    static SpaceSpec affine(int tmpl_side, int img_w, int img_h, double s_min, double s_max,
                            double r_min, double r_max);

    void validate() const;
    // Per-axis count of integer template placements.
    int placements_x() const { return image_w - template_w + 1; }
    int placements_y() const { return image_h - template_h + 1; }
};

// |T(p) - I(f(p))|; +inf when f(p) falls outside I (always an outlier).
// Lives with the image primitives but needs Transform, hence declared here.
double residual(const GrayImage& tmpl, const GrayImage& image, const Transform& f, PixelCoord p);

}  // namespace oatm

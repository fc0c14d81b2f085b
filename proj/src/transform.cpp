#include "oatm/transform.hpp"

#include <algorithm>
#include <cmath>

namespace oatm {

namespace {

constexpr double kSingularTol = 1e-9;

int round_away(double v) { return static_cast<int>(std::lround(v)); }

}  // namespace

bool is_translation(const Transform& f) { return std::holds_alternative<Translation>(f); }

Affine to_affine(const Transform& f) {
    if (const auto* t = std::get_if<Translation>(&f))
        return Affine{1.0, 0.0, 0.0, 1.0, static_cast<double>(t->dx), static_cast<double>(t->dy)};
    return std::get<Affine>(f);
}

Vec2 apply_continuous(const Transform& f, Vec2 p) {
    if (const auto* t = std::get_if<Translation>(&f)) return {p.x + t->dx, p.y + t->dy};
    const Affine& a = std::get<Affine>(f);
    return {a.a11 * p.x + a.a12 * p.y + a.tx, a.a21 * p.x + a.a22 * p.y + a.ty};
}

PixelCoord apply(const Transform& f, PixelCoord p) {
    if (const auto* t = std::get_if<Translation>(&f)) return {p.x + t->dx, p.y + t->dy};
    const Vec2 q = apply_continuous(f, {static_cast<double>(p.x), static_cast<double>(p.y)});
    return {round_away(q.x), round_away(q.y)};
}

Transform compose(const Transform& f, const Transform& g) {
    if (is_translation(f) && is_translation(g)) {
        const auto& a = std::get<Translation>(f);
        const auto& b = std::get<Translation>(g);
        return Translation{a.dx + b.dx, a.dy + b.dy};
    }
    const Affine a = to_affine(f);
    const Affine b = to_affine(g);
    return Affine{a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
                  a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22,
                  a.a11 * b.tx + a.a12 * b.ty + a.tx, a.a21 * b.tx + a.a22 * b.ty + a.ty};
}

Transform invert(const Transform& f) {
    if (const auto* t = std::get_if<Translation>(&f)) return Translation{-t->dx, -t->dy};
    const Affine& a = std::get<Affine>(f);
    const double det = a.a11 * a.a22 - a.a12 * a.a21;
    if (std::abs(det) <= kSingularTol)
        throw SingularTransformError("invert: affine linear part is singular");
    const double i11 = a.a22 / det, i12 = -a.a12 / det;
    const double i21 = -a.a21 / det, i22 = a.a11 / det;
    return Affine{i11, i12, i21, i22, -(i11 * a.tx + i12 * a.ty), -(i21 * a.tx + i22 * a.ty)};
}

double delta(const Transform& f1, const Transform& f2, int dom_w, int dom_h) {
    const Affine a = to_affine(f1);
    const Affine b = to_affine(f2);
    const double d11 = a.a11 - b.a11, d12 = a.a12 - b.a12;
    const double d21 = a.a21 - b.a21, d22 = a.a22 - b.a22;
    const double dtx = a.tx - b.tx, dty = a.ty - b.ty;
    const double xs[2] = {0.0, static_cast<double>(dom_w - 1)};
    const double ys[2] = {0.0, static_cast<double>(dom_h - 1)};
    double best = 0.0;
    for (double x : xs) {
        for (double y : ys) {
            const double ex = d11 * x + d12 * y + dtx;
            const double ey = d21 * x + d22 * y + dty;
            best = std::max(best, std::hypot(ex, ey));
        }
    }
    return best;
}

double min_scale(const Transform& f) {
    if (is_translation(f)) return 1.0;
    const Affine& a = std::get<Affine>(f);
    // Closed-form 2x2 singular values via the rotation decomposition.
    const double e = (a.a11 + a.a22) / 2.0;
    const double g = (a.a11 - a.a22) / 2.0;
    const double h = (a.a21 + a.a12) / 2.0;
    const double k = (a.a21 - a.a12) / 2.0;
    const double q = std::hypot(e, k);
    const double r = std::hypot(g, h);
    return std::abs(q - r);
}

SpaceSpec SpaceSpec::translation(int tmpl_side, int img_w, int img_h) {
    SpaceSpec s;
    s.kind = SpaceKind::Translation;
    s.template_w = s.template_h = tmpl_side;
    s.image_w = img_w;
    s.image_h = img_h;
    s.validate();
    return s;
}

SpaceSpec SpaceSpec::affine(int tmpl_side, int img_w, int img_h, double s_min, double s_max,
                            double r_min, double r_max) {
    SpaceSpec s;
    s.kind = SpaceKind::Affine;
    s.template_w = s.template_h = tmpl_side;
    s.image_w = img_w;
    s.image_h = img_h;
    s.scale_min = s_min;
    s.scale_max = s_max;
    s.rot_min = r_min;
    s.rot_max = r_max;
    s.validate();
    return s;
}

void SpaceSpec::validate() const {
    if (template_w <= 0 || template_h <= 0)
        throw ContractViolation("SpaceSpec: non-positive template dims");
    if (template_w > image_w || template_h > image_h)
        throw ContractViolation("SpaceSpec: template larger than image");
    if (kind == SpaceKind::Affine) {
        if (!(scale_min > 0.0) || scale_max < scale_min)
            throw ContractViolation("SpaceSpec: empty scale range");
        if (rot_max < rot_min) throw ContractViolation("SpaceSpec: empty rotation range");
        if (!(delta_geo > 0.0)) throw ContractViolation("SpaceSpec: delta_geo must be positive");
    }
}

}  // namespace oatm

#include "oatm/decomposition.hpp"

#include <algorithm>
#include <cmath>

namespace oatm {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// Largest ball radius the template can support. The sub-template keeps a
// side of side/4 (clamped to [3, 9]): below 3 the default 9 sampled
// dimensions run out, and a too-small patch of adjacent pixels is so
// undiscriminative that hash buckets flood with spurious collisions.
int ball_eps_cap(int side) {
    if (side <= 1) return 0;
    const int keep = std::clamp(side / 4, std::min(side, 3), 9);
    return std::max(0, (side + 1 - keep) / 2);
}

AxisDecomposition make_axis(int placements, int eps) {
    AxisDecomposition ax;
    ax.placements = placements;
    ax.eps = eps;
    const int r1 = placements - 1;
    ax.ball_lo = std::max(-eps, -r1);
    ax.ball_hi = std::min(std::max(eps - 1, 0), r1);

    // Net positions tile the placement range with stride = ball width. The
    // start min(-lo, hi) and the top-up append make coverage exact for both
    // orientations u = g + h and u = g - h.
    const int stride = ax.ball_hi - ax.ball_lo + 1;
    int g = std::min(-ax.ball_lo, ax.ball_hi);
    ax.net.push_back(g);
    while (std::min(g + ax.ball_hi, g - ax.ball_lo) < r1) {
        g = std::min(g + stride, r1);
        ax.net.push_back(g);
    }
    return ax;
}

std::vector<Transform> ball_from_axes(const AxisDecomposition& ax, const AxisDecomposition& ay) {
    std::vector<Transform> ball;
    ball.reserve(static_cast<std::size_t>(ax.ball_hi - ax.ball_lo + 1) *
                 (ay.ball_hi - ay.ball_lo + 1));
    for (int oy = ay.ball_lo; oy <= ay.ball_hi; ++oy)
        for (int ox = ax.ball_lo; ox <= ax.ball_hi; ++ox) ball.push_back(Translation{ox, oy});
    return ball;
}

double ball_radius(const AxisDecomposition& ax, const AxisDecomposition& ay) {
    return std::hypot(std::max(-ax.ball_lo, ax.ball_hi), std::max(-ay.ball_lo, ay.ball_hi));
}

// Center points of K equal cells over [lo, hi]; the single midpoint when the
// range is empty.
std::vector<double> cell_centers(double lo, double hi, int k) {
    std::vector<double> out;
    if (hi <= lo || k <= 1) {
        out.push_back((lo + hi) / 2.0);
        return out;
    }
    const double step = (hi - lo) / k;
    for (int i = 0; i < k; ++i) out.push_back(lo + (i + 0.5) * step);
    return out;
}

std::vector<int> affine_translation_axis(int placements, int stride) {
    const int r1 = placements - 1;
    std::vector<int> out;
    int g = std::min(stride / 2, r1);
    out.push_back(g);
    while (2 * (r1 - g) > stride) {
        g = std::min(g + stride, r1);
        out.push_back(g);
    }
    return out;
}

}  // namespace

AxisDecomposition decompose_translation_axis(int tmpl_side, int img_side) {
    const int placements = img_side - tmpl_side + 1;
    if (placements < 1) throw ContractViolation("decomposition: template larger than image");
    int eps = static_cast<int>(std::ceil(0.5 * std::sqrt(static_cast<double>(placements))));
    eps = std::min(eps, ball_eps_cap(tmpl_side));
    return make_axis(placements, eps);
}

Decomposition build_translation_decomposition(int tmpl_w, int tmpl_h, int img_w, int img_h) {
    Decomposition dec;
    dec.space = SpaceSpec::translation(std::min(tmpl_w, tmpl_h), img_w, img_h);
    dec.space.template_w = tmpl_w;
    dec.space.template_h = tmpl_h;
    dec.space.validate();

    dec.axis_x = decompose_translation_axis(tmpl_w, img_w);
    dec.axis_y = decompose_translation_axis(tmpl_h, img_h);
    dec.ball = ball_from_axes(dec.axis_x, dec.axis_y);
    for (int gy : dec.axis_y.net)
        for (int gx : dec.axis_x.net) dec.net.push_back(Translation{gx, gy});

    dec.epsilon_prime = ball_radius(dec.axis_x, dec.axis_y);
    dec.epsilon = dec.epsilon_prime;  // no scale in the translation group
    dec.sub_template = compute_sub_template(tmpl_w, tmpl_h, dec.ball);
    return dec;
}

Decomposition build_affine_decomposition(const SpaceSpec& spec) {
    if (spec.kind != SpaceKind::Affine)
        throw ContractViolation("build_affine_decomposition: spec is not affine");
    spec.validate();

    const bool degenerate =
        spec.scale_min == 1.0 && spec.scale_max == 1.0 && spec.rot_min == 0.0 && spec.rot_max == 0.0;
    if (degenerate) {
        Decomposition dec =
            build_translation_decomposition(spec.template_w, spec.template_h, spec.image_w,
                                            spec.image_h);
        dec.space = spec;
        return dec;
    }

    Decomposition dec;
    dec.space = spec;

    const double hx = (spec.template_w - 1) / 2.0;
    const double hy = (spec.template_h - 1) / 2.0;
    const double cx = hx, cy = hy;
    const double radius = std::hypot(hx, hy);
    const double h_axis = std::max(hx, hy);
    const double s_max = spec.scale_max;
    const double s_min = spec.scale_min;

    // Error budget: any dense-space transform must have a (ball, net) pair
    // within delta_geo * sqrt(2). Snapping the in-ball translation to the
    // integer lattice costs up to s_max/sqrt(2) pixels; what remains is
    // split between the rotation and scale grids.
    const double budget = kSqrt2 * spec.delta_geo;
    const double trans_err = s_max / kSqrt2;
    const double avail = (budget - trans_err) * 0.95;
    if (avail <= 0.0)
        throw InfeasibleSpecError(
            "affine decomposition: scale_max too large for the requested delta_geo");

    const bool rot_active = spec.rot_max > spec.rot_min;
    const bool scale_active = spec.scale_max > spec.scale_min;
    const double rot_budget = rot_active ? (scale_active ? avail / 2 : avail) : 0.0;
    const double scale_budget = scale_active ? (rot_active ? avail / 2 : avail) : 0.0;

    int k_theta = 1, k_scale = 1;
    if (rot_active) {
        const double step = 2.0 * rot_budget / (s_max * radius);
        k_theta = std::max(1, static_cast<int>(std::ceil((spec.rot_max - spec.rot_min) / step)));
    }
    if (scale_active) {
        const double per_axis = scale_budget / kSqrt2;
        const double step = 2.0 * per_axis / h_axis;
        k_scale = std::max(1, static_cast<int>(std::ceil((spec.scale_max - spec.scale_min) / step)));
    }
    dec.thetas = cell_centers(spec.rot_min, spec.rot_max, k_theta);
    dec.scales_x = cell_centers(spec.scale_min, spec.scale_max, k_scale);
    dec.scales_y = dec.scales_x;

    const double n_total = static_cast<double>(spec.placements_x()) * spec.placements_y() *
                           dec.thetas.size() * dec.scales_x.size() * dec.scales_y.size();
    int eps = static_cast<int>(std::lround(std::pow(n_total, 0.25) / 2.0));
    const int cap = ball_eps_cap(std::min(spec.template_w, spec.template_h));
    eps = std::clamp(eps, std::min(1, cap), cap);

    dec.axis_x.placements = spec.placements_x();
    dec.axis_y.placements = spec.placements_y();
    dec.axis_x.eps = dec.axis_y.eps = eps;
    dec.axis_x.ball_lo = dec.axis_y.ball_lo = -eps;
    dec.axis_x.ball_hi = dec.axis_y.ball_hi = std::max(eps - 1, 0);
    dec.ball = ball_from_axes(dec.axis_x, dec.axis_y);

    // Translation stride shrinks with s_min so the snapped ball offset
    // Ainv * (tau - u) always fits inside the half-open ball box.
    int stride = 2 * eps;
    if (eps >= 1)
        stride = std::clamp(static_cast<int>(std::floor(kSqrt2 * s_min * (eps - 0.5))), 1, 2 * eps);
    dec.axis_x.net = affine_translation_axis(dec.axis_x.placements, stride);
    dec.axis_y.net = affine_translation_axis(dec.axis_y.placements, stride);

    for (double th : dec.thetas) {
        const double ct = std::cos(th), st = std::sin(th);
        for (double sx : dec.scales_x) {
            for (double sy : dec.scales_y) {
                const double a11 = ct * sx, a12 = -st * sy;
                const double a21 = st * sx, a22 = ct * sy;
                for (int gy : dec.axis_y.net) {
                    for (int gx : dec.axis_x.net) {
                        // f(p) = A (p - c) + c + u
                        dec.net.push_back(Affine{a11, a12, a21, a22,
                                                 cx + gx - (a11 * cx + a12 * cy),
                                                 cy + gy - (a21 * cx + a22 * cy)});
                    }
                }
            }
        }
    }

    dec.epsilon_prime = ball_radius(dec.axis_x, dec.axis_y);
    dec.epsilon = dec.epsilon_prime * s_min;
    dec.sub_template = compute_sub_template(spec.template_w, spec.template_h, dec.ball);
    return dec;
}

Decomposition build_decomposition(const SpaceSpec& spec) {
    if (spec.kind == SpaceKind::Translation)
        return build_translation_decomposition(spec.template_w, spec.template_h, spec.image_w,
                                               spec.image_h);
    return build_affine_decomposition(spec);
}

std::vector<PixelCoord> compute_sub_template(int tmpl_w, int tmpl_h,
                                             std::span<const Transform> ball) {
    if (ball.empty()) throw ContractViolation("compute_sub_template: empty ball");
    std::vector<PixelCoord> out;
    for (int y = 0; y < tmpl_h; ++y) {
        for (int x = 0; x < tmpl_w; ++x) {
            bool ok = true;
            for (const Transform& h : ball) {
                const PixelCoord q = apply(h, {x, y});
                if (q.x < 0 || q.x >= tmpl_w || q.y < 0 || q.y >= tmpl_h) {
                    ok = false;
                    break;
                }
            }
            if (ok) out.push_back({x, y});
        }
    }
    if (out.empty())
        throw DegenerateSubTemplateError(
            "compute_sub_template: ball displacements exhaust the template");
    return out;
}

namespace {

struct Box {
    int x0, y0, x1, y1;
};

Box bounding_box(std::span<const PixelCoord> pts) {
    Box b{pts.front().x, pts.front().y, pts.front().x, pts.front().y};
    for (const PixelCoord& p : pts) {
        b.x0 = std::min(b.x0, p.x);
        b.y0 = std::min(b.y0, p.y);
        b.x1 = std::max(b.x1, p.x);
        b.y1 = std::max(b.y1, p.y);
    }
    return b;
}

// Appends the samples of img under f over the sub-template; false when any
// sample is out of bounds (nothing is appended then). Translations bypass
// the per-pixel variant dispatch.
bool append_row(const GrayImage& img, const Transform& f,
                std::span<const PixelCoord> sub_template, const Box& bbox,
                std::vector<double>& out) {
    const std::size_t mark = out.size();
    if (const auto* t = std::get_if<Translation>(&f)) {
        if (!img.contains(bbox.x0 + t->dx, bbox.y0 + t->dy) ||
            !img.contains(bbox.x1 + t->dx, bbox.y1 + t->dy))
            return false;
        for (const PixelCoord& p : sub_template) out.push_back(img.at(p.x + t->dx, p.y + t->dy));
        return true;
    }
    for (const PixelCoord& p : sub_template) {
        const PixelCoord q = apply(f, p);
        if (!img.contains(q.x, q.y)) {
            out.resize(mark);
            return false;
        }
        out.push_back(img.at(q.x, q.y));
    }
    return true;
}

}  // namespace

VectorSet build_U(const GrayImage& tmpl, const Decomposition& dec) {
    if (tmpl.width() != dec.space.template_w || tmpl.height() != dec.space.template_h)
        throw ContractViolation("build_U: template dims do not match the decomposition");
    VectorSet vs;
    vs.d = dec.d();
    vs.source = VectorSource::TemplateSide;
    vs.data.reserve(dec.ball.size() * dec.sub_template.size());
    vs.transforms = dec.ball;
    const Box bbox = bounding_box(dec.sub_template);
    for (const Transform& h : dec.ball) {
        const bool ok = append_row(tmpl, h, dec.sub_template, bbox, vs.data);
        if (!ok) throw ContractViolation("build_U: sub-template invariant violated");
    }
    return vs;
}

VectorSet build_V(const GrayImage& image, const Decomposition& dec) {
    VectorSet vs;
    vs.d = dec.d();
    vs.source = VectorSource::ImageSide;
    vs.data.reserve(dec.net.size() * dec.sub_template.size());
    const Box bbox = bounding_box(dec.sub_template);
    for (const Transform& f : dec.net) {
        if (append_row(image, f, dec.sub_template, bbox, vs.data)) vs.transforms.push_back(f);
    }
    if (vs.transforms.empty())
        throw EmptyNetError("build_V: every net transform sampled outside the image");
    return vs;
}

VectorSet standardize(const VectorSet& vs, double target_mean, double target_std) {
    if (!(target_std > 0.0)) throw ContractViolation("standardize: target_std must be positive");
    constexpr double kSigmaFloor = 1e-6;
    VectorSet out = vs;
    const std::size_t d = static_cast<std::size_t>(vs.d);
    for (std::size_t i = 0; i < vs.count(); ++i) {
        double* r = out.data.data() + i * d;
        double mean = 0.0;
        for (std::size_t j = 0; j < d; ++j) mean += r[j];
        mean /= static_cast<double>(d);
        double var = 0.0;
        for (std::size_t j = 0; j < d; ++j) var += (r[j] - mean) * (r[j] - mean);
        const double sd = std::max(std::sqrt(var / static_cast<double>(d)), kSigmaFloor);
        for (std::size_t j = 0; j < d; ++j)
            r[j] = (r[j] - mean) / sd * target_std + target_mean;
    }
    return out;
}

}  // namespace oatm

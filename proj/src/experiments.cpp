#include "oatm/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "oatm/rng.hpp"

namespace oatm {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return mix_bits(seed ^ mix_bits(a * 0x9E3779B97F4A7C15ull + b + 0x94D049BB133111EBull));
}

double lattice_value(std::uint64_t seed, int octave, long gx, long gy) {
    const std::uint64_t k = mix_bits(seed + 0xA24BAED4963EE407ull * (octave + 1));
    const std::uint64_t h = mix_bits(k ^ (static_cast<std::uint64_t>(gx) * 0x9E3779B97F4A7C15ull +
                                          static_cast<std::uint64_t>(gy) * 0xD1B54A32D192ED03ull));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double median_of(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    if (n == 0) return 0.0;
    if (n % 2 == 1) return xs[n / 2];
    return 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace

GrayImage synth_image(int w, int h, std::uint64_t seed) {
    if (w <= 0 || h <= 0) throw ContractViolation("synth_image: non-positive dims");
    struct Octave {
        int step;
        double weight;
    };
    // Coarse structure plus enough fine texture that small patches stay
    // discriminative, as in photographic content.
    const Octave octaves[] = {{64, 1.0}, {16, 0.5}, {4, 0.3}, {2, 0.18}};
    std::vector<double> px(static_cast<std::size_t>(w) * h, 0.0);
    for (int o = 0; o < 4; ++o) {
        const int step = octaves[o].step;
        const double wgt = octaves[o].weight;
        for (int y = 0; y < h; ++y) {
            const long gy = y / step;
            const double fy = static_cast<double>(y % step) / step;
            for (int x = 0; x < w; ++x) {
                const long gx = x / step;
                const double fx = static_cast<double>(x % step) / step;
                const double v00 = lattice_value(seed, o, gx, gy);
                const double v10 = lattice_value(seed, o, gx + 1, gy);
                const double v01 = lattice_value(seed, o, gx, gy + 1);
                const double v11 = lattice_value(seed, o, gx + 1, gy + 1);
                const double v = (1 - fx) * (1 - fy) * v00 + fx * (1 - fy) * v10 +
                                 (1 - fx) * fy * v01 + fx * fy * v11;
                px[static_cast<std::size_t>(y) * w + x] += wgt * v;
            }
        }
    }
    const auto [lo_it, hi_it] = std::minmax_element(px.begin(), px.end());
    const double lo = *lo_it, hi = *hi_it;
    const double span = std::max(hi - lo, 1e-12);
    for (double& v : px) v = 0.02 + 0.96 * (v - lo) / span;
    return GrayImage(w, h, std::move(px));
}

double displaced_outlier_intensity(double v) { return v < 0.5 ? v + 0.5 : v - 0.5; }

namespace {

GrayImage add_noise(const GrayImage& img, double sigma, Rng& rng) {
    if (sigma <= 0.0) return img;
    std::vector<double> px = img.pixels();
    for (double& v : px) v = std::clamp(v + sigma * rng.gaussian(), 0.0, 1.0);
    return GrayImage(img.width(), img.height(), std::move(px));
}

}  // namespace

SyntheticInstance gen_planted_translation(const GrayImage& src, int n_t, double alpha,
                                          double sigma, std::uint64_t seed) {
    if (n_t <= 0 || n_t > std::min(src.width(), src.height()))
        throw ContractViolation("gen_planted_translation: template does not fit");
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw ContractViolation("gen_planted_translation: alpha outside (0,1]");
    Rng rng(derive_seed(seed, 0x706c616e74ull, 0));

    const int rx = src.width() - n_t + 1;
    const int ry = src.height() - n_t + 1;
    const int ox = static_cast<int>(rng.below(static_cast<std::uint64_t>(rx)));
    const int oy = static_cast<int>(rng.below(static_cast<std::uint64_t>(ry)));

    const std::size_t npix = static_cast<std::size_t>(n_t) * n_t;
    std::vector<double> tpx(npix);
    for (int y = 0; y < n_t; ++y)
        for (int x = 0; x < n_t; ++x) tpx[static_cast<std::size_t>(y) * n_t + x] = src.at(ox + x, oy + y);

    // Exact floor(alpha*|T|) inliers, chosen uniformly.
    const std::size_t n_in = static_cast<std::size_t>(std::floor(alpha * static_cast<double>(npix)));
    std::vector<std::uint32_t> perm(npix);
    for (std::size_t i = 0; i < npix; ++i) perm[i] = static_cast<std::uint32_t>(i);
    for (std::size_t i = npix - 1; i > 0; --i)
        std::swap(perm[i], perm[rng.below(i + 1)]);
    std::vector<std::uint8_t> mask(npix, 0);
    for (std::size_t i = 0; i < n_in; ++i) mask[perm[i]] = 1;
    for (std::size_t i = 0; i < npix; ++i)
        if (!mask[i]) tpx[i] = displaced_outlier_intensity(tpx[i]);

    SyntheticInstance inst;
    inst.tmpl = GrayImage(n_t, n_t, std::move(tpx));
    inst.image = add_noise(src, sigma, rng);
    inst.truth = Translation{ox, oy};
    inst.inlier_mask = std::move(mask);
    inst.alpha = static_cast<double>(n_in) / static_cast<double>(npix);
    return inst;
}

SyntheticInstance gen_planted_affine(const GrayImage& src, int n_t, const SpaceSpec& spec,
                                     double sigma, std::uint64_t seed) {
    if (spec.kind != SpaceKind::Affine)
        throw ContractViolation("gen_planted_affine: spec is not affine");
    spec.validate();
    Rng rng(derive_seed(seed, 0x616666696e65ull, 0));

    const double c = (n_t - 1) / 2.0;
    const int rx = spec.placements_x();
    const int ry = spec.placements_y();

    Transform truth = Translation{};
    bool ok = false;
    for (int attempt = 0; attempt < 1000 && !ok; ++attempt) {
        const double th = rng.uniform(spec.rot_min, spec.rot_max);
        const double sx = rng.uniform(spec.scale_min, spec.scale_max);
        const double sy = rng.uniform(spec.scale_min, spec.scale_max);
        const int ux = static_cast<int>(rng.below(static_cast<std::uint64_t>(rx)));
        const int uy = static_cast<int>(rng.below(static_cast<std::uint64_t>(ry)));
        const double ct = std::cos(th), st = std::sin(th);
        const Affine f{ct * sx, -st * sy, st * sx, ct * sy,
                       c + ux - (ct * sx * c - st * sy * c),
                       c + uy - (st * sx * c + ct * sy * c)};
        ok = true;
        const double xs[2] = {0.0, static_cast<double>(n_t - 1)};
        for (double px : xs) {
            for (double py : xs) {
                const Vec2 q = apply_continuous(Transform{f}, {px, py});
                if (q.x < 1.0 || q.x > src.width() - 2.0 || q.y < 1.0 || q.y > src.height() - 2.0)
                    ok = false;
            }
        }
        if (ok) truth = f;
    }
    if (!ok)
        throw InfeasibleSpecError("gen_planted_affine: no in-bounds transform after 1000 draws");

    std::vector<double> tpx(static_cast<std::size_t>(n_t) * n_t);
    for (int y = 0; y < n_t; ++y) {
        for (int x = 0; x < n_t; ++x) {
            const PixelCoord q = apply(truth, {x, y});
            tpx[static_cast<std::size_t>(y) * n_t + x] = src.at(q.x, q.y);
        }
    }

    SyntheticInstance inst;
    inst.tmpl = GrayImage(n_t, n_t, std::move(tpx));
    inst.image = add_noise(src, sigma, rng);
    inst.truth = truth;
    inst.inlier_mask.assign(static_cast<std::size_t>(n_t) * n_t, 1);
    inst.alpha = 1.0;
    return inst;
}

SyntheticInstance add_block_occlusion(const SyntheticInstance& inst, double occluded_fraction,
                                      int block, std::uint64_t seed) {
    if (!(occluded_fraction >= 0.0 && occluded_fraction < 1.0))
        throw ContractViolation("add_block_occlusion: fraction outside [0,1)");
    const int n_w = inst.tmpl.width();
    const int n_h = inst.tmpl.height();
    if (block < 1 || block > std::min(n_w, n_h))
        throw ContractViolation("add_block_occlusion: bad block size");
    SyntheticInstance out = inst;
    if (occluded_fraction == 0.0) return out;

    Rng rng(derive_seed(seed, 0x626c6f636bull, 0));
    const std::size_t npix = static_cast<std::size_t>(n_w) * n_h;
    const double target = occluded_fraction * static_cast<double>(npix);
    std::vector<std::uint8_t> covered(npix, 0);
    std::vector<double> img_px = inst.image.pixels();
    std::size_t covered_count = 0;
    int consecutive_failures = 0;

    // Anchors range over [-(block-1), n-1] so every template pixel sees the
    // same number of covering placements; blocks straddling the template
    // edge are clipped.
    while (static_cast<double>(covered_count) < target) {
        const int bx =
            static_cast<int>(rng.below(static_cast<std::uint64_t>(n_w + block - 1))) - (block - 1);
        const int by =
            static_cast<int>(rng.below(static_cast<std::uint64_t>(n_h + block - 1))) - (block - 1);
        const int x0 = std::max(bx, 0), x1 = std::min(bx + block, n_w);
        const int y0 = std::max(by, 0), y1 = std::min(by + block, n_h);
        if (!out.overlapping_blocks) {
            bool clash = false;
            for (int y = y0; y < y1 && !clash; ++y)
                for (int x = x0; x < x1; ++x)
                    if (covered[static_cast<std::size_t>(y) * n_w + x]) {
                        clash = true;
                        break;
                    }
            if (clash) {
                if (++consecutive_failures >= 2000) out.overlapping_blocks = true;
                continue;
            }
            consecutive_failures = 0;
        }
        const double intensity = rng.uniform01();
        for (int y = y0; y < y1; ++y) {
            for (int x = x0; x < x1; ++x) {
                const std::size_t ti = static_cast<std::size_t>(y) * n_w + x;
                if (!covered[ti]) {
                    covered[ti] = 1;
                    ++covered_count;
                }
                const PixelCoord q = apply(inst.truth, {x, y});
                if (inst.image.contains(q.x, q.y))
                    img_px[static_cast<std::size_t>(q.y) * inst.image.width() + q.x] = intensity;
            }
        }
    }

    for (std::size_t i = 0; i < npix; ++i)
        if (covered[i]) out.inlier_mask[i] = 0;
    std::size_t inliers = 0;
    for (std::uint8_t m : out.inlier_mask) inliers += m;
    out.alpha = static_cast<double>(inliers) / static_cast<double>(npix);
    out.image = GrayImage(inst.image.width(), inst.image.height(), std::move(img_px));
    return out;
}

MatchResult brute_force_match(const GrayImage& tmpl, const GrayImage& image,
                              const SpaceSpec& spec, double t) {
    spec.validate();
    if (tmpl.width() != spec.template_w || tmpl.height() != spec.template_h)
        throw ContractViolation("brute_force_match: template dims do not match spec");
    const double rx = spec.placements_x(), ry = spec.placements_y();

    MatchResult best;
    best.inlier_rate = -1.0;
    auto consider = [&](const Transform& f) {
        const double rate = evaluate_consensus(tmpl, image, f, t);
        if (rate > best.inlier_rate) {
            best.inlier_rate = rate;
            best.transform = f;
        }
    };

    if (spec.kind == SpaceKind::Translation) {
        if (rx * ry > 1e7) throw ContractViolation("brute_force_match: space exceeds 1e7");
        for (int dx = 0; dx < spec.placements_x(); ++dx)
            for (int dy = 0; dy < spec.placements_y(); ++dy) consider(Translation{dx, dy});
    } else {
        const Decomposition dec = build_affine_decomposition(spec);
        const double n_lin = static_cast<double>(dec.thetas.size()) * dec.scales_x.size() *
                             dec.scales_y.size();
        if (rx * ry * n_lin > 1e7) throw ContractViolation("brute_force_match: space exceeds 1e7");
        const double cx = (spec.template_w - 1) / 2.0, cy = (spec.template_h - 1) / 2.0;
        for (double th : dec.thetas) {
            const double ct = std::cos(th), st = std::sin(th);
            for (double sx : dec.scales_x) {
                for (double sy : dec.scales_y) {
                    const double a11 = ct * sx, a12 = -st * sy;
                    const double a21 = st * sx, a22 = ct * sy;
                    for (int ux = 0; ux < spec.placements_x(); ++ux) {
                        for (int uy = 0; uy < spec.placements_y(); ++uy) {
                            consider(Affine{a11, a12, a21, a22, cx + ux - (a11 * cx + a12 * cy),
                                            cy + uy - (a21 * cx + a22 * cy)});
                        }
                    }
                }
            }
        }
    }
    best.theoretical_success = 1.0;
    return best;
}

ExperimentReport run_guarantee_validation(int trials, const std::vector<double>& alphas,
                                          const std::vector<std::int64_t>& ks, int n_t,
                                          int image_side, double sigma, std::uint64_t seed) {
    if (trials <= 0 || alphas.empty() || ks.empty())
        throw ContractViolation("run_guarantee_validation: empty inputs");
    ExperimentReport rep;
    rep.experiment = "validate";
    rep.seed = seed;

    const Decomposition dec = build_translation_decomposition(n_t, n_t, image_side, image_side);
    const int d = dec.d();
    const double t = 2.0 * sigma * 0.7978845608028654;
    GuaranteeInputs gi;
    gi.d = d;
    gi.d_hat = std::min(9, d);
    gi.t = t;
    gi.cell = 2.5 * t;
    if (sigma > 0.0) gi.sigma = sigma;

    std::uint64_t cell_idx = 0;
    for (double alpha : alphas) {
        for (std::int64_t k : ks) {
            const auto t0 = Clock::now();
            int successes = 0;
            for (int trial = 0; trial < trials; ++trial) {
                const std::uint64_t s = derive_seed(seed, cell_idx, static_cast<std::uint64_t>(trial));
                const GrayImage src = synth_image(image_side, image_side, derive_seed(s, 1, 0));
                const SyntheticInstance inst =
                    gen_planted_translation(src, n_t, alpha, sigma, derive_seed(s, 2, 0));
                MatchConfig cfg;
                cfg.space = SpaceSpec::translation(n_t, image_side, image_side);
                if (sigma > 0.0) cfg.sigma = sigma;
                cfg.forced_k = k;
                cfg.seed = derive_seed(s, 3, 0);
                const MatchResult res = match(inst.tmpl, inst.image, cfg);
                if (res.transform == inst.truth) ++successes;
            }
            gi.alpha = alpha;
            const double p_round = sigma > 0.0 ? success_prob_gaussian(gi) : success_prob_simple(gi);
            ReportRow row;
            row.params = {{"alpha", alpha},
                          {"k", static_cast<double>(k)},
                          {"template_side", static_cast<double>(n_t)},
                          {"image_side", static_cast<double>(image_side)},
                          {"d", static_cast<double>(d)}};
            row.empirical = static_cast<double>(successes) / trials;
            row.theoretical = overall_success(p_round, k);
            row.trials = trials;
            row.wall_ms = ms_since(t0);
            rep.rows.push_back(std::move(row));
            ++cell_idx;
        }
    }
    return rep;
}

ExperimentReport run_scalability(const std::vector<int>& image_sides, int n_t, int trials,
                                 std::uint64_t seed) {
    if (image_sides.empty() || trials <= 0)
        throw ContractViolation("run_scalability: empty inputs");
    ExperimentReport rep;
    rep.experiment = "scalability";
    rep.seed = seed;
    const double sigma = 5.0 / 255.0;

    {
        // Warm-up so the first timed cell does not pay one-time costs.
        const GrayImage src = synth_image(64, 64, derive_seed(seed, 99, 0));
        const SyntheticInstance inst = gen_planted_translation(src, 16, 1.0, sigma, seed);
        MatchConfig cfg;
        cfg.space = SpaceSpec::translation(16, 64, 64);
        cfg.sigma = sigma;
        cfg.forced_k = 8;
        match(inst.tmpl, inst.image, cfg);
    }

    std::vector<double> xs, ys;
    std::uint64_t cell_idx = 0;
    for (int side : image_sides) {
        const auto t0 = Clock::now();
        const double n_cfg = static_cast<double>(side - n_t + 1) * (side - n_t + 1);
        double total_ms = 0.0;
        for (int trial = 0; trial < trials; ++trial) {
            const std::uint64_t s = derive_seed(seed, cell_idx, static_cast<std::uint64_t>(trial));
            const GrayImage src = synth_image(side, side, derive_seed(s, 1, 0));
            const SyntheticInstance inst =
                gen_planted_translation(src, n_t, 1.0, sigma, derive_seed(s, 2, 0));
            MatchConfig cfg;
            cfg.space = SpaceSpec::translation(n_t, side, side);
            cfg.sigma = sigma;
            cfg.forced_k = 64;
            cfg.seed = derive_seed(s, 3, 0);
            const auto m0 = Clock::now();
            match(inst.tmpl, inst.image, cfg);
            total_ms += ms_since(m0);
        }
        ReportRow row;
        row.params = {{"image_side", static_cast<double>(side)},
                      {"template_side", static_cast<double>(n_t)},
                      {"N", n_cfg},
                      {"sqrt_N", std::sqrt(n_cfg)},
                      {"k", 64.0}};
        row.empirical = total_ms / trials;  // mean match wall time, ms
        row.empirical_is_timing = true;
        row.trials = trials;
        row.wall_ms = ms_since(t0);
        rep.rows.push_back(std::move(row));
        xs.push_back(std::sqrt(n_cfg));
        ys.push_back(total_ms / trials);
        ++cell_idx;
    }

    ReportSummary sum;
    if (xs.size() < 2) {
        sum.note = "slope undefined: need at least two image sides";
    } else {
        const std::size_t n = xs.size();
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < n; ++i) {
            mx += xs[i];
            my += ys[i];
        }
        mx /= n;
        my /= n;
        double sxx = 0, sxy = 0, syy = 0;
        for (std::size_t i = 0; i < n; ++i) {
            sxx += (xs[i] - mx) * (xs[i] - mx);
            sxy += (xs[i] - mx) * (ys[i] - my);
            syy += (ys[i] - my) * (ys[i] - my);
        }
        sum.slope = sxy / sxx;
        sum.intercept = my - *sum.slope * mx;
        sum.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
        sum.note = "least-squares fit of mean match time (ms) vs sqrt(N)";
    }
    rep.summary = std::move(sum);
    return rep;
}

ExperimentReport run_occlusion_sweep(const std::vector<double>& inlier_rates, int trials, int n_t,
                                     int image_side, std::uint64_t seed) {
    if (inlier_rates.empty() || trials <= 0)
        throw ContractViolation("run_occlusion_sweep: empty inputs");
    for (double r : inlier_rates)
        if (!(r > 0.0 && r <= 1.0))
            throw ContractViolation("run_occlusion_sweep: rates must lie in (0,1]");
    ExperimentReport rep;
    rep.experiment = "occlusion";
    rep.seed = seed;
    const double sigma = 5.0 / 255.0;
    const Vec2 center{(n_t - 1) / 2.0, (n_t - 1) / 2.0};

    std::uint64_t cell_idx = 0;
    for (double rate : inlier_rates) {
        const auto t0 = Clock::now();
        std::vector<double> errors;
        for (int trial = 0; trial < trials; ++trial) {
            const std::uint64_t s = derive_seed(seed, cell_idx, static_cast<std::uint64_t>(trial));
            const GrayImage src = synth_image(image_side, image_side, derive_seed(s, 1, 0));
            SyntheticInstance inst =
                gen_planted_translation(src, n_t, 1.0, sigma, derive_seed(s, 2, 0));
            if (rate < 1.0) inst = add_block_occlusion(inst, 1.0 - rate, 4, derive_seed(s, 3, 0));
            MatchConfig cfg;
            cfg.space = SpaceSpec::translation(n_t, image_side, image_side);
            cfg.sigma = sigma;
            cfg.seed = derive_seed(s, 4, 0);
            // Low inlier rates push the required iteration count well past
            // the general-purpose default; rounds are cheap at this scale.
            cfg.k_max = 400000;
            const MatchResult res = match(inst.tmpl, inst.image, cfg);
            const Vec2 got = apply_continuous(res.transform, center);
            const Vec2 want = apply_continuous(inst.truth, center);
            const double err = std::hypot(got.x - want.x, got.y - want.y) / n_t * 100.0;
            errors.push_back(std::min(err, 100.0));
        }
        ReportRow row;
        row.params = {{"inlier_rate", rate},
                      {"template_side", static_cast<double>(n_t)},
                      {"image_side", static_cast<double>(image_side)},
                      {"block", 4.0}};
        row.empirical = median_of(errors);  // median center error, percent of template side
        row.trials = trials;
        row.wall_ms = ms_since(t0);
        rep.rows.push_back(std::move(row));
        ++cell_idx;
    }
    return rep;
}

namespace {

double signed_area(const std::vector<Vec2>& poly) {
    double a = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % poly.size()];
        a += p.x * q.y - q.x * p.y;
    }
    return a / 2.0;
}

double cross_z(const Vec2& a, const Vec2& b, const Vec2& p) {
    return (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
}

// Sutherland-Hodgman clip of a polygon against one directed edge (keep left).
std::vector<Vec2> clip_edge(const std::vector<Vec2>& poly, const Vec2& a, const Vec2& b) {
    std::vector<Vec2> out;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& cur = poly[i];
        const Vec2& nxt = poly[(i + 1) % n];
        const double dc = cross_z(a, b, cur);
        const double dn = cross_z(a, b, nxt);
        if (dc >= -1e-12) out.push_back(cur);
        if ((dc > 1e-12 && dn < -1e-12) || (dc < -1e-12 && dn > 1e-12)) {
            const double s = dc / (dc - dn);
            out.push_back({cur.x + s * (nxt.x - cur.x), cur.y + s * (nxt.y - cur.y)});
        }
    }
    return out;
}

}  // namespace

double overlap_error(const Quad& q1, const Quad& q2) {
    std::vector<Vec2> a(q1.begin(), q1.end());
    std::vector<Vec2> b(q2.begin(), q2.end());
    const double a1 = signed_area(a);
    const double a2 = signed_area(b);
    if (std::abs(a1) < 1e-12 || std::abs(a2) < 1e-12)
        throw ContractViolation("overlap_error: degenerate parallelogram");
    if (a1 < 0) std::reverse(a.begin(), a.end());
    if (a2 < 0) std::reverse(b.begin(), b.end());

    std::vector<Vec2> inter = a;
    for (std::size_t i = 0; i < b.size() && !inter.empty(); ++i)
        inter = clip_edge(inter, b[i], b[(i + 1) % b.size()]);
    const double ai = inter.size() >= 3 ? std::abs(signed_area(inter)) : 0.0;
    const double au = std::abs(a1) + std::abs(a2) - ai;
    return std::clamp(1.0 - ai / au, 0.0, 1.0);
}

Quad transform_quad(const Transform& f, int tmpl_w, int tmpl_h) {
    const double w = tmpl_w - 1.0, h = tmpl_h - 1.0;
    return {apply_continuous(f, {0.0, 0.0}), apply_continuous(f, {w, 0.0}),
            apply_continuous(f, {w, h}), apply_continuous(f, {0.0, h})};
}

namespace {

nlohmann::ordered_json row_json(const ReportRow& row, bool include_timing) {
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto& [k, v] : row.params) params[k] = v;
    nlohmann::ordered_json j;
    j["params"] = std::move(params);
    if (row.empirical_is_timing && !include_timing)
        j["empirical"] = nullptr;
    else
        j["empirical"] = row.empirical;
    if (row.theoretical)
        j["theoretical"] = *row.theoretical;
    else
        j["theoretical"] = nullptr;
    j["trials"] = row.trials;
    if (include_timing) j["wall_ms"] = row.wall_ms;
    return j;
}

}  // namespace

std::string report_to_json(const ExperimentReport& rep, bool include_timing) {
    nlohmann::ordered_json j;
    j["experiment"] = rep.experiment;
    j["seed"] = rep.seed;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : rep.rows) rows.push_back(row_json(row, include_timing));
    j["rows"] = std::move(rows);
    if (rep.summary && include_timing) {
        nlohmann::ordered_json s;
        if (rep.summary->slope) s["slope"] = *rep.summary->slope;
        if (rep.summary->intercept) s["intercept"] = *rep.summary->intercept;
        if (rep.summary->r2) s["r2"] = *rep.summary->r2;
        if (!rep.summary->note.empty()) s["note"] = rep.summary->note;
        j["summary"] = std::move(s);
    }
    return j.dump(2) + "\n";
}

std::string report_to_text(const ExperimentReport& rep, bool include_timing) {
    std::string out = "experiment: " + rep.experiment + "  seed: " + std::to_string(rep.seed) + "\n";
    if (rep.rows.empty()) return out;

    std::vector<std::string> headers;
    for (const auto& [k, v] : rep.rows.front().params) headers.push_back(k);
    headers.push_back("empirical");
    headers.push_back("theoretical");
    headers.push_back("trials");
    if (include_timing) headers.push_back("wall_ms");

    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6g", v);
        return std::string(buf);
    };
    std::vector<std::vector<std::string>> table;
    table.push_back(headers);
    for (const auto& row : rep.rows) {
        std::vector<std::string> cells;
        for (const auto& [k, v] : row.params) cells.push_back(fmt(v));
        cells.push_back(row.empirical_is_timing && !include_timing ? "-" : fmt(row.empirical));
        cells.push_back(row.theoretical ? fmt(*row.theoretical) : "-");
        cells.push_back(std::to_string(row.trials));
        if (include_timing) cells.push_back(fmt(row.wall_ms));
        table.push_back(std::move(cells));
    }
    std::vector<std::size_t> widths(table.front().size(), 0);
    for (const auto& r : table)
        for (std::size_t i = 0; i < r.size(); ++i) widths[i] = std::max(widths[i], r[i].size());
    for (const auto& r : table) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            out += r[i];
            if (i + 1 < r.size()) out += std::string(widths[i] - r[i].size() + 2, ' ');
        }
        out += "\n";
    }
    if (rep.summary && include_timing) {
        out += "summary:";
        if (rep.summary->slope) out += " slope=" + fmt(*rep.summary->slope);
        if (rep.summary->intercept) out += " intercept=" + fmt(*rep.summary->intercept);
        if (rep.summary->r2) out += " r2=" + fmt(*rep.summary->r2);
        if (!rep.summary->note.empty()) out += "  (" + rep.summary->note + ")";
        out += "\n";
    }
    return out;
}

}  // namespace oatm

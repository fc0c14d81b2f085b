// Acceptance suite: runs every criterion at its stated tolerance and prints
// one PASS/FAIL line per criterion. Exits nonzero if any criterion fails.
//
// Usage: oatm_acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oatm/experiments.hpp"
#include "oatm/rng.hpp"

using namespace oatm;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;
};

double get_param(const ReportRow& row, const std::string& key) {
    for (const auto& [k, v] : row.params)
        if (k == key) return v;
    throw std::runtime_error("missing report param " + key);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::uint64_t derive_seed_public(std::uint64_t a, std::uint64_t b) {
    return mix_bits(a * 0x9E3779B97F4A7C15ull + b + 0xBF58476D1CE4E5B9ull);
}

// ---------------------------------------------------------------- criterion 1

Outcome criterion1() {
    Outcome out;
    const double sigma = 5.0 / 255.0;
    const ExperimentReport rep = run_guarantee_validation(
        100, {0.5, 0.75, 1.0}, {8, 64, 512}, 50, 250, sigma, 20260801);
    std::string worst;
    double worst_margin = 1e9;
    for (const auto& row : rep.rows) {
        const double theory = *row.theoretical;
        const double se = std::sqrt(theory * (1.0 - theory) / row.trials);
        const double margin = row.empirical - (theory - 3.0 * se);
        if (margin < worst_margin) {
            worst_margin = margin;
            worst = "alpha=" + fmt(get_param(row, "alpha")) + " k=" + fmt(get_param(row, "k")) +
                    " empirical=" + fmt(row.empirical) + " theory=" + fmt(theory);
        }
        if (margin < 0.0) out.pass = false;
    }
    out.detail = "9 cells x 100 trials; tightest cell: " + worst +
                 " (margin " + fmt(worst_margin) + ")";
    return out;
}

// ---------------------------------------------------------------- criterion 2

Outcome criterion2() {
    Outcome out;
    int agree = 0;
    const SpaceSpec spec = SpaceSpec::translation(16, 48, 48);
    for (int trial = 0; trial < 100; ++trial) {
        const GrayImage src = synth_image(48, 48, derive_seed_public(40000, trial));
        const SyntheticInstance inst =
            gen_planted_translation(src, 16, 1.0, 0.0, derive_seed_public(41000, trial));
        MatchConfig cfg;
        cfg.space = spec;
        cfg.p0 = 0.999;
        cfg.seed = derive_seed_public(42000, trial);
        const MatchResult res = match(inst.tmpl, inst.image, cfg);
        const MatchResult brute = brute_force_match(inst.tmpl, inst.image, spec, cfg.threshold());
        if (evaluate_consensus(inst.tmpl, inst.image, res.transform, cfg.threshold()) ==
            brute.inlier_rate)
            ++agree;
    }
    out.pass = agree >= 99;
    out.detail = "matcher equals brute-force consensus on " + std::to_string(agree) +
                 "/100 exact-copy instances (need >= 99)";
    return out;
}

// ---------------------------------------------------------------- criterion 3

std::uint64_t choose_u64(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / i;
    return r;
}

Outcome criterion3() {
    Outcome out;
    // (a) hypergeometric term vs exact binomial arithmetic, 1e-12 relative.
    double worst_rel = 0.0;
    for (int d = 1; d <= 60; ++d) {
        for (int dh = 1; dh <= std::min(12, d); ++dh) {
            for (int m = 0; m <= d; ++m) {
                const double got = hypergeom_P(static_cast<double>(m) / d, d, dh);
                const double want =
                    static_cast<double>(choose_u64(m, dh)) / static_cast<double>(choose_u64(d, dh));
                if (want == 0.0) {
                    if (got != 0.0) out.pass = false;
                } else {
                    worst_rel = std::max(worst_rel, std::abs(got - want) / want);
                }
            }
        }
    }
    if (worst_rel > 1e-12) out.pass = false;

    // (b)/(c) Monte Carlo event simulations at the default parameters
    // (d_hat 9, c = 2.5 t, t = 2 sigma sqrt(2/pi), sigma = 5/255), 1e6
    // samples, agreement within 3 standard errors.
    const int d = 48, m = 36, d_hat = 9;
    GuaranteeInputs g;
    g.alpha = 0.75;
    g.d = d;
    g.d_hat = d_hat;
    g.sigma = 5.0 / 255.0;
    g.t = 2.0 * *g.sigma * std::sqrt(2.0 / 3.141592653589793);
    g.cell = 2.5 * g.t;

    const int samples = 1000000;
    auto run_sim = [&](bool gaussian, std::uint64_t seed) {
        Rng rng(seed);
        int hits = 0;
        for (int s = 0; s < samples; ++s) {
            int chosen[9];
            int n = 0;
            bool ok = true;
            while (n < d_hat) {
                const int c = static_cast<int>(rng.below(d));
                bool dup = false;
                for (int j = 0; j < n; ++j)
                    if (chosen[j] == c) dup = true;
                if (!dup) chosen[n++] = c;
            }
            for (int j = 0; j < d_hat && ok; ++j) {
                if (chosen[j] >= m) {
                    ok = false;
                    continue;
                }
                const double gap = gaussian ? std::abs(*g.sigma * rng.gaussian()) : g.t;
                const double off = g.cell * rng.uniform01();
                ok = gap <= g.cell && off < g.cell - gap;
            }
            if (ok) ++hits;
        }
        return static_cast<double>(hits) / samples;
    };

    const double want_simple = success_prob_simple(g);
    const double freq_simple = run_sim(false, 909090);
    const double se_simple = std::sqrt(want_simple * (1 - want_simple) / samples);
    const bool ok_simple = std::abs(freq_simple - want_simple) <= 3 * se_simple;

    const double want_gauss = success_prob_gaussian(g);
    const double freq_gauss = run_sim(true, 919191);
    const double se_gauss = std::sqrt(want_gauss * (1 - want_gauss) / samples);
    const bool ok_gauss = std::abs(freq_gauss - want_gauss) <= 3 * se_gauss;

    if (!ok_simple || !ok_gauss) out.pass = false;
    out.detail = "binomial worst rel err " + fmt(worst_rel) + "; simple MC " + fmt(freq_simple) +
                 " vs " + fmt(want_simple) + "; gaussian MC " + fmt(freq_gauss) + " vs " +
                 fmt(want_gauss);
    return out;
}

// ---------------------------------------------------------------- criterion 4

Outcome criterion4() {
    Outcome out;
    const ExperimentReport rep =
        run_scalability({128, 256, 512, 1024, 2048}, 32, 5, 77001);
    const double r2 = rep.summary && rep.summary->r2 ? *rep.summary->r2 : 0.0;
    const double x0 = get_param(rep.rows.front(), "sqrt_N");
    const double x1 = get_param(rep.rows.back(), "sqrt_N");
    const double t0 = rep.rows.front().empirical;
    const double t1 = rep.rows.back().empirical;
    const double time_ratio = t1 / t0;
    const double x_ratio = x1 / x0;
    out.pass = r2 >= 0.9 && time_ratio <= 2.5 * x_ratio;
    out.detail = "R2 " + fmt(r2) + " (need >= 0.9); time ratio " + fmt(time_ratio) +
                 " vs 2.5*sqrtN ratio " + fmt(2.5 * x_ratio);
    return out;
}

// ---------------------------------------------------------------- criterion 5

Outcome criterion5() {
    Outcome out;
    const std::vector<double> rates{0.3, 0.4, 0.5, 0.6, 0.8, 1.0};
    const ExperimentReport rep = run_occlusion_sweep(rates, 50, 32, 320, 505050);
    std::string details;
    for (const auto& row : rep.rows) {
        const double rate = get_param(row, "inlier_rate");
        const double limit = rate >= 0.4 ? 10.0 : 25.0;
        if (row.empirical >= limit) out.pass = false;
        details += (details.empty() ? "" : ", ") + fmt(rate) + "->" + fmt(row.empirical) + "%";
    }
    out.detail = "median center error per rate: " + details +
                 " (limits: <10% at rate>=0.4, <25% at 0.3)";
    return out;
}

// ---------------------------------------------------------------- criterion 6

std::string run_cli(const std::string& cli, const std::string& args, const std::string& out_path,
                    int expect_exit = 0) {
    const std::string cmd = cli + " " + args + " > " + out_path + " 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    const int exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    if (exit_code != expect_exit)
        throw std::runtime_error("CLI exited " + std::to_string(exit_code) + ": " + cmd);
    std::ifstream in(out_path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

Outcome criterion6() {
    Outcome out;
#ifndef OATM_CLI_PATH
#error "OATM_CLI_PATH must be defined"
#endif
    const std::string cli = OATM_CLI_PATH;
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "oatm_acceptance_cli";
    fs::create_directories(dir);

    const GrayImage src = synth_image(48, 48, 612);
    save_pgm(src, (dir / "image.pgm").string());
    std::vector<double> tpx;
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x) tpx.push_back(src.at(9 + x, 21 + y));
    save_pgm(GrayImage(16, 16, tpx), (dir / "template.pgm").string());

    const std::string tp = (dir / "template.pgm").string();
    const std::string ip = (dir / "image.pgm").string();
    const std::vector<std::pair<std::string, std::string>> invocations = {
        {"match", "match --template " + tp + " --image " + ip +
                      " --space translation --seed 7 --threads 2"},
        {"validate",
         "validate --alphas 0.5,1.0 --ks 4,16 --trials 3 --template-side 16 --image-side 64 "
         "--seed 11"},
        {"scalability", "scalability --sides 64,96 --trials 1 --template-side 16 --seed 12"},
        {"occlusion",
         "occlusion --rates 0.8 --trials 2 --template-side 16 --image-side 64 --seed 13"},
    };

    std::string fails;
    for (const auto& [name, args] : invocations) {
        std::vector<std::string> outs;
        for (int run = 0; run < 3; ++run)
            outs.push_back(run_cli(cli, args, (dir / (name + std::to_string(run))).string()));
        if (outs[0].empty() || outs[0] != outs[1] || outs[1] != outs[2])
            fails += (fails.empty() ? "" : ", ") + name;
    }
    // Thread count must not change stdout either.
    const std::string t1 = run_cli(
        cli, "match --template " + tp + " --image " + ip + " --seed 7 --threads 1",
        (dir / "threads1").string());
    const std::string t4 = run_cli(
        cli, "match --template " + tp + " --image " + ip + " --seed 7 --threads 4",
        (dir / "threads4").string());
    if (t1 != t4) fails += (fails.empty() ? "" : ", ") + std::string("threads");

    // Error exits: missing file -> 2.
    run_cli(cli, "match --template " + (dir / "absent.pgm").string() + " --image " + ip,
            (dir / "err").string(), 2);

    out.pass = fails.empty();
    out.detail = fails.empty()
                     ? "3 runs byte-identical for match/validate/scalability/occlusion; "
                       "--threads 1 == --threads 4; missing file exits 2"
                     : "byte differences in: " + fails;
    return out;
}

// ---------------------------------------------------------------- criterion 7

Outcome criterion7() {
    Outcome out;
    // Exhaustive translation coverage, both composition orientations.
    long checked = 0;
    for (int n_t = 1; n_t <= 16; ++n_t) {
        for (int n_i = n_t; n_i <= 64; ++n_i) {
            const AxisDecomposition ax = decompose_translation_axis(n_t, n_i);
            for (int sign : {+1, -1}) {
                std::vector<int> cnt(ax.placements, 0);
                for (int g : ax.net)
                    for (int h = ax.ball_lo; h <= ax.ball_hi; ++h) {
                        const int u = g + sign * h;
                        if (u >= 0 && u < ax.placements) ++cnt[u];
                    }
                for (int u = 0; u < ax.placements; ++u) {
                    if (cnt[u] < 1 || cnt[u] > 2) out.pass = false;
                }
            }
            ++checked;
        }
    }

    // Randomized approximate-coverage audit for three small affine specs.
    struct AuditSpec {
        SpaceSpec spec;
        std::uint64_t seed;
    };
    const std::vector<AuditSpec> audits = {
        {SpaceSpec::affine(16, 48, 48, 0.9, 1.1, -0.2, 0.2), 7101},
        {SpaceSpec::affine(16, 40, 40, 1.0, 1.0, -0.4, 0.4), 7102},
        {SpaceSpec::affine(12, 36, 36, 0.85, 1.15, 0.0, 0.0), 7103},
    };
    double worst_misfit = 0.0;
    for (const auto& audit : audits) {
        const SpaceSpec& spec = audit.spec;
        const Decomposition dec = build_affine_decomposition(spec);
        const double bound = spec.delta_geo * std::sqrt(2.0) + 1e-9;
        const double cx = (spec.template_w - 1) / 2.0, cy = (spec.template_h - 1) / 2.0;
        const int n_theta = static_cast<int>(dec.thetas.size());
        const int n_s = static_cast<int>(dec.scales_x.size());
        const int n_gy = static_cast<int>(dec.axis_y.net.size());
        const int n_gx = static_cast<int>(dec.axis_x.net.size());

        auto net_at = [&](int ti, int sj, int sk, int yi, int xi) -> const Transform& {
            const std::size_t idx =
                ((((static_cast<std::size_t>(ti) * n_s + sj) * n_s + sk) * n_gy + yi)) * n_gx + xi;
            return dec.net[idx];
        };
        auto nearest_cell = [](double v, double lo, double hi, int k) {
            if (k <= 1 || hi <= lo) return 0;
            const int i = static_cast<int>(std::floor((v - lo) / (hi - lo) * k));
            return std::clamp(i, 0, k - 1);
        };
        auto nearest_net = [](const std::vector<int>& net, double v) {
            int best = 0;
            for (int i = 1; i < static_cast<int>(net.size()); ++i)
                if (std::abs(net[i] - v) < std::abs(net[best] - v)) best = i;
            return best;
        };

        Rng rng(audit.seed);
        for (int sample = 0; sample < 1000; ++sample) {
            const double th = rng.uniform(spec.rot_min, spec.rot_max);
            const double sx = rng.uniform(spec.scale_min, spec.scale_max);
            const double sy = rng.uniform(spec.scale_min, spec.scale_max);
            const double tx = rng.uniform(0.0, spec.placements_x() - 1.0);
            const double ty = rng.uniform(0.0, spec.placements_y() - 1.0);
            const double ct = std::cos(th), st = std::sin(th);
            const Affine dense{ct * sx, -st * sy, st * sx, ct * sy,
                               cx + tx - (ct * sx * cx - st * sy * cy),
                               cy + ty - (st * sx * cx + ct * sy * cy)};

            const int ti0 = nearest_cell(th, spec.rot_min, spec.rot_max, n_theta);
            const int sj0 = nearest_cell(sx, spec.scale_min, spec.scale_max, n_s);
            const int sk0 = nearest_cell(sy, spec.scale_min, spec.scale_max, n_s);
            const int xi0 = nearest_net(dec.axis_x.net, tx);
            const int yi0 = nearest_net(dec.axis_y.net, ty);

            double best = 1e18;
            for (int dt = -1; dt <= 1; ++dt) {
                const int ti = std::clamp(ti0 + dt, 0, n_theta - 1);
                for (int dj = -1; dj <= 1; ++dj) {
                    const int sj = std::clamp(sj0 + dj, 0, n_s - 1);
                    for (int dk = -1; dk <= 1; ++dk) {
                        const int sk = std::clamp(sk0 + dk, 0, n_s - 1);
                        for (int dy = -1; dy <= 1; ++dy) {
                            const int yi = std::clamp(yi0 + dy, 0, n_gy - 1);
                            for (int dx = -1; dx <= 1; ++dx) {
                                const int xi = std::clamp(xi0 + dx, 0, n_gx - 1);
                                const Transform& g = net_at(ti, sj, sk, yi, xi);
                                const Affine& ga = std::get<Affine>(g);
                                // Solve A_hat * o ~ tau - u for the ball offset.
                                const double wx = tx - dec.axis_x.net[xi];
                                const double wy = ty - dec.axis_y.net[yi];
                                const double det = ga.a11 * ga.a22 - ga.a12 * ga.a21;
                                const double ox_c = (ga.a22 * wx - ga.a12 * wy) / det;
                                const double oy_c = (-ga.a21 * wx + ga.a11 * wy) / det;
                                const int ox = std::clamp(static_cast<int>(std::lround(ox_c)),
                                                          dec.axis_x.ball_lo, dec.axis_x.ball_hi);
                                const int oy = std::clamp(static_cast<int>(std::lround(oy_c)),
                                                          dec.axis_y.ball_lo, dec.axis_y.ball_hi);
                                const Transform cand = compose(g, Translation{ox, oy});
                                best = std::min(best, delta(cand, dense, spec.template_w,
                                                            spec.template_h));
                            }
                        }
                    }
                }
            }
            worst_misfit = std::max(worst_misfit, best);
            if (best > bound) out.pass = false;
        }
    }
    out.detail = std::to_string(checked) +
                 " translation pairs covered exactly (both orientations); affine audit worst "
                 "misfit " +
                 fmt(worst_misfit) + " vs bound " + fmt(std::sqrt(2.0));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    struct Entry {
        int id;
        const char* name;
        Outcome (*fn)();
    };
    const Entry entries[] = {
        {1, "guarantee validation (success rate vs bound)", criterion1},
        {2, "oracle equivalence (matcher vs brute force)", criterion2},
        {3, "probability calculus (binomial + Monte Carlo)", criterion3},
        {4, "scalability (time vs sqrt(N))", criterion4},
        {5, "occlusion robustness (median center error)", criterion5},
        {6, "CLI determinism (byte-identical stdout)", criterion6},
        {7, "coverage / decomposition exactness", criterion7},
    };

    bool all_pass = true;
    for (const Entry& e : entries) {
        if (!only.empty() && !only.count(e.id)) continue;
        const auto t0 = Clock::now();
        Outcome out;
        try {
            out = e.fn();
        } catch (const std::exception& ex) {
            out.pass = false;
            out.detail = std::string("exception: ") + ex.what();
        }
        const double secs =
            std::chrono::duration<double>(Clock::now() - t0).count();
        std::printf("%s criterion %d: %s — %s [%.1fs]\n", out.pass ? "PASS" : "FAIL", e.id,
                    e.name, out.detail.c_str(), secs);
        std::fflush(stdout);
        if (!out.pass) all_pass = false;
    }
    return all_pass ? 0 : 1;
}

#include "oatm/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>
#include <unordered_set>

namespace oatm {

namespace {

constexpr double kTwoOverPiSqrt = 0.7978845608028654;  // sqrt(2/pi)

struct RowStats {
    double mean = 0.0;
    double sd = 1.0;
};

RowStats stats(const std::vector<double>& xs) {
    RowStats s;
    if (xs.empty()) return s;
    double m = 0.0;
    for (double v : xs) m += v;
    m /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double v : xs) var += (v - m) * (v - m);
    s.mean = m;
    s.sd = std::max(std::sqrt(var / static_cast<double>(xs.size())), 1e-6);
    return s;
}

}  // namespace

double MatchConfig::threshold() const {
    if (t > 0.0) return t;
    if (sigma) return 2.0 * *sigma * kTwoOverPiSqrt;
    return 10.0 / 255.0;
}

double evaluate_consensus(const GrayImage& tmpl, const GrayImage& image, const Transform& f,
                          double t) {
    std::int64_t cnt = 0;
    for (int y = 0; y < tmpl.height(); ++y) {
        for (int x = 0; x < tmpl.width(); ++x) {
            const PixelCoord q = apply(f, {x, y});
            if (!image.contains(q.x, q.y)) continue;
            if (std::abs(tmpl.at(x, y) - image.at(q.x, q.y)) <= t) ++cnt;
        }
    }
    return static_cast<double>(cnt) / static_cast<double>(tmpl.size());
}

double evaluate_consensus_standardized(const GrayImage& tmpl, const GrayImage& image,
                                       const Transform& f, double t) {
    std::vector<double> tv, wv;
    tv.reserve(tmpl.size());
    wv.reserve(tmpl.size());
    for (int y = 0; y < tmpl.height(); ++y) {
        for (int x = 0; x < tmpl.width(); ++x) {
            const PixelCoord q = apply(f, {x, y});
            if (!image.contains(q.x, q.y)) continue;
            tv.push_back(tmpl.at(x, y));
            wv.push_back(image.at(q.x, q.y));
        }
    }
    if (wv.empty()) return 0.0;
    const RowStats st = stats(std::vector<double>(tmpl.pixels()));
    const RowStats sw = stats(wv);
    std::int64_t cnt = 0;
    for (std::size_t i = 0; i < wv.size(); ++i) {
        const double w = (wv[i] - sw.mean) / sw.sd * st.sd + st.mean;
        if (std::abs(tv[i] - w) <= t) ++cnt;
    }
    return static_cast<double>(cnt) / static_cast<double>(tmpl.size());
}

namespace {

double round_bound(const MatchConfig& cfg, double alpha, int d, int d_hat, double t, double cell) {
    GuaranteeInputs g;
    g.alpha = std::clamp(alpha, 0.0, 1.0);
    g.d = d;
    g.d_hat = d_hat;
    g.t = t;
    g.cell = cell;
    g.sigma = cfg.sigma;
    g.p0 = cfg.p0;
    return cfg.sigma ? success_prob_gaussian(g) : success_prob_simple(g);
}

std::int64_t budget_for(const MatchConfig& cfg, double p_round) {
    if (p_round <= 0.0) return cfg.k_max;
    if (p_round >= 1.0) return 1;
    return std::min(required_iterations(p_round, cfg.p0, cfg.k_max), cfg.k_max);
}

}  // namespace

MatchResult match(const GrayImage& tmpl, const GrayImage& image, const MatchConfig& cfg) {
    cfg.space.validate();
    if (tmpl.width() != cfg.space.template_w || tmpl.height() != cfg.space.template_h)
        throw ContractViolation("match: template dims do not match cfg.space");
    if (image.width() != cfg.space.image_w || image.height() != cfg.space.image_h)
        throw ContractViolation("match: image dims do not match cfg.space");
    if (!(cfg.p0 > 0.0 && cfg.p0 < 1.0)) throw ContractViolation("match: p0 outside (0,1)");

    const Decomposition dec = build_decomposition(cfg.space);
    VectorSet U = build_U(tmpl, dec);
    VectorSet V = build_V(image, dec);
    if (cfg.photometric_invariant) {
        // Both sets are renormalized to the template's statistics over T'.
        std::vector<double> tprime;
        tprime.reserve(dec.sub_template.size());
        for (const PixelCoord& p : dec.sub_template) tprime.push_back(tmpl.at(p.x, p.y));
        const RowStats ts = stats(tprime);
        U = standardize(U, ts.mean, ts.sd);
        V = standardize(V, ts.mean, ts.sd);
    }

    const double t = cfg.threshold();
    const double cell = cfg.cell_factor * t;
    if (!(cell > t)) throw ContractViolation("match: cell_factor must exceed 1");
    HashParams hp;
    hp.d_hat = std::min(cfg.d_hat, dec.d());
    hp.cell = cell;
    hp.t = t;
    hp.seed = cfg.seed;
    hp.max_bucket_pairs = cfg.max_bucket_pairs;

    auto evaluate = [&](const Transform& f) {
        return cfg.photometric_invariant ? evaluate_consensus_standardized(tmpl, image, f, t)
                                         : evaluate_consensus(tmpl, image, f, t);
    };

    MatchResult res;
    res.seed = cfg.seed;

    std::int64_t k_target =
        cfg.forced_k ? std::max<std::int64_t>(*cfg.forced_k, 0)
                     : budget_for(cfg, round_bound(cfg, cfg.alpha0, dec.d(), hp.d_hat, t, cell));

    int threads = cfg.threads > 0 ? cfg.threads
                                  : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(threads, 1);
    // Speculative batches: rounds are computed ahead in parallel but folded
    // strictly in round order, so the result never depends on the thread
    // count or batch size.
    const std::int64_t batch = static_cast<std::int64_t>(threads) * 16;

    bool found = false;
    double best_rate = -1.0;
    std::unordered_set<std::uint64_t> seen;
    std::vector<std::optional<RoundResult>> slots;
    const HashSession session(U, V, hp);
    HashSession::Workspace main_ws;
    std::vector<HashSession::Workspace> thread_ws(threads);

    std::int64_t rounds = 0;
    while (rounds < k_target) {
        const std::int64_t n = std::min(batch, k_target - rounds);
        slots.assign(static_cast<std::size_t>(n), std::nullopt);
        if (threads == 1 || n == 1) {
            for (std::int64_t i = 0; i < n; ++i)
                slots[i] = session.round(static_cast<std::uint64_t>(rounds + 1 + i), main_ws);
        } else {
            std::vector<std::thread> pool;
            std::vector<std::exception_ptr> errs(threads);
            for (int w = 0; w < threads; ++w) {
                pool.emplace_back([&, w] {
                    try {
                        for (std::int64_t i = w; i < n; i += threads)
                            slots[i] = session.round(static_cast<std::uint64_t>(rounds + 1 + i),
                                                     thread_ws[w]);
                    } catch (...) {
                        errs[w] = std::current_exception();
                    }
                });
            }
            for (auto& th : pool) th.join();
            for (auto& e : errs)
                if (e) std::rethrow_exception(e);
        }

        for (std::int64_t i = 0; i < n && rounds < k_target; ++i) {
            ++rounds;
            const auto& r = slots[i];
            if (!r) continue;
            const std::uint64_t key =
                (static_cast<std::uint64_t>(r->u_index) << 32) | static_cast<std::uint32_t>(r->v_index);
            if (!seen.insert(key).second) continue;
            const Transform cand =
                compose(V.transforms[r->v_index], invert(U.transforms[r->u_index]));
            const double rate = evaluate(cand);
            if (rate > best_rate) {
                best_rate = rate;
                res.transform = cand;
                res.round_found = rounds;
                res.improvements.emplace_back(rounds, rate);
                found = true;
                if (!cfg.forced_k)
                    k_target = budget_for(
                        cfg, round_bound(cfg, best_rate, dec.d(), hp.d_hat, t, cell));
            }
        }
    }
    res.rounds_run = rounds;

    if (!found) {
        // No cross-set collision in any round; fall back to the first
        // candidate the product space offers, honestly scored.
        res.transform = compose(V.transforms[0], invert(U.transforms[0]));
        best_rate = evaluate(res.transform);
        res.round_found = 0;
    }
    res.inlier_rate = std::max(best_rate, 0.0);
    res.theoretical_success = overall_success(
        std::clamp(round_bound(cfg, res.inlier_rate, dec.d(), hp.d_hat, t, cell), 0.0, 1.0),
        rounds);
    return res;
}

}  // namespace oatm

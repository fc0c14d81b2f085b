#include "oatm/hashgrid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <vector>

#include "oatm/rng.hpp"

namespace oatm {

int count_inliers(std::span<const double> u, std::span<const double> v, double t) {
    if (u.size() != v.size()) throw ContractViolation("count_inliers: length mismatch");
    const double* a = u.data();
    const double* b = v.data();
    const std::size_t n = u.size();
    int cnt = 0;
    for (std::size_t i = 0; i < n; ++i) cnt += std::abs(a[i] - b[i]) <= t ? 1 : 0;
    return cnt;
}

namespace {

void validate(const VectorSet& U, const VectorSet& V, const HashParams& p) {
    if (U.count() == 0 || V.count() == 0)
        throw ContractViolation("hash_round: empty vector set");
    if (U.d != V.d) throw ContractViolation("hash_round: U.d != V.d");
    if (p.d_hat < 1 || p.d_hat > U.d)
        throw ContractViolation("hash_round: d_hat outside [1, d]");
    if (!(p.cell > p.t) || !(p.t > 0.0))
        throw ContractViolation("hash_round: need cell > t > 0");
}

std::vector<double> transpose(const VectorSet& vs) {
    const std::size_t n = vs.count();
    const std::size_t d = static_cast<std::size_t>(vs.d);
    std::vector<double> cols(n * d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) cols[j * n + i] = vs.data[i * d + j];
    return cols;
}

constexpr double kKeyBias = 67108864.0;  // 2^26

// floor((col[i] + off) * inv_c) as add-and-truncate, which vectorizes where
// a libm floor call does not. Valid while |z| stays far below 2^26 cells;
// the session checks the data range once and falls back otherwise.
void column_keys_fast(const double* __restrict col, std::size_t n, double off, double inv_c,
                      std::int32_t* __restrict key) {
    for (std::size_t i = 0; i < n; ++i)
        key[i] = static_cast<std::int32_t>((col[i] + off) * inv_c + kKeyBias) - 67108864;
}

void column_keys_exact(const double* __restrict col, std::size_t n, double off, double inv_c,
                       std::int32_t* __restrict key) {
    for (std::size_t i = 0; i < n; ++i)
        key[i] = static_cast<std::int32_t>(std::floor((col[i] + off) * inv_c));
}

void column_acc(const std::int32_t* __restrict key, std::size_t n, std::uint32_t mul,
                std::uint32_t* __restrict acc) {
    for (std::size_t i = 0; i < n; ++i)
        acc[i] += static_cast<std::uint32_t>(key[i]) * mul;
}

}  // namespace

HashSession::HashSession(const VectorSet& U, const VectorSet& V, const HashParams& params)
    : u_(U), v_(V), params_(params) {
    validate(U, V, params);
    table_size_ = std::bit_ceil(U.count() + V.count());
    ucols_ = transpose(U);
    vcols_ = transpose(V);
    double max_abs = 0.0;
    for (double x : ucols_) max_abs = std::max(max_abs, std::abs(x));
    for (double x : vcols_) max_abs = std::max(max_abs, std::abs(x));
    fast_keys_ = (max_abs / params.cell + 1.0) < kKeyBias / 2;
}

std::optional<RoundResult> HashSession::round(std::uint64_t round_index) const {
    Workspace ws;
    return round(round_index, ws);
}

std::optional<RoundResult> HashSession::round(std::uint64_t round_index, Workspace& ws) const {
    const int d = u_.d;
    const int dh = params_.d_hat;
    const std::size_t un = u_.count();
    const std::size_t vn = v_.count();
    Rng rng = substream(params_.seed, round_index);

    // Draw order is fixed: dimensions, offsets, bucket multipliers.
    ws.dims.clear();
    while (static_cast<int>(ws.dims.size()) < dh) {
        const int c = static_cast<int>(rng.below(static_cast<std::uint64_t>(d)));
        if (std::find(ws.dims.begin(), ws.dims.end(), c) == ws.dims.end()) ws.dims.push_back(c);
    }
    ws.offsets.resize(dh);
    for (int j = 0; j < dh; ++j) ws.offsets[j] = params_.cell * rng.uniform01();
    ws.mult.resize(dh);
    for (int j = 0; j < dh; ++j) ws.mult[j] = rng.next() | 1ull;

    // Cell keys per sampled dimension (contiguous column scans), then the
    // bucket accumulators: Sum key_j * mult_j masked to the table size. The
    // mask keeps < 32 bits, so only the multipliers' low halves can reach
    // it; 32-bit arithmetic yields the identical bucket.
    ws.ukeys.resize(un * dh);
    ws.vkeys.resize(vn * dh);
    ws.uacc.assign(un, 0);
    ws.vacc.assign(vn, 0);
    const double inv_c = 1.0 / params_.cell;
    for (int j = 0; j < dh; ++j) {
        const double off = ws.offsets[j];
        const std::size_t dim = static_cast<std::size_t>(ws.dims[j]);
        const std::uint32_t mul = static_cast<std::uint32_t>(ws.mult[j]);
        std::int32_t* ukey = ws.ukeys.data() + static_cast<std::size_t>(j) * un;
        std::int32_t* vkey = ws.vkeys.data() + static_cast<std::size_t>(j) * vn;
        if (fast_keys_) {
            column_keys_fast(ucols_.data() + dim * un, un, off, inv_c, ukey);
            column_keys_fast(vcols_.data() + dim * vn, vn, off, inv_c, vkey);
        } else {
            column_keys_exact(ucols_.data() + dim * un, un, off, inv_c, ukey);
            column_keys_exact(vcols_.data() + dim * vn, vn, off, inv_c, vkey);
        }
        column_acc(ukey, un, mul, ws.uacc.data());
        column_acc(vkey, vn, mul, ws.vacc.data());
    }

    const std::uint32_t mask = static_cast<std::uint32_t>(table_size_ - 1);
    ws.head.assign(table_size_, -1);
    ws.chain.resize(un);
    for (std::size_t i = 0; i < un; ++i) {
        const std::uint32_t b = ws.uacc[i] & mask;
        ws.chain[i] = ws.head[b];
        ws.head[b] = static_cast<std::int32_t>(i);
    }

    if (params_.max_bucket_pairs) ws.bucket_pairs.assign(table_size_, 0);

    bool found = false;
    RoundResult best{};
    std::int64_t examined = 0;
    for (std::size_t vi = 0; vi < vn; ++vi) {
        const std::uint32_t b = ws.vacc[vi] & mask;
        for (std::int32_t ui = ws.head[b]; ui != -1; ui = ws.chain[ui]) {
            if (params_.max_bucket_pairs) {
                if (ws.bucket_pairs[b] >= *params_.max_bucket_pairs) break;
                ++ws.bucket_pairs[b];
            }
            ++examined;
            bool same_cell = true;
            for (int j = 0; j < dh; ++j) {
                if (ws.ukeys[static_cast<std::size_t>(j) * un + ui] !=
                    ws.vkeys[static_cast<std::size_t>(j) * vn + vi]) {
                    same_cell = false;
                    break;
                }
            }
            if (!same_cell) continue;
            const int cnt = count_inliers(u_.row(ui), v_.row(vi), params_.t);
            const bool better =
                !found || cnt > best.inlier_count ||
                (cnt == best.inlier_count &&
                 (ui < best.u_index ||
                  (ui == best.u_index && static_cast<int>(vi) < best.v_index)));
            if (better) {
                best.u_index = ui;
                best.v_index = static_cast<int>(vi);
                best.inlier_count = cnt;
                found = true;
            }
        }
    }
    if (!found) return std::nullopt;
    best.pairs_examined = examined;
    return best;
}

std::optional<RoundResult> hash_round(const VectorSet& U, const VectorSet& V,
                                      const HashParams& params, std::uint64_t round_index) {
    return HashSession(U, V, params).round(round_index);
}

}  // namespace oatm

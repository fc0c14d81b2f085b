#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "oatm/decomposition.hpp"

namespace oatm {

struct HashParams {
    int d_hat = 9;         // sampled dimensions per round
    double cell = 0.0;     // grid cell side c, must exceed t
    double t = 0.0;        // per-coordinate inlier threshold, intensity units
    std::uint64_t seed = 0;
    std::optional<std::int64_t> max_bucket_pairs;  // per-bucket pair cap, unlimited by default
};

struct RoundResult {
    int u_index = 0;
    int v_index = 0;
    int inlier_count = 0;          // over all d dimensions
    std::int64_t pairs_examined = 0;  // diagnostics
};

// |{ i : |u(i) - v(i)| <= t }|; lengths must match.
int count_inliers(std::span<const double> u, std::span<const double> v, double t);

// One round of randomized grid hashing between U and V: draw d_hat distinct
// dimensions and a uniform offset in [0,c]^d_hat from the (seed, round_index)
// stream, bucket the reduced vectors by their integer cell key, and score
// every cross-set pair sharing a cell by its full-dimension inlier count.
// Bucket collisions are confirmed against the full cell key, so the table
// hash never manufactures false cell matches. Returns the best pair (ties:
// smallest (u_index, v_index) lexicographically), or absent when no
// cross-set collision occurred.
std::optional<RoundResult> hash_round(const VectorSet& U, const VectorSet& V,
                                      const HashParams& params, std::uint64_t round_index);

// Repeated-round driver over a fixed (U, V, params). Holds column-major
// copies of both sets so each round gathers its sampled dimensions from
// contiguous memory. round() is bit-identical to hash_round on the same
// inputs. Rounds may run concurrently with one Workspace per thread.
class HashSession {
public:
    struct Workspace {
        std::vector<int> dims;
        std::vector<double> offsets;
        std::vector<std::uint64_t> mult;
        std::vector<std::int32_t> ukeys, vkeys;  // column-major, d_hat x count
        std::vector<std::uint32_t> uacc, vacc;
        std::vector<std::int32_t> head, chain;
        std::vector<std::int64_t> bucket_pairs;
    };

    HashSession(const VectorSet& U, const VectorSet& V, const HashParams& params);

    std::optional<RoundResult> round(std::uint64_t round_index, Workspace& ws) const;
    std::optional<RoundResult> round(std::uint64_t round_index) const;

private:
    const VectorSet& u_;
    const VectorSet& v_;
    HashParams params_;
    std::size_t table_size_;
    bool fast_keys_ = false;
    std::vector<double> ucols_, vcols_;  // d x count, column-major
};

}  // namespace oatm

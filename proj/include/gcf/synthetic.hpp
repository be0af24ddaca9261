#pragma once

#include <cstdint>

#include "gcf/interactions.hpp"

namespace gcf {

struct SplitDataset {
    InteractionMatrix train;
    InteractionMatrix test;
};

struct TwoCommunityParams {
    std::size_t users = 1500;
    std::size_t items = 2000;
    std::uint32_t min_user_degree = 12;
    std::uint32_t max_user_degree = 36;
    double zipf_exponent = 0.85;    // item popularity skew within a community
    double cross_noise = 0.02;      // chance an interaction crosses communities
    double holdout_fraction = 0.2;  // per-user test positives
};

/// Two disjoint user/item communities with skewed item popularity; users
/// interact almost only with their own community's items. Separable enough
/// for a small model to learn, with a realistic low-degree item tail.
SplitDataset two_community(const TwoCommunityParams& params, std::uint64_t seed);

}  // namespace gcf

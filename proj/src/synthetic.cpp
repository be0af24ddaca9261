#include "gcf/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace gcf {

SplitDataset two_community(const TwoCommunityParams& p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const std::size_t M = p.users, N = p.items;
    const std::size_t half_items = N / 2;
    using Edge = InteractionMatrix::Edge;

    // Popularity weights per item rank within its community.
    std::vector<double> weights(half_items);
    for (std::size_t r = 0; r < half_items; ++r)
        weights[r] = 1.0 / std::pow(static_cast<double>(r + 1), p.zipf_exponent);
    std::discrete_distribution<std::size_t> pick_rank(weights.begin(), weights.end());

    // Random item order inside each community so popularity is not index-aligned.
    std::vector<std::uint32_t> items_a(half_items), items_b(N - half_items);
    for (std::size_t r = 0; r < half_items; ++r) items_a[r] = static_cast<std::uint32_t>(r);
    for (std::size_t r = 0; r < N - half_items; ++r)
        items_b[r] = static_cast<std::uint32_t>(half_items + r);
    std::shuffle(items_a.begin(), items_a.end(), rng);
    std::shuffle(items_b.begin(), items_b.end(), rng);

    std::uniform_int_distribution<std::uint32_t> pick_deg(p.min_user_degree, p.max_user_degree);
    std::bernoulli_distribution cross(p.cross_noise);

    std::vector<Edge> train_edges, test_edges;
    std::vector<std::uint32_t> basket;
    for (std::uint32_t u = 0; u < M; ++u) {
        const bool in_a = u < M / 2;
        basket.clear();
        std::uint32_t want = pick_deg(rng);
        std::size_t guard = 0;
        while (basket.size() < want && guard++ < 50u * want) {
            const bool use_a = cross(rng) ? !in_a : in_a;
            const auto& side = use_a ? items_a : items_b;
            std::size_t rank = pick_rank(rng);
            if (rank >= side.size()) continue;
            std::uint32_t item = side[rank];
            if (std::find(basket.begin(), basket.end(), item) == basket.end())
                basket.push_back(item);
        }
        std::shuffle(basket.begin(), basket.end(), rng);
        std::size_t holdout = static_cast<std::size_t>(
            std::max(1.0, std::floor(p.holdout_fraction * static_cast<double>(basket.size()))));
        for (std::size_t k = 0; k < basket.size(); ++k) {
            if (k < holdout)
                test_edges.emplace_back(u, basket[k]);
            else
                train_edges.emplace_back(u, basket[k]);
        }
    }

    SplitDataset out;
    out.train = InteractionMatrix(M, N, std::move(train_edges));
    out.test = InteractionMatrix(M, N, std::move(test_edges));
    return out;
}

}  // namespace gcf

#include "gcf/baselines.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "gcf/dense.hpp"

namespace gcf {

namespace {

std::vector<std::uint32_t> eligible_users(const InteractionMatrix& R, std::uint32_t t) {
    if (t >= R.num_items()) throw std::out_of_range("baseline attack: target out of range");
    std::vector<std::uint32_t> out;
    auto raters = R.users_of(t);
    std::size_t p = 0;
    for (std::uint32_t u = 0; u < R.num_users(); ++u) {
        if (p < raters.size() && raters[p] == u) {
            ++p;
            continue;
        }
        out.push_back(u);
    }
    return out;
}

Perturbation make(const InteractionMatrix& R, std::uint32_t t,
                  std::vector<std::uint32_t> users, std::uint32_t budget, std::string name,
                  std::uint64_t seed) {
    Perturbation p;
    p.target_item = t;
    p.budget = budget;
    p.attack_name = std::move(name);
    p.seed = seed;
    std::sort(users.begin(), users.end());
    p.added_users = std::move(users);
    p.validate(R);
    return p;
}

}  // namespace

Perturbation rand_filter(const InteractionMatrix& R, std::uint32_t target_item,
                         std::uint32_t budget, std::uint64_t seed) {
    std::vector<std::uint32_t> pool = eligible_users(R, target_item);
    std::mt19937_64 rng(seed);
    // Partial Fisher-Yates: the first `take` slots are a uniform sample.
    std::size_t take = std::min<std::size_t>(budget, pool.size());
    for (std::size_t k = 0; k < take; ++k) {
        std::uniform_int_distribution<std::size_t> pick(k, pool.size() - 1);
        std::swap(pool[k], pool[pick(rng)]);
    }
    pool.resize(take);
    return make(R, target_item, std::move(pool), budget, "randfilter", seed);
}

Perturbation iu_filter(const InteractionMatrix& R, std::uint32_t target_item,
                       std::uint32_t budget) {
    std::vector<std::uint32_t> pool = eligible_users(R, target_item);
    auto better = [&R](std::uint32_t a, std::uint32_t b) {
        if (R.user_degree(a) != R.user_degree(b)) return R.user_degree(a) > R.user_degree(b);
        return a < b;
    };
    std::size_t take = std::min<std::size_t>(budget, pool.size());
    std::partial_sort(pool.begin(), pool.begin() + take, pool.end(), better);
    pool.resize(take);
    return make(R, target_item, std::move(pool), budget, "iufilter", 0);
}

Perturbation ru_filter(const EmbeddingTable& combined, const InteractionMatrix& R,
                       std::uint32_t target_item, std::uint32_t budget) {
    std::vector<std::uint32_t> pool = eligible_users(R, target_item);
    std::vector<double> s(R.num_users());
    auto zt = combined.items.row(target_item);
    for (std::uint32_t u = 0; u < R.num_users(); ++u) s[u] = dot(combined.users.row(u), zt);
    auto better = [&s](std::uint32_t a, std::uint32_t b) {
        if (s[a] != s[b]) return s[a] > s[b];
        return a < b;
    };
    std::size_t take = std::min<std::size_t>(budget, pool.size());
    std::partial_sort(pool.begin(), pool.begin() + take, pool.end(), better);
    pool.resize(take);
    return make(R, target_item, std::move(pool), budget, "rufilter", 0);
}

Perturbation ru_filter(const TrainedModel& model, const InteractionMatrix& R,
                       std::uint32_t target_item, std::uint32_t budget) {
    return ru_filter(model.combined(R), R, target_item, budget);
}

}  // namespace gcf

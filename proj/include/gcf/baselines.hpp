#pragma once

#include <cstdint>

#include "gcf/interactions.hpp"
#include "gcf/model.hpp"

namespace gcf {

/// Heuristic promotion attacks. All three restrict themselves to users with
/// R(u, t) == 0 and return at most `budget` additions (fewer when the
/// eligible pool runs out), interchangeable with the gradient attack's
/// Perturbation records.

/// Uniformly random eligible users; deterministic in seed.
Perturbation rand_filter(const InteractionMatrix& R, std::uint32_t target_item,
                         std::uint32_t budget, std::uint64_t seed);

/// Eligible users with the highest interaction counts (ties by index).
Perturbation iu_filter(const InteractionMatrix& R, std::uint32_t target_item,
                       std::uint32_t budget);

/// Eligible users with the highest predicted score for the target
/// (ties by index).
Perturbation ru_filter(const TrainedModel& model, const InteractionMatrix& R,
                       std::uint32_t target_item, std::uint32_t budget);
Perturbation ru_filter(const EmbeddingTable& combined, const InteractionMatrix& R,
                       std::uint32_t target_item, std::uint32_t budget);

}  // namespace gcf

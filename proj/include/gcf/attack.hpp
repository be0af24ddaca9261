#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gcf/dense.hpp"
#include "gcf/interactions.hpp"
#include "gcf/model.hpp"

namespace gcf {

struct AttackConfig {
    double lambda = 0.5;            // balance between reward and penalty terms
    double gamma = 0.95;            // score mask threshold
    std::uint32_t objective_k = 50; // recommendation-list length inside the objective
    std::uint32_t budget = 1;       // max edge additions
    /// Users kept when the threshold filter comes back empty; 0 means
    /// max(budget, 100).
    std::uint32_t fallback_pool_size = 0;

    std::uint32_t effective_fallback_pool() const;
};

/// Numerically stable for |x| well beyond 1e3.
double sigmoid(double x);
double log_sigmoid(double x);

/// Users whose sigmoid score for the target clears the threshold, or the
/// top-pool users by score if none do.
struct MaskedUserSet {
    std::vector<std::uint32_t> users;
    double gamma = 0.0;
    bool fallback_used = false;
};

MaskedUserSet mask_users(const TrainedModel& model, const InteractionMatrix& R,
                         std::uint32_t target_item, double gamma,
                         std::uint32_t fallback_pool_size);
MaskedUserSet mask_users(const EmbeddingTable& combined, const InteractionMatrix& R,
                         std::uint32_t target_item, double gamma,
                         std::uint32_t fallback_pool_size);

/// Masked promotion objective: mean over the user set of
///   lambda*log sigmoid(r_ut) - (1-lambda) * sum_{j in topK(u), j != t} log sigmoid(r_uj)
/// with top-K lists built from the current graph, training positives excluded.
double attack_objective(const TrainedModel& model, const InteractionMatrix& R,
                        std::uint32_t target_item, const MaskedUserSet& mask, double lambda,
                        std::uint32_t k);

/// Gradient of the objective with respect to every entry of R, relaxed to
/// continuous values; differentiates through the degree normalization, holds
/// the top-K lists fixed. Dense reference path for tests; O(M*N) memory.
Mat grad_full(const TrainedModel& model, const InteractionMatrix& R, std::uint32_t target_item,
              const MaskedUserSet& mask, double lambda, std::uint32_t k);

/// Target-column gradient and the eligible-edge flags.
struct SaliencyColumn {
    std::uint32_t target_item = 0;
    std::vector<double> gradient;        // length M
    std::vector<std::uint8_t> candidate; // true iff R(u, t) == 0
};

/// Peak auxiliary numbers (scalar slots) allocated by grad_target_column.
struct WorkspaceStats {
    std::size_t peak_numbers = 0;
};

/// Production path: column t of grad_full without ever materializing an
/// M x N buffer; auxiliary memory stays linear in the node count.
SaliencyColumn grad_target_column(const TrainedModel& model, const InteractionMatrix& R,
                                  std::uint32_t target_item, const MaskedUserSet& mask,
                                  double lambda, std::uint32_t k,
                                  WorkspaceStats* stats = nullptr);

/// Among absent edges with strictly positive gradient, the budget largest by
/// gradient value (ties by ascending user index). May return fewer.
std::vector<std::uint32_t> select_topk_edges(const SaliencyColumn& saliency,
                                             std::uint32_t budget);

/// Sign-ascent plus binary projection reduces to setting the selected
/// entries to 1; records them as a Perturbation (users sorted ascending).
Perturbation build_mask_and_perturb(const InteractionMatrix& R, std::uint32_t target_item,
                                    std::span<const std::uint32_t> selected_users,
                                    std::uint32_t budget, std::string attack_name);

/// Full single-step pipeline: mask, column gradient, top-budget selection,
/// projection. Deterministic.
Perturbation run_attack(const TrainedModel& model, const InteractionMatrix& R,
                        std::uint32_t target_item, const AttackConfig& config,
                        WorkspaceStats* stats = nullptr);

/// Debug dump, one "user_index,gradient,selected" row per user.
void dump_saliency_csv(const std::string& path, const SaliencyColumn& saliency,
                       std::span<const std::uint32_t> selected_users);

}  // namespace gcf

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gcf/attack.hpp"
#include "gcf/interactions.hpp"
#include "gcf/model.hpp"

namespace gcf {

enum class AttackMethod { kProposed, kRandFilter, kIUFilter, kRUFilter };

std::string to_string(AttackMethod m);
AttackMethod attack_method_from_string(const std::string& name);
std::vector<AttackMethod> all_attack_methods();

/// Crafts a perturbation for the target with the given method. The seed only
/// matters for the random baseline; the other methods are deterministic.
Perturbation craft_perturbation(AttackMethod method, const TrainedModel& model,
                                const InteractionMatrix& R, std::uint32_t target_item,
                                const AttackConfig& config, std::uint64_t seed);

/// Number of users whose first K recommendations contain the target.
std::uint32_t hit_number(const RecommendationList& recs, std::uint32_t target_item,
                         std::uint32_t k);

/// Hit count over users outside the perturbation's added set. Because the
/// added users hold (u, t) as a training positive on the perturbed graph,
/// this coincides with hit_number there.
std::uint32_t pruned_hit_number(const RecommendationList& recs, std::uint32_t target_item,
                                std::uint32_t k, const Perturbation& p);

/// List-free hit counting for one target over a graph: hn counts every user,
/// phn skips `excluded_users` (must be sorted ascending).
struct HitCounts {
    std::vector<std::uint32_t> hn;   // aligned with the ks argument
    std::vector<std::uint32_t> phn;
};
HitCounts count_target_hits(const EmbeddingTable& combined, const InteractionMatrix& graph,
                            std::uint32_t target_item, std::span<const std::uint32_t> ks,
                            std::span<const std::uint32_t> excluded_users, int threads = 1);

/// One report row: a (protocol, attack, target item, K) measurement.
struct PromotionResult {
    std::string protocol;
    std::string attack;
    std::uint32_t target_item = 0;
    std::uint32_t budget = 0;
    std::uint32_t k = 0;
    std::uint32_t hn = 0;
    std::uint32_t phn = 0;
    std::uint64_t seed = 0;
    double precision = -1.0;  // negative means not computed
    double recall = -1.0;
    double ndcg = -1.0;
};

struct ExperimentReport {
    std::string dataset;
    std::string protocol;
    double item_percentile = 0.0;
    int budget_variant = 0;
    std::vector<PromotionResult> rows;

    double mean_hn(const std::string& attack, std::uint32_t k) const;
    double mean_phn(const std::string& attack, std::uint32_t k) const;

    void write_csv(const std::string& path) const;
    void write_aggregate_json(const std::string& path) const;
};

struct EvalConfig {
    AttackConfig attack;                 // budget, lambda, gamma, objective K
    std::vector<std::uint32_t> ks{50};   // report cutoffs
    std::uint64_t seed = 0;              // harness seed; fans out per target item
    int threads = 1;
    bool quality_metrics = false;        // fill precision/recall/ndcg per row
    std::string dataset_label = "dataset";
    double item_percentile = 0.0;
    int budget_variant = 0;
};

/// Fixed embeddings, perturbed graph: craft, apply, re-propagate, count.
/// All methods see the same items and per-item seeds.
ExperimentReport experiment_whitebox(const TrainedModel& model, const InteractionMatrix& R,
                                     const InteractionMatrix* test,
                                     std::span<const AttackMethod> methods,
                                     std::span<const std::uint32_t> items,
                                     const EvalConfig& config);

/// Perturbations crafted on `source`, measured on victims trained
/// independently on the clean graph. Row protocol carries the victim tag.
ExperimentReport experiment_blackbox(const TrainedModel& source,
                                     std::span<const ModelConfig> victim_configs,
                                     const InteractionMatrix& R, const InteractionMatrix* test,
                                     std::span<const AttackMethod> methods,
                                     std::span<const std::uint32_t> items,
                                     const EvalConfig& config);

/// Retrains from scratch on each perturbed graph (init seeded by
/// train_config.seed, identical across perturbations) and counts hits on the
/// retrained model. Each row is paired with a "<attack>+cleanref" row for an
/// unperturbed item whose degree is closest to the target's perturbed degree.
ExperimentReport experiment_retrain(const InteractionMatrix& R,
                                    std::span<const Perturbation> perturbations,
                                    const ModelConfig& train_config,
                                    const InteractionMatrix* test, const EvalConfig& config);

/// Recommendation-quality drift between two (model, graph) pairs.
struct QualityAudit {
    RecMetrics before, after;
    double delta_precision = 0.0, delta_recall = 0.0, delta_ndcg = 0.0;      // after - before
    double rel_precision = 0.0, rel_recall = 0.0, rel_ndcg = 0.0;            // delta / before
};

QualityAudit audit_recommendation_quality(const EmbeddingTable& combined_before,
                                          const EmbeddingTable& combined_after,
                                          const InteractionMatrix& R_clean,
                                          const InteractionMatrix& R_pert,
                                          const InteractionMatrix& test, std::uint32_t k,
                                          int threads = 1);
QualityAudit audit_recommendation_quality(const TrainedModel& model_before,
                                          const TrainedModel& model_after,
                                          const InteractionMatrix& R_clean,
                                          const InteractionMatrix& R_pert,
                                          const InteractionMatrix& test, std::uint32_t k,
                                          int threads = 1);

/// Deterministic sample (without replacement) from the percentile tie set;
/// returns the whole set when it is smaller than count.
std::vector<std::uint32_t> sample_target_items(const DegreeProfile& degrees, double percentile,
                                               std::size_t count, std::uint64_t seed);

}  // namespace gcf

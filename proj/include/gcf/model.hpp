#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gcf/dense.hpp"
#include "gcf/interactions.hpp"

namespace gcf {

struct ModelConfig {
    std::uint32_t num_layers = 3;  // L
    std::uint32_t embed_dim = 64;  // d
    /// Per-layer combination weights (size L+1). Empty means uniform 1/(L+1).
    std::vector<double> layer_weights;
    std::uint64_t seed = 2020;
    std::uint32_t epochs = 1000;
    double learning_rate = 1e-3;
    double l2_reg = 1e-4;
    std::uint32_t batch_size = 2048;

    /// Resolved combination weights, always of size num_layers + 1.
    std::vector<double> alphas() const;
    void validate() const;
};

/// Layer-0 (trainable) user and item vectors; users is M x d, items is N x d.
struct EmbeddingTable {
    Mat users;
    Mat items;

    bool finite() const;
    bool operator==(const EmbeddingTable&) const = default;
};

/// Entries i.i.d. Gaussian(0, 0.1^2), deterministic in config.seed.
EmbeddingTable init_embeddings(const ModelConfig& config, std::size_t num_users,
                               std::size_t num_items);

/// Layers 0..L of linear propagation: layer l users = R~ * items(l-1),
/// layer l items = R~^T * users(l-1). Identity activation.
std::vector<EmbeddingTable> propagate(const NormalizedMatrix& norm, const EmbeddingTable& e0,
                                      std::uint32_t num_layers);

/// Weighted sum of layers; alpha.size() must equal layers.size().
EmbeddingTable combine(const std::vector<EmbeddingTable>& layers, std::span<const double> alpha);

struct TrainedModel {
    ModelConfig config;
    EmbeddingTable embeddings;  // layer-0 parameters
    std::size_t num_users = 0;
    std::size_t num_items = 0;

    /// Full forward pass on the given graph: normalize, propagate, combine.
    EmbeddingTable combined(const InteractionMatrix& R) const;
};

/// r_hat(u,i) = <z_u, z_i> over combined embeddings.
double score(const EmbeddingTable& combined, std::uint32_t u, std::uint32_t i);
std::vector<double> score_all_items(const EmbeddingTable& combined, std::uint32_t u);

/// Per-user top-K lists, descending score, ties by ascending item index,
/// training positives excluded. Each list has min(K, N - deg(u)) items.
struct RecommendationList {
    std::uint32_t k = 0;
    std::vector<std::vector<std::uint32_t>> items;  // one list per user
};

RecommendationList recommend_topk(const EmbeddingTable& combined,
                                  const InteractionMatrix& train, std::uint32_t k,
                                  int threads = 1);
RecommendationList recommend_topk(const TrainedModel& model, const InteractionMatrix& train,
                                  std::uint32_t k, int threads = 1);

struct RecMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double ndcg = 0.0;
};

/// Binary-relevance precision/recall/NDCG at recs.k, averaged over users with
/// at least one test positive. NDCG uses a log2 discount.
RecMetrics rec_metrics(const RecommendationList& recs, const InteractionMatrix& test);

/// Binary checkpoint: self-describing header (M, N, d, L, alpha, seed, epochs)
/// followed by row-major little-endian float32 user and item matrices.
void save_checkpoint(const TrainedModel& model, const std::string& path);
TrainedModel load_checkpoint(const std::string& path);

}  // namespace gcf

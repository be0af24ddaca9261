#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "gcf/interactions.hpp"
#include "gcf/model.hpp"

namespace gcf {

/// One pairwise ranking sample: user u prefers item pos over item neg.
struct TrainTriple {
    std::uint32_t user = 0;
    std::uint32_t pos = 0;  // R(user, pos) == 1
    std::uint32_t neg = 0;  // R(user, neg) == 0
};

/// Users uniform over users that have at least one positive and one negative
/// item; positive uniform over the user's positives; negative by uniform
/// rejection over non-positives.
std::vector<TrainTriple> sample_triples(const InteractionMatrix& R, std::size_t count,
                                        std::mt19937_64& rng);

/// Pairwise ranking loss over a batch, differentiated through the full
/// L-layer propagation. Returns the gradient with respect to the layer-0
/// embeddings and the mean per-triple loss
///   -log sigmoid(r_pos - r_neg) + l2/2 (|w_u|^2 + |w_pos|^2 + |w_neg|^2).
struct BprGradient {
    EmbeddingTable grad;
    double mean_loss = 0.0;
};

BprGradient bpr_gradients(const EmbeddingTable& embeddings, const NormalizedMatrix& norm,
                          const ModelConfig& config, std::span<const TrainTriple> triples);

/// Adaptive-moment optimizer state for the two embedding matrices.
struct AdamState {
    Mat m_users, v_users, m_items, v_items;
    std::uint64_t step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    static AdamState like(const EmbeddingTable& e);
};

/// One optimizer step on `embeddings` in place; returns the batch mean loss.
double bpr_step(EmbeddingTable& embeddings, const NormalizedMatrix& norm,
                const ModelConfig& config, std::span<const TrainTriple> triples,
                AdamState& adam);

/// Full training loop: config.epochs epochs of max(1, |entries|/batch_size)
/// steps each, deterministic in config.seed. Writes "epoch,loss,elapsed_ms"
/// CSV lines to epoch_log when given. Throws on non-finite loss.
TrainedModel train(const InteractionMatrix& R, const ModelConfig& config,
                   std::ostream* epoch_log = nullptr);

}  // namespace gcf

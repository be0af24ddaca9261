#include "gcf/training.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace gcf {

namespace {

double stable_sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

// -log sigmoid(x), stable for large |x|
double softplus_neg(double x) {
    if (x >= 0.0) return std::log1p(std::exp(-x));
    return -x + std::log1p(std::exp(x));
}

}  // namespace

std::vector<TrainTriple> sample_triples(const InteractionMatrix& R, std::size_t count,
                                        std::mt19937_64& rng) {
    const std::size_t N = R.num_items();
    std::vector<std::uint32_t> eligible;
    for (std::uint32_t u = 0; u < R.num_users(); ++u) {
        std::uint32_t deg = R.user_degree(u);
        if (deg >= 1 && deg < N) eligible.push_back(u);  // needs a positive and a negative
    }
    if (eligible.empty())
        throw std::invalid_argument("no user has both a positive and a negative item");

    std::uniform_int_distribution<std::size_t> pick_user(0, eligible.size() - 1);
    std::uniform_int_distribution<std::uint32_t> pick_item(0, static_cast<std::uint32_t>(N) - 1);

    std::vector<TrainTriple> triples;
    triples.reserve(count);
    for (std::size_t n = 0; n < count; ++n) {
        TrainTriple t;
        t.user = eligible[pick_user(rng)];
        auto pos = R.items_of(t.user);
        std::uniform_int_distribution<std::size_t> pick_pos(0, pos.size() - 1);
        t.pos = pos[pick_pos(rng)];
        do {
            t.neg = pick_item(rng);
        } while (R.has(t.user, t.neg));
        triples.push_back(t);
    }
    return triples;
}

BprGradient bpr_gradients(const EmbeddingTable& embeddings, const NormalizedMatrix& norm,
                          const ModelConfig& config, std::span<const TrainTriple> triples) {
    if (triples.empty()) throw std::invalid_argument("bpr_gradients: empty batch");
    const std::vector<double> alpha = config.alphas();
    const std::vector<EmbeddingTable> layers = propagate(norm, embeddings, config.num_layers);
    const EmbeddingTable z = combine(layers, alpha);

    const double inv_b = 1.0 / static_cast<double>(triples.size());
    EmbeddingTable adj;  // dL/dZ
    adj.users = Mat(z.users.rows(), z.users.cols());
    adj.items = Mat(z.items.rows(), z.items.cols());

    double loss = 0.0;
    for (const TrainTriple& t : triples) {
        auto zu = z.users.row(t.user);
        auto zi = z.items.row(t.pos);
        auto zj = z.items.row(t.neg);
        double diff = dot(zu, zi) - dot(zu, zj);
        loss += softplus_neg(diff);
        double g = (stable_sigmoid(diff) - 1.0) * inv_b;  // d(-log sigmoid)/d(diff), batch mean
        auto au = adj.users.row(t.user);
        for (std::size_t k = 0; k < au.size(); ++k) au[k] += g * (zi[k] - zj[k]);
        axpy(g, zu, adj.items.row(t.pos));
        axpy(-g, zu, adj.items.row(t.neg));
    }

    // The combined embedding is a symmetric linear map of the layer-0 table,
    // so the adjoint propagates through the same map.
    BprGradient out;
    out.grad = combine(propagate(norm, adj, config.num_layers), alpha);

    if (config.l2_reg > 0.0) {
        const double c = config.l2_reg * inv_b;
        for (const TrainTriple& t : triples) {
            axpy(c, embeddings.users.row(t.user), out.grad.users.row(t.user));
            axpy(c, embeddings.items.row(t.pos), out.grad.items.row(t.pos));
            axpy(c, embeddings.items.row(t.neg), out.grad.items.row(t.neg));
            auto sq = [](std::span<const double> v) { return dot(v, v); };
            loss += 0.5 * config.l2_reg *
                    (sq(embeddings.users.row(t.user)) + sq(embeddings.items.row(t.pos)) +
                     sq(embeddings.items.row(t.neg)));
        }
    }
    out.mean_loss = loss * inv_b;
    return out;
}

AdamState AdamState::like(const EmbeddingTable& e) {
    AdamState s;
    s.m_users = Mat(e.users.rows(), e.users.cols());
    s.v_users = Mat(e.users.rows(), e.users.cols());
    s.m_items = Mat(e.items.rows(), e.items.cols());
    s.v_items = Mat(e.items.rows(), e.items.cols());
    return s;
}

double bpr_step(EmbeddingTable& embeddings, const NormalizedMatrix& norm,
                const ModelConfig& config, std::span<const TrainTriple> triples,
                AdamState& adam) {
    BprGradient g = bpr_gradients(embeddings, norm, config, triples);
    ++adam.step;
    const double bc1 = 1.0 - std::pow(adam.beta1, static_cast<double>(adam.step));
    const double bc2 = 1.0 - std::pow(adam.beta2, static_cast<double>(adam.step));
    auto update = [&](Mat& w, const Mat& grad, Mat& m, Mat& v) {
        for (std::size_t idx = 0; idx < w.size(); ++idx) {
            double gi = grad.data()[idx];
            double& mi = m.data()[idx];
            double& vi = v.data()[idx];
            mi = adam.beta1 * mi + (1.0 - adam.beta1) * gi;
            vi = adam.beta2 * vi + (1.0 - adam.beta2) * gi * gi;
            w.data()[idx] -= config.learning_rate * (mi / bc1) / (std::sqrt(vi / bc2) + adam.eps);
        }
    };
    update(embeddings.users, g.grad.users, adam.m_users, adam.v_users);
    update(embeddings.items, g.grad.items, adam.m_items, adam.v_items);
    return g.mean_loss;
}

TrainedModel train(const InteractionMatrix& R, const ModelConfig& config,
                   std::ostream* epoch_log) {
    config.validate();
    TrainedModel model;
    model.config = config;
    model.num_users = R.num_users();
    model.num_items = R.num_items();
    model.embeddings = init_embeddings(config, R.num_users(), R.num_items());
    if (config.epochs == 0) return model;

    DegreeProfile deg = compute_degrees(R);
    NormalizedMatrix norm = normalize(R, deg);
    AdamState adam = AdamState::like(model.embeddings);
    std::mt19937_64 rng(config.seed);

    const std::size_t steps = std::max<std::size_t>(1, R.num_entries() / config.batch_size);
    if (epoch_log) (*epoch_log) << "epoch,loss,elapsed_ms\n";
    const auto t0 = std::chrono::steady_clock::now();
    for (std::uint32_t epoch = 1; epoch <= config.epochs; ++epoch) {
        double epoch_loss = 0.0;
        for (std::size_t s = 0; s < steps; ++s) {
            auto triples = sample_triples(R, config.batch_size, rng);
            double loss = bpr_step(model.embeddings, norm, config, triples, adam);
            if (!std::isfinite(loss))
                throw std::runtime_error("training diverged: non-finite loss at epoch " +
                                         std::to_string(epoch) + " step " + std::to_string(s));
            epoch_loss += loss;
        }
        epoch_loss /= static_cast<double>(steps);
        if (epoch_log) {
            auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
            (*epoch_log) << epoch << "," << epoch_loss << "," << ms << "\n";
        }
    }
    if (!model.embeddings.finite())
        throw std::runtime_error("training produced non-finite embeddings");
    return model;
}

}  // namespace gcf

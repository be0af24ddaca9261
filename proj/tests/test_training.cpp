#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <sstream>

#include "gcf/training.hpp"
#include "support/oracles.hpp"
#include "support/synth.hpp"

using namespace gcf;

namespace {

// Independent scalar evaluation of the batch loss as a function of the
// layer-0 embeddings, for finite differencing.
double bpr_loss_oracle(const InteractionMatrix& R, const Mat& wu, const Mat& wi,
                       const std::vector<double>& alpha, std::span<const TrainTriple> triples,
                       double l2) {
    Mat A = oracle::dense_normalized(oracle::dense_from(R));
    auto layers =
        oracle::dense_propagate(A, wu, wi, static_cast<std::uint32_t>(alpha.size()) - 1);
    auto [zu, zi] = oracle::dense_combine(layers, alpha);
    double loss = 0.0;
    for (const TrainTriple& t : triples) {
        double diff = dot(zu.row(t.user), zi.row(t.pos)) - dot(zu.row(t.user), zi.row(t.neg));
        loss += -oracle::logsig(diff);
        loss += 0.5 * l2 *
                (dot(wu.row(t.user), wu.row(t.user)) + dot(wi.row(t.pos), wi.row(t.pos)) +
                 dot(wi.row(t.neg), wi.row(t.neg)));
    }
    return loss / static_cast<double>(triples.size());
}

ModelConfig tiny_config(std::uint32_t L, std::uint32_t d, std::uint64_t seed) {
    ModelConfig c;
    c.num_layers = L;
    c.embed_dim = d;
    c.seed = seed;
    return c;
}

// Two fully connected user/item blocks with one held-out positive per user.
struct Separable {
    InteractionMatrix train;
    InteractionMatrix test;
};

Separable separable_5x5() {
    std::vector<InteractionMatrix::Edge> tr = {{0, 0}, {0, 1}, {1, 1}, {1, 2}, {2, 0},
                                               {2, 2}, {3, 3}, {4, 4}};
    std::vector<InteractionMatrix::Edge> te = {{0, 2}, {1, 0}, {2, 1}, {3, 4}, {4, 3}};
    return {InteractionMatrix(5, 5, tr), InteractionMatrix(5, 5, te)};
}

}  // namespace

TEST_CASE("sample_triples on a forced instance") {
    InteractionMatrix R(1, 2, {{0, 0}});
    std::mt19937_64 rng(1);
    auto triples = sample_triples(R, 20, rng);
    for (const auto& t : triples) {
        CHECK(t.user == 0);
        CHECK(t.pos == 0);
        CHECK(t.neg == 1);
    }
}

TEST_CASE("sample_triples is deterministic per seed and valid") {
    std::mt19937_64 gen(3);
    InteractionMatrix R = synth::random_matrix(12, 15, 0.25, gen);
    std::mt19937_64 a(42), b(42);
    auto ta = sample_triples(R, 500, a);
    auto tb = sample_triples(R, 500, b);
    REQUIRE(ta.size() == tb.size());
    for (std::size_t k = 0; k < ta.size(); ++k) {
        CHECK(ta[k].user == tb[k].user);
        CHECK(ta[k].pos == tb[k].pos);
        CHECK(ta[k].neg == tb[k].neg);
        CHECK(R.has(ta[k].user, ta[k].pos));
        CHECK_FALSE(R.has(ta[k].user, ta[k].neg));
    }
}

TEST_CASE("sample_triples draws users near-uniformly") {
    std::mt19937_64 gen(5);
    InteractionMatrix R = synth::random_matrix(10, 20, 0.3, gen);
    std::size_t eligible = 0;
    for (std::uint32_t u = 0; u < 10; ++u)
        if (R.user_degree(u) >= 1 && R.user_degree(u) < 20) ++eligible;
    REQUIRE(eligible == 10);

    std::mt19937_64 rng(11);
    const std::size_t n = 100000;
    auto triples = sample_triples(R, n, rng);
    std::vector<std::size_t> counts(10, 0);
    for (const auto& t : triples) ++counts[t.user];
    const double p = 1.0 / 10.0;
    const double sigma = std::sqrt(n * p * (1 - p));
    for (std::uint32_t u = 0; u < 10; ++u)
        CHECK(std::abs(static_cast<double>(counts[u]) - n * p) <= 3.0 * sigma);
}

TEST_CASE("sample_triples skips users without negatives") {
    // user 0 has rated everything; user 1 has one positive
    InteractionMatrix R(2, 2, {{0, 0}, {0, 1}, {1, 0}});
    std::mt19937_64 rng(9);
    auto triples = sample_triples(R, 50, rng);
    for (const auto& t : triples) CHECK(t.user == 1);
}

TEST_CASE("bpr loss at zero score difference is log 2") {
    InteractionMatrix R(1, 2, {{0, 0}});
    NormalizedMatrix norm = normalize(R, compute_degrees(R));
    ModelConfig c = tiny_config(1, 4, 11);
    c.l2_reg = 0.0;
    EmbeddingTable e;
    e.users = Mat(1, 4);  // all zeros -> every score 0
    e.items = Mat(2, 4);
    std::vector<TrainTriple> triples = {{0, 0, 1}};
    BprGradient g = bpr_gradients(e, norm, c, triples);
    CHECK(g.mean_loss == doctest::Approx(0.693147).epsilon(1e-6));
}

TEST_CASE("bpr loss saturates to zero for a large positive margin") {
    InteractionMatrix R(1, 2, {{0, 0}});
    NormalizedMatrix norm = normalize(R, compute_degrees(R));
    ModelConfig c = tiny_config(0, 1, 11);
    c.l2_reg = 0.0;
    c.layer_weights = {1.0};
    EmbeddingTable e;
    e.users = Mat(1, 1);
    e.items = Mat(2, 1);
    e.users(0, 0) = 10.0;
    e.items(0, 0) = 10.0;   // r_pos = 100
    e.items(1, 0) = -10.0;  // r_neg = -100
    std::vector<TrainTriple> triples = {{0, 0, 1}};
    BprGradient g = bpr_gradients(e, norm, c, triples);
    CHECK(g.mean_loss < 1e-12);
}

TEST_CASE("bpr gradients match central finite differences") {
    std::mt19937_64 gen(13);
    const double h = 1e-4;
    for (int trial = 0; trial < 6; ++trial) {
        const std::uint32_t L = trial % 4;  // 0..3
        const std::uint32_t d = 2 + trial % 3;
        const std::size_t M = 5 + trial % 3, N = 6 + trial % 2;
        InteractionMatrix R = synth::random_matrix(M, N, 0.3, gen);
        NormalizedMatrix norm = normalize(R, compute_degrees(R));
        ModelConfig c = tiny_config(L, d, 100 + trial);
        c.l2_reg = (trial % 2) ? 1e-2 : 0.0;
        EmbeddingTable e = init_embeddings(c, M, N);
        std::mt19937_64 rng(17 + trial);
        auto triples = sample_triples(R, 8, rng);

        BprGradient analytic = bpr_gradients(e, norm, c, triples);
        const std::vector<double> alpha = c.alphas();

        auto check_entry = [&](Mat& m, std::size_t idx, double got) {
            const double keep = m.data()[idx];
            m.data()[idx] = keep + h;
            double fp = bpr_loss_oracle(R, e.users, e.items, alpha, triples, c.l2_reg);
            m.data()[idx] = keep - h;
            double fm = bpr_loss_oracle(R, e.users, e.items, alpha, triples, c.l2_reg);
            m.data()[idx] = keep;
            double fd = (fp - fm) / (2 * h);
            CHECK(oracle::rel_err(got, fd) < 1e-4);
        };
        for (std::size_t idx = 0; idx < e.users.size(); ++idx)
            check_entry(e.users, idx, analytic.grad.users.data()[idx]);
        for (std::size_t idx = 0; idx < e.items.size(); ++idx)
            check_entry(e.items, idx, analytic.grad.items.data()[idx]);
    }
}

TEST_CASE("train with zero epochs returns the initialization") {
    std::mt19937_64 gen(19);
    InteractionMatrix R = synth::random_matrix(8, 9, 0.3, gen);
    ModelConfig c = tiny_config(2, 4, 55);
    c.epochs = 0;
    TrainedModel m = train(R, c);
    CHECK(m.embeddings == init_embeddings(c, 8, 9));
}

TEST_CASE("train is deterministic") {
    std::mt19937_64 gen(23);
    InteractionMatrix R = synth::random_matrix(10, 12, 0.25, gen);
    ModelConfig c = tiny_config(2, 4, 77);
    c.epochs = 5;
    c.batch_size = 16;
    TrainedModel a = train(R, c);
    TrainedModel b = train(R, c);
    CHECK(a.embeddings == b.embeddings);
}

TEST_CASE("train does not mutate the input matrix") {
    std::mt19937_64 gen(29);
    InteractionMatrix R = synth::random_matrix(10, 12, 0.25, gen);
    InteractionMatrix copy = R;
    ModelConfig c = tiny_config(1, 4, 3);
    c.epochs = 3;
    c.batch_size = 8;
    train(R, c);
    CHECK(R == copy);
}

TEST_CASE("training learns a separable two-block dataset") {
    Separable data = separable_5x5();
    ModelConfig c = tiny_config(2, 8, 2024);
    c.epochs = 200;
    c.batch_size = 8;
    c.learning_rate = 1e-2;
    c.l2_reg = 1e-4;

    std::ostringstream log;
    TrainedModel m = train(data.train, c, &log);

    // epoch CSV: loss decreases between epochs 1 and 50, all finite
    std::istringstream in(log.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "epoch,loss,elapsed_ms");
    std::vector<double> losses;
    while (std::getline(in, line)) {
        auto c1 = line.find(','), c2 = line.rfind(',');
        losses.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
    }
    REQUIRE(losses.size() == 200);
    for (double l : losses) CHECK(std::isfinite(l));
    CHECK(losses[49] < losses[0]);

    RecommendationList recs = recommend_topk(m, data.train, 2);
    RecMetrics metrics = rec_metrics(recs, data.test);
    CHECK(metrics.recall >= 0.9);
}

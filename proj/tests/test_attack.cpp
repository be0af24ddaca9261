#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <random>

#include "gcf/attack.hpp"
#include "gcf/training.hpp"
#include "support/oracles.hpp"
#include "support/synth.hpp"

using namespace gcf;

namespace {

TrainedModel model_for(const InteractionMatrix& R, std::uint32_t L, std::uint32_t d,
                       std::uint64_t seed) {
    TrainedModel m;
    m.config.num_layers = L;
    m.config.embed_dim = d;
    m.config.seed = seed;
    m.num_users = R.num_users();
    m.num_items = R.num_items();
    m.embeddings = init_embeddings(m.config, R.num_users(), R.num_items());
    return m;
}

// Library-independent evaluation of the masked objective from scratch.
double objective_oracle(const TrainedModel& model, const InteractionMatrix& R, std::uint32_t t,
                        const std::vector<std::uint32_t>& users, double lambda,
                        std::uint32_t k) {
    Mat A = oracle::dense_normalized(oracle::dense_from(R));
    auto layers = oracle::dense_propagate(A, model.embeddings.users, model.embeddings.items,
                                          model.config.num_layers);
    auto [zu, zi] = oracle::dense_combine(layers, model.config.alphas());
    double acc = 0.0;
    for (std::uint32_t u : users) {
        std::vector<double> s(R.num_items());
        for (std::uint32_t i = 0; i < R.num_items(); ++i) s[i] = dot(zu.row(u), zi.row(i));
        std::vector<std::uint32_t> pos(R.items_of(u).begin(), R.items_of(u).end());
        auto omega = oracle::topk_sorted(s, pos, k);
        double term = lambda * oracle::logsig(s[t]);
        for (std::uint32_t j : omega)
            if (j != t) term -= (1.0 - lambda) * oracle::logsig(s[j]);
        acc += term;
    }
    return acc / static_cast<double>(users.size());
}

std::vector<std::uint32_t> all_users(std::size_t m) {
    std::vector<std::uint32_t> out(m);
    for (std::uint32_t u = 0; u < m; ++u) out[u] = u;
    return out;
}

// Fixed user set and fixed per-user lists for the finite-difference probe,
// both computed by the oracle's own forward.
struct FrozenObjective {
    std::vector<std::uint32_t> users;
    std::vector<std::vector<std::uint32_t>> omega;
};

FrozenObjective freeze(const TrainedModel& model, const InteractionMatrix& R, std::uint32_t t,
                       double gamma, std::uint32_t k) {
    Mat A = oracle::dense_normalized(oracle::dense_from(R));
    auto layers = oracle::dense_propagate(A, model.embeddings.users, model.embeddings.items,
                                          model.config.num_layers);
    auto [zu, zi] = oracle::dense_combine(layers, model.config.alphas());
    FrozenObjective fr;
    for (std::uint32_t u = 0; u < R.num_users(); ++u)
        if (oracle::sig(dot(zu.row(u), zi.row(t))) >= gamma) fr.users.push_back(u);
    if (fr.users.empty()) fr.users = all_users(R.num_users());
    for (std::uint32_t u : fr.users) {
        std::vector<double> s(R.num_items());
        for (std::uint32_t i = 0; i < R.num_items(); ++i) s[i] = dot(zu.row(u), zi.row(i));
        std::vector<std::uint32_t> pos(R.items_of(u).begin(), R.items_of(u).end());
        fr.omega.push_back(oracle::topk_sorted(s, pos, k));
    }
    return fr;
}

}  // namespace

TEST_CASE("sigmoid basics and stability") {
    CHECK(sigmoid(0.0) == doctest::Approx(0.5));
    CHECK(sigmoid(2.0) == doctest::Approx(0.880797).epsilon(1e-6));
    for (double x : {0.3, 1.7, 25.0, 700.0}) {
        CHECK(sigmoid(x) + sigmoid(-x) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::isfinite(log_sigmoid(x)));
        CHECK(std::isfinite(log_sigmoid(-x)));
    }
    CHECK(sigmoid(1000.0) == doctest::Approx(1.0));
    CHECK(sigmoid(-1000.0) == doctest::Approx(0.0));
    CHECK(log_sigmoid(-1000.0) == doctest::Approx(-1000.0).epsilon(1e-9));
}

TEST_CASE("mask_users filters by threshold") {
    // L=0 model with unit alpha: scores are the raw embedding products.
    InteractionMatrix R(3, 1, {});
    TrainedModel m = model_for(R, 0, 1, 1);
    m.config.layer_weights = {1.0};
    m.embeddings.items(0, 0) = 1.0;
    auto logit = [](double p) { return std::log(p / (1.0 - p)); };
    m.embeddings.users(0, 0) = logit(0.96);
    m.embeddings.users(1, 0) = 0.0;  // sigma = 0.5
    m.embeddings.users(2, 0) = logit(0.97);

    MaskedUserSet mask = mask_users(m, R, 0, 0.95, 10);
    CHECK(mask.users == std::vector<std::uint32_t>{0, 2});
    CHECK_FALSE(mask.fallback_used);
}

TEST_CASE("mask_users with gamma zero keeps every user") {
    std::mt19937_64 rng(3);
    InteractionMatrix R = synth::random_matrix(9, 7, 0.25, rng);
    TrainedModel m = model_for(R, 2, 4, 5);
    MaskedUserSet mask = mask_users(m, R, 2, 0.0, 5);
    CHECK(mask.users == all_users(9));
    CHECK_FALSE(mask.fallback_used);
}

TEST_CASE("mask_users falls back to the top pool when empty") {
    InteractionMatrix R(5, 1, {});
    TrainedModel m = model_for(R, 0, 1, 7);
    m.config.layer_weights = {1.0};
    m.embeddings.items(0, 0) = 1.0;
    double v[] = {-0.5, 0.8, 0.1, 0.9, -1.0};  // all sigmas < 0.95
    for (int u = 0; u < 5; ++u) m.embeddings.users(u, 0) = v[u];

    MaskedUserSet mask = mask_users(m, R, 0, 0.95, 3);
    CHECK(mask.fallback_used);
    CHECK(mask.users == std::vector<std::uint32_t>{1, 2, 3});  // three highest sigmas, sorted
    CHECK_THROWS_AS(mask_users(m, R, 0, 0.95, 0), std::invalid_argument);
}

TEST_CASE("attack_objective single-term cases") {
    // lambda=1, single user, r_ut = 0: only the target term, log 0.5
    InteractionMatrix R(1, 2, {});
    TrainedModel m = model_for(R, 0, 1, 11);
    m.config.layer_weights = {1.0};
    // zero embeddings -> all scores zero
    m.embeddings.users.fill(0.0);
    m.embeddings.items.fill(0.0);
    MaskedUserSet one;
    one.users = {0};
    CHECK(attack_objective(m, R, 0, one, 1.0, 1) == doctest::Approx(-0.693147).epsilon(1e-6));
    // lambda=0, K=1: omega = {item 0} by tie-break, target 1 -> penalty +log 2
    CHECK(attack_objective(m, R, 1, one, 0.0, 1) == doctest::Approx(0.693147).epsilon(1e-6));

    MaskedUserSet empty;
    CHECK_THROWS_AS(attack_objective(m, R, 0, empty, 0.5, 1), std::invalid_argument);
}

TEST_CASE("attack_objective matches an independent loop oracle") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 4; ++trial) {
        InteractionMatrix R = synth::random_matrix(10, 12, 0.2, rng);
        TrainedModel m = model_for(R, 1 + trial % 2, 4, 17 + trial);
        std::uint32_t t = trial % 12;
        MaskedUserSet mask = mask_users(m, R, t, 0.0, 5);
        double got = attack_objective(m, R, t, mask, 0.5, 4);
        double want = objective_oracle(m, R, t, mask.users, 0.5, 4);
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("masked objective with gamma zero equals the unmasked objective") {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 10; ++trial) {
        InteractionMatrix R = synth::random_matrix(8, 9, 0.25, rng);
        TrainedModel m = model_for(R, 2, 3, 100 + trial);
        std::uint32_t t = trial % 9;
        MaskedUserSet mask = mask_users(m, R, t, 0.0, 4);
        double masked = attack_objective(m, R, t, mask, 0.5, 3);
        double unmasked = objective_oracle(m, R, t, all_users(8), 0.5, 3);
        CHECK(masked == doctest::Approx(unmasked).epsilon(1e-12));
    }
}

TEST_CASE("grad_full is zero for a propagation-free model") {
    std::mt19937_64 rng(23);
    InteractionMatrix R = synth::random_matrix(6, 7, 0.3, rng);
    TrainedModel m = model_for(R, 0, 3, 29);
    MaskedUserSet mask = mask_users(m, R, 1, 0.0, 3);
    Mat g = grad_full(m, R, 1, mask, 0.7, 3);
    for (std::size_t idx = 0; idx < g.size(); ++idx) CHECK(g.data()[idx] == 0.0);
}

TEST_CASE("grad_full matches the hand-derived chain rule on the empty 1x1 graph") {
    // X = 0, so both degree clamps are flat and A == X near the base point.
    // With L=1, alpha=(1/2,1/2): r = 1/4 (wu + X wi)(wi + X wu), hence
    // dr/dX|_0 = (wu^2 + wi^2)/4 and dL/dX = (1 - sigmoid(r)) (wu^2 + wi^2)/4.
    InteractionMatrix R(1, 1, {});
    TrainedModel m = model_for(R, 1, 1, 31);
    const double wu = 2.0, wi = 3.0;
    m.embeddings.users(0, 0) = wu;
    m.embeddings.items(0, 0) = wi;
    MaskedUserSet mask;
    mask.users = {0};
    Mat g = grad_full(m, R, 0, mask, 1.0, 1);
    const double r = 0.25 * wu * wi;
    const double expect = (1.0 - sigmoid(r)) * 0.25 * (wu * wu + wi * wi);
    CHECK(g(0, 0) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("grad_full cancels exactly on the saturated 1x1 graph") {
    // All degrees are 1; the direct term and the two degree terms cancel.
    InteractionMatrix R(1, 1, {{0, 0}});
    TrainedModel m = model_for(R, 1, 1, 37);
    m.embeddings.users(0, 0) = 1.3;
    m.embeddings.items(0, 0) = -0.4;
    MaskedUserSet mask;
    mask.users = {0};
    Mat g = grad_full(m, R, 0, mask, 1.0, 1);
    CHECK(g(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("grad_full matches central finite differences of the relaxed objective") {
    std::mt19937_64 rng(41);
    const double h = 1e-4;
    int instances = 0;
    for (int trial = 0; trial < 24; ++trial) {
        const std::size_t M = 6 + trial % 5, N = 6 + (trial / 2) % 5;
        const std::uint32_t L = trial % 3, d = 2 + trial % 3;
        InteractionMatrix R = synth::random_matrix_no_degree_one(M, N, 0.3, rng);
        TrainedModel m = model_for(R, L, d, 200 + trial);
        const std::uint32_t t = trial % N;
        const double lambda = (trial % 3 == 0) ? 1.0 : (trial % 3 == 1 ? 0.0 : 0.5);
        const double gamma = (trial % 2) ? 0.5 : 0.0;
        const std::uint32_t k = 2 + trial % 3;

        FrozenObjective frozen = freeze(m, R, t, gamma, k);
        MaskedUserSet mask;
        mask.users = frozen.users;
        mask.gamma = gamma;
        Mat analytic = grad_full(m, R, t, mask, lambda, k);

        Mat X = oracle::dense_from(R);
        const std::vector<double> alpha = m.config.alphas();
        for (std::size_t u = 0; u < M; ++u)
            for (std::size_t i = 0; i < N; ++i) {
                const double keep = X(u, i);
                X(u, i) = keep + h;
                double fp = oracle::relaxed_objective(X, m.embeddings.users, m.embeddings.items,
                                                      alpha, t, lambda, frozen.users,
                                                      frozen.omega);
                X(u, i) = keep - h;
                double fm = oracle::relaxed_objective(X, m.embeddings.users, m.embeddings.items,
                                                      alpha, t, lambda, frozen.users,
                                                      frozen.omega);
                X(u, i) = keep;
                const double fd = (fp - fm) / (2 * h);
                CHECK(oracle::rel_err(analytic(u, i), fd) < 1e-4);
            }
        ++instances;
    }
    CHECK(instances >= 20);
}

TEST_CASE("grad_target_column equals the target column of grad_full") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 12; ++trial) {
        const std::size_t M = 8 + trial % 20, N = 7 + trial % 25;
        const std::uint32_t L = trial % 4, d = 2 + trial % 4;
        InteractionMatrix R = synth::random_matrix(M, N, 0.15 + 0.02 * (trial % 4), rng);
        TrainedModel m = model_for(R, L, d, 300 + trial);
        const std::uint32_t t = (7 * trial) % N;
        const double lambda = 0.5, gamma = (trial % 2) ? 0.9 : 0.0;
        MaskedUserSet mask = mask_users(m, R, t, gamma, 3 + trial % 5);

        Mat full = grad_full(m, R, t, mask, lambda, 4);
        WorkspaceStats stats;
        SaliencyColumn col = grad_target_column(m, R, t, mask, lambda, 4, &stats);

        REQUIRE(col.gradient.size() == M);
        for (std::uint32_t u = 0; u < M; ++u) {
            CHECK(std::abs(col.gradient[u] - full(u, t)) < 1e-9);
            CHECK(col.candidate[u] == (R.has(u, t) ? 0 : 1));
        }
        CHECK(stats.peak_numbers > 0);
        // auxiliary memory stays linear in the node count
        const std::size_t node_linear = (L + 3) * (M + N) * d + 8 * (M + N) + 64;
        CHECK(stats.peak_numbers <= node_linear);
    }
}

TEST_CASE("grad_target_column is zero for a propagation-free model") {
    std::mt19937_64 rng(47);
    InteractionMatrix R = synth::random_matrix(10, 8, 0.25, rng);
    TrainedModel m = model_for(R, 0, 4, 53);
    MaskedUserSet mask = mask_users(m, R, 3, 0.0, 4);
    SaliencyColumn col = grad_target_column(m, R, 3, mask, 0.5, 5);
    for (double v : col.gradient) CHECK(v == 0.0);
}

TEST_CASE("select_topk_edges keeps positive-gradient candidates in order") {
    SaliencyColumn sal;
    sal.target_item = 0;
    sal.gradient = {0.5, -0.2, 0.9};
    sal.candidate = {1, 1, 1};
    CHECK(select_topk_edges(sal, 2) == std::vector<std::uint32_t>{2, 0});

    sal.gradient = {-0.5, -0.2, -0.9};
    CHECK(select_topk_edges(sal, 2).empty());

    sal.gradient = {0.5, 0.7, 0.9};
    sal.candidate = {1, 0, 1};  // existing edge is never selected
    CHECK(select_topk_edges(sal, 5) == std::vector<std::uint32_t>{2, 0});

    CHECK_THROWS_AS(select_topk_edges(sal, 0), std::invalid_argument);
}

TEST_CASE("select_topk_edges matches a full-sort oracle on 1000 candidates") {
    std::mt19937_64 rng(59);
    SaliencyColumn sal;
    sal.target_item = 0;
    sal.gradient.resize(1000);
    sal.candidate.assign(1000, 1);
    std::normal_distribution<double> g;
    for (auto& v : sal.gradient) v = g(rng);

    auto got = select_topk_edges(sal, 10);
    std::vector<std::uint32_t> order;
    for (std::uint32_t u = 0; u < 1000; ++u)
        if (sal.gradient[u] > 0.0) order.push_back(u);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (sal.gradient[a] != sal.gradient[b]) return sal.gradient[a] > sal.gradient[b];
        return a < b;
    });
    order.resize(10);
    CHECK(got == order);
}

TEST_CASE("build_mask_and_perturb constructs a sorted valid perturbation") {
    InteractionMatrix R(3, 2, {{1, 1}});
    std::vector<std::uint32_t> sel = {2, 0};
    Perturbation p = build_mask_and_perturb(R, 1, sel, 2, "proposed");
    CHECK(p.added_users == std::vector<std::uint32_t>{0, 2});
    CHECK(p.target_item == 1);
    InteractionMatrix pert = apply_perturbation(R, p);
    CHECK(pert.has(0, 1));
    CHECK(pert.has(2, 1));

    Perturbation empty = build_mask_and_perturb(R, 1, {}, 2, "proposed");
    CHECK(apply_perturbation(R, empty) == R);
}

TEST_CASE("run_attack yields an empty perturbation when no gradient is positive") {
    std::mt19937_64 rng(61);
    InteractionMatrix R = synth::random_matrix(8, 6, 0.3, rng);
    TrainedModel m = model_for(R, 0, 4, 67);  // L=0: all gradients vanish
    AttackConfig cfg;
    cfg.budget = 3;
    Perturbation p = run_attack(m, R, 2, cfg);
    CHECK(p.added_users.empty());
    CHECK(apply_perturbation(R, p) == R);
}

TEST_CASE("run_attack satisfies the perturbation invariants for any gamma") {
    std::mt19937_64 rng(71);
    InteractionMatrix R = synth::random_matrix(15, 12, 0.2, rng);
    ModelConfig tc;
    tc.num_layers = 2;
    tc.embed_dim = 8;
    tc.seed = 5;
    tc.epochs = 30;
    tc.batch_size = 16;
    tc.learning_rate = 5e-3;
    TrainedModel m = train(R, tc);

    for (double gamma : {0.0, 0.95}) {
        AttackConfig cfg;
        cfg.gamma = gamma;
        cfg.budget = 4;
        Perturbation p = run_attack(m, R, 3, cfg);
        p.validate(R);  // throws on any invariant breach
        CHECK(p.added_users.size() <= 4);
        // deterministic
        Perturbation q = run_attack(m, R, 3, cfg);
        CHECK(p == q);
    }
    AttackConfig bad;
    bad.budget = 0;
    CHECK_THROWS_AS(run_attack(m, R, 3, bad), std::invalid_argument);
    AttackConfig cfg;
    cfg.budget = 1;
    CHECK_THROWS_AS(run_attack(m, R, 99, cfg), std::out_of_range);
}

TEST_CASE("the budget-1 attack ranks high against exhaustive single-edge enumeration") {
    // 15-user toys with two soft communities, briefly trained. The promotion
    // term (lambda=1) is enumerated; at lambda<1 a single binary edge moves
    // the exact penalty term mostly through the degree renormalization, which
    // swamps any per-user signal at this scale.
    for (int inst = 0; inst < 5; ++inst) {
        std::mt19937_64 rng(73 + inst);
        std::vector<InteractionMatrix::Edge> edges;
        for (std::uint32_t u = 0; u < 15; ++u)
            for (std::uint32_t i = 0; i < 12; ++i) {
                bool same = (u < 8) == (i < 6);
                if (std::bernoulli_distribution(same ? 0.45 : 0.04)(rng))
                    edges.emplace_back(u, i);
            }
        InteractionMatrix R(15, 12, std::move(edges));
        ModelConfig tc;
        tc.num_layers = 2;
        tc.embed_dim = 8;
        tc.seed = 9 + inst;
        tc.epochs = 60;
        tc.batch_size = 32;
        tc.learning_rate = 5e-3;
        TrainedModel m = train(R, tc);

        // pick a low-degree target
        DegreeProfile deg = compute_degrees(R);
        std::uint32_t t = 0;
        for (std::uint32_t i = 0; i < 12; ++i)
            if (deg.item_degrees[i] < deg.item_degrees[t]) t = i;

        const double lambda = 1.0;
        const std::uint32_t k = 5;
        MaskedUserSet everyone = mask_users(m, R, t, 0.0, 100);  // gamma 0: stable user set

        AttackConfig cfg;
        cfg.lambda = lambda;
        cfg.gamma = 0.0;
        cfg.objective_k = k;
        cfg.budget = 1;
        Perturbation p = run_attack(m, R, t, cfg);
        REQUIRE(p.added_users.size() == 1);
        const std::uint32_t chosen = p.added_users[0];

        // exact objective for every single-edge addition
        std::vector<std::pair<double, std::uint32_t>> gains;
        for (std::uint32_t u = 0; u < 15; ++u) {
            if (R.has(u, t)) continue;
            Perturbation one;
            one.target_item = t;
            one.budget = 1;
            one.added_users = {u};
            InteractionMatrix pert = apply_perturbation(R, one);
            gains.emplace_back(attack_objective(m, pert, t, everyone, lambda, k), u);
        }
        std::sort(gains.begin(), gains.end(),
                  [](auto& a, auto& b) { return a.first > b.first; });
        std::size_t rank = 0;
        while (rank < gains.size() && gains[rank].second != chosen) ++rank;
        // first-order proposal sits in the top 20% of the exact ranking
        CHECK(rank < std::max<std::size_t>(1, (gains.size() + 4) / 5));
    }
}

TEST_CASE("a budget-1 attack does not decrease the target term") {
    int improved = 0;
    const int trials = 20;
    for (int trial = 0; trial < trials; ++trial) {
        std::mt19937_64 rng(500 + trial);
        InteractionMatrix R = synth::random_matrix(12, 10, 0.25, rng);
        ModelConfig tc;
        tc.num_layers = 2;
        tc.embed_dim = 4;
        tc.seed = 700 + trial;
        tc.epochs = 25;
        tc.batch_size = 16;
        tc.learning_rate = 5e-3;
        TrainedModel m = train(R, tc);
        DegreeProfile deg = compute_degrees(R);
        std::uint32_t t = 0;
        for (std::uint32_t i = 0; i < 10; ++i)
            if (deg.item_degrees[i] < deg.item_degrees[t]) t = i;

        AttackConfig cfg;
        cfg.budget = 1;
        Perturbation p = run_attack(m, R, t, cfg);
        if (p.added_users.empty()) {
            ++improved;  // nothing applied, term unchanged
            continue;
        }
        auto target_term = [&](const InteractionMatrix& graph) {
            MaskedUserSet mask =
                mask_users(m, graph, t, cfg.gamma, cfg.effective_fallback_pool());
            EmbeddingTable z = m.combined(graph);
            double acc = 0.0;
            for (std::uint32_t u : mask.users) acc += log_sigmoid(score(z, u, t));
            return acc / static_cast<double>(mask.users.size());
        };
        double before = target_term(R);
        double after = target_term(apply_perturbation(R, p));
        if (after >= before - 1e-12) ++improved;
    }
    CHECK(improved >= trials * 8 / 10);
}

TEST_CASE("target-column dominance fraction report") {
    // Empirical check of the column-restriction heuristic; reported, not asserted.
    std::mt19937_64 rng(79);
    InteractionMatrix R = synth::random_matrix(12, 10, 0.25, rng);
    ModelConfig tc;
    tc.num_layers = 2;
    tc.embed_dim = 8;
    tc.seed = 13;
    tc.epochs = 50;
    tc.batch_size = 16;
    tc.learning_rate = 5e-3;
    TrainedModel m = train(R, tc);
    DegreeProfile deg = compute_degrees(R);
    std::uint32_t t = 0;
    for (std::uint32_t i = 0; i < 10; ++i)
        if (deg.item_degrees[i] < deg.item_degrees[t]) t = i;
    MaskedUserSet mask = mask_users(m, R, t, 0.0, 10);
    Mat g = grad_full(m, R, t, mask, 0.5, 5);
    int dominant = 0;
    for (std::uint32_t u = 0; u < 12; ++u) {
        double best_other = -1e300;
        for (std::uint32_t j = 0; j < 10; ++j)
            if (j != t) best_other = std::max(best_other, g(u, j));
        if (g(u, t) > best_other) ++dominant;
    }
    MESSAGE("target-column gradient dominates for ", dominant, "/12 users");
    CHECK(dominant >= 0);  // informational
}

TEST_CASE("saliency dump writes one row per user") {
    SaliencyColumn sal;
    sal.target_item = 1;
    sal.gradient = {0.25, -0.5};
    sal.candidate = {1, 1};
    auto path = std::filesystem::temp_directory_path() / "gcf_sal.csv";
    std::vector<std::uint32_t> sel = {0};
    dump_saliency_csv(path.string(), sal, sel);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "user_index,gradient,selected");
    std::getline(in, line);
    CHECK(line == "0,0.25,1");
    std::getline(in, line);
    CHECK(line == "1,-0.5,0");
}

#include "gcf/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include "gcf/parallel.hpp"

namespace gcf {

std::vector<double> ModelConfig::alphas() const {
    if (!layer_weights.empty()) {
        if (layer_weights.size() != static_cast<std::size_t>(num_layers) + 1)
            throw std::invalid_argument("layer_weights must have num_layers+1 entries");
        return layer_weights;
    }
    return std::vector<double>(num_layers + 1, 1.0 / (num_layers + 1.0));
}

void ModelConfig::validate() const {
    if (embed_dim == 0) throw std::invalid_argument("embed_dim must be positive");
    if (batch_size == 0) throw std::invalid_argument("batch_size must be positive");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
    if (l2_reg < 0.0) throw std::invalid_argument("l2_reg must be nonnegative");
    for (double a : layer_weights)
        if (a < 0.0) throw std::invalid_argument("layer weights must be nonnegative");
    alphas();  // checks length
}

bool EmbeddingTable::finite() const {
    auto ok = [](const Mat& m) {
        for (std::size_t idx = 0; idx < m.size(); ++idx)
            if (!std::isfinite(m.data()[idx])) return false;
        return true;
    };
    return ok(users) && ok(items);
}

EmbeddingTable init_embeddings(const ModelConfig& config, std::size_t num_users,
                               std::size_t num_items) {
    if (num_users == 0 || num_items == 0)
        throw std::invalid_argument("init_embeddings needs positive dimensions");
    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> gauss(0.0, 0.1);
    EmbeddingTable e;
    e.users = Mat(num_users, config.embed_dim);
    e.items = Mat(num_items, config.embed_dim);
    for (std::size_t idx = 0; idx < e.users.size(); ++idx) e.users.data()[idx] = gauss(rng);
    for (std::size_t idx = 0; idx < e.items.size(); ++idx) e.items.data()[idx] = gauss(rng);
    return e;
}

std::vector<EmbeddingTable> propagate(const NormalizedMatrix& norm, const EmbeddingTable& e0,
                                      std::uint32_t num_layers) {
    const InteractionMatrix& R = norm.source();
    const std::size_t M = R.num_users(), N = R.num_items();
    const std::size_t d = e0.users.cols();
    if (e0.users.rows() != M || e0.items.rows() != N || e0.items.cols() != d)
        throw std::invalid_argument("embedding table does not match graph dimensions");

    const auto& su = norm.user_scale();
    const auto& si = norm.item_scale();

    std::vector<EmbeddingTable> layers;
    layers.reserve(num_layers + 1);
    layers.push_back(e0);
    for (std::uint32_t l = 1; l <= num_layers; ++l) {
        const EmbeddingTable& prev = layers.back();
        EmbeddingTable next;
        next.users = Mat(M, d);
        next.items = Mat(N, d);
        for (std::uint32_t u = 0; u < M; ++u) {
            auto out = next.users.row(u);
            for (std::uint32_t i : R.items_of(u))
                axpy(su[u] * si[i], prev.items.row(i), out);
        }
        for (std::uint32_t i = 0; i < N; ++i) {
            auto out = next.items.row(i);
            for (std::uint32_t u : R.users_of(i))
                axpy(su[u] * si[i], prev.users.row(u), out);
        }
        layers.push_back(std::move(next));
    }
    return layers;
}

EmbeddingTable combine(const std::vector<EmbeddingTable>& layers, std::span<const double> alpha) {
    if (layers.empty()) throw std::invalid_argument("combine needs at least one layer");
    if (alpha.size() != layers.size())
        throw std::invalid_argument("combine: weight count does not match layer count");
    EmbeddingTable out;
    out.users = Mat(layers[0].users.rows(), layers[0].users.cols());
    out.items = Mat(layers[0].items.rows(), layers[0].items.cols());
    for (std::size_t l = 0; l < layers.size(); ++l) {
        for (std::size_t idx = 0; idx < out.users.size(); ++idx)
            out.users.data()[idx] += alpha[l] * layers[l].users.data()[idx];
        for (std::size_t idx = 0; idx < out.items.size(); ++idx)
            out.items.data()[idx] += alpha[l] * layers[l].items.data()[idx];
    }
    return out;
}

EmbeddingTable TrainedModel::combined(const InteractionMatrix& R) const {
    if (R.num_users() != num_users || R.num_items() != num_items)
        throw std::invalid_argument("graph does not match model dimensions");
    DegreeProfile deg = compute_degrees(R);
    NormalizedMatrix norm = normalize(R, deg);
    std::vector<double> alpha = config.alphas();
    return combine(propagate(norm, embeddings, config.num_layers), alpha);
}

double score(const EmbeddingTable& combined, std::uint32_t u, std::uint32_t i) {
    if (u >= combined.users.rows() || i >= combined.items.rows())
        throw std::out_of_range("score index out of range");
    return dot(combined.users.row(u), combined.items.row(i));
}

std::vector<double> score_all_items(const EmbeddingTable& combined, std::uint32_t u) {
    if (u >= combined.users.rows()) throw std::out_of_range("score_all_items: bad user");
    const std::size_t N = combined.items.rows();
    std::vector<double> s(N);
    auto zu = combined.users.row(u);
    for (std::uint32_t i = 0; i < N; ++i) s[i] = dot(zu, combined.items.row(i));
    return s;
}

RecommendationList recommend_topk(const EmbeddingTable& combined,
                                  const InteractionMatrix& train, std::uint32_t k,
                                  int threads) {
    if (k == 0) throw std::invalid_argument("k must be positive");
    const std::size_t M = train.num_users(), N = train.num_items();
    if (combined.users.rows() != M || combined.items.rows() != N)
        throw std::invalid_argument("recommend_topk: dimensions do not match");

    RecommendationList recs;
    recs.k = k;
    recs.items.resize(M);

    parallel_for(M, threads, [&](std::size_t b, std::size_t e) {
        std::vector<double> s;
        std::vector<std::uint32_t> cand;
        for (std::size_t uu = b; uu < e; ++uu) {
            auto u = static_cast<std::uint32_t>(uu);
            s = score_all_items(combined, u);
            cand.clear();
            auto pos = train.items_of(u);
            std::size_t p = 0;
            for (std::uint32_t i = 0; i < N; ++i) {
                if (p < pos.size() && pos[p] == i) {
                    ++p;
                    continue;
                }
                cand.push_back(i);
            }
            auto better = [&s](std::uint32_t a, std::uint32_t bidx) {
                if (s[a] != s[bidx]) return s[a] > s[bidx];
                return a < bidx;
            };
            std::size_t take = std::min<std::size_t>(k, cand.size());
            if (take < cand.size())
                std::nth_element(cand.begin(), cand.begin() + take, cand.end(), better);
            std::sort(cand.begin(), cand.begin() + take, better);
            recs.items[u].assign(cand.begin(), cand.begin() + take);
        }
    });
    return recs;
}

RecommendationList recommend_topk(const TrainedModel& model, const InteractionMatrix& train,
                                  std::uint32_t k, int threads) {
    return recommend_topk(model.combined(train), train, k, threads);
}

RecMetrics rec_metrics(const RecommendationList& recs, const InteractionMatrix& test) {
    if (recs.items.size() != test.num_users())
        throw std::invalid_argument("rec_metrics: user count mismatch");
    const std::uint32_t k = recs.k;
    double sum_p = 0.0, sum_r = 0.0, sum_n = 0.0;
    std::size_t counted = 0;
    for (std::uint32_t u = 0; u < test.num_users(); ++u) {
        auto rel = test.items_of(u);
        if (rel.empty()) continue;
        ++counted;
        const auto& list = recs.items[u];
        std::size_t hits = 0;
        double dcg = 0.0;
        for (std::size_t r = 0; r < list.size() && r < k; ++r) {
            if (std::binary_search(rel.begin(), rel.end(), list[r])) {
                ++hits;
                dcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
            }
        }
        double idcg = 0.0;
        for (std::size_t r = 0; r < std::min<std::size_t>(k, rel.size()); ++r)
            idcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
        sum_p += static_cast<double>(hits) / static_cast<double>(k);
        sum_r += static_cast<double>(hits) / static_cast<double>(rel.size());
        if (idcg > 0.0) sum_n += dcg / idcg;
    }
    RecMetrics m;
    if (counted > 0) {
        m.precision = sum_p / static_cast<double>(counted);
        m.recall = sum_r / static_cast<double>(counted);
        m.ndcg = sum_n / static_cast<double>(counted);
    }
    return m;
}

namespace {

constexpr char kMagic[8] = {'G', 'C', 'F', 'C', 'K', 'P', 'T', '1'};

template <typename T>
void put(std::ofstream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw std::runtime_error("checkpoint truncated");
    return v;
}

}  // namespace

void save_checkpoint(const TrainedModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out.write(kMagic, sizeof(kMagic));
    put<std::uint64_t>(out, model.num_users);
    put<std::uint64_t>(out, model.num_items);
    put<std::uint32_t>(out, model.config.embed_dim);
    put<std::uint32_t>(out, model.config.num_layers);
    put<std::uint32_t>(out, model.config.epochs);
    put<std::uint32_t>(out, model.config.batch_size);
    put<std::uint64_t>(out, model.config.seed);
    put<double>(out, model.config.learning_rate);
    put<double>(out, model.config.l2_reg);
    for (double a : model.config.alphas()) put<double>(out, a);
    auto dump = [&out](const Mat& m) {
        for (std::size_t idx = 0; idx < m.size(); ++idx)
            put<float>(out, static_cast<float>(m.data()[idx]));
    };
    dump(model.embeddings.users);
    dump(model.embeddings.items);
    if (!out) throw std::runtime_error("write failed: " + path);
}

TrainedModel load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("not a model checkpoint: " + path);

    TrainedModel model;
    model.num_users = get<std::uint64_t>(in);
    model.num_items = get<std::uint64_t>(in);
    model.config.embed_dim = get<std::uint32_t>(in);
    model.config.num_layers = get<std::uint32_t>(in);
    model.config.epochs = get<std::uint32_t>(in);
    model.config.batch_size = get<std::uint32_t>(in);
    model.config.seed = get<std::uint64_t>(in);
    model.config.learning_rate = get<double>(in);
    model.config.l2_reg = get<double>(in);
    model.config.layer_weights.resize(model.config.num_layers + 1);
    for (double& a : model.config.layer_weights) a = get<double>(in);

    model.embeddings.users = Mat(model.num_users, model.config.embed_dim);
    model.embeddings.items = Mat(model.num_items, model.config.embed_dim);
    auto slurp = [&in](Mat& m) {
        for (std::size_t idx = 0; idx < m.size(); ++idx)
            m.data()[idx] = static_cast<double>(get<float>(in));
    };
    slurp(model.embeddings.users);
    slurp(model.embeddings.items);
    return model;
}

}  // namespace gcf

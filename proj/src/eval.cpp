#include "gcf/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "json.hpp"

#include "gcf/baselines.hpp"
#include "gcf/parallel.hpp"
#include "gcf/rng.hpp"
#include "gcf/training.hpp"

namespace gcf {

std::string to_string(AttackMethod m) {
    switch (m) {
        case AttackMethod::kProposed: return "proposed";
        case AttackMethod::kRandFilter: return "randfilter";
        case AttackMethod::kIUFilter: return "iufilter";
        case AttackMethod::kRUFilter: return "rufilter";
    }
    throw std::logic_error("bad attack method");
}

AttackMethod attack_method_from_string(const std::string& name) {
    if (name == "proposed") return AttackMethod::kProposed;
    if (name == "randfilter") return AttackMethod::kRandFilter;
    if (name == "iufilter") return AttackMethod::kIUFilter;
    if (name == "rufilter") return AttackMethod::kRUFilter;
    throw std::invalid_argument("unknown attack method: " + name);
}

std::vector<AttackMethod> all_attack_methods() {
    return {AttackMethod::kRandFilter, AttackMethod::kIUFilter, AttackMethod::kRUFilter,
            AttackMethod::kProposed};
}

Perturbation craft_perturbation(AttackMethod method, const TrainedModel& model,
                                const InteractionMatrix& R, std::uint32_t target_item,
                                const AttackConfig& config, std::uint64_t seed) {
    switch (method) {
        case AttackMethod::kProposed: return run_attack(model, R, target_item, config);
        case AttackMethod::kRandFilter: return rand_filter(R, target_item, config.budget, seed);
        case AttackMethod::kIUFilter: return iu_filter(R, target_item, config.budget);
        case AttackMethod::kRUFilter: return ru_filter(model, R, target_item, config.budget);
    }
    throw std::logic_error("bad attack method");
}

std::uint32_t hit_number(const RecommendationList& recs, std::uint32_t target_item,
                         std::uint32_t k) {
    if (k > recs.k) throw std::invalid_argument("hit_number: lists shorter than requested k");
    std::uint32_t hits = 0;
    for (const auto& list : recs.items) {
        std::size_t upto = std::min<std::size_t>(k, list.size());
        for (std::size_t r = 0; r < upto; ++r)
            if (list[r] == target_item) {
                ++hits;
                break;
            }
    }
    return hits;
}

std::uint32_t pruned_hit_number(const RecommendationList& recs, std::uint32_t target_item,
                                std::uint32_t k, const Perturbation& p) {
    if (k > recs.k) throw std::invalid_argument("pruned_hit_number: lists shorter than k");
    std::vector<std::uint32_t> excluded = p.added_users;
    std::sort(excluded.begin(), excluded.end());
    std::uint32_t hits = 0;
    for (std::uint32_t u = 0; u < recs.items.size(); ++u) {
        if (std::binary_search(excluded.begin(), excluded.end(), u)) continue;
        const auto& list = recs.items[u];
        std::size_t upto = std::min<std::size_t>(k, list.size());
        for (std::size_t r = 0; r < upto; ++r)
            if (list[r] == target_item) {
                ++hits;
                break;
            }
    }
    return hits;
}

HitCounts count_target_hits(const EmbeddingTable& combined, const InteractionMatrix& graph,
                            std::uint32_t target_item, std::span<const std::uint32_t> ks,
                            std::span<const std::uint32_t> excluded_users, int threads) {
    const std::size_t M = graph.num_users(), N = graph.num_items();
    const std::uint32_t t = target_item;
    if (t >= N) throw std::out_of_range("count_target_hits: target out of range");

    // rank[u] = number of candidate items ahead of t; M+1 marks "cannot hit".
    std::vector<std::uint32_t> rank(M, 0);
    const std::uint32_t kNoHit = static_cast<std::uint32_t>(N) + 1;
    parallel_for(M, threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t uu = b; uu < e; ++uu) {
            auto u = static_cast<std::uint32_t>(uu);
            if (graph.has(u, t)) {
                rank[u] = kNoHit;  // training positive, never recommended
                continue;
            }
            auto zu = combined.users.row(u);
            const double st = dot(zu, combined.items.row(t));
            std::uint32_t ahead = 0;
            for (std::uint32_t j = 0; j < N; ++j) {
                if (j == t) continue;
                double sj = dot(zu, combined.items.row(j));
                if (sj > st || (sj == st && j < t)) ++ahead;
            }
            for (std::uint32_t j : graph.items_of(u)) {
                double sj = dot(zu, combined.items.row(j));
                if (sj > st || (sj == st && j < t)) --ahead;
            }
            rank[u] = ahead;
        }
    });

    HitCounts counts;
    counts.hn.assign(ks.size(), 0);
    counts.phn.assign(ks.size(), 0);
    for (std::uint32_t u = 0; u < M; ++u) {
        if (rank[u] == kNoHit) continue;
        bool excluded =
            std::binary_search(excluded_users.begin(), excluded_users.end(), u);
        for (std::size_t ki = 0; ki < ks.size(); ++ki) {
            if (rank[u] < ks[ki]) {
                ++counts.hn[ki];
                if (!excluded) ++counts.phn[ki];
            }
        }
    }
    return counts;
}

double ExperimentReport::mean_hn(const std::string& attack, std::uint32_t k) const {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& r : rows)
        if (r.attack == attack && r.k == k) {
            sum += r.hn;
            ++n;
        }
    return n ? sum / static_cast<double>(n) : 0.0;
}

double ExperimentReport::mean_phn(const std::string& attack, std::uint32_t k) const {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& r : rows)
        if (r.attack == attack && r.k == k) {
            sum += r.phn;
            ++n;
        }
    return n ? sum / static_cast<double>(n) : 0.0;
}

void ExperimentReport::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report: " + path);
    out << "dataset,protocol,attack,item_set,budget,K,target_item,seed,hn,phn,precision,recall,"
           "ndcg\n";
    for (const auto& r : rows) {
        out << dataset << "," << r.protocol << "," << r.attack << "," << item_percentile << ","
            << r.budget << "," << r.k << "," << r.target_item << "," << r.seed << "," << r.hn
            << "," << r.phn << ",";
        if (r.precision >= 0.0)
            out << r.precision << "," << r.recall << "," << r.ndcg;
        else
            out << ",,";
        out << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

void ExperimentReport::write_aggregate_json(const std::string& path) const {
    nlohmann::json j;
    j["dataset"] = dataset;
    j["protocol"] = protocol;
    j["item_set"] = item_percentile;
    j["budget_variant"] = budget_variant;
    j["row_count"] = rows.size();
    // PHN counts hits among users outside the added set, not hn minus budget.
    j["phn_definition"] = "hits over users not in added_users";

    std::vector<std::pair<std::string, std::uint32_t>> keys;
    for (const auto& r : rows) {
        std::pair<std::string, std::uint32_t> key{r.attack, r.k};
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
    }
    nlohmann::json agg = nlohmann::json::array();
    for (const auto& [attack, k] : keys) {
        nlohmann::json e;
        e["attack"] = attack;
        e["K"] = k;
        e["mean_hn"] = mean_hn(attack, k);
        e["mean_phn"] = mean_phn(attack, k);
        std::size_t n = 0;
        for (const auto& r : rows)
            if (r.attack == attack && r.k == k) ++n;
        e["rows"] = n;
        agg.push_back(e);
    }
    j["aggregates"] = agg;

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write aggregate: " + path);
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

// Prefix metrics over lists built with recs.k >= k.
RecMetrics metrics_at(const RecommendationList& recs, const InteractionMatrix& test,
                      std::uint32_t k) {
    RecommendationList cut;
    cut.k = k;
    cut.items.reserve(recs.items.size());
    for (const auto& list : recs.items) {
        std::size_t take = std::min<std::size_t>(k, list.size());
        cut.items.emplace_back(list.begin(), list.begin() + take);
    }
    return rec_metrics(cut, test);
}

void append_rows(ExperimentReport& report, const std::string& protocol,
                 const std::string& attack, const Perturbation& p, const HitCounts& counts,
                 std::span<const std::uint32_t> ks, std::uint64_t seed,
                 std::uint32_t target_item, const RecMetrics* quality_by_k) {
    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
        PromotionResult row;
        row.protocol = protocol;
        row.attack = attack;
        row.target_item = target_item;
        row.budget = p.budget;
        row.k = ks[ki];
        row.hn = counts.hn[ki];
        row.phn = counts.phn[ki];
        row.seed = seed;
        if (quality_by_k) {
            row.precision = quality_by_k[ki].precision;
            row.recall = quality_by_k[ki].recall;
            row.ndcg = quality_by_k[ki].ndcg;
        }
        report.rows.push_back(row);
    }
}

std::uint32_t max_k(std::span<const std::uint32_t> ks) {
    std::uint32_t m = 0;
    for (auto k : ks) m = std::max(m, k);
    return m;
}

}  // namespace

ExperimentReport experiment_whitebox(const TrainedModel& model, const InteractionMatrix& R,
                                     const InteractionMatrix* test,
                                     std::span<const AttackMethod> methods,
                                     std::span<const std::uint32_t> items,
                                     const EvalConfig& config) {
    ExperimentReport report;
    report.dataset = config.dataset_label;
    report.protocol = "whitebox";
    report.item_percentile = config.item_percentile;
    report.budget_variant = config.budget_variant;

    for (std::uint32_t t : items) {
        const std::uint64_t item_seed = derive_seed(config.seed, t);  // shared by all methods
        for (AttackMethod m : methods) {
            Perturbation p = craft_perturbation(m, model, R, t, config.attack, item_seed);
            InteractionMatrix pert = apply_perturbation(R, p);
            EmbeddingTable combined = model.combined(pert);
            HitCounts counts =
                count_target_hits(combined, pert, t, config.ks, p.added_users, config.threads);
            std::vector<RecMetrics> quality;
            if (config.quality_metrics && test) {
                RecommendationList recs =
                    recommend_topk(combined, pert, max_k(config.ks), config.threads);
                for (auto k : config.ks) quality.push_back(metrics_at(recs, *test, k));
            }
            append_rows(report, "whitebox", to_string(m), p, counts, config.ks, item_seed, t,
                        quality.empty() ? nullptr : quality.data());
        }
    }
    return report;
}

ExperimentReport experiment_blackbox(const TrainedModel& source,
                                     std::span<const ModelConfig> victim_configs,
                                     const InteractionMatrix& R, const InteractionMatrix* test,
                                     std::span<const AttackMethod> methods,
                                     std::span<const std::uint32_t> items,
                                     const EvalConfig& config) {
    ExperimentReport report;
    report.dataset = config.dataset_label;
    report.protocol = "blackbox";
    report.item_percentile = config.item_percentile;
    report.budget_variant = config.budget_variant;

    std::vector<TrainedModel> victims;
    victims.reserve(victim_configs.size());
    for (const ModelConfig& vc : victim_configs) victims.push_back(train(R, vc));

    for (std::uint32_t t : items) {
        const std::uint64_t item_seed = derive_seed(config.seed, t);
        for (AttackMethod m : methods) {
            Perturbation p = craft_perturbation(m, source, R, t, config.attack, item_seed);
            InteractionMatrix pert = apply_perturbation(R, p);
            for (std::size_t v = 0; v < victims.size(); ++v) {
                const ModelConfig& vc = victim_configs[v];
                std::string tag = "blackbox:sub" + std::to_string(v + 1) + "(L=" +
                                  std::to_string(vc.num_layers) + ",d=" +
                                  std::to_string(vc.embed_dim) + ",seed=" +
                                  std::to_string(vc.seed) + ")";
                EmbeddingTable combined = victims[v].combined(pert);
                HitCounts counts = count_target_hits(combined, pert, t, config.ks,
                                                     p.added_users, config.threads);
                std::vector<RecMetrics> quality;
                if (config.quality_metrics && test) {
                    RecommendationList recs =
                        recommend_topk(combined, pert, max_k(config.ks), config.threads);
                    for (auto k : config.ks) quality.push_back(metrics_at(recs, *test, k));
                }
                append_rows(report, tag, to_string(m), p, counts, config.ks, item_seed, t,
                            quality.empty() ? nullptr : quality.data());
            }
        }
    }
    return report;
}

namespace {

// Unperturbed item whose degree is closest to `target_degree`; skips the
// targets themselves. Ties resolve to the lower item index.
std::uint32_t closest_clean_item(const InteractionMatrix& R,
                                 std::span<const Perturbation> perturbations,
                                 std::uint32_t target_degree) {
    std::vector<std::uint8_t> off(R.num_items(), 0);
    for (const auto& p : perturbations) off[p.target_item] = 1;
    std::uint32_t best = 0;
    std::int64_t best_gap = -1;
    for (std::uint32_t i = 0; i < R.num_items(); ++i) {
        if (off[i]) continue;
        std::int64_t gap = std::llabs(static_cast<std::int64_t>(R.item_degree(i)) -
                                      static_cast<std::int64_t>(target_degree));
        if (best_gap < 0 || gap < best_gap) {
            best_gap = gap;
            best = i;
        }
    }
    if (best_gap < 0) throw std::runtime_error("no clean comparison item available");
    return best;
}

}  // namespace

ExperimentReport experiment_retrain(const InteractionMatrix& R,
                                    std::span<const Perturbation> perturbations,
                                    const ModelConfig& train_config,
                                    const InteractionMatrix* test, const EvalConfig& config) {
    ExperimentReport report;
    report.dataset = config.dataset_label;
    report.protocol = "retrain";
    report.item_percentile = config.item_percentile;
    report.budget_variant = config.budget_variant;

    for (const Perturbation& p : perturbations) {
        InteractionMatrix pert = apply_perturbation(R, p);
        TrainedModel retrained = train(pert, train_config);
        EmbeddingTable combined = retrained.combined(pert);

        HitCounts counts = count_target_hits(combined, pert, p.target_item, config.ks,
                                             p.added_users, config.threads);
        std::vector<RecMetrics> quality;
        if (config.quality_metrics && test) {
            RecommendationList recs =
                recommend_topk(combined, pert, max_k(config.ks), config.threads);
            for (auto k : config.ks) quality.push_back(metrics_at(recs, *test, k));
        }
        append_rows(report, "retrain", p.attack_name, p, counts, config.ks, p.seed,
                    p.target_item, quality.empty() ? nullptr : quality.data());

        // Same retrained model, unperturbed item of comparable degree.
        std::uint32_t ref = closest_clean_item(
            R, perturbations,
            R.item_degree(p.target_item) + static_cast<std::uint32_t>(p.added_users.size()));
        HitCounts ref_counts =
            count_target_hits(combined, pert, ref, config.ks, {}, config.threads);
        Perturbation none;
        none.target_item = ref;
        none.budget = p.budget;
        append_rows(report, "retrain", p.attack_name + "+cleanref", none, ref_counts,
                    config.ks, p.seed, ref, nullptr);
    }
    return report;
}

QualityAudit audit_recommendation_quality(const EmbeddingTable& combined_before,
                                          const EmbeddingTable& combined_after,
                                          const InteractionMatrix& R_clean,
                                          const InteractionMatrix& R_pert,
                                          const InteractionMatrix& test, std::uint32_t k,
                                          int threads) {
    QualityAudit audit;
    audit.before = rec_metrics(recommend_topk(combined_before, R_clean, k, threads), test);
    audit.after = rec_metrics(recommend_topk(combined_after, R_pert, k, threads), test);
    audit.delta_precision = audit.after.precision - audit.before.precision;
    audit.delta_recall = audit.after.recall - audit.before.recall;
    audit.delta_ndcg = audit.after.ndcg - audit.before.ndcg;
    auto rel = [](double delta, double base) { return base != 0.0 ? delta / base : 0.0; };
    audit.rel_precision = rel(audit.delta_precision, audit.before.precision);
    audit.rel_recall = rel(audit.delta_recall, audit.before.recall);
    audit.rel_ndcg = rel(audit.delta_ndcg, audit.before.ndcg);
    return audit;
}

QualityAudit audit_recommendation_quality(const TrainedModel& model_before,
                                          const TrainedModel& model_after,
                                          const InteractionMatrix& R_clean,
                                          const InteractionMatrix& R_pert,
                                          const InteractionMatrix& test, std::uint32_t k,
                                          int threads) {
    return audit_recommendation_quality(model_before.combined(R_clean),
                                        model_after.combined(R_pert), R_clean, R_pert, test, k,
                                        threads);
}

std::vector<std::uint32_t> sample_target_items(const DegreeProfile& degrees, double percentile,
                                               std::size_t count, std::uint64_t seed) {
    PercentileSelection sel = select_item_percentile(degrees, percentile);
    std::vector<std::uint32_t> pool = sel.items;
    if (pool.size() <= count) return pool;
    std::mt19937_64 rng(derive_seed(seed, 0x7a51));
    for (std::size_t k = 0; k < count; ++k) {
        std::uniform_int_distribution<std::size_t> pick(k, pool.size() - 1);
        std::swap(pool[k], pool[pick(rng)]);
    }
    pool.resize(count);
    std::sort(pool.begin(), pool.end());
    return pool;
}

}  // namespace gcf

#include "gcf/attack.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <utility>

namespace gcf {

std::uint32_t AttackConfig::effective_fallback_pool() const {
    if (fallback_pool_size > 0) return fallback_pool_size;
    return std::max<std::uint32_t>(budget, 100);
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

double log_sigmoid(double x) {
    if (x >= 0.0) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

namespace {

// Top-k candidate items by (score desc, index asc), excluding the user's
// training positives. Same ordering rule as recommend_topk.
void topk_excluding(const std::vector<double>& s, std::span<const std::uint32_t> positives,
                    std::uint32_t k, std::vector<std::uint32_t>& scratch,
                    std::vector<std::uint32_t>& out) {
    const std::size_t n = s.size();
    scratch.clear();
    std::size_t p = 0;
    for (std::uint32_t i = 0; i < n; ++i) {
        if (p < positives.size() && positives[p] == i) {
            ++p;
            continue;
        }
        scratch.push_back(i);
    }
    auto better = [&s](std::uint32_t a, std::uint32_t b) {
        if (s[a] != s[b]) return s[a] > s[b];
        return a < b;
    };
    std::size_t take = std::min<std::size_t>(k, scratch.size());
    if (take < scratch.size())
        std::nth_element(scratch.begin(), scratch.begin() + take, scratch.end(), better);
    std::sort(scratch.begin(), scratch.begin() + take, better);
    out.assign(scratch.begin(), scratch.begin() + take);
}

std::vector<double> target_scores(const EmbeddingTable& combined, std::uint32_t t) {
    const std::size_t M = combined.users.rows();
    std::vector<double> s(M);
    auto zt = combined.items.row(t);
    for (std::uint32_t u = 0; u < M; ++u) s[u] = dot(combined.users.row(u), zt);
    return s;
}

}  // namespace

MaskedUserSet mask_users(const EmbeddingTable& combined, const InteractionMatrix& R,
                         std::uint32_t target_item, double gamma,
                         std::uint32_t fallback_pool_size) {
    if (target_item >= R.num_items()) throw std::out_of_range("mask_users: target out of range");
    if (fallback_pool_size == 0) throw std::invalid_argument("fallback pool must be positive");
    const std::size_t M = R.num_users();
    std::vector<double> s = target_scores(combined, target_item);

    MaskedUserSet mask;
    mask.gamma = gamma;
    for (std::uint32_t u = 0; u < M; ++u)
        if (sigmoid(s[u]) >= gamma) mask.users.push_back(u);

    if (mask.users.empty()) {
        mask.fallback_used = true;
        std::vector<std::uint32_t> order(M);
        for (std::uint32_t u = 0; u < M; ++u) order[u] = u;
        std::size_t take = std::min<std::size_t>(fallback_pool_size, M);
        auto better = [&s](std::uint32_t a, std::uint32_t b) {
            if (s[a] != s[b]) return s[a] > s[b];
            return a < b;
        };
        std::nth_element(order.begin(), order.begin() + take, order.end(), better);
        mask.users.assign(order.begin(), order.begin() + take);
        std::sort(mask.users.begin(), mask.users.end());
    }
    return mask;
}

MaskedUserSet mask_users(const TrainedModel& model, const InteractionMatrix& R,
                         std::uint32_t target_item, double gamma,
                         std::uint32_t fallback_pool_size) {
    return mask_users(model.combined(R), R, target_item, gamma, fallback_pool_size);
}

double attack_objective(const TrainedModel& model, const InteractionMatrix& R,
                        std::uint32_t target_item, const MaskedUserSet& mask, double lambda,
                        std::uint32_t k) {
    if (mask.users.empty()) throw std::invalid_argument("attack_objective: empty user set");
    const EmbeddingTable z = model.combined(R);
    std::vector<std::uint32_t> scratch, omega;
    double acc = 0.0;
    for (std::uint32_t u : mask.users) {
        std::vector<double> s = score_all_items(z, u);
        topk_excluding(s, R.items_of(u), k, scratch, omega);
        double term = lambda * log_sigmoid(s[target_item]);
        for (std::uint32_t j : omega) {
            if (j == target_item) continue;
            term -= (1.0 - lambda) * log_sigmoid(s[j]);
        }
        acc += term;
    }
    return acc / static_cast<double>(mask.users.size());
}

// ---------------------------------------------------------------------------
// Dense reference gradient.
//
// The relaxed forward treats R as a continuous matrix X:
//   su = max(rowsum X, 1)^(-1/2),  si = max(colsum X, 1)^(-1/2)
//   A = diag(su) X diag(si),  U_l = A I_{l-1},  I_l = A^T U_{l-1}
//   Z = sum_l alpha_l E_l, objective as in attack_objective with the top-K
//   lists and the user set held fixed.
// ---------------------------------------------------------------------------

Mat grad_full(const TrainedModel& model, const InteractionMatrix& R, std::uint32_t target_item,
              const MaskedUserSet& mask, double lambda, std::uint32_t k) {
    if (target_item >= R.num_items()) throw std::out_of_range("grad_full: target out of range");
    if (mask.users.empty()) throw std::invalid_argument("grad_full: empty user set");
    const std::size_t M = R.num_users(), N = R.num_items();
    const std::size_t d = model.config.embed_dim;
    const std::uint32_t L = model.config.num_layers;
    const std::vector<double> alpha = model.config.alphas();

    // Dense X and normalized A at the binary point.
    Mat X(M, N);
    for (std::uint32_t u = 0; u < M; ++u)
        for (std::uint32_t i : R.items_of(u)) X(u, i) = 1.0;
    std::vector<double> rowdeg(M, 0.0), coldeg(N, 0.0);
    for (std::uint32_t u = 0; u < M; ++u)
        for (std::uint32_t i = 0; i < N; ++i) {
            rowdeg[u] += X(u, i);
            coldeg[i] += X(u, i);
        }
    std::vector<double> su(M), si(N);
    for (std::size_t u = 0; u < M; ++u) su[u] = 1.0 / std::sqrt(std::max(rowdeg[u], 1.0));
    for (std::size_t i = 0; i < N; ++i) si[i] = 1.0 / std::sqrt(std::max(coldeg[i], 1.0));
    Mat A(M, N);
    for (std::size_t u = 0; u < M; ++u)
        for (std::size_t i = 0; i < N; ++i) A(u, i) = su[u] * X(u, i) * si[i];

    // Forward layers.
    std::vector<Mat> U(L + 1), I(L + 1);
    U[0] = model.embeddings.users;
    I[0] = model.embeddings.items;
    for (std::uint32_t l = 1; l <= L; ++l) {
        U[l] = Mat(M, d);
        I[l] = Mat(N, d);
        for (std::size_t u = 0; u < M; ++u)
            for (std::size_t i = 0; i < N; ++i)
                if (A(u, i) != 0.0) {
                    axpy(A(u, i), I[l - 1].row(i), U[l].row(u));
                    axpy(A(u, i), U[l - 1].row(u), I[l].row(i));
                }
    }
    Mat Zu(M, d), Zi(N, d);
    for (std::uint32_t l = 0; l <= L; ++l) {
        for (std::size_t idx = 0; idx < Zu.size(); ++idx) Zu.data()[idx] += alpha[l] * U[l].data()[idx];
        for (std::size_t idx = 0; idx < Zi.size(); ++idx) Zi.data()[idx] += alpha[l] * I[l].data()[idx];
    }

    // Objective adjoint: dL/dZ.
    const double inv_m = 1.0 / static_cast<double>(mask.users.size());
    Mat Zhat_u(M, d), Zhat_i(N, d);
    std::vector<std::uint32_t> scratch, omega;
    for (std::uint32_t u : mask.users) {
        std::vector<double> s(N);
        for (std::uint32_t i = 0; i < N; ++i) s[i] = dot(Zu.row(u), Zi.row(i));
        topk_excluding(s, R.items_of(u), k, scratch, omega);
        double ct = lambda * (1.0 - sigmoid(s[target_item])) * inv_m;
        axpy(ct, Zi.row(target_item), Zhat_u.row(u));
        axpy(ct, Zu.row(u), Zhat_i.row(target_item));
        for (std::uint32_t j : omega) {
            if (j == target_item) continue;
            double cj = -(1.0 - lambda) * (1.0 - sigmoid(s[j])) * inv_m;
            axpy(cj, Zi.row(j), Zhat_u.row(u));
            axpy(cj, Zu.row(u), Zhat_i.row(j));
        }
    }

    // Layer adjoints, walking the recursion backwards.
    std::vector<Mat> Gu(L + 1), Gi(L + 1);
    for (std::uint32_t l = 0; l <= L; ++l) {
        Gu[l] = Mat(M, d);
        Gi[l] = Mat(N, d);
    }
    for (std::int64_t l = L; l >= 0; --l) {
        for (std::size_t idx = 0; idx < Gu[l].size(); ++idx)
            Gu[l].data()[idx] = alpha[l] * Zhat_u.data()[idx];
        for (std::size_t idx = 0; idx < Gi[l].size(); ++idx)
            Gi[l].data()[idx] = alpha[l] * Zhat_i.data()[idx];
        if (l < static_cast<std::int64_t>(L)) {
            for (std::size_t u = 0; u < M; ++u)
                for (std::size_t i = 0; i < N; ++i)
                    if (A(u, i) != 0.0) {
                        axpy(A(u, i), Gi[l + 1].row(i), Gu[l].row(u));
                        axpy(A(u, i), Gu[l + 1].row(u), Gi[l].row(i));
                    }
        }
    }

    // dL/dA, then through the normalization to X.
    Mat GA(M, N);
    for (std::uint32_t l = 1; l <= L; ++l)
        for (std::size_t u = 0; u < M; ++u)
            for (std::size_t i = 0; i < N; ++i)
                GA(u, i) += dot(Gu[l].row(u), I[l - 1].row(i)) + dot(U[l - 1].row(u), Gi[l].row(i));

    std::vector<double> dsu(M, 0.0), dsi(N, 0.0);
    for (std::size_t u = 0; u < M; ++u)
        for (std::size_t i = 0; i < N; ++i) {
            dsu[u] += GA(u, i) * X(u, i) * si[i];
            dsi[i] += GA(u, i) * X(u, i) * su[u];
        }
    std::vector<double> drow(M, 0.0), dcol(N, 0.0);
    for (std::size_t u = 0; u < M; ++u)
        if (rowdeg[u] >= 1.0) drow[u] = -0.5 * su[u] * su[u] * su[u] * dsu[u];
    for (std::size_t i = 0; i < N; ++i)
        if (coldeg[i] >= 1.0) dcol[i] = -0.5 * si[i] * si[i] * si[i] * dsi[i];

    Mat grad(M, N);
    for (std::size_t u = 0; u < M; ++u)
        for (std::size_t i = 0; i < N; ++i)
            grad(u, i) = GA(u, i) * su[u] * si[i] + drow[u] + dcol[i];
    return grad;
}

// ---------------------------------------------------------------------------
// Column path. Same relaxation as grad_full, restricted to dL/dX[:, t] and
// organized so no M x N buffer ever exists. The degree terms use
//   dsu[u] * su[u] = sum_{l=1..L} <Gu_l[u], U_l[u]>
//                  + sum_{l=0..L-1} ( <Gu_l[u], U_l[u]> - alpha_l <Zhat_u[u], U_l[u]> )
// (and symmetrically for item t), which removes the need for dL/dA rows.
// ---------------------------------------------------------------------------

namespace {

struct Meter {
    std::size_t cur = 0;
    std::size_t peak = 0;
    void add(std::size_t n) {
        cur += n;
        peak = std::max(peak, cur);
    }
    void sub(std::size_t n) { cur -= n; }
};

// Mat whose element count is charged to a Meter for its lifetime.
class ScratchMat {
public:
    explicit ScratchMat(Meter& meter) : meter_(&meter) {}
    ScratchMat(Meter& meter, std::size_t r, std::size_t c) : meter_(&meter) { alloc(r, c); }
    ~ScratchMat() { release(); }
    ScratchMat(const ScratchMat&) = delete;
    ScratchMat& operator=(const ScratchMat&) = delete;
    ScratchMat(ScratchMat&& other) noexcept : meter_(other.meter_), mat_(std::move(other.mat_)) {
        other.mat_.clear();
    }
    ScratchMat& operator=(ScratchMat&&) = delete;

    void alloc(std::size_t r, std::size_t c) {
        release();
        mat_ = Mat(r, c);
        meter_->add(mat_.size());
    }
    void release() {
        if (!mat_.empty()) {
            meter_->sub(mat_.size());
            mat_.clear();
        }
    }
    Mat& operator*() { return mat_; }
    const Mat& operator*() const { return mat_; }

private:
    Meter* meter_;
    Mat mat_;
};

}  // namespace

SaliencyColumn grad_target_column(const TrainedModel& model, const InteractionMatrix& R,
                                  std::uint32_t target_item, const MaskedUserSet& mask,
                                  double lambda, std::uint32_t k, WorkspaceStats* stats) {
    const std::uint32_t t = target_item;
    if (t >= R.num_items()) throw std::out_of_range("grad_target_column: target out of range");
    if (mask.users.empty()) throw std::invalid_argument("grad_target_column: empty user set");
    const std::size_t M = R.num_users(), N = R.num_items();
    const std::size_t d = model.config.embed_dim;
    const std::uint32_t L = model.config.num_layers;
    const std::vector<double> alpha = model.config.alphas();
    if (model.embeddings.users.rows() != M || model.embeddings.items.rows() != N)
        throw std::invalid_argument("grad_target_column: model does not match graph");

    Meter meter;

    std::vector<double> su(M), si(N);
    meter.add(M + N);
    for (std::uint32_t u = 0; u < M; ++u)
        su[u] = 1.0 / std::sqrt(std::max<double>(R.user_degree(u), 1.0));
    for (std::uint32_t i = 0; i < N; ++i)
        si[i] = 1.0 / std::sqrt(std::max<double>(R.item_degree(i), 1.0));

    // Forward. User tables are kept per layer; item tables live in two
    // ping-pong buffers, with only their t-rows retained.
    const Mat& U0 = model.embeddings.users;
    const Mat& I0 = model.embeddings.items;
    std::vector<ScratchMat> Ustore;  // layers 1..L
    Ustore.reserve(L);
    ScratchMat Ia(meter), Ib(meter);
    ScratchMat Zu(meter, M, d), Zi(meter, N, d);
    ScratchMat It_rows(meter, L + 1, d);  // row l = I_l[t]

    auto u_layer = [&](std::uint32_t l) -> const Mat& {
        return l == 0 ? U0 : *Ustore[l - 1];
    };

    for (std::size_t idx = 0; idx < (*Zu).size(); ++idx) (*Zu).data()[idx] = alpha[0] * U0.data()[idx];
    for (std::size_t idx = 0; idx < (*Zi).size(); ++idx) (*Zi).data()[idx] = alpha[0] * I0.data()[idx];
    std::copy(I0.row(t).begin(), I0.row(t).end(), (*It_rows).row(0).begin());

    const Mat* I_prev = &I0;
    for (std::uint32_t l = 1; l <= L; ++l) {
        Ustore.emplace_back(meter, M, d);
        Mat& Ul = *Ustore.back();
        for (std::uint32_t u = 0; u < M; ++u) {
            auto out = Ul.row(u);
            for (std::uint32_t i : R.items_of(u)) axpy(su[u] * si[i], I_prev->row(i), out);
        }
        ScratchMat& Inew = (l % 2 == 1) ? Ia : Ib;
        Inew.alloc(N, d);
        const Mat& Uprev = u_layer(l - 1);
        for (std::uint32_t i = 0; i < N; ++i) {
            auto out = (*Inew).row(i);
            for (std::uint32_t u : R.users_of(i)) axpy(su[u] * si[i], Uprev.row(u), out);
        }
        for (std::size_t idx = 0; idx < (*Zu).size(); ++idx)
            (*Zu).data()[idx] += alpha[l] * Ul.data()[idx];
        for (std::size_t idx = 0; idx < (*Zi).size(); ++idx)
            (*Zi).data()[idx] += alpha[l] * (*Inew).data()[idx];
        std::copy((*Inew).row(t).begin(), (*Inew).row(t).end(), (*It_rows).row(l).begin());
        I_prev = &*Inew;
    }
    Ia.release();
    Ib.release();

    // Objective adjoint seeds.
    const double inv_m = 1.0 / static_cast<double>(mask.users.size());
    ScratchMat Zhat_u(meter, M, d), Zhat_i(meter, N, d);
    {
        std::vector<double> s(N);
        std::vector<std::uint32_t> scratch, omega;
        scratch.reserve(N);
        meter.add(N + N + k);
        for (std::uint32_t u : mask.users) {
            auto zu = (*Zu).row(u);
            for (std::uint32_t i = 0; i < N; ++i) s[i] = dot(zu, (*Zi).row(i));
            topk_excluding(s, R.items_of(u), k, scratch, omega);
            double ct = lambda * (1.0 - sigmoid(s[t])) * inv_m;
            axpy(ct, (*Zi).row(t), (*Zhat_u).row(u));
            axpy(ct, zu, (*Zhat_i).row(t));
            for (std::uint32_t j : omega) {
                if (j == t) continue;
                double cj = -(1.0 - lambda) * (1.0 - sigmoid(s[j])) * inv_m;
                axpy(cj, (*Zi).row(j), (*Zhat_u).row(u));
                axpy(cj, zu, (*Zhat_i).row(j));
            }
        }
        meter.sub(N + N + k);
    }
    Zu.release();
    Zi.release();

    // Accumulators for the degree terms and for dL/dA[:, t].
    std::vector<double> dsu_raw(M, 0.0), ga_col(M, 0.0);
    meter.add(2 * M);
    double dsi_raw_t = 0.0;

    // Zhat cross terms of the dsu/dsi identities (layers 0..L-1).
    for (std::uint32_t l = 0; l < L; ++l) {
        const Mat& Ul = u_layer(l);
        for (std::uint32_t u = 0; u < M; ++u)
            dsu_raw[u] -= alpha[l] * dot((*Zhat_u).row(u), Ul.row(u));
        dsi_raw_t -= alpha[l] * dot((*Zhat_i).row(t), (*It_rows).row(l));
    }

    // Backward recursion over layer adjoints.
    ScratchMat Gu_cur(meter, M, d), Gu_next(meter, M, d), Gi_cur(meter, N, d);
    for (std::size_t idx = 0; idx < (*Gu_cur).size(); ++idx)
        (*Gu_cur).data()[idx] = alpha[L] * (*Zhat_u).data()[idx];
    for (std::size_t idx = 0; idx < (*Gi_cur).size(); ++idx)
        (*Gi_cur).data()[idx] = alpha[L] * (*Zhat_i).data()[idx];

    auto process_layer = [&](std::uint32_t l) {
        double coef = (l >= 1 ? 1.0 : 0.0) + (l + 1 <= L ? 1.0 : 0.0);
        const Mat& Ul = u_layer(l);
        if (coef != 0.0)
            for (std::uint32_t u = 0; u < M; ++u)
                dsu_raw[u] += coef * dot((*Gu_cur).row(u), Ul.row(u));
        dsi_raw_t += coef * dot((*Gi_cur).row(t), (*It_rows).row(l));
        if (l >= 1) {
            const Mat& Uprev = u_layer(l - 1);
            auto it_prev = (*It_rows).row(l - 1);
            auto gi_t = (*Gi_cur).row(t);
            for (std::uint32_t u = 0; u < M; ++u)
                ga_col[u] += dot((*Gu_cur).row(u), it_prev) + dot(Uprev.row(u), gi_t);
        }
    };

    process_layer(L);
    for (std::int64_t l = static_cast<std::int64_t>(L) - 1; l >= 0; --l) {
        // Gu_l = alpha_l Zhat_u + A Gi_{l+1}
        for (std::size_t idx = 0; idx < (*Gu_next).size(); ++idx)
            (*Gu_next).data()[idx] = alpha[l] * (*Zhat_u).data()[idx];
        for (std::uint32_t u = 0; u < M; ++u) {
            auto out = (*Gu_next).row(u);
            for (std::uint32_t i : R.items_of(u)) axpy(su[u] * si[i], (*Gi_cur).row(i), out);
        }
        // Gi_l = alpha_l Zhat_i + A^T Gu_{l+1}, overwriting Gi_{l+1} in place.
        for (std::uint32_t i = 0; i < N; ++i) {
            auto out = (*Gi_cur).row(i);
            for (std::size_t c = 0; c < d; ++c) out[c] = alpha[l] * (*Zhat_i)(i, c);
            for (std::uint32_t u : R.users_of(i)) axpy(su[u] * si[i], (*Gu_cur).row(u), out);
        }
        std::swap(*Gu_cur, *Gu_next);
        process_layer(static_cast<std::uint32_t>(l));
    }

    // Assemble column t of the gradient.
    SaliencyColumn sal;
    sal.target_item = t;
    sal.gradient.resize(M);
    sal.candidate.resize(M);
    meter.add(M + M);
    const double dcol_t =
        (R.item_degree(t) >= 1) ? -0.5 * si[t] * si[t] * dsi_raw_t : 0.0;
    for (std::uint32_t u = 0; u < M; ++u) {
        double drow = (R.user_degree(u) >= 1) ? -0.5 * su[u] * su[u] * dsu_raw[u] : 0.0;
        sal.gradient[u] = ga_col[u] * su[u] * si[t] + drow + dcol_t;
        sal.candidate[u] = R.has(u, t) ? 0 : 1;
        if (!std::isfinite(sal.gradient[u]))
            throw std::runtime_error("non-finite saliency gradient for user " + std::to_string(u));
    }
    if (stats) stats->peak_numbers = meter.peak;
    return sal;
}

std::vector<std::uint32_t> select_topk_edges(const SaliencyColumn& saliency,
                                             std::uint32_t budget) {
    if (budget == 0) throw std::invalid_argument("select_topk_edges: budget must be positive");
    std::vector<std::uint32_t> eligible;
    for (std::uint32_t u = 0; u < saliency.gradient.size(); ++u)
        if (saliency.candidate[u] && saliency.gradient[u] > 0.0) eligible.push_back(u);
    auto better = [&](std::uint32_t a, std::uint32_t b) {
        if (saliency.gradient[a] != saliency.gradient[b])
            return saliency.gradient[a] > saliency.gradient[b];
        return a < b;
    };
    std::size_t take = std::min<std::size_t>(budget, eligible.size());
    if (take < eligible.size())
        std::nth_element(eligible.begin(), eligible.begin() + take, eligible.end(), better);
    std::sort(eligible.begin(), eligible.begin() + take, better);
    eligible.resize(take);
    return eligible;
}

Perturbation build_mask_and_perturb(const InteractionMatrix& R, std::uint32_t target_item,
                                    std::span<const std::uint32_t> selected_users,
                                    std::uint32_t budget, std::string attack_name) {
    Perturbation p;
    p.target_item = target_item;
    p.budget = budget;
    p.attack_name = std::move(attack_name);
    p.added_users.assign(selected_users.begin(), selected_users.end());
    std::sort(p.added_users.begin(), p.added_users.end());
    p.validate(R);
    return p;
}

Perturbation run_attack(const TrainedModel& model, const InteractionMatrix& R,
                        std::uint32_t target_item, const AttackConfig& config,
                        WorkspaceStats* stats) {
    if (target_item >= R.num_items()) throw std::out_of_range("run_attack: target out of range");
    if (config.budget == 0) throw std::invalid_argument("run_attack: budget must be positive");
    MaskedUserSet mask =
        mask_users(model, R, target_item, config.gamma, config.effective_fallback_pool());
    SaliencyColumn sal = grad_target_column(model, R, target_item, mask, config.lambda,
                                            config.objective_k, stats);
    std::vector<std::uint32_t> selected = select_topk_edges(sal, config.budget);
    return build_mask_and_perturb(R, target_item, selected, config.budget, "proposed");
}

void dump_saliency_csv(const std::string& path, const SaliencyColumn& saliency,
                       std::span<const std::uint32_t> selected_users) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write saliency dump: " + path);
    std::vector<std::uint8_t> sel(saliency.gradient.size(), 0);
    for (std::uint32_t u : selected_users) sel[u] = 1;
    out << "user_index,gradient,selected\n";
    for (std::uint32_t u = 0; u < saliency.gradient.size(); ++u)
        out << u << "," << saliency.gradient[u] << "," << int(sel[u]) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace gcf

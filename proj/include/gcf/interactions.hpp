#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gcf {

/// Sparse binary user-item matrix R. Immutable after construction; stores
/// both a user-major (CSR) and an item-major (CSC) view of the edge set so
/// propagation can aggregate in either direction.
class InteractionMatrix {
public:
    using Edge = std::pair<std::uint32_t, std::uint32_t>;  // (user, item)

    InteractionMatrix() = default;

    /// Duplicates are silently removed. Throws std::invalid_argument if an
    /// index falls outside [0, num_users) x [0, num_items).
    InteractionMatrix(std::size_t num_users, std::size_t num_items,
                      std::vector<Edge> entries);

    /// Parses "user item item ..." lines. Lines starting with '#' are
    /// comments, except an optional "#dims M N" header that overrides the
    /// derived dimensions.
    static InteractionMatrix load(const std::string& path);
    void save(const std::string& path) const;

    std::size_t num_users() const { return num_users_; }
    std::size_t num_items() const { return num_items_; }
    std::size_t num_entries() const { return items_.size(); }

    bool has(std::uint32_t u, std::uint32_t i) const;

    std::span<const std::uint32_t> items_of(std::uint32_t u) const {
        return {items_.data() + user_offsets_[u], items_.data() + user_offsets_[u + 1]};
    }
    std::span<const std::uint32_t> users_of(std::uint32_t i) const {
        return {users_.data() + item_offsets_[i], users_.data() + item_offsets_[i + 1]};
    }

    std::uint32_t user_degree(std::uint32_t u) const {
        return static_cast<std::uint32_t>(user_offsets_[u + 1] - user_offsets_[u]);
    }
    std::uint32_t item_degree(std::uint32_t i) const {
        return static_cast<std::uint32_t>(item_offsets_[i + 1] - item_offsets_[i]);
    }

    std::vector<Edge> entries() const;

    bool operator==(const InteractionMatrix&) const = default;

private:
    std::size_t num_users_ = 0;
    std::size_t num_items_ = 0;
    std::vector<std::size_t> user_offsets_;  // size M+1
    std::vector<std::uint32_t> items_;       // sorted within each user row
    std::vector<std::size_t> item_offsets_;  // size N+1
    std::vector<std::uint32_t> users_;       // sorted within each item column
};

struct DegreeProfile {
    std::vector<std::uint32_t> user_degrees;
    std::vector<std::uint32_t> item_degrees;
    double mean_item_degree = 0.0;
};

DegreeProfile compute_degrees(const InteractionMatrix& R);

/// Symmetrically normalized view of R: weight(u,i) = 1/sqrt(max(du,1)*max(di,1)).
/// Holds the row/column scale vectors; per-entry weights are their products
/// over the source sparsity pattern. Keeps a pointer to the source matrix,
/// which must outlive it.
class NormalizedMatrix {
public:
    NormalizedMatrix() = default;

    std::size_t num_users() const { return src_->num_users(); }
    std::size_t num_items() const { return src_->num_items(); }
    const InteractionMatrix& source() const { return *src_; }

    /// 1/sqrt(max(deg,1)) per user / per item.
    const std::vector<double>& user_scale() const { return user_scale_; }
    const std::vector<double>& item_scale() const { return item_scale_; }

    /// Weight of a stored entry; 0 for absent pairs.
    double weight(std::uint32_t u, std::uint32_t i) const {
        return src_->has(u, i) ? user_scale_[u] * item_scale_[i] : 0.0;
    }

private:
    friend NormalizedMatrix normalize(const InteractionMatrix&, const DegreeProfile&);
    const InteractionMatrix* src_ = nullptr;
    std::vector<double> user_scale_;
    std::vector<double> item_scale_;
};

/// degrees must have been computed from R (checked by size only).
NormalizedMatrix normalize(const InteractionMatrix& R, const DegreeProfile& degrees);

struct PercentileSelection {
    std::uint32_t threshold_degree = 0;
    std::vector<std::uint32_t> items;  // every item whose degree equals the threshold
};

/// Items sorted ascending by (degree, index); the threshold is the degree at
/// rank floor(q/100*(N-1)) and the returned set holds all ties at that degree.
PercentileSelection select_item_percentile(const DegreeProfile& degrees, double q);

/// Edge budget for promoting an item at percentile s.
/// Variant 1: deg(Q65) - deg(Qs). Variant 2: round(mean item degree) - deg(Qs).
/// Clamped to at least 1.
std::uint32_t compute_budget(const DegreeProfile& degrees, double s, int variant);

/// A realized set of edge additions in one item column.
struct Perturbation {
    std::uint32_t target_item = 0;
    std::vector<std::uint32_t> added_users;  // distinct, each (u, target_item) absent in the source
    std::uint32_t budget = 0;
    std::string attack_name;
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument if any invariant fails against R.
    void validate(const InteractionMatrix& R) const;

    static Perturbation load(const std::string& path);
    void save(const std::string& path) const;

    bool operator==(const Perturbation&) const = default;
};

/// Returns R plus the perturbation's edges; the source is untouched.
InteractionMatrix apply_perturbation(const InteractionMatrix& R, const Perturbation& p);

}  // namespace gcf

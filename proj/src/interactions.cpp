#include "gcf/interactions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace gcf {

InteractionMatrix::InteractionMatrix(std::size_t num_users, std::size_t num_items,
                                     std::vector<Edge> entries)
    : num_users_(num_users), num_items_(num_items) {
    if (num_users == 0 || num_items == 0)
        throw std::invalid_argument("interaction matrix needs at least one user and one item");
    for (const auto& [u, i] : entries) {
        if (u >= num_users || i >= num_items)
            throw std::invalid_argument("interaction entry (" + std::to_string(u) + "," +
                                        std::to_string(i) + ") outside " +
                                        std::to_string(num_users) + "x" + std::to_string(num_items));
    }
    std::sort(entries.begin(), entries.end());
    entries.erase(std::unique(entries.begin(), entries.end()), entries.end());

    user_offsets_.assign(num_users + 1, 0);
    items_.reserve(entries.size());
    for (const auto& [u, i] : entries) ++user_offsets_[u + 1];
    for (std::size_t u = 0; u < num_users; ++u) user_offsets_[u + 1] += user_offsets_[u];
    for (const auto& [u, i] : entries) items_.push_back(i);  // entries sorted by (u, i)

    item_offsets_.assign(num_items + 1, 0);
    for (const auto& [u, i] : entries) ++item_offsets_[i + 1];
    for (std::size_t i = 0; i < num_items; ++i) item_offsets_[i + 1] += item_offsets_[i];
    users_.assign(entries.size(), 0);
    std::vector<std::size_t> cursor(item_offsets_.begin(), item_offsets_.end() - 1);
    for (const auto& [u, i] : entries) users_[cursor[i]++] = u;  // users ascend per column
}

bool InteractionMatrix::has(std::uint32_t u, std::uint32_t i) const {
    if (u >= num_users_ || i >= num_items_) return false;
    auto row = items_of(u);
    return std::binary_search(row.begin(), row.end(), i);
}

std::vector<InteractionMatrix::Edge> InteractionMatrix::entries() const {
    std::vector<Edge> out;
    out.reserve(items_.size());
    for (std::uint32_t u = 0; u < num_users_; ++u)
        for (std::uint32_t i : items_of(u)) out.emplace_back(u, i);
    return out;
}

namespace {

std::uint32_t parse_u32(std::string_view tok, const std::string& path, std::size_t line_no) {
    std::uint32_t v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size())
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bad token '" +
                                 std::string(tok) + "' (expected nonnegative integer)");
    return v;
}

}  // namespace

InteractionMatrix InteractionMatrix::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open interaction file: " + path);

    std::vector<Edge> entries;
    std::optional<std::pair<std::size_t, std::size_t>> dims;
    std::uint32_t max_u = 0, max_i = 0;
    bool any_line = false, any_item = false;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;  // blank
        if (tok[0] == '#') {
            if (tok == "#dims") {
                std::string ms, ns;
                if (!(ls >> ms >> ns))
                    throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                             ": #dims needs two integers");
                dims = {parse_u32(ms, path, line_no), parse_u32(ns, path, line_no)};
            }
            continue;
        }
        any_line = true;
        std::uint32_t u = parse_u32(tok, path, line_no);
        max_u = std::max(max_u, u);
        while (ls >> tok) {
            std::uint32_t i = parse_u32(tok, path, line_no);
            max_i = std::max(max_i, i);
            any_item = true;
            entries.emplace_back(u, i);
        }
    }
    if (!any_line) throw std::runtime_error(path + ": no interaction lines");

    std::size_t M = dims ? dims->first : static_cast<std::size_t>(max_u) + 1;
    std::size_t N = dims ? dims->second : static_cast<std::size_t>(max_i) + 1;
    if (!dims && !any_item) throw std::runtime_error(path + ": no items in file and no #dims header");
    return InteractionMatrix(M, N, std::move(entries));
}

void InteractionMatrix::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write interaction file: " + path);
    out << "#dims " << num_users_ << " " << num_items_ << "\n";
    for (std::uint32_t u = 0; u < num_users_; ++u) {
        auto row = items_of(u);
        if (row.empty()) continue;
        out << u;
        for (std::uint32_t i : row) out << " " << i;
        out << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

DegreeProfile compute_degrees(const InteractionMatrix& R) {
    DegreeProfile d;
    d.user_degrees.resize(R.num_users());
    d.item_degrees.resize(R.num_items());
    for (std::uint32_t u = 0; u < R.num_users(); ++u) d.user_degrees[u] = R.user_degree(u);
    for (std::uint32_t i = 0; i < R.num_items(); ++i) d.item_degrees[i] = R.item_degree(i);
    d.mean_item_degree =
        static_cast<double>(R.num_entries()) / static_cast<double>(R.num_items());
    return d;
}

NormalizedMatrix normalize(const InteractionMatrix& R, const DegreeProfile& degrees) {
    if (degrees.user_degrees.size() != R.num_users() ||
        degrees.item_degrees.size() != R.num_items())
        throw std::invalid_argument("degree profile does not match matrix dimensions");
    NormalizedMatrix n;
    n.src_ = &R;
    n.user_scale_.resize(R.num_users());
    n.item_scale_.resize(R.num_items());
    for (std::size_t u = 0; u < R.num_users(); ++u)
        n.user_scale_[u] = 1.0 / std::sqrt(std::max<double>(degrees.user_degrees[u], 1.0));
    for (std::size_t i = 0; i < R.num_items(); ++i)
        n.item_scale_[i] = 1.0 / std::sqrt(std::max<double>(degrees.item_degrees[i], 1.0));
    return n;
}

PercentileSelection select_item_percentile(const DegreeProfile& degrees, double q) {
    if (!(q >= 0.0 && q <= 100.0))
        throw std::invalid_argument("percentile must be in [0,100], got " + std::to_string(q));
    const std::size_t N = degrees.item_degrees.size();
    if (N == 0) throw std::invalid_argument("empty item degree vector");

    std::vector<std::uint32_t> order(N);
    for (std::size_t i = 0; i < N; ++i) order[i] = static_cast<std::uint32_t>(i);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (degrees.item_degrees[a] != degrees.item_degrees[b])
            return degrees.item_degrees[a] < degrees.item_degrees[b];
        return a < b;
    });

    std::size_t rank = static_cast<std::size_t>(std::floor(q / 100.0 * static_cast<double>(N - 1)));
    rank = std::min(rank, N - 1);

    PercentileSelection sel;
    sel.threshold_degree = degrees.item_degrees[order[rank]];
    for (std::uint32_t i = 0; i < N; ++i)
        if (degrees.item_degrees[i] == sel.threshold_degree) sel.items.push_back(i);
    return sel;
}

std::uint32_t compute_budget(const DegreeProfile& degrees, double s, int variant) {
    if (variant != 1 && variant != 2)
        throw std::invalid_argument("budget variant must be 1 or 2");
    const std::int64_t deg_s = select_item_percentile(degrees, s).threshold_degree;
    std::int64_t top = 0;
    if (variant == 1)
        top = select_item_percentile(degrees, 65.0).threshold_degree;
    else
        top = std::llround(degrees.mean_item_degree);
    return static_cast<std::uint32_t>(std::max<std::int64_t>(top - deg_s, 1));
}

void Perturbation::validate(const InteractionMatrix& R) const {
    if (target_item >= R.num_items())
        throw std::invalid_argument("perturbation target item out of range");
    if (added_users.size() > budget)
        throw std::invalid_argument("perturbation exceeds its budget");
    std::vector<std::uint32_t> sorted = added_users;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("perturbation lists a user twice");
    for (std::uint32_t u : added_users) {
        if (u >= R.num_users())
            throw std::invalid_argument("perturbation user index out of range");
        if (R.has(u, target_item))
            throw std::invalid_argument("perturbation edge (" + std::to_string(u) + "," +
                                        std::to_string(target_item) + ") already present");
    }
}

Perturbation Perturbation::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open perturbation file: " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    Perturbation p;
    p.attack_name = j.at("attack").get<std::string>();
    p.target_item = j.at("target_item").get<std::uint32_t>();
    p.budget = j.at("budget").get<std::uint32_t>();
    p.added_users = j.at("added_users").get<std::vector<std::uint32_t>>();
    p.seed = j.value("seed", std::uint64_t{0});
    return p;
}

void Perturbation::save(const std::string& path) const {
    nlohmann::json j;
    j["attack"] = attack_name;
    j["target_item"] = target_item;
    j["budget"] = budget;
    j["added_users"] = added_users;
    j["seed"] = seed;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write perturbation file: " + path);
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

InteractionMatrix apply_perturbation(const InteractionMatrix& R, const Perturbation& p) {
    p.validate(R);
    std::vector<InteractionMatrix::Edge> entries = R.entries();
    entries.reserve(entries.size() + p.added_users.size());
    for (std::uint32_t u : p.added_users) entries.emplace_back(u, p.target_item);
    return InteractionMatrix(R.num_users(), R.num_items(), std::move(entries));
}

}  // namespace gcf

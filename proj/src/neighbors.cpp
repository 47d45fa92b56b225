#include "intdc/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace intdc {

namespace {

constexpr Eigen::Index kLeafSize = 12;
// Plane bounds are compared against rounded distances; the slack keeps a
// subtree holding an exact tie from being pruned.
constexpr double kPruneSlack = 1.0 + 1e-12;

}  // namespace

Metric parse_metric(const std::string& name) {
    if (name == "euclidean") return Metric::euclidean;
    if (name == "chebyshev" || name == "max") return Metric::chebyshev;
    throw UsageError("unknown metric '" + name + "' (expected euclidean or chebyshev)");
}

std::string to_string(Metric m) { return m == Metric::euclidean ? "euclidean" : "chebyshev"; }

NeighborIndex::NeighborIndex(RowMatrix points, Metric metric, std::vector<Eigen::Index> time_labels)
    : points_(std::move(points)), metric_(metric), labels_(std::move(time_labels)) {
    if (points_.rows() < 1) throw UsageError("neighbor index needs at least one point");
    if (points_.cols() < 1) throw UsageError("neighbor index needs at least one dimension");
    if (!points_.allFinite()) throw DataError("neighbor index points contain non-finite values");
    if (labels_.empty()) {
        labels_.resize(static_cast<std::size_t>(points_.rows()));
        std::iota(labels_.begin(), labels_.end(), Eigen::Index{0});
    } else if (static_cast<Eigen::Index>(labels_.size()) != points_.rows()) {
        throw UsageError("time label count does not match point count");
    }
    order_.resize(static_cast<std::size_t>(points_.rows()));
    std::iota(order_.begin(), order_.end(), Eigen::Index{0});
    nodes_.reserve(static_cast<std::size_t>(2 * points_.rows() / kLeafSize + 2));
    build(0, points_.rows());
}

int NeighborIndex::build(Eigen::Index begin, Eigen::Index end) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{begin, end});
    if (end - begin <= kLeafSize) return id;

    int best_dim = 0;
    double best_spread = -1.0;
    for (int d = 0; d < points_.cols(); ++d) {
        double lo = points_(order_[static_cast<std::size_t>(begin)], d), hi = lo;
        for (Eigen::Index i = begin + 1; i < end; ++i) {
            const double v = points_(order_[static_cast<std::size_t>(i)], d);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo > best_spread) {
            best_spread = hi - lo;
            best_dim = d;
        }
    }
    if (best_spread <= 0.0) return id;  // all points identical: keep as leaf

    const Eigen::Index mid = begin + (end - begin) / 2;
    auto first = order_.begin() + begin;
    std::nth_element(first, order_.begin() + mid, order_.begin() + end, [&](Eigen::Index a, Eigen::Index b) {
        const double va = points_(a, best_dim), vb = points_(b, best_dim);
        return va < vb || (va == vb && a < b);
    });
    const double split = points_(order_[static_cast<std::size_t>(mid)], best_dim);
    const int left = build(begin, mid);
    const int right = build(mid, end);
    Node& node = nodes_[static_cast<std::size_t>(id)];
    node.split_dim = best_dim;
    node.split = split;
    node.left = left;
    node.right = right;
    return id;
}

double NeighborIndex::point_distance(const double* a, const double* b) const {
    const Eigen::Index d = points_.cols();
    if (metric_ == Metric::chebyshev) {
        double m = 0.0;
        for (Eigen::Index c = 0; c < d; ++c) m = std::max(m, std::abs(a[c] - b[c]));
        return m;
    }
    double s = 0.0;
    for (Eigen::Index c = 0; c < d; ++c) {
        const double diff = a[c] - b[c];
        s += diff * diff;
    }
    return std::sqrt(s);
}

double NeighborIndex::distance(Eigen::Index i, Eigen::Index j) const {
    return point_distance(points_.row(i).data(), points_.row(j).data());
}

Eigen::Index NeighborIndex::eligible_count(Eigen::Index query_row, bool exclude_self, int theiler) const {
    Eigen::Index count = 0;
    const auto lq = labels_[static_cast<std::size_t>(query_row)];
    for (Eigen::Index j = 0; j < size(); ++j) {
        if (j == query_row) {
            count += exclude_self ? 0 : 1;
            continue;
        }
        if (std::abs(labels_[static_cast<std::size_t>(j)] - lq) > theiler) ++count;
    }
    return count;
}

template <class Eligible>
std::vector<Neighbor> NeighborIndex::search(const double* q, int k, Eligible eligible) const {
    const auto kk = static_cast<std::size_t>(k);
    std::priority_queue<Neighbor> heap;  // max-heap on (distance, row)

    auto visit = [&](auto&& self, int node_id) -> void {
        const Node& node = nodes_[static_cast<std::size_t>(node_id)];
        if (node.split_dim < 0) {
            for (Eigen::Index i = node.begin; i < node.end; ++i) {
                const Eigen::Index j = order_[static_cast<std::size_t>(i)];
                if (!eligible(j)) continue;
                const Neighbor cand{j, point_distance(q, points_.row(j).data())};
                if (heap.size() < kk) {
                    heap.push(cand);
                } else if (cand < heap.top()) {
                    heap.pop();
                    heap.push(cand);
                }
            }
            return;
        }
        const double diff = q[node.split_dim] - node.split;
        const int near = diff <= 0.0 ? node.left : node.right;
        const int far = diff <= 0.0 ? node.right : node.left;
        self(self, near);
        if (heap.size() < kk || std::abs(diff) <= heap.top().distance * kPruneSlack) self(self, far);
    };
    visit(visit, 0);

    if (heap.size() < kk)
        throw UsageError("requested " + std::to_string(k) + " neighbors but only " + std::to_string(heap.size()) +
                         " points are eligible");
    std::vector<Neighbor> out(heap.size());
    for (std::size_t i = out.size(); i-- > 0;) {
        out[i] = heap.top();
        heap.pop();
    }
    return out;
}

std::vector<Neighbor> NeighborIndex::knn(Eigen::Index query_row, int k, bool exclude_self, int theiler) const {
    if (query_row < 0 || query_row >= size()) throw UsageError("query row out of range");
    if (k < 1) throw UsageError("k must be >= 1");
    if (theiler < 0) throw UsageError("theiler window must be non-negative");
    const auto lq = labels_[static_cast<std::size_t>(query_row)];
    return search(points_.row(query_row).data(), k, [&](Eigen::Index j) {
        if (j == query_row) return !exclude_self;
        return std::abs(labels_[static_cast<std::size_t>(j)] - lq) > theiler;
    });
}

std::vector<Neighbor> NeighborIndex::knn_point(const double* query, int k) const {
    if (k < 1) throw UsageError("k must be >= 1");
    return search(query, k, [](Eigen::Index) { return true; });
}

Eigen::Index NeighborIndex::count_within(Eigen::Index query_row, double radius, bool strict) const {
    if (query_row < 0 || query_row >= size()) throw UsageError("query row out of range");
    if (!(radius > 0.0)) throw UsageError("count radius must be > 0");
    const double* q = points_.row(query_row).data();
    Eigen::Index count = 0;
    auto visit = [&](auto&& self, int node_id) -> void {
        const Node& node = nodes_[static_cast<std::size_t>(node_id)];
        if (node.split_dim < 0) {
            for (Eigen::Index i = node.begin; i < node.end; ++i) {
                const Eigen::Index j = order_[static_cast<std::size_t>(i)];
                if (j == query_row) continue;
                const double d = point_distance(q, points_.row(j).data());
                if (strict ? d < radius : d <= radius) ++count;
            }
            return;
        }
        const double diff = q[node.split_dim] - node.split;
        const int near = diff <= 0.0 ? node.left : node.right;
        const int far = diff <= 0.0 ? node.right : node.left;
        self(self, near);
        if (std::abs(diff) <= radius * kPruneSlack) self(self, far);
    };
    visit(visit, 0);
    return count;
}

}  // namespace intdc

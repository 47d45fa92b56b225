#pragma once

#include "intdc/types.hpp"

#include <string>
#include <vector>

namespace intdc {

enum class Metric { euclidean, chebyshev };

Metric parse_metric(const std::string& name);
std::string to_string(Metric m);

struct Neighbor {
    Eigen::Index row = 0;
    double distance = 0.0;

    friend bool operator<(const Neighbor& a, const Neighbor& b) {
        return a.distance < b.distance || (a.distance == b.distance && a.row < b.row);
    }
    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

// Exact k-d tree over the rows of a point matrix. Immutable after
// construction; queries are const and safe to run concurrently.
//
// Eligibility for a query row q: every row except q itself (when
// exclude_self) and rows j != q with |label_j - label_q| <= theiler.
// Results are ordered by (distance, row), so ties go to the lower row.
class NeighborIndex {
public:
    NeighborIndex(RowMatrix points, Metric metric, std::vector<Eigen::Index> time_labels = {});

    Eigen::Index size() const { return points_.rows(); }
    Eigen::Index dim() const { return points_.cols(); }
    Metric metric() const { return metric_; }
    const RowMatrix& points() const { return points_; }

    double distance(Eigen::Index i, Eigen::Index j) const;

    std::vector<Neighbor> knn(Eigen::Index query_row, int k, bool exclude_self = true, int theiler = 0) const;

    // k nearest rows to an arbitrary point of width dim(); no exclusions.
    std::vector<Neighbor> knn_point(const double* query, int k) const;

    // Points other than the query at distance < radius (strict) or <= radius.
    Eigen::Index count_within(Eigen::Index query_row, double radius, bool strict) const;

    Eigen::Index eligible_count(Eigen::Index query_row, bool exclude_self, int theiler) const;

private:
    struct Node {
        Eigen::Index begin = 0, end = 0;  // range into order_
        int split_dim = -1;               // -1 for a leaf
        double split = 0.0;
        int left = -1, right = -1;
    };

    int build(Eigen::Index begin, Eigen::Index end);
    template <class Eligible>
    std::vector<Neighbor> search(const double* q, int k, Eligible eligible) const;
    double point_distance(const double* a, const double* b) const;

    RowMatrix points_;
    Metric metric_;
    std::vector<Eigen::Index> labels_;
    std::vector<Eigen::Index> order_;
    std::vector<Node> nodes_;
};

}  // namespace intdc

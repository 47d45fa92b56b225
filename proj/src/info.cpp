#include "intdc/info.hpp"

#include "intdc/digamma.hpp"
#include "intdc/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace intdc {

namespace {

// Above this many samples the counts come from k-d trees instead of a dense
// pairwise table. Both paths are exact and give identical counts.
constexpr Eigen::Index kDenseLimit = 1024;

// Counting groups: each group is a set of blocks whose max-norm distance is
// compared against the joint radius.
using Groups = std::vector<std::vector<std::size_t>>;

void check_cloud(const SampleCloud& cloud, int k) {
    if (k < 1) throw UsageError("KSG k must be >= 1");
    if (cloud.rows() <= k)
        throw UsageError("KSG needs more than k = " + std::to_string(k) + " samples, got " +
                         std::to_string(cloud.rows()));
    if (!cloud.samples.allFinite()) throw DataError("KSG samples contain non-finite values");
}

[[noreturn]] void duplicate_error(Eigen::Index i) {
    throw DegenerateError("KSG: sample " + std::to_string(i) +
                          " has a zero k-th neighbour distance (duplicate points); add jitter to the input");
}

// Returns, per sample, the neighbour count of every group.
std::vector<std::vector<Eigen::Index>> dense_counts(const SampleCloud& cloud, int k, const Groups& groups) {
    const Eigen::Index m = cloud.rows();
    const std::size_t nblocks = cloud.widths.size();
    const auto mm = static_cast<std::size_t>(m);
    constexpr double inf = std::numeric_limits<double>::infinity();

    // One m x m max-norm table per block, diagonal at +inf.
    thread_local std::vector<double> dist;
    dist.resize(nblocks * mm * mm);
    thread_local std::vector<double> coord;
    coord.resize(mm);
    for (std::size_t b = 0; b < nblocks; ++b) {
        double* t = dist.data() + b * mm * mm;
        std::fill(t, t + mm * mm, 0.0);
        const Eigen::Index off = cloud.block_offset(b);
        for (Eigen::Index c = 0; c < cloud.widths[b]; ++c) {
            for (std::size_t j = 0; j < mm; ++j) coord[j] = cloud.samples(static_cast<Eigen::Index>(j), off + c);
            const double* __restrict x = coord.data();
            for (std::size_t i = 0; i < mm; ++i) {
                double* __restrict r = t + i * mm;
                const double xi = x[i];
                for (std::size_t j = 0; j < mm; ++j) r[j] = std::max(r[j], std::abs(x[j] - xi));
            }
        }
        for (std::size_t i = 0; i < mm; ++i) t[i * mm + i] = inf;
    }
    auto table = [&](const std::vector<std::size_t>& blocks, std::vector<double>& scratch) -> const double* {
        if (blocks.size() == 1) return dist.data() + blocks[0] * mm * mm;
        scratch.assign(dist.begin() + static_cast<std::ptrdiff_t>(blocks[0] * mm * mm),
                       dist.begin() + static_cast<std::ptrdiff_t>((blocks[0] + 1) * mm * mm));
        for (std::size_t q = 1; q < blocks.size(); ++q) {
            const double* t = dist.data() + blocks[q] * mm * mm;
            for (std::size_t e = 0; e < mm * mm; ++e) scratch[e] = std::max(scratch[e], t[e]);
        }
        return scratch.data();
    };

    std::vector<std::size_t> all(nblocks);
    std::iota(all.begin(), all.end(), std::size_t{0});
    thread_local std::vector<double> joint_scratch, group_scratch, row;
    const double* joint = table(all, joint_scratch);
    std::vector<double> eps(mm);
    row.resize(mm);
    for (std::size_t i = 0; i < mm; ++i) {
        std::copy(joint + i * mm, joint + (i + 1) * mm, row.begin());
        std::nth_element(row.begin(), row.begin() + (k - 1), row.end());
        eps[i] = row[static_cast<std::size_t>(k - 1)];
        if (!(eps[i] > 0.0)) duplicate_error(static_cast<Eigen::Index>(i));
    }

    std::vector<std::vector<Eigen::Index>> counts(groups.size(), std::vector<Eigen::Index>(mm, 0));
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const double* t = table(groups[g], group_scratch);
        for (std::size_t i = 0; i < mm; ++i) {
            const double* r = t + i * mm;
            const double e = eps[i];
            std::int64_t c = 0;
            for (std::size_t j = 0; j < mm; ++j) c += r[j] < e ? 1 : 0;
            counts[g][i] = c;
        }
    }
    return counts;
}

RowMatrix gather(const SampleCloud& cloud, const std::vector<std::size_t>& blocks) {
    Eigen::Index width = 0;
    for (auto b : blocks) width += cloud.widths[b];
    RowMatrix out(cloud.rows(), width);
    Eigen::Index col = 0;
    for (auto b : blocks) {
        out.middleCols(col, cloud.widths[b]) = cloud.samples.middleCols(cloud.block_offset(b), cloud.widths[b]);
        col += cloud.widths[b];
    }
    return out;
}

std::vector<std::vector<Eigen::Index>> tree_counts(const SampleCloud& cloud, int k, const Groups& groups) {
    const Eigen::Index m = cloud.rows();
    std::vector<std::size_t> all(cloud.widths.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    const NeighborIndex joint(gather(cloud, all), Metric::chebyshev);
    std::vector<double> eps(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
        eps[static_cast<std::size_t>(i)] = joint.knn(i, k).back().distance;
        if (!(eps[static_cast<std::size_t>(i)] > 0.0)) duplicate_error(i);
    }
    std::vector<std::vector<Eigen::Index>> counts(groups.size(), std::vector<Eigen::Index>(static_cast<std::size_t>(m)));
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const NeighborIndex marginal(gather(cloud, groups[g]), Metric::chebyshev);
        for (Eigen::Index i = 0; i < m; ++i)
            counts[g][static_cast<std::size_t>(i)] = marginal.count_within(i, eps[static_cast<std::size_t>(i)], true);
    }
    return counts;
}

std::vector<std::vector<Eigen::Index>> neighbour_counts(const SampleCloud& cloud, int k, const Groups& groups) {
    return cloud.rows() <= kDenseLimit ? dense_counts(cloud, k, groups) : tree_counts(cloud, k, groups);
}

}  // namespace

SampleCloud::SampleCloud(RowMatrix samples_, std::vector<Eigen::Index> widths_)
    : samples(std::move(samples_)), widths(std::move(widths_)) {
    if (widths.size() < 2 || widths.size() > 3) throw UsageError("sample cloud needs two or three blocks");
    if (widths[0] < 1 || widths[1] < 1) throw UsageError("x and y blocks must be non-empty");
    const Eigen::Index total = std::accumulate(widths.begin(), widths.end(), Eigen::Index{0});
    if (total != samples.cols())
        throw UsageError("block widths sum to " + std::to_string(total) + " but samples have " +
                         std::to_string(samples.cols()) + " columns");
}

SampleCloud SampleCloud::from_blocks(const RowMatrix& x, const RowMatrix& y) {
    if (x.rows() != y.rows()) throw UsageError("x and y blocks differ in sample count");
    RowMatrix s(x.rows(), x.cols() + y.cols());
    s << x, y;
    return {std::move(s), {x.cols(), y.cols()}};
}

SampleCloud SampleCloud::from_blocks(const RowMatrix& x, const RowMatrix& y, const RowMatrix& z) {
    if (x.rows() != y.rows() || (z.cols() > 0 && x.rows() != z.rows()))
        throw UsageError("blocks differ in sample count");
    RowMatrix s(x.rows(), x.cols() + y.cols() + z.cols());
    if (z.cols() > 0)
        s << x, y, z;
    else
        s << x, y;
    return {std::move(s), {x.cols(), y.cols(), z.cols()}};
}

Eigen::Index SampleCloud::block_offset(std::size_t b) const {
    return std::accumulate(widths.begin(), widths.begin() + static_cast<std::ptrdiff_t>(b), Eigen::Index{0});
}

double mi_ksg(const SampleCloud& cloud, int k) {
    check_cloud(cloud, k);
    const SampleCloud xy = cloud.widths.size() == 3
                               ? SampleCloud(cloud.samples.leftCols(cloud.widths[0] + cloud.widths[1]),
                                             {cloud.widths[0], cloud.widths[1]})
                               : cloud;
    const auto counts = neighbour_counts(xy, k, {{0}, {1}});
    const Eigen::Index m = cloud.rows();
    double acc = 0.0;
    for (std::size_t i = 0; i < static_cast<std::size_t>(m); ++i)
        acc += digamma_int(counts[0][i] + 1) + digamma_int(counts[1][i] + 1);
    return digamma_int(k) + digamma_int(m) - acc / static_cast<double>(m);
}

double mi_ksg(const RowMatrix& x, const RowMatrix& y, int k) { return mi_ksg(SampleCloud::from_blocks(x, y), k); }

double cmi_ksg(const SampleCloud& cloud, int k) {
    if (cloud.widths.size() == 2 || cloud.widths[2] == 0) return mi_ksg(cloud, k);
    check_cloud(cloud, k);
    const auto counts = neighbour_counts(cloud, k, {{0, 2}, {1, 2}, {2}});
    const Eigen::Index m = cloud.rows();
    double acc = 0.0;
    for (std::size_t i = 0; i < static_cast<std::size_t>(m); ++i)
        acc += digamma_int(counts[0][i] + 1) + digamma_int(counts[1][i] + 1) - digamma_int(counts[2][i] + 1);
    return digamma_int(k) - acc / static_cast<double>(m);
}

double cmi_ksg(const RowMatrix& x, const RowMatrix& y, const RowMatrix& z, int k) {
    return cmi_ksg(SampleCloud::from_blocks(x, y, z), k);
}

KldEstimate kld_knn(const RowMatrix& p_samples, const RowMatrix& q_samples, int k) {
    if (k < 1) throw UsageError("KLD k must be >= 1");
    if (p_samples.cols() != q_samples.cols()) throw UsageError("p and q samples differ in dimension");
    const Eigen::Index m1 = p_samples.rows(), m2 = q_samples.rows();
    if (m1 <= k || m2 <= k)
        throw UsageError("KLD needs more than k = " + std::to_string(k) + " samples in both sets");
    const NeighborIndex p_index(p_samples, Metric::euclidean);
    const NeighborIndex q_index(q_samples, Metric::euclidean);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < m1; ++i) {
        const double rho = p_index.knn(i, k).back().distance;
        const double nu = q_index.knn_point(p_samples.row(i).data(), k).back().distance;
        if (!(rho > 0.0) || !(nu > 0.0))
            throw DegenerateError("KLD: zero k-th neighbour distance at sample " + std::to_string(i) +
                                  " (duplicate points); add jitter to the input");
        acc += std::log(nu / rho);
    }
    const auto d = static_cast<double>(p_samples.cols());
    KldEstimate est;
    est.raw = d / static_cast<double>(m1) * acc + std::log(static_cast<double>(m2) / static_cast<double>(m1 - 1));
    est.clamped = std::max(0.0, est.raw);
    return est;
}

}  // namespace intdc

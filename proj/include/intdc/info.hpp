#pragma once

#include "intdc/types.hpp"

#include <vector>

namespace intdc {

// Joint samples, one per row, split column-wise into the x, y and optional
// z blocks. A z block of width zero means no conditioning.
struct SampleCloud {
    RowMatrix samples;
    std::vector<Eigen::Index> widths;

    SampleCloud() = default;
    SampleCloud(RowMatrix samples_, std::vector<Eigen::Index> widths_);

    static SampleCloud from_blocks(const RowMatrix& x, const RowMatrix& y);
    static SampleCloud from_blocks(const RowMatrix& x, const RowMatrix& y, const RowMatrix& z);

    Eigen::Index rows() const { return samples.rows(); }
    Eigen::Index block_offset(std::size_t b) const;
};

// Kraskov-Stoegbauer-Grassberger estimator (algorithm 1) in nats:
//   psi(k) + psi(M) - < psi(n_x + 1) + psi(n_y + 1) >
// with the max-norm in the joint space and marginal counts strictly inside
// the joint k-th neighbour distance. Not clamped; may be slightly negative.
double mi_ksg(const SampleCloud& cloud, int k);
double mi_ksg(const RowMatrix& x, const RowMatrix& y, int k);

// Frenzel-Pompe conditional variant:
//   psi(k) - < psi(n_xz + 1) + psi(n_yz + 1) - psi(n_z + 1) >
// An empty z block falls back to mi_ksg on the same samples.
double cmi_ksg(const SampleCloud& cloud, int k);
double cmi_ksg(const RowMatrix& x, const RowMatrix& y, const RowMatrix& z, int k);

struct KldEstimate {
    double raw = 0.0;
    double clamped = 0.0;  // max(raw, 0)
};

// kNN divergence D(p || q) (Wang, Kulkarni and Verdu) with Euclidean
// distances:  d/M1 * sum_i ln(nu_k(i) / rho_k(i)) + ln(M2 / (M1 - 1)).
KldEstimate kld_knn(const RowMatrix& p_samples, const RowMatrix& q_samples, int k);

}  // namespace intdc

#pragma once

#include "intdc/types.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace intdc {

// Off-diagonal entries in row-major order.
Vector off_diagonal(const Matrix& m);

struct RocPoint {
    double threshold = 0.0;  // scores >= threshold are called positive
    double fpr = 0.0;
    double tpr = 0.0;
    Eigen::Index tp = 0, fp = 0;
};

struct RocCurve {
    std::vector<RocPoint> points;  // from (0, 0) to (1, 1)
    double auc = 0.0;
    Eigen::Index positives = 0, negatives = 0;
};

// ROC over the off-diagonal entries; truth entries != 0 are positives.
// Equal scores form a single threshold step, so the trapezoidal AUC equals
// the Mann-Whitney statistic with ties counted one half.
RocCurve roc(const Matrix& scores, const Matrix& truth);
RocCurve roc(const std::vector<double>& scores, const std::vector<bool>& labels);

enum class OopCriterion { youden, concordance, mindist };

OopCriterion parse_oop(const std::string& name);
std::string to_string(OopCriterion c);

// Optimal operating point on the curve; ties go to the lowest FPR.
RocPoint oop(const RocCurve& curve, OopCriterion criterion);

struct Confusion {
    Eigen::Index tp = 0, fp = 0, tn = 0, fn = 0;
};

Confusion confusion_at(const RocCurve& curve, const RocPoint& point);

struct Interval {
    double lo = 0.0, hi = 0.0;
};

// Percentile bootstrap interval for the AUC. Resample b uses the seed
// derive_seed(seed, b); draws containing a single class are redrawn from
// the same stream.
Interval bootstrap_auc_ci(const Matrix& scores, const Matrix& truth, int n_boot, double level, std::uint64_t seed,
                          int jobs = 1);
Interval bootstrap_auc_ci(const std::vector<double>& scores, const std::vector<bool>& labels, int n_boot, double level,
                          std::uint64_t seed, int jobs = 1);

template <class A, class B>
double cosine_similarity(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    if (a.size() != b.size()) throw UsageError("cosine similarity needs equal-length vectors");
    const double na = a.norm(), nb = b.norm();
    if (na == 0.0 || nb == 0.0) throw DegenerateError("cosine similarity of a zero vector is undefined");
    return a.dot(b) / (na * nb);
}

template <class A, class B>
double pearson(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    if (a.size() != b.size()) throw UsageError("pearson correlation needs equal-length vectors");
    if (a.size() < 2) throw UsageError("pearson correlation needs at least two values");
    const auto da = (a.array() - a.mean()).matrix().eval();
    const auto db = (b.array() - b.mean()).matrix().eval();
    const double va = da.squaredNorm(), vb = db.squaredNorm();
    if (va == 0.0 || vb == 0.0) throw DegenerateError("pearson correlation of a constant vector is undefined");
    return da.dot(db) / std::sqrt(va * vb);
}

struct LinearFit {
    double slope = 0.0, intercept = 0.0, r_squared = 0.0;
};

// Least squares y = slope * x + intercept.
LinearFit linear_fit(const Vector& x, const Vector& y);

struct KldAgreement {
    double r_squared = 0.0, slope = 0.0, intercept = 0.0, cosine = 0.0;
};

// Regression of the index on KLD over off-diagonal pairs, plus the cosine
// similarity of the two off-diagonal vectors.
KldAgreement kld_agreement(const Matrix& index, const Matrix& kld);

struct GravityFit {
    Vector k, alpha;  // per origin row i:      P_ij ~ k_i I_j d_ij^alpha_i
    Vector s, beta;   // per destination col j: Q_ij ~ s_j O_i d_ij^beta_j
    Vector out_flow, in_flow;  // O_i, I_j
};

// Per-node log-linear least squares; only entries with F_ij > 0 are used and
// each node needs at least three of them.
GravityFit fit_gravity(const Matrix& flows, const Matrix& dist);

struct EffectiveDistance {
    GravityFit fit;
    Matrix p_hat, q_hat;  // row sums / column sums of 1 over j != i
    Matrix travellers;    // T_ij
    Matrix distance;      // D_ij, zero diagonal
};

EffectiveDistance effective_distance(const Matrix& flows, const Matrix& dist, const Vector& rho);
// Same from an already fitted (or given) gravity model.
EffectiveDistance effective_distance(const GravityFit& fit, const Matrix& dist, const Vector& rho);

}  // namespace intdc

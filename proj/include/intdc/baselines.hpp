#pragma once

#include "intdc/timeseries.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace intdc {

enum class Method { iee, gc, te, ccm };

Method parse_method(const std::string& name);
std::string to_string(Method m);

struct BaselineConfig {
    int lag = 2;
    int k_inner = 3;   // TE
    int knn_ccm = 0;   // CCM simplex size; 0 means lag + 2
    int theiler = 0;   // CCM neighbour exclusion window
    std::uint64_t seed = 0;

    int ccm_neighbors() const { return knn_ccm > 0 ? knn_ccm : lag + 2; }
    void validate() const;
};

// GC[x -> y] = ln(RSS_restricted / RSS_full) for least-squares
// autoregressions of y_{t+1} with an intercept; the restricted model uses
// y_t..y_{t-L}, the full model adds x_t..x_{t-L}.
double gc_pairwise(const Vector& x, const Vector& y, int lag);

// TE[x -> y] = CMI(y_{t+1}; X_t | Y_t) with (L+1)-dimensional delay vectors.
double te_pairwise(const Vector& x, const Vector& y, const BaselineConfig& cfg);

// CCM[x -> y]: skill of estimating x_t from the delay manifold of y,
// Pearson correlation clamped to [0, 1].
double ccm_pairwise(const Vector& x, const Vector& y, const BaselineConfig& cfg);

// Cross-map skill for growing libraries drawn at random (seeded) from the
// manifold of y. Returns (library size, skill) pairs.
std::vector<std::pair<Eigen::Index, double>> ccm_sweep(const Vector& x, const Vector& y, const BaselineConfig& cfg,
                                                       const std::vector<Eigen::Index>& library_sizes);

// s -> -ln(1 - s); skills of exactly 1 map to -ln(1e-12).
double neglog1m(double s);
CausalMatrix neglog1m(const CausalMatrix& m);

// Entry (i, j) = method[series i -> series j] for gc, te or ccm, averaged
// over parts.
CausalMatrix baseline_matrix(const std::vector<Dataset>& parts, Method method, const BaselineConfig& cfg, int jobs = 1);
CausalMatrix baseline_matrix(const Dataset& data, Method method, const BaselineConfig& cfg, int jobs = 1);

}  // namespace intdc

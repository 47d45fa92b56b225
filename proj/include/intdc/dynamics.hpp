#pragma once

#include "intdc/timeseries.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace intdc {

enum class System { logistic2, logistic3, henon10, chnn };

System parse_system(const std::string& name);
std::string to_string(System s);

using ParamMap = std::map<std::string, double>;

// Documented defaults for each benchmark. Noise parameters are standard
// deviations of the additive Gaussian terms.
//   logistic2: r, beta_xy, beta_yx, sigma
//   logistic3: gamma, beta_xy, beta_zx, beta_zy, sigma
//   henon10:   nodes, a, b, beta, sigma
//   chnn:      nodes, s, k_f, k_r, alpha, beta, b, sigma_f, sigma_r
ParamMap default_params(System s);

struct SimSpec {
    System system = System::logistic2;
    ParamMap params;  // overrides on top of default_params(system)
    Eigen::Index n = 1000;
    Eigen::Index burn_in = 1000;
    std::uint64_t seed = 0;
    // Per-variable starting values (the output variables for chnn).
    std::optional<Vector> initial_state;
    // chnn coupling; drawn from the seed when absent.
    std::optional<Matrix> coupling;
    // chnn perturbation: hold the removed neuron's internal states fixed.
    bool freeze_internal = false;

    double param(const std::string& name) const;
};

// Samples after burn-in; sample 0 is the state reached after burn_in
// updates of the initial state. Trajectories that leave |state| <= 1e6 are
// redrawn with a derived noise seed, at most 10 times.
Dataset simulate(const SimSpec& spec);

// Each row i has two nonzero weights at distinct columns j1, j2 != i,
// with w_ij1 ~ U(0, 1) and w_ij2 = 1 - w_ij1.
Matrix random_chnn_coupling(int n_nodes, std::uint64_t seed);

// The chnn coupling simulate() uses for this spec.
Matrix chnn_coupling(const SimSpec& spec);

// Same network with the removed neuron's output held at zero. Noise comes
// from an independent stream so that nodes without a causal path to the
// removed neuron are fresh draws from the same stationary law.
Dataset perturb_chnn(const SimSpec& spec, int removed_node);

}  // namespace intdc

#include "intdc/dynamics.hpp"

#include "intdc/random.hpp"

#include <cmath>

namespace intdc {

namespace {

constexpr double kEscapeBound = 1e6;
constexpr int kMaxRetries = 10;

struct Divergence {};

// Steps a state forward with the noise stream; returns N post burn-in rows.

std::uint64_t attempt_seed(std::uint64_t seed, int attempt) {
    return attempt == 0 ? seed : derive_seed(seed, 0x5eed0000ULL + static_cast<std::uint64_t>(attempt));
}

Dataset with_ids(Matrix samples, const std::string& prefix, bool numbered,
                 const std::vector<std::string>& names = {}) {
    Dataset d;
    for (Eigen::Index j = 0; j < samples.cols(); ++j) {
        std::string id = numbered ? prefix + std::to_string(j + 1) : names[static_cast<std::size_t>(j)];
        d.series.emplace_back(std::move(id), samples.col(j));
    }
    return d;
}

void check_escape(const Vector& state) {
    if (!state.allFinite() || state.cwiseAbs().maxCoeff() > kEscapeBound) throw Divergence{};
}

Matrix run_logistic2(const SimSpec& spec, Rng& rng) {
    const double r = spec.param("r"), bxy = spec.param("beta_xy"), byx = spec.param("beta_yx");
    std::normal_distribution<double> noise(0.0, 1.0);
    const double sigma = spec.param("sigma");
    std::uniform_real_distribution<double> init(0.1, 0.9);
    double x = spec.initial_state ? (*spec.initial_state)[0] : init(rng);
    double y = spec.initial_state ? (*spec.initial_state)[1] : init(rng);
    Matrix out(spec.n, 2);
    for (Eigen::Index t = 0; t < spec.burn_in + spec.n; ++t) {
        if (t >= spec.burn_in) {
            out(t - spec.burn_in, 0) = x;
            out(t - spec.burn_in, 1) = y;
        }
        const double ex = sigma * noise(rng), ey = sigma * noise(rng);
        const double xn = r * ((1.0 - byx) * x * (1.0 - x) + byx * y * (1.0 - y)) + ex;
        const double yn = r * y * (1.0 - (1.0 - bxy) * y - bxy * x) + ey;
        x = xn;
        y = yn;
        if (!std::isfinite(x) || !std::isfinite(y) || std::abs(x) > kEscapeBound || std::abs(y) > kEscapeBound)
            throw Divergence{};
    }
    return out;
}

Matrix run_logistic3(const SimSpec& spec, Rng& rng) {
    const double g = spec.param("gamma"), bxy = spec.param("beta_xy"), bzx = spec.param("beta_zx"),
                 bzy = spec.param("beta_zy"), sigma = spec.param("sigma");
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_real_distribution<double> init(0.1, 0.9);
    double x = spec.initial_state ? (*spec.initial_state)[0] : init(rng);
    double y = spec.initial_state ? (*spec.initial_state)[1] : init(rng);
    double z = spec.initial_state ? (*spec.initial_state)[2] : init(rng);
    Matrix out(spec.n, 3);
    for (Eigen::Index t = 0; t < spec.burn_in + spec.n; ++t) {
        if (t >= spec.burn_in) out.row(t - spec.burn_in) << x, y, z;
        const double ex = sigma * noise(rng), ey = sigma * noise(rng), ez = sigma * noise(rng);
        const double xn = g * x * (1.0 - (1.0 - bzx / g) * x - bzx / g * z) + ex;
        const double yn = g * y * (1.0 - (1.0 - (bxy + bzy) / g) * y - bxy / g * x - bzy / g * z) + ey;
        const double zn = g * z * (1.0 - z) + ez;
        x = xn;
        y = yn;
        z = zn;
        if (!std::isfinite(x + y + z) || std::max({std::abs(x), std::abs(y), std::abs(z)}) > kEscapeBound)
            throw Divergence{};
    }
    return out;
}

Matrix run_henon(const SimSpec& spec, Rng& rng) {
    const int nodes = static_cast<int>(spec.param("nodes"));
    const double a = spec.param("a"), b = spec.param("b"), beta = spec.param("beta"), sigma = spec.param("sigma");
    std::normal_distribution<double> noise(0.0, 1.0);
    Vector cur = spec.initial_state ? *spec.initial_state : Vector::Constant(nodes, 0.5);
    if (cur.size() != nodes) throw UsageError("henon10 initial state needs one value per node");
    Vector prev = cur;
    Vector next(nodes);
    Matrix out(spec.n, nodes);
    for (Eigen::Index t = 0; t < spec.burn_in + spec.n; ++t) {
        if (t >= spec.burn_in) out.row(t - spec.burn_in) = cur.transpose();
        for (int i = 0; i < nodes; ++i) {
            const double drive = i == 0 ? cur[0] : beta * cur[i - 1] + (1.0 - beta) * cur[i];
            next[i] = 1.0 - a * drive * drive + b * prev[i] + sigma * noise(rng);
        }
        prev = cur;
        cur = next;
        check_escape(cur);
    }
    return out;
}

struct ChnnState {
    Vector x, y, z;
};

Matrix run_chnn(const SimSpec& spec, const Matrix& w, Rng& rng, int removed, bool freeze) {
    const auto nodes = w.rows();
    const double s = spec.param("s"), kf = spec.param("k_f"), kr = spec.param("k_r"), alpha = spec.param("alpha"),
                 beta = spec.param("beta"), bias = spec.param("b"), sf = spec.param("sigma_f"),
                 sr = spec.param("sigma_r");
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_real_distribution<double> init(0.0, 1.0);
    ChnnState st{Vector(nodes), Vector(nodes), Vector(nodes)};
    for (Eigen::Index i = 0; i < nodes; ++i) {
        st.y[i] = init(rng);
        st.z[i] = init(rng);
        st.x[i] = std::tanh(s * (st.y[i] + st.z[i]));
    }
    if (spec.initial_state) {
        if (spec.initial_state->size() != nodes) throw UsageError("chnn initial state needs one value per node");
        st.x = *spec.initial_state;
    }
    // Output seen by the network; the removed neuron contributes zero.
    auto output = [&](const Vector& x) {
        Vector o = x;
        if (removed >= 0) o[removed] = 0.0;
        return o;
    };

    Matrix out(spec.n, nodes);
    Vector yn(nodes), zn(nodes);
    for (Eigen::Index t = 0; t < spec.burn_in + spec.n; ++t) {
        const Vector seen = output(st.x);
        if (t >= spec.burn_in) out.row(t - spec.burn_in) = seen.transpose();
        const Vector input = w * seen;
        for (Eigen::Index i = 0; i < nodes; ++i) {
            const double ey = noise(rng), ez = noise(rng);
            yn[i] = kf * st.y[i] + beta * input[i] + sf * ey;
            zn[i] = kr * st.z[i] - alpha * seen[i] + bias + sr * ez;
        }
        if (removed >= 0 && freeze) {
            yn[removed] = st.y[removed];
            zn[removed] = st.z[removed];
        }
        st.y = yn;
        st.z = zn;
        st.x = (s * (st.y + st.z)).array().tanh().matrix();
        check_escape(st.y);
        check_escape(st.z);
    }
    return out;
}

Dataset run(const SimSpec& spec, int removed) {
    if (spec.n < 1) throw UsageError("sample count must be >= 1");
    if (spec.burn_in < 0) throw UsageError("burn-in must be non-negative");
    for (const auto& [name, value] : spec.params)
        if (default_params(spec.system).count(name) == 0)
            throw UsageError("unknown parameter '" + name + "' for system " + to_string(spec.system));
    for (const char* noise_name : {"sigma", "sigma_f", "sigma_r"})
        if (default_params(spec.system).count(noise_name) && spec.param(noise_name) < 0.0)
            throw UsageError(std::string("noise amplitude ") + noise_name + " must be >= 0");

    const Matrix w = spec.system == System::chnn ? chnn_coupling(spec) : Matrix();
    const std::uint64_t base = removed < 0 ? spec.seed : derive_seed(spec.seed, 2000003ULL + static_cast<std::uint64_t>(removed));
    for (int attempt = 0; attempt <= kMaxRetries; ++attempt) {
        Rng rng(attempt_seed(base, attempt));
        try {
            switch (spec.system) {
            case System::logistic2: {
                Dataset d = with_ids(run_logistic2(spec, rng), "", false, {"x", "y"});
                Matrix gt = Matrix::Zero(2, 2);
                gt(1, 0) = spec.param("beta_yx") > 0.0;
                gt(0, 1) = spec.param("beta_xy") > 0.0;
                d.ground_truth = gt;
                return d;
            }
            case System::logistic3: {
                Dataset d = with_ids(run_logistic3(spec, rng), "", false, {"x", "y", "z"});
                Matrix gt = Matrix::Zero(3, 3);
                gt(0, 1) = spec.param("beta_xy") > 0.0;
                gt(2, 0) = spec.param("beta_zx") > 0.0;
                gt(2, 1) = spec.param("beta_zy") > 0.0;
                d.ground_truth = gt;
                return d;
            }
            case System::henon10: {
                Dataset d = with_ids(run_henon(spec, rng), "x", true);
                const auto nodes = static_cast<Eigen::Index>(d.size());
                Matrix gt = Matrix::Zero(nodes, nodes);
                for (Eigen::Index i = 0; i + 1 < nodes; ++i) gt(i, i + 1) = spec.param("beta") > 0.0;
                d.ground_truth = gt;
                return d;
            }
            case System::chnn: {
                Dataset d = with_ids(run_chnn(spec, w, rng, removed, spec.freeze_internal), "n", true);
                d.ground_truth = w.transpose();  // row = source neuron j, column = receiver i
                return d;
            }
            }
        } catch (const Divergence&) {
            continue;
        }
    }
    throw DegenerateError("simulation of " + to_string(spec.system) + " diverged in " +
                          std::to_string(kMaxRetries + 1) + " attempts; check parameters");
}

}  // namespace

System parse_system(const std::string& name) {
    if (name == "logistic2") return System::logistic2;
    if (name == "logistic3") return System::logistic3;
    if (name == "henon10" || name == "henon") return System::henon10;
    if (name == "chnn") return System::chnn;
    throw UsageError("unknown system '" + name + "' (expected logistic2, logistic3, henon10 or chnn)");
}

std::string to_string(System s) {
    switch (s) {
    case System::logistic2: return "logistic2";
    case System::logistic3: return "logistic3";
    case System::henon10: return "henon10";
    case System::chnn: return "chnn";
    }
    return "?";
}

ParamMap default_params(System s) {
    switch (s) {
    case System::logistic2: return {{"r", 3.7}, {"beta_xy", 0.0}, {"beta_yx", 0.0}, {"sigma", 0.01}};
    case System::logistic3:
        return {{"gamma", 3.7}, {"beta_xy", 0.0}, {"beta_zx", 0.5}, {"beta_zy", 0.5}, {"sigma", 0.001}};
    case System::henon10: return {{"nodes", 10}, {"a", 1.4}, {"b", 0.3}, {"beta", 0.6}, {"sigma", 0.002}};
    case System::chnn:
        return {{"nodes", 10}, {"s", 20},   {"k_f", 0.2}, {"k_r", 0.95},   {"alpha", 4},
                {"beta", 0.2}, {"b", 0.4},  {"sigma_f", 0.05}, {"sigma_r", 0.05}};
    }
    return {};
}

double SimSpec::param(const std::string& name) const {
    if (const auto it = params.find(name); it != params.end()) return it->second;
    const auto defaults = default_params(system);
    if (const auto it = defaults.find(name); it != defaults.end()) return it->second;
    throw UsageError("unknown parameter '" + name + "' for system " + to_string(system));
}

Matrix random_chnn_coupling(int n_nodes, std::uint64_t seed) {
    if (n_nodes < 3) throw UsageError("chnn needs at least 3 nodes");
    Rng rng(seed);
    std::uniform_real_distribution<double> weight(0.0, 1.0);
    Matrix w = Matrix::Zero(n_nodes, n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
        std::uniform_int_distribution<int> pick(0, n_nodes - 2);
        int j1 = pick(rng);
        if (j1 >= i) ++j1;
        int j2 = j1;
        while (j2 == j1 || j2 == i) {
            j2 = pick(rng);
            if (j2 >= i) ++j2;
        }
        const double w1 = weight(rng);
        w(i, j1) = w1;
        w(i, j2) = 1.0 - w1;
    }
    return w;
}

Matrix chnn_coupling(const SimSpec& spec) {
    if (spec.coupling) {
        const Matrix& w = *spec.coupling;
        if (w.rows() != w.cols()) throw UsageError("chnn coupling must be square");
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            int nonzero = 0;
            for (Eigen::Index j = 0; j < w.cols(); ++j) {
                if (w(i, j) < 0.0) throw UsageError("chnn coupling weights must be non-negative");
                if (w(i, j) > 0.0) {
                    if (i == j) throw UsageError("chnn coupling must have a zero diagonal");
                    ++nonzero;
                }
            }
            if (nonzero != 2 || std::abs(w.row(i).sum() - 1.0) > 1e-12)
                throw UsageError("chnn coupling row " + std::to_string(i) +
                                 " must have two positive inputs summing to 1");
        }
        return w;
    }
    return random_chnn_coupling(static_cast<int>(spec.param("nodes")), derive_seed(spec.seed, 1000003ULL));
}

Dataset simulate(const SimSpec& spec) { return run(spec, -1); }

Dataset perturb_chnn(const SimSpec& spec, int removed_node) {
    if (spec.system != System::chnn) throw UsageError("node removal is defined for chnn only");
    const auto nodes = static_cast<int>(chnn_coupling(spec).rows());
    if (removed_node < 0 || removed_node >= nodes)
        throw UsageError("removed node " + std::to_string(removed_node) + " is out of range");
    return run(spec, removed_node);
}

}  // namespace intdc

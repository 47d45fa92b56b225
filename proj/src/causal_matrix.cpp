#include "intdc/causal_matrix.hpp"

#include "intdc/parallel.hpp"

#include <string>

namespace intdc {

namespace {

std::string pair_name(const Dataset& d, std::size_t i, std::size_t j) {
    return "pair (" + d.series[i].id + " -> " + d.series[j].id + ")";
}

}  // namespace

CausalMatrix pairwise_matrix(const std::vector<Dataset>& parts, const PairIndex& index, int jobs) {
    if (parts.empty()) throw UsageError("no data to evaluate");
    const std::size_t n = parts.front().size();
    if (n < 2) throw UsageError("a causal matrix needs at least two series");
    for (const auto& p : parts) {
        if (p.size() != n) throw UsageError("all parts must hold the same series");
        p.validate();
    }

    struct Task {
        std::size_t part, i, j;
    };
    std::vector<Task> tasks;
    for (std::size_t p = 0; p < parts.size(); ++p)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) tasks.push_back({p, i, j});

    std::vector<double> values(tasks.size());
    parallel_for(tasks.size(), jobs, [&](std::size_t t) {
        const Task& task = tasks[t];
        const Dataset& d = parts[task.part];
        try {
            values[t] = index(d.series[task.i].values, d.series[task.j].values);
        } catch (const UsageError& e) {
            throw UsageError(pair_name(d, task.i, task.j) + ": " + e.what());
        } catch (const DataError& e) {
            throw DataError(pair_name(d, task.i, task.j) + ": " + e.what());
        } catch (const DegenerateError& e) {
            throw DegenerateError(pair_name(d, task.i, task.j) + ": " + e.what());
        }
    });

    const auto dim = static_cast<Eigen::Index>(n);
    CausalMatrix out = CausalMatrix::Zero(dim, dim);
    for (std::size_t t = 0; t < tasks.size(); ++t)
        out(static_cast<Eigen::Index>(tasks[t].i), static_cast<Eigen::Index>(tasks[t].j)) += values[t];
    out /= static_cast<double>(parts.size());
    return out;
}

}  // namespace intdc

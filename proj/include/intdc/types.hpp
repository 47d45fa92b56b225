#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace intdc {

using Real = double;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using IndexVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

// Row = cause, column = effect. Diagonal is unused and kept at zero.
using CausalMatrix = Eigen::MatrixXd;

// Bad arguments or preconditions the caller controls (CLI exit code 1).
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Input data that cannot be loaded or used (CLI exit code 2).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerically degenerate inputs: singular fits, duplicate points, zero
// variance, diverging trajectories (CLI exit code 3).
class DegenerateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace intdc

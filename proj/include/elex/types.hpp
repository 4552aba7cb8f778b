#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace elex {

using Real = double;
using Index = std::int32_t;

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Circuit topology the equation rulebook cannot handle (e.g. a series
/// branch mixing inductors and switches).
struct AssemblyError : std::runtime_error {
    explicit AssemblyError(const std::string& what) : std::runtime_error(what) {}
};

/// Transient run aborted; carries the simulation time of the failure.
struct SimulationError : std::runtime_error {
    SimulationError(const std::string& what, Real time)
        : std::runtime_error(what), t(time) {}
    Real t;
};

}  // namespace elex

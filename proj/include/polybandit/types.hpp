#pragma once

#include <Eigen/Dense>

namespace polybandit {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Index = Eigen::Index;

/// Shared numerical tolerances. Geometric predicates take an explicit `tol`
/// argument that defaults to `membership`.
namespace tolerance {
inline constexpr double membership = 1e-9;  ///< A x <= b + tol, activity |A_i x - b_i| <= tol
inline constexpr double pivot = 1e-10;      ///< smallest tableau entry eligible as a pivot
inline constexpr double dedupe = 1e-7;      ///< L-infinity distance below which two vertices coincide
inline constexpr double singular_condition = 1e12;
}  // namespace tolerance

}  // namespace polybandit

#ifndef ARGLABEL_TYPES_HPP
#define ARGLABEL_TYPES_HPP

#include <Eigen/Dense>

namespace arglabel {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

using Index = Eigen::Index;

}  // namespace arglabel

#endif  // ARGLABEL_TYPES_HPP

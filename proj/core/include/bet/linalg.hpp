#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

namespace bet {

/// Largest chart dimension supported. Total spaces of warped products with an S^3 fiber
/// over a 2-D base need 5; the headroom keeps all small matrices on the stack.
inline constexpr int kMaxDim = 8;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

/// Smallest lambda with (a - lambda g) v = 0, g positive definite, a symmetric.
double min_generalized_eigenvalue(const Mat& a, const Mat& g);

/// Max-norm of m - m^T.
inline double asymmetry(const Mat& m) { return (m - m.transpose()).cwiseAbs().maxCoeff(); }

inline Mat symmetrized(const Mat& m) { return 0.5 * (m + m.transpose()); }

}  // namespace bet

#include "bet/linalg.hpp"

#include <Eigen/Cholesky>

#include "bet/error.hpp"

namespace bet {

double min_generalized_eigenvalue(const Mat& a, const Mat& g) {
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::SingularMetric, "metric is not positive definite");
  // L^{-1} A L^{-T} has the same spectrum as the pencil (A, g).
  const Mat l = llt.matrixL();
  const Mat linv_a = l.triangularView<Eigen::Lower>().solve(symmetrized(a));
  const Mat c = l.triangularView<Eigen::Lower>().solve(linv_a.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrized(c), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace bet

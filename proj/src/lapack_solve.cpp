#include "cavenc/bie_core.hpp"

#include <string>
#include <vector>

#include <lapacke.h>

namespace cavenc::bie {

namespace {
void check_info(lapack_int info, const char* what) {
  if (info != 0)
    throw NumericalError(std::string(what) + " failed, info=" + std::to_string(info));
}
}  // namespace

template <>
void lu_solve_inplace<double>(MatX<double>& A, MatX<double>& B) {
  const lapack_int n = static_cast<lapack_int>(A.rows());
  const lapack_int nrhs = static_cast<lapack_int>(B.cols());
  std::vector<lapack_int> ipiv(n);
  check_info(LAPACKE_dgesv(LAPACK_COL_MAJOR, n, nrhs, A.data(), n, ipiv.data(), B.data(), n),
             "dgesv");
}

template <>
void lu_solve_inplace<Complex>(MatX<Complex>& A, MatX<Complex>& B) {
  const lapack_int n = static_cast<lapack_int>(A.rows());
  const lapack_int nrhs = static_cast<lapack_int>(B.cols());
  std::vector<lapack_int> ipiv(n);
  check_info(LAPACKE_zgesv(LAPACK_COL_MAJOR, n, nrhs,
                           reinterpret_cast<lapack_complex_double*>(A.data()), n, ipiv.data(),
                           reinterpret_cast<lapack_complex_double*>(B.data()), n),
             "zgesv");
}

// M = A (I-A)^{-1}, computed as the transposed solve (I-A)^T Y = A^T, M = Y^T,
// so a single factorization serves all right-hand sides.
template <class S>
MatX<S> resolvent(const MatX<S>& A) {
  MatX<S> Ct = (MatX<S>::Identity(A.rows(), A.cols()) - A).transpose();
  MatX<S> Bt = A.transpose();
  lu_solve_inplace(Ct, Bt);
  return Bt.transpose();
}
template MatX<double> resolvent<double>(const MatX<double>&);
template MatX<Complex> resolvent<Complex>(const MatX<Complex>&);

template <class S>
double norm_inf(const MatX<S>& A) {
  if (A.rows() == 0 || A.cols() == 0) return 0.0;
  return A.cwiseAbs().rowwise().sum().maxCoeff();
}
template double norm_inf<double>(const MatX<double>&);
template double norm_inf<Complex>(const MatX<Complex>&);

}  // namespace cavenc::bie

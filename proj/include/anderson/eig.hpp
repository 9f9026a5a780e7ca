#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

// LAPACK entry points used by the solvers below. The symmetric tridiagonal
// MRRR routine is what keeps large one-dimensional ensembles affordable.
extern "C" {
void dsyevd_(const char* jobz, const char* uplo, const int* n, double* a, const int* lda,
             double* w, double* work, const int* lwork, int* iwork, const int* liwork, int* info);
void dstemr_(const char* jobz, const char* range, const int* n, double* d, double* e,
             const double* vl, const double* vu, const int* il, const int* iu, int* m, double* w,
             double* z, const int* ldz, const int* nzc, int* isuppz, int* tryrac, double* work,
             const int* lwork, int* iwork, const int* liwork, int* info);
void zgttrf_(const int* n, std::complex<double>* dl, std::complex<double>* d,
             std::complex<double>* du, std::complex<double>* du2, int* ipiv, int* info);
void zgttrs_(const char* trans, const int* n, const int* nrhs, const std::complex<double>* dl,
             const std::complex<double>* d, const std::complex<double>* du,
             const std::complex<double>* du2, const int* ipiv, std::complex<double>* b,
             const int* ldb, int* info);
}

namespace anderson {

struct EigenDecomposition {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // column j pairs with values[j]
};

namespace detail {

inline void lapack_check(int info, const char* routine) {
  if (info != 0)
    throw std::runtime_error(std::string(routine) + " failed with info=" + std::to_string(info));
}

}  // namespace detail

// Full symmetric eigendecomposition (divide and conquer). The input is taken
// by value and reused as the eigenvector storage.
inline EigenDecomposition symmetric_eigen(Eigen::MatrixXd a) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n) throw std::invalid_argument("symmetric_eigen: matrix not square");
  EigenDecomposition out;
  out.values.resize(n);
  if (n == 0) return out;

  int info = 0, lwork = -1, liwork = -1;
  double work_query = 0;
  int iwork_query = 0;
  dsyevd_("V", "L", &n, a.data(), &n, out.values.data(), &work_query, &lwork, &iwork_query,
          &liwork, &info);
  detail::lapack_check(info, "dsyevd (query)");
  lwork = static_cast<int>(work_query);
  liwork = iwork_query;
  std::vector<double> work(static_cast<std::size_t>(lwork));
  std::vector<int> iwork(static_cast<std::size_t>(liwork));
  dsyevd_("V", "L", &n, a.data(), &n, out.values.data(), work.data(), &lwork, iwork.data(),
          &liwork, &info);
  detail::lapack_check(info, "dsyevd");
  out.vectors = std::move(a);
  return out;
}

inline Eigen::VectorXd symmetric_eigenvalues(Eigen::MatrixXd a) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n) throw std::invalid_argument("symmetric_eigenvalues: matrix not square");
  Eigen::VectorXd values(n);
  if (n == 0) return values;
  int info = 0, lwork = -1, liwork = -1;
  double work_query = 0;
  int iwork_query = 0;
  dsyevd_("N", "L", &n, a.data(), &n, values.data(), &work_query, &lwork, &iwork_query, &liwork,
          &info);
  detail::lapack_check(info, "dsyevd (query)");
  lwork = static_cast<int>(work_query);
  liwork = iwork_query;
  std::vector<double> work(static_cast<std::size_t>(lwork));
  std::vector<int> iwork(static_cast<std::size_t>(liwork));
  dsyevd_("N", "L", &n, a.data(), &n, values.data(), work.data(), &lwork, iwork.data(), &liwork,
          &info);
  detail::lapack_check(info, "dsyevd");
  return values;
}

namespace detail {

inline EigenDecomposition stemr(Eigen::VectorXd diag, Eigen::VectorXd off, bool want_vectors) {
  const int n = static_cast<int>(diag.size());
  if (off.size() != n - 1 && !(n <= 1 && off.size() == 0))
    throw std::invalid_argument("tridiagonal_eigen: off-diagonal size mismatch");
  EigenDecomposition out;
  out.values.resize(n);
  if (n == 0) return out;
  if (want_vectors) out.vectors.resize(n, n);

  // dstemr wants E of length n (trailing slot is workspace) and destroys D, E.
  std::vector<double> e(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i + 1 < n; ++i) e[static_cast<std::size_t>(i)] = off[i];

  const char* jobz = want_vectors ? "V" : "N";
  const double vl = 0, vu = 0;
  const int il = 1, iu = n;
  int m = 0, info = 0, tryrac = 1;
  const int ldz = want_vectors ? n : 1;
  const int nzc = want_vectors ? n : 1;
  double z_dummy = 0;
  double* z = want_vectors ? out.vectors.data() : &z_dummy;
  std::vector<int> isuppz(static_cast<std::size_t>(2 * n));

  int lwork = -1, liwork = -1;
  double work_query = 0;
  int iwork_query = 0;
  dstemr_(jobz, "A", &n, diag.data(), e.data(), &vl, &vu, &il, &iu, &m, out.values.data(), z, &ldz,
          &nzc, isuppz.data(), &tryrac, &work_query, &lwork, &iwork_query, &liwork, &info);
  lapack_check(info, "dstemr (query)");
  lwork = static_cast<int>(work_query);
  liwork = iwork_query;
  std::vector<double> work(static_cast<std::size_t>(lwork));
  std::vector<int> iwork(static_cast<std::size_t>(liwork));
  dstemr_(jobz, "A", &n, diag.data(), e.data(), &vl, &vu, &il, &iu, &m, out.values.data(), z, &ldz,
          &nzc, isuppz.data(), &tryrac, work.data(), &lwork, iwork.data(), &liwork, &info);
  lapack_check(info, "dstemr");
  if (m != n) throw std::runtime_error("dstemr: did not converge to all eigenvalues");
  return out;
}

}  // namespace detail

// Symmetric tridiagonal eigendecomposition (MRRR). Roughly an order of
// magnitude faster than the dense path at n ~ 1000.
inline EigenDecomposition tridiagonal_eigen(Eigen::VectorXd diag, Eigen::VectorXd off) {
  return detail::stemr(std::move(diag), std::move(off), true);
}

inline Eigen::VectorXd tridiagonal_eigenvalues(Eigen::VectorXd diag, Eigen::VectorXd off) {
  return detail::stemr(std::move(diag), std::move(off), false).values;
}

// Factored complex tridiagonal system (zgttrf/zgttrs): build once per
// spectral parameter, then run the k+1 successive resolvent solves against
// the same factorization.
class TridiagonalSolverZ {
 public:
  TridiagonalSolverZ(Eigen::VectorXcd lower, Eigen::VectorXcd diag, Eigen::VectorXcd upper)
      : n_(static_cast<int>(diag.size())),
        dl_(std::move(lower)),
        d_(std::move(diag)),
        du_(std::move(upper)),
        du2_(std::max(0, n_ - 2)),
        ipiv_(static_cast<std::size_t>(n_)) {
    if (dl_.size() != std::max(0, n_ - 1) || du_.size() != std::max(0, n_ - 1))
      throw std::invalid_argument("TridiagonalSolverZ: band size mismatch");
    int info = 0;
    zgttrf_(&n_, dl_.data(), d_.data(), du_.data(), du2_.data(), ipiv_.data(), &info);
    detail::lapack_check(info, "zgttrf");
  }

  Eigen::VectorXcd solve(Eigen::VectorXcd rhs) const {
    if (rhs.size() != n_) throw std::invalid_argument("TridiagonalSolverZ: rhs size mismatch");
    const int nrhs = 1;
    int info = 0;
    zgttrs_("N", &n_, &nrhs, dl_.data(), d_.data(), du_.data(), du2_.data(), ipiv_.data(),
            rhs.data(), &n_, &info);
    detail::lapack_check(info, "zgttrs");
    return rhs;
  }

 private:
  int n_;
  Eigen::VectorXcd dl_, d_, du_, du2_;
  std::vector<int> ipiv_;
};

}  // namespace anderson

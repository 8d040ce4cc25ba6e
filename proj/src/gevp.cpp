#include "qksd/gevp.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "qksd/errors.hpp"

namespace qksd {

Eigen::MatrixXcd assemble_toeplitz(const std::vector<cplx>& row) {
  if (row.empty()) throw DimensionError("Toeplitz row is empty");
  const auto n = static_cast<Eigen::Index>(row.size());
  Eigen::MatrixXcd a(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = 0; l < n; ++l) {
      a(k, l) = l >= k ? row[static_cast<std::size_t>(l - k)] : std::conj(row[static_cast<std::size_t>(k - l)]);
    }
  }
  // the diagonal of a Hermitian matrix is real
  for (Eigen::Index k = 0; k < n; ++k) a(k, k) = a(k, k).real();
  return a;
}

GevpResult thresholded_gevp(const Eigen::MatrixXcd& h, const Eigen::MatrixXcd& s, double eps_th) {
  if (h.rows() != h.cols() || s.rows() != s.cols() || h.rows() != s.rows()) {
    throw DimensionError("GEVP matrices must be square and of equal size");
  }
  if (!(eps_th >= 0.0)) throw ConfigError("threshold must be non-negative");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(s);
  if (es.info() != Eigen::Success) throw NumericalError("overlap eigendecomposition failed");
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < s.rows(); ++i)
    if (es.eigenvalues()[i] > eps_th && es.eigenvalues()[i] > 0.0) keep.push_back(i);
  if (keep.empty()) {
    std::ostringstream os;
    os << "threshold " << eps_th << " removes every overlap direction (largest eigenvalue "
       << es.eigenvalues()[s.rows() - 1] << ")";
    throw InfeasibleError(os.str());
  }
  const auto m = static_cast<Eigen::Index>(keep.size());
  Eigen::MatrixXcd x(s.rows(), m);
  for (Eigen::Index c = 0; c < m; ++c) {
    x.col(c) = es.eigenvectors().col(keep[static_cast<std::size_t>(c)]) /
               std::sqrt(es.eigenvalues()[keep[static_cast<std::size_t>(c)]]);
  }
  Eigen::MatrixXcd reduced = x.adjoint() * h * x;
  reduced = 0.5 * (reduced + reduced.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> red(reduced, Eigen::EigenvaluesOnly);
  if (red.info() != Eigen::Success) throw NumericalError("reduced eigenproblem failed");
  return {red.eigenvalues(), static_cast<int>(m)};
}

double default_threshold(int n, double shots_s, double c) {
  if (shots_s < 1.0) throw ConfigError("overlap shot count below one");
  return c * n / std::sqrt(shots_s);
}

double recover_shifted_energy(double e_shifted, double t) { return e_shifted + t; }

GevpResult solve_ensemble(const KrylovEnsemble& e, double eps_th) {
  if (e.s_row.size() != e.h_row.size()) throw DimensionError("first rows differ in length");
  GevpResult r = thresholded_gevp(assemble_toeplitz(e.h_row), assemble_toeplitz(e.s_row), eps_th);
  r.eigenvalues.array() += e.t_shift;
  return r;
}

}  // namespace qksd

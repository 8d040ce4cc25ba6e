#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace qksd {

using cplx = std::complex<double>;

/// First rows of the Krylov matrices plus the scalar restored after the GEVP.
struct KrylovEnsemble {
  int n = 0;
  double dt = 0.0;
  std::vector<cplx> s_row;
  std::vector<cplx> h_row;
  /// Added back to every eigenvalue: the shift t plus the identity
  /// coefficient carried outside the measured fragments.
  double t_shift = 0.0;
  double shots = 0.0;
  std::string noise = "exact";
  std::uint64_t seed = 0;
};

/// A_kl = row[l - k] for l >= k and conj(row[k - l]) otherwise.
Eigen::MatrixXcd assemble_toeplitz(const std::vector<cplx>& row);

struct GevpResult {
  Eigen::VectorXd eigenvalues;  // ascending
  int kept = 0;
};

/// Projects onto the eigenvectors of S with eigenvalue above max(eps_th, 0),
/// whitens by the inverse square roots and diagonalizes the reduced H.
/// Throws InfeasibleError when no direction survives.
GevpResult thresholded_gevp(const Eigen::MatrixXcd& h, const Eigen::MatrixXcd& s, double eps_th);

/// c n / sqrt(M_S).
double default_threshold(int n, double shots_s, double c = 1.0);

double recover_shifted_energy(double e_shifted, double t);

/// Lowest eigenvalue of the ensemble's Toeplitz pair with t_shift restored.
GevpResult solve_ensemble(const KrylovEnsemble& e, double eps_th);

}  // namespace qksd

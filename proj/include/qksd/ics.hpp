#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "qksd/grouping.hpp"
#include "qksd/reference.hpp"
#include "qksd/sim.hpp"

namespace qksd {

/// Symmetrized Pauli covariance for the estimator of part X of <phi0|.|phik>.
double pauli_covariance(const PauliWord& p, const PauliWord& q, const StateVector& phi0,
                        const StateVector& phik, Part part);

/// <a|P|b> for every word, batched by X-mask.
std::vector<cplx> pauli_expectations(const std::vector<PauliWord>& words, const StateVector& a,
                                     const StateVector& b);

/// Groups of a SORTED INSERTION partition extended by every other term that is
/// compatible with all current members, visited in insertion order.
struct SplitProblem {
  GroupingMode mode = GroupingMode::FH;
  int n_qubits = 0;
  double identity = 0.0;
  std::vector<PauliWord> words;
  std::vector<double> target;
  /// Term indices of each group; the original members come first.
  std::vector<std::vector<int>> members;
  std::vector<Eigen::VectorXd> initial;
};

SplitProblem extend_groups(const FragmentSet& fs);

/// Per-group covariance matrices [R, I] over the group's term indices, made
/// positive semidefinite by an eigenvalue floor at zero.
struct CovarianceSet {
  std::vector<std::array<Eigen::MatrixXd, 2>> cov;
};

CovarianceSet build_group_covariances(const SplitProblem& sp, const StateVector& proxy0,
                                      const StateVector& proxyk);

using Split = std::vector<Eigen::VectorXd>;

/// Var[X; alpha^(G_j)] = alpha^T Cov^(X)_j alpha.
std::vector<std::array<double, 2>> split_variances(const CovarianceSet& cs, const Split& alpha);

/// sum_jX Var[X; alpha_j] / m_jX; +inf if a part with variance has no shots.
double ics_objective(const CovarianceSet& cs, const Split& alpha, const ShotAllocation& m);

struct KktReport {
  double constraint_residual = 0.0;
  double stationarity_residual = 0.0;
};

/// Exact minimizer of the allocation-weighted quadratic form subject to the
/// per-term reconstruction equalities.
Split split_qp_step(const SplitProblem& sp, const CovarianceSet& cs, const ShotAllocation& m,
                    KktReport* report = nullptr);

/// m_jX proportional to the square root of the split variances.
ShotAllocation reallocate(const CovarianceSet& cs, const Split& alpha);

struct IcsOptions {
  int iterations = 50;
  double tol = 1e-6;
};

struct SplitSolution {
  Split alpha;
  ShotAllocation m;
  /// Objective of the starting point followed by one entry per alternation.
  std::vector<double> objective_trace;
  int iterations = 0;
  bool converged = false;
};

/// Alternates split_qp_step and reallocate from the SORTED INSERTION split with
/// the norm-proportional allocation. Iterates that would raise the objective
/// are rejected, so the trace never increases.
SplitSolution ics_optimize(const SplitProblem& sp, const CovarianceSet& cs, const IcsOptions& opt = {});

/// Largest deviation of any term's summed split from its coefficient.
double reconstruction_error(const SplitProblem& sp, const Split& alpha);

/// Fragment set of the split, zero coefficients dropped. Shot fractions of
/// the returned groups are given by the matching rows of `m`.
FragmentSet split_fragments(const SplitProblem& sp, const Split& alpha);

struct ProxyPair {
  StateVector phi0;
  StateVector phik;
  double e_cisd = 0.0;
};

/// HF determinant and exp(-i E_CISD k dt)|CISD>, with <HF|CISD> real positive.
ProxyPair cisd_proxy_pair(const PauliSum& h, const Occupation& ref, int k, double dt);
ProxyPair cisd_proxy_pair(const CisdResult& cisd, const Occupation& ref, int k, double dt);

}  // namespace qksd

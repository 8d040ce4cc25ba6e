#pragma once

// Brute-force reference constructions used only by the tests. None of these
// go through the library's Pauli or fermion algebra.

#include <Eigen/Dense>
#include <bit>
#include <complex>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "json.hpp"
#include "qksd/integrals.hpp"
#include "qksd/pauli.hpp"

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

inline Mat single(char op) {
  Mat m(2, 2);
  switch (op) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m << 1, 0, 0, 1; break;
  }
  return m;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Word string with leftmost character on qubit 0 (the least significant index bit).
inline Mat word(const std::string& s) {
  Mat m = Mat::Identity(1, 1);
  for (char c : s) m = kron(single(c), m);
  return m;
}

inline Mat sum(const qksd::PauliSum& h) {
  const auto d = Eigen::Index{1} << h.n_qubits();
  Mat m = Mat::Zero(d, d);
  for (const auto& [w, c] : h.terms()) m += c * word(w.to_string());
  return m;
}

/// Annihilation operator on mode p in the occupation basis; bit p = 1 is occupied.
inline Mat annihilate(int n_modes, int p) {
  const Eigen::Index d = Eigen::Index{1} << n_modes;
  Mat m = Mat::Zero(d, d);
  for (std::uint64_t b = 0; b < static_cast<std::uint64_t>(d); ++b) {
    if (!((b >> p) & 1ULL)) continue;
    const int below = std::popcount(b & ((1ULL << p) - 1ULL));
    m(static_cast<Eigen::Index>(b ^ (1ULL << p)), static_cast<Eigen::Index>(b)) = (below & 1) ? -1.0 : 1.0;
  }
  return m;
}

/// sum h_pq a+_p a_q + 1/2 sum (pq|rs) a+_p a+_r a_s a_q + e_core, built from explicit matrices.
inline Mat hamiltonian(const qksd::IntegralSet& ints) {
  const int n = ints.n_orb();
  const Eigen::Index d = Eigen::Index{1} << n;
  std::vector<Mat> a, ad;
  for (int p = 0; p < n; ++p) {
    a.push_back(annihilate(n, p));
    ad.push_back(a.back().adjoint());
  }
  Mat h = ints.e_core() * Mat::Identity(d, d);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      if (ints.h(p, q) != 0.0) h += ints.h(p, q) * ad[p] * a[q];
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          const double g = ints.g(p, q, r, s);
          if (g != 0.0) h += 0.5 * g * ad[p] * ad[r] * a[s] * a[q];
        }
  return h;
}

inline Eigen::VectorXd eigenvalues(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline Mat random_hermitian(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Mat a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = cplx(nd(rng), nd(rng));
  return 0.5 * (a + a.adjoint());
}

inline Eigen::VectorXcd random_state(Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::VectorXcd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = cplx(nd(rng), nd(rng));
  return v / v.norm();
}

inline qksd::PauliSum random_pauli_sum(int n_qubits, int n_terms, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint64_t> bits(0, (1ULL << n_qubits) - 1);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  qksd::PauliSum h(n_qubits);
  for (int i = 0; i < n_terms; ++i) h.add(qksd::PauliWord(n_qubits, bits(rng), bits(rng)), coef(rng));
  return h;
}

inline std::filesystem::path fixture(const std::string& name, const std::string& ext) {
  return std::filesystem::path(QKSD_FIXTURE_DIR) / (name + ext);
}

inline nlohmann::json fixture_info(const std::string& name) {
  std::ifstream in(fixture(name, ".json"));
  return nlohmann::json::parse(in);
}

}  // namespace oracle

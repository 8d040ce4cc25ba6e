#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace qksd {

/// One- and two-electron integrals over spin orbitals.
///
/// Spin orbitals are interleaved: 2i is spatial orbital i with alpha spin,
/// 2i+1 the same orbital with beta spin. `g(p,q,r,s)` is the chemist-order
/// integral (pq|rs) and carries the eight-fold permutational symmetry.
class IntegralSet {
 public:
  IntegralSet() = default;
  /// Zero tensors over `n_orb` spin orbitals.
  IntegralSet(int n_orb, int n_elec);

  int n_orb() const { return n_orb_; }
  int n_elec() const { return n_elec_; }
  double e_core() const { return e_core_; }
  void set_e_core(double e) { e_core_ = e; }

  double h(int p, int q) const { return h_[idx2(p, q)]; }
  double g(int p, int q, int r, int s) const { return g_[idx4(p, q, r, s)]; }

  /// Sets h_pq and h_qp.
  void set_h(int p, int q, double v);
  /// Sets all eight symmetry-related entries of (pq|rs).
  void set_g(int p, int q, int r, int s, double v);

  /// Throws ParseError if h is not symmetric or g violates a permutation
  /// symmetry by more than `tol`, or any entry is non-finite.
  void validate(double tol = 1e-10) const;

 private:
  std::size_t idx2(int p, int q) const { return static_cast<std::size_t>(p) * n_orb_ + q; }
  std::size_t idx4(int p, int q, int r, int s) const {
    const std::size_t n = n_orb_;
    return ((static_cast<std::size_t>(p) * n + q) * n + r) * n + s;
  }

  int n_orb_ = 0;
  int n_elec_ = 0;
  double e_core_ = 0.0;
  std::vector<double> h_;
  std::vector<double> g_;
};

/// Parses an FCIDUMP over spatial orbitals and expands it to spin orbitals.
///
/// Records are `value i j k l` with 1-based indices. `i j 0 0` is a one-body
/// entry and `0 0 0 0` the core energy. Redundant permutations are accepted
/// when they agree to 1e-10; a disagreement raises ParseError naming the line.
IntegralSet parse_fcidump(std::string_view text);
IntegralSet load_fcidump(const std::filesystem::path& path);

}  // namespace qksd

#pragma once

#include <complex>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace qksd {

inline constexpr int kMaxQubits = 64;

/// Hermitian N-qubit Pauli word in symplectic form.
///
/// Bit q of `x` / `z` refers to qubit q. The operator is
/// i^{|x & z|} X^x Z^z, so a site with both bits set is Y. In string form the
/// leftmost character is qubit 0.
class PauliWord {
 public:
  PauliWord() = default;
  PauliWord(int n_qubits, std::uint64_t x, std::uint64_t z);

  static PauliWord identity(int n_qubits) { return PauliWord(n_qubits, 0, 0); }
  /// Parses a string over {I,X,Y,Z}; length fixes the qubit count.
  static PauliWord from_string(std::string_view text);
  /// Single-qubit Pauli `op` in {'X','Y','Z'} on `qubit`.
  static PauliWord single(int n_qubits, int qubit, char op);

  int n_qubits() const { return n_qubits_; }
  std::uint64_t x() const { return x_; }
  std::uint64_t z() const { return z_; }
  bool is_identity() const { return x_ == 0 && z_ == 0; }
  int weight() const;
  /// Number of Y sites; the word's matrix in the computational basis carries i^{y_count}.
  int y_count() const;
  char op_at(int qubit) const;
  std::string to_string() const;

  /// Canonical order: qubit count, then z bits, then x bits.
  friend std::strong_ordering operator<=>(const PauliWord& a, const PauliWord& b) {
    if (auto c = a.n_qubits_ <=> b.n_qubits_; c != 0) return c;
    if (auto c = a.z_ <=> b.z_; c != 0) return c;
    return a.x_ <=> b.x_;
  }
  friend bool operator==(const PauliWord&, const PauliWord&) = default;

 private:
  int n_qubits_ = 0;
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
};

/// Phase i^k, stored as k mod 4.
struct Phase {
  int power = 0;
  std::complex<double> value() const;
  bool is_real() const { return (power & 1) == 0; }
  /// +1 / -1 for real phases; undefined for imaginary ones.
  double sign() const { return power == 0 ? 1.0 : -1.0; }
  friend bool operator==(const Phase&, const Phase&) = default;
};

struct PauliProduct {
  Phase phase;
  PauliWord word;
};

/// p * q = phase * r.
PauliProduct pauli_product(const PauliWord& p, const PauliWord& q);

/// True iff the symplectic form vanishes; otherwise the words anticommute.
bool commutes(const PauliWord& p, const PauliWord& q);

/// Real linear combination of Pauli words on a fixed number of qubits.
class PauliSum {
 public:
  using TermMap = std::map<PauliWord, double>;

  explicit PauliSum(int n_qubits = 0);

  int n_qubits() const { return n_qubits_; }
  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  /// Adds `coefficient` onto `word`; entries that cancel to exactly zero are erased.
  void add(const PauliWord& word, double coefficient);
  double coefficient(const PauliWord& word) const;
  double identity_coefficient() const;
  PauliSum without_identity() const;
  /// Drops entries with |coefficient| <= tol.
  PauliSum chopped(double tol) const;

  /// Sum of |coefficients|, identity excluded unless requested.
  double l1_norm(bool include_identity = false) const;
  double l2_norm_squared() const;

  PauliSum& operator+=(const PauliSum& other);
  PauliSum& operator-=(const PauliSum& other);
  PauliSum& operator*=(double s);
  friend PauliSum operator+(PauliSum a, const PauliSum& b) { return a += b; }
  friend PauliSum operator-(PauliSum a, const PauliSum& b) { return a -= b; }
  friend PauliSum operator*(double s, PauliSum a) { return a *= s; }

  /// One term per line: shortest round-trip decimal coefficient, space, word string.
  std::string to_text() const;
  /// Inverse of to_text. Blank lines and lines starting with '#' are skipped.
  /// `n_qubits` is required only when the text holds no terms.
  static PauliSum from_text(std::string_view text, int n_qubits = -1);

 private:
  int n_qubits_;
  TermMap terms_;
};

/// (1/d) Tr[a^dagger b] = sum over shared words of the coefficient products.
double normalized_trace_inner(const PauliSum& a, const PauliSum& b);

}  // namespace qksd

#include "qksd/statevector.hpp"

#include <bit>
#include <map>

#include "qksd/errors.hpp"

namespace qksd {

namespace {

cplx i_power(int k) {
  switch (k & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

inline double parity_sign(std::uint64_t v) { return (std::popcount(v) & 1) ? -1.0 : 1.0; }

void check_qubits(int n) {
  if (n > kMaxStatevectorQubits) {
    throw DimensionError("statevector limited to " + std::to_string(kMaxStatevectorQubits) +
                         " qubits");
  }
}

}  // namespace

StateVector basis_state(int n_qubits, std::uint64_t index) {
  check_qubits(n_qubits);
  StateVector v = StateVector::Zero(static_cast<Eigen::Index>(std::size_t{1} << n_qubits));
  if (index >= static_cast<std::uint64_t>(v.size())) throw IndexError("basis index out of range");
  v[static_cast<Eigen::Index>(index)] = 1.0;
  return v;
}

void apply_word(const PauliWord& p, const StateVector& psi, StateVector& out) {
  const std::size_t dim = std::size_t{1} << p.n_qubits();
  if (static_cast<std::size_t>(psi.size()) != dim) throw DimensionError("state size mismatch");
  out.resize(psi.size());
  const cplx phase = i_power(p.y_count());
  const std::uint64_t x = p.x(), z = p.z();
  for (std::size_t b = 0; b < dim; ++b) {
    out[static_cast<Eigen::Index>(b ^ x)] = phase * parity_sign(z & b) * psi[static_cast<Eigen::Index>(b)];
  }
}

StateVector apply_word(const PauliWord& p, const StateVector& psi) {
  StateVector out;
  apply_word(p, psi, out);
  return out;
}

cplx word_matrix_element(const PauliWord& p, const StateVector& a, const StateVector& b) {
  const std::size_t dim = std::size_t{1} << p.n_qubits();
  if (static_cast<std::size_t>(a.size()) != dim || static_cast<std::size_t>(b.size()) != dim) {
    throw DimensionError("state size mismatch");
  }
  const std::uint64_t x = p.x(), z = p.z();
  cplx s = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    const cplx bi = b[static_cast<Eigen::Index>(i)];
    if (bi == 0.0) continue;
    s += std::conj(a[static_cast<Eigen::Index>(i ^ x)]) * parity_sign(z & i) * bi;
  }
  return i_power(p.y_count()) * s;
}

CompiledPauliSum::CompiledPauliSum(const PauliSum& h, std::size_t memory_limit_bytes)
    : n_qubits_(h.n_qubits()) {
  check_qubits(n_qubits_);
  std::map<std::uint64_t, Group> by_x;
  for (const auto& [w, c] : h.terms()) {
    Group& g = by_x[w.x()];
    g.x = w.x();
    g.terms.push_back({w.z(), c * i_power(w.y_count())});
  }
  const std::size_t d = dim();
  std::size_t budget = memory_limit_bytes;
  for (auto& [x, g] : by_x) {
    bool has_imag = false;
    for (const Term& t : g.terms) has_imag |= t.coef.imag() != 0.0;
    const std::size_t need = d * sizeof(double) * (has_imag ? 2 : 1);
    // single-term groups are cheap to evaluate directly
    if (g.terms.size() > 1 && need <= budget) {
      budget -= need;
      g.re.assign(d, 0.0);
      if (has_imag) g.im.assign(d, 0.0);
      for (const Term& t : g.terms) {
        for (std::size_t b = 0; b < d; ++b) {
          const double s = parity_sign(t.z & b);
          g.re[b] += s * t.coef.real();
          if (has_imag) g.im[b] += s * t.coef.imag();
        }
      }
    }
    groups_.push_back(std::move(g));
  }
}

void CompiledPauliSum::apply(const StateVector& in, StateVector& out) const {
  const std::size_t d = dim();
  if (static_cast<std::size_t>(in.size()) != d) throw DimensionError("state size mismatch");
  out.setZero(in.size());
  const cplx* src = in.data();
  cplx* dst = out.data();
  for (const Group& g : groups_) {
    const std::uint64_t x = g.x;
    if (!g.re.empty()) {
      if (g.im.empty()) {
        for (std::size_t b = 0; b < d; ++b) dst[b ^ x] += g.re[b] * src[b];
      } else {
        for (std::size_t b = 0; b < d; ++b) dst[b ^ x] += cplx(g.re[b], g.im[b]) * src[b];
      }
    } else {
      for (const Term& t : g.terms) {
        for (std::size_t b = 0; b < d; ++b) dst[b ^ x] += t.coef * parity_sign(t.z & b) * src[b];
      }
    }
  }
}

StateVector CompiledPauliSum::apply(const StateVector& in) const {
  StateVector out;
  apply(in, out);
  return out;
}

cplx CompiledPauliSum::matrix_element(const StateVector& a, const StateVector& b) const {
  return a.dot(apply(b));
}

Eigen::MatrixXcd dense_matrix(const PauliWord& p) {
  check_qubits(p.n_qubits());
  const std::size_t d = std::size_t{1} << p.n_qubits();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  const cplx phase = i_power(p.y_count());
  for (std::size_t b = 0; b < d; ++b) {
    m(static_cast<Eigen::Index>(b ^ p.x()), static_cast<Eigen::Index>(b)) = phase * parity_sign(p.z() & b);
  }
  return m;
}

Eigen::MatrixXcd dense_matrix(const PauliSum& h) {
  check_qubits(h.n_qubits());
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << h.n_qubits());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  for (const auto& [w, c] : h.terms()) {
    const cplx phase = c * i_power(w.y_count());
    for (Eigen::Index b = 0; b < d; ++b) {
      m(static_cast<Eigen::Index>(static_cast<std::uint64_t>(b) ^ w.x()), b) +=
          phase * parity_sign(w.z() & static_cast<std::uint64_t>(b));
    }
  }
  return m;
}

}  // namespace qksd

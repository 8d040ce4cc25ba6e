#include "qksd/reference.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <bit>
#include <unordered_map>

#include "qksd/errors.hpp"

namespace qksd {

bool Occupation::is_occupied(int p) const {
  return std::find(occ.begin(), occ.end(), p) != occ.end();
}

std::uint64_t Occupation::mask() const {
  std::uint64_t m = 0;
  for (int p : occ) m |= 1ULL << p;
  return m;
}

int Occupation::two_sz() const {
  int s = 0;
  for (int p : occ) s += (p % 2 == 0) ? 1 : -1;
  return s;
}

Occupation hf_reference(int n_orb, int n_elec) {
  if (n_elec < 0 || n_orb < 0) throw InfeasibleError("negative orbital or electron count");
  if (n_elec > n_orb) {
    throw InfeasibleError(std::to_string(n_elec) + " electrons do not fit in " +
                          std::to_string(n_orb) + " spin orbitals");
  }
  Occupation o;
  o.n_orb = n_orb;
  for (int p = 0; p < n_orb; ++p) (p < n_elec ? o.occ : o.virt).push_back(p);
  return o;
}

Occupation hf_reference(const IntegralSet& ints) { return hf_reference(ints.n_orb(), ints.n_elec()); }

StateVector reference_state(const Occupation& ref) { return basis_state(ref.n_orb, ref.mask()); }

double determinant_energy(const PauliSum& h, const Occupation& ref) {
  const std::uint64_t b = ref.mask();
  double e = 0.0;
  for (const auto& [w, c] : h.terms()) {
    if (w.x() != 0) continue;
    e += (std::popcount(w.z() & b) & 1) ? -c : c;
  }
  return e;
}

std::vector<std::uint64_t> sector_basis(int n_qubits, int n_particles, std::optional<int> two_sz) {
  if (n_qubits > kMaxStatevectorQubits) throw DimensionError("sector enumeration too large");
  constexpr std::uint64_t alpha_bits = 0x5555555555555555ULL;
  std::vector<std::uint64_t> out;
  const std::uint64_t dim = 1ULL << n_qubits;
  for (std::uint64_t b = 0; b < dim; ++b) {
    if (std::popcount(b) != n_particles) continue;
    if (two_sz) {
      const int na = std::popcount(b & alpha_bits);
      const int nb = n_particles - na;
      if (na - nb != *two_sz) continue;
    }
    out.push_back(b);
  }
  return out;
}

Eigen::MatrixXcd restricted_matrix(const PauliSum& h, const std::vector<std::uint64_t>& basis) {
  std::unordered_map<std::uint64_t, Eigen::Index> index;
  index.reserve(basis.size() * 2);
  for (std::size_t i = 0; i < basis.size(); ++i) index.emplace(basis[i], static_cast<Eigen::Index>(i));
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  static const cplx iy[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (Eigen::Index col = 0; col < n; ++col) {
    const std::uint64_t b = basis[static_cast<std::size_t>(col)];
    for (const auto& [w, c] : h.terms()) {
      auto it = index.find(b ^ w.x());
      if (it == index.end()) continue;
      const double sign = (std::popcount(w.z() & b) & 1) ? -1.0 : 1.0;
      m(it->second, col) += c * sign * iy[w.y_count() & 3];
    }
  }
  return m;
}

namespace {

StateVector embed(int n_qubits, const std::vector<std::uint64_t>& basis, const Eigen::VectorXcd& v) {
  StateVector psi = StateVector::Zero(static_cast<Eigen::Index>(std::size_t{1} << n_qubits));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    psi[static_cast<Eigen::Index>(basis[i])] = v[static_cast<Eigen::Index>(i)];
  }
  // fix the global phase so the largest amplitude is real positive
  Eigen::Index arg = 0;
  psi.cwiseAbs().maxCoeff(&arg);
  if (std::abs(psi[arg]) > 0.0) psi *= std::conj(psi[arg]) / std::abs(psi[arg]);
  return psi / psi.norm();
}

}  // namespace

SectorSpectrum sector_spectrum(const PauliSum& h, const Occupation& ref, double degeneracy_tol) {
  if (h.n_qubits() != ref.n_orb) throw DimensionError("reference and Hamiltonian sizes differ");
  SectorSpectrum out;
  out.basis = sector_basis(h.n_qubits(), static_cast<int>(ref.occ.size()), ref.two_sz());
  if (out.basis.empty()) throw InfeasibleError("empty symmetry sector");
  const Eigen::MatrixXcd m = restricted_matrix(h, out.basis);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  if (es.info() != Eigen::Success) throw NumericalError("sector diagonalization failed");
  out.eigenvalues = es.eigenvalues();
  out.e0 = out.eigenvalues[0];
  out.ground_state = embed(h.n_qubits(), out.basis, es.eigenvectors().col(0));
  for (Eigen::Index i = 1; i < out.eigenvalues.size(); ++i) {
    if (out.eigenvalues[i] - out.e0 > degeneracy_tol) {
      out.gap = out.eigenvalues[i] - out.e0;
      break;
    }
  }
  return out;
}

std::vector<std::uint64_t> cisd_basis(int n_qubits, const Occupation& ref) {
  const std::uint64_t r = ref.mask();
  std::vector<std::uint64_t> out;
  for (std::uint64_t b : sector_basis(n_qubits, static_cast<int>(ref.occ.size()))) {
    if (std::popcount(b & ~r) <= 2) out.push_back(b);
  }
  return out;
}

CisdResult cisd_ground_state(const PauliSum& h, const Occupation& ref) {
  if (h.n_qubits() != ref.n_orb) throw DimensionError("reference and Hamiltonian sizes differ");
  CisdResult out;
  out.basis = cisd_basis(h.n_qubits(), ref);
  if (out.basis.empty()) throw InfeasibleError("empty CISD space");
  const Eigen::MatrixXcd m = restricted_matrix(h, out.basis);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  if (es.info() != Eigen::Success) throw NumericalError("CISD diagonalization failed");
  out.energy = es.eigenvalues()[0];
  out.state = embed(h.n_qubits(), out.basis, es.eigenvectors().col(0));
  return out;
}

}  // namespace qksd

#include <bit>

#include "doctest.h"
#include "oracles.hpp"
#include "qksd/errors.hpp"
#include "qksd/fermion.hpp"
#include "qksd/jordan_wigner.hpp"
#include "qksd/reference.hpp"

using namespace qksd;

namespace {

const std::vector<std::string> kMolecules = {"h2", "h4", "lih", "beh2", "h2o"};

struct Loaded {
  IntegralSet ints;
  PauliSum h;
  nlohmann::json info;
};

Loaded load(const std::string& name) {
  Loaded l;
  l.ints = load_fcidump(oracle::fixture(name, ".fcidump"));
  l.h = jordan_wigner(build_fermionic_hamiltonian(l.ints));
  l.info = oracle::fixture_info(name);
  return l;
}

IntegralSet random_integrals(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  IntegralSet ints(n, 2);
  ints.set_e_core(u(rng));
  for (int p = 0; p < n; ++p)
    for (int q = p; q < n; ++q) ints.set_h(p, q, u(rng));
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s)
          if (u(rng) > 0.2) ints.set_g(p, q, r, s, 0.3 * u(rng));
  return ints;
}

// <b'| H |b> by acting with the second-quantized operator strings on bitstrings.
struct DetAction {
  const IntegralSet& ints;

  static bool annihilate(std::uint64_t& b, int p, int& sign) {
    if (!((b >> p) & 1ULL)) return false;
    if (std::popcount(b & ((1ULL << p) - 1ULL)) & 1) sign = -sign;
    b ^= 1ULL << p;
    return true;
  }
  static bool create(std::uint64_t& b, int p, int& sign) {
    if ((b >> p) & 1ULL) return false;
    if (std::popcount(b & ((1ULL << p) - 1ULL)) & 1) sign = -sign;
    b ^= 1ULL << p;
    return true;
  }

  std::map<std::uint64_t, double> apply(std::uint64_t det) const {
    std::map<std::uint64_t, double> out;
    const int n = ints.n_orb();
    out[det] += ints.e_core();
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        if (ints.h(p, q) == 0.0) continue;
        std::uint64_t b = det;
        int sign = 1;
        if (annihilate(b, q, sign) && create(b, p, sign)) out[b] += sign * ints.h(p, q);
      }
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q)
        for (int r = 0; r < n; ++r)
          for (int s = 0; s < n; ++s) {
            const double g = ints.g(p, q, r, s);
            if (g == 0.0) continue;
            std::uint64_t b = det;
            int sign = 1;
            if (annihilate(b, q, sign) && annihilate(b, s, sign) && create(b, r, sign) &&
                create(b, p, sign)) {
              out[b] += 0.5 * sign * g;
            }
          }
    return out;
  }
};

}  // namespace

TEST_CASE("FCIDUMP direct field mapping") {
  const std::string text =
      "&FCI NORB=1,NELEC=2,\n&END\n -1.25 1 1 0 0\n 0.675 1 1 1 1\n 0.71 0 0 0 0\n";
  const IntegralSet ints = parse_fcidump(text);
  CHECK(ints.n_orb() == 2);
  CHECK(ints.n_elec() == 2);
  CHECK(ints.e_core() == 0.71);
  CHECK(ints.h(0, 0) == -1.25);
  CHECK(ints.h(1, 1) == -1.25);
  CHECK(ints.h(0, 1) == 0.0);
  CHECK(ints.g(0, 0, 1, 1) == 0.675);
  CHECK(ints.g(1, 1, 0, 0) == 0.675);
  CHECK(ints.g(0, 1, 0, 1) == 0.0);
  ints.validate();

  const IntegralSet empty = parse_fcidump("&FCI NORB=2,NELEC=2 &END\n");
  CHECK(empty.n_orb() == 4);
  CHECK(empty.e_core() == 0.0);
  CHECK(empty.g(0, 0, 2, 2) == 0.0);
}

TEST_CASE("FCIDUMP errors name the offending line") {
  CHECK_THROWS_AS(parse_fcidump("&FCI NELEC=2 &END\n"), ParseError);
  CHECK_THROWS_AS(parse_fcidump("&FCI NORB=1,NELEC=2\n 1 1 1 1 1\n"), ParseError);
  try {
    parse_fcidump("&FCI NORB=2,NELEC=2 &END\n 0.5 1 1 2 2\n 0.6 2 2 1 1\n");
    FAIL("expected a symmetry violation");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  try {
    parse_fcidump("&FCI NORB=2,NELEC=2 &END\n 0.5 1 1 2 2\n abc 2 2 1 1\n");
    FAIL("expected a numeric error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_fcidump("&FCI NORB=2,NELEC=2 &END\n 0.5 1 1 3 2\n"), ParseError);
}

TEST_CASE("textbook Jordan-Wigner images") {
  const PauliSum n1 = jw_number(3, 1);
  CHECK(n1.coefficient(PauliWord::identity(3)) == 0.5);
  CHECK(n1.coefficient(PauliWord::from_string("IZI")) == -0.5);

  FermionSum f(2);
  f.add_one_body(0, 1, 1.0);
  const PauliSum e01 = jordan_wigner(f);
  CHECK(e01.size() == 2);
  CHECK(e01.coefficient(PauliWord::from_string("XX")) == doctest::Approx(0.5));
  CHECK(e01.coefficient(PauliWord::from_string("YY")) == doctest::Approx(0.5));

  // explicit creation/annihilation matrices
  for (int r = 0; r < 4; ++r)
    for (int s = r; s < 4; ++s) {
      const oracle::Mat a_r = oracle::annihilate(4, r), a_s = oracle::annihilate(4, s);
      const oracle::Mat e = a_r.adjoint() * a_s + a_s.adjoint() * a_r;
      CHECK((oracle::sum(jw_excitation(4, r, s)) - e).norm() < 1e-14);
    }
}

TEST_CASE("diagonal one-body Hamiltonian maps to number operators only") {
  IntegralSet ints(4, 2);
  ints.set_h(0, 0, -1.0);
  ints.set_h(2, 2, 0.4);
  const FermionSum f = build_fermionic_hamiltonian(ints);
  CHECK(f.two_body().empty());
  for (const auto& [key, c] : f.one_body()) CHECK(key[0] == key[1]);
  CHECK(f.one_body().at({0, 0}) == doctest::Approx(-0.5));
  const Occupation ref = hf_reference(ints);
  CHECK(determinant_energy(jordan_wigner(f), ref) == doctest::Approx(-1.0));
}

TEST_CASE("single two-body integral yields one canonical term") {
  IntegralSet ints(4, 2);
  ints.set_g(0, 1, 2, 3, 0.2);
  const FermionSum f = build_fermionic_hamiltonian(ints);
  REQUIRE(f.two_body().size() == 1);
  CHECK(f.two_body().begin()->first == QuadKey{0, 1, 2, 3});
  for (const auto& [key, c] : f.one_body()) CHECK(c == 0.0);
}

TEST_CASE("mapped Hamiltonian equals the brute-force second-quantized operator") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 3; ++trial) {
    const IntegralSet ints = random_integrals(4, rng);
    const PauliSum h = jordan_wigner(build_fermionic_hamiltonian(ints));
    CHECK((oracle::sum(h) - oracle::hamiltonian(ints)).norm() < 1e-10);
  }
  const Loaded h2 = load("h2");
  const oracle::Mat brute = oracle::hamiltonian(h2.ints);
  const oracle::Mat mapped = oracle::sum(h2.h);
  CHECK((mapped - brute).norm() < 1e-10);
  const auto ev_m = oracle::eigenvalues(mapped), ev_b = oracle::eigenvalues(brute);
  CHECK((ev_m - ev_b).cwiseAbs().maxCoeff() < 1e-10);
  const SectorSpectrum sp = sector_spectrum(h2.h, hf_reference(h2.ints));
  CHECK(std::abs(sp.e0 - h2.info["e_fci"].get<double>()) < 1e-10);
}

TEST_CASE("shift normal form is an operator identity") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 3; ++trial) {
    const FermionSum f = build_fermionic_hamiltonian(random_integrals(4, rng));
    const PauliSum direct = jordan_wigner(f);
    const PauliSum round = jordan_wigner(ShiftForm::from_fermion(f).to_fermion());
    CHECK((oracle::sum(direct) - oracle::sum(round)).norm() < 1e-12);
  }
  const Loaded h4 = load("h4");
  const FermionSum f = build_fermionic_hamiltonian(h4.ints);
  const PauliSum diff = h4.h - jordan_wigner(ShiftForm::from_fermion(f).to_fermion());
  CHECK(diff.chopped(1e-12).empty());
}

TEST_CASE("mapped Hamiltonians are Hermitian and conserve particle number") {
  for (const std::string name : {"h2", "h4"}) {
    const Loaded l = load(name);
    const oracle::Mat m = oracle::sum(l.h);
    CHECK((m - m.adjoint()).norm() < 1e-14);
    PauliSum number(l.h.n_qubits());
    for (int q = 0; q < l.h.n_qubits(); ++q) number += jw_number(l.h.n_qubits(), q);
    const oracle::Mat nm = oracle::sum(number);
    CHECK((m * nm - nm * m).norm() < 1e-10);
  }
}

TEST_CASE("HF references") {
  const Occupation o = hf_reference(4, 2);
  CHECK(o.occ == std::vector<int>{0, 1});
  CHECK(o.virt == std::vector<int>{2, 3});
  CHECK(hf_reference(4, 0).occ.empty());
  CHECK_THROWS_AS(hf_reference(2, 3), InfeasibleError);
}

TEST_CASE("fixture reference energies") {
  for (const auto& name : kMolecules) {
    CAPTURE(name);
    const Loaded l = load(name);
    const Occupation ref = hf_reference(l.ints);
    CHECK(l.h.n_qubits() == 2 * l.info["n_spatial_orbitals"].get<int>());
    CHECK(std::abs(determinant_energy(l.h, ref) - l.info["e_hf"].get<double>()) < 1e-8);
    const SectorSpectrum sp = sector_spectrum(l.h, ref);
    CHECK(std::abs(sp.e0 - l.info["e_fci"].get<double>()) < 1e-8);
    CHECK(sp.gap > 0.0);
    const CisdResult cisd = cisd_ground_state(l.h, ref);
    CHECK(std::abs(cisd.energy - l.info["e_cisd"].get<double>()) < 1e-8);
    CHECK(cisd.energy >= sp.e0 - 1e-12);
    CHECK(std::abs(cisd.state.norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("two-electron CISD exhausts the FCI space") {
  const Loaded l = load("h2");
  const Occupation ref = hf_reference(l.ints);
  const CisdResult cisd = cisd_ground_state(l.h, ref);
  CHECK(std::abs(cisd.energy - sector_spectrum(l.h, ref).e0) < 1e-12);
}

TEST_CASE("CISD on a diagonal Hamiltonian returns the reference") {
  PauliSum h(4);
  for (int q = 0; q < 4; ++q) h += (0.3 * (q + 1)) * jw_number(4, q);
  h.add(PauliWord::from_string("ZZII"), 0.05);
  const Occupation ref = hf_reference(4, 2);
  const CisdResult cisd = cisd_ground_state(h, ref);
  CHECK(std::abs(cisd.energy - determinant_energy(h, ref)) < 1e-12);
  CHECK(std::abs(std::abs(cisd.state[static_cast<Eigen::Index>(ref.mask())]) - 1.0) < 1e-12);
}

TEST_CASE("LiH CISD matches a determinant-space oracle") {
  const Loaded l = load("lih");
  const Occupation ref = hf_reference(l.ints);
  const auto basis = cisd_basis(l.h.n_qubits(), ref);
  std::map<std::uint64_t, Eigen::Index> index;
  for (std::size_t i = 0; i < basis.size(); ++i) index[basis[i]] = static_cast<Eigen::Index>(i);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(basis.size()),
                                            static_cast<Eigen::Index>(basis.size()));
  const DetAction act{l.ints};
  for (std::size_t j = 0; j < basis.size(); ++j) {
    for (const auto& [b, v] : act.apply(basis[j])) {
      auto it = index.find(b);
      if (it != index.end()) m(it->second, static_cast<Eigen::Index>(j)) += v;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  CHECK(std::abs(cisd_ground_state(l.h, ref).energy - es.eigenvalues()[0]) < 1e-10);
}

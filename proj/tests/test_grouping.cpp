#include "doctest.h"
#include "oracles.hpp"
#include "qksd/fermion.hpp"
#include "qksd/grouping.hpp"
#include "qksd/jordan_wigner.hpp"

using namespace qksd;

namespace {

PauliSum fixture_hamiltonian(const std::string& name) {
  return jordan_wigner(build_fermionic_hamiltonian(load_fcidump(oracle::fixture(name, ".fcidump"))));
}

}  // namespace

TEST_CASE("small sorted-insertion cases") {
  PauliSum z(1);
  z.add(PauliWord::from_string("Z"), 0.5);
  const FragmentSet one = sorted_insertion(z, Compatibility::Commuting);
  CHECK(one.groups.size() == 1);
  CHECK(decomposition_norm(one) == doctest::Approx(0.5));

  PauliSum xz(1);
  xz.add(PauliWord::from_string("X"), 0.4);
  xz.add(PauliWord::from_string("Z"), 0.3);
  const FragmentSet lcu = sorted_insertion(xz, Compatibility::Anticommuting);
  CHECK(lcu.groups.size() == 1);
  CHECK(decomposition_norm(lcu) == doctest::Approx(0.5).epsilon(1e-15));
  const FragmentSet fh = sorted_insertion(xz, Compatibility::Commuting);
  CHECK(fh.groups.size() == 2);
  CHECK(decomposition_norm(fh) == doctest::Approx(0.7));
}

TEST_CASE("identity is carried as a scalar") {
  PauliSum h(2);
  h.add(PauliWord::identity(2), -3.0);
  h.add(PauliWord::from_string("ZZ"), 0.2);
  const FragmentSet fs = sorted_insertion(h, Compatibility::Commuting);
  CHECK(fs.identity == -3.0);
  CHECK(decomposition_norm(fs) == doctest::Approx(0.2));
  CHECK(verify_partition(fs, h));
}

TEST_CASE("decomposition norms") {
  FragmentSet fs;
  fs.mode = GroupingMode::FH;
  fs.n_qubits = 2;
  fs.groups.push_back({{{PauliWord::from_string("ZI"), 0.3}, {PauliWord::from_string("IZ"), 0.4}}});
  CHECK(decomposition_norm(fs) == doctest::Approx(0.5));

  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const PauliSum h = oracle::random_pauli_sum(4, 20, rng);
    for (auto c : {Compatibility::Commuting, Compatibility::Anticommuting}) {
      const FragmentSet g = sorted_insertion(h, c);
      CHECK(decomposition_norm(g) <= h.l1_norm() + 1e-14);
      bool all_singletons = true;
      for (const auto& grp : g.groups) all_singletons &= grp.terms.size() == 1;
      if (all_singletons) CHECK(decomposition_norm(g) == doctest::Approx(h.l1_norm()));
      else CHECK(decomposition_norm(g) < h.l1_norm());
    }
  }
}

TEST_CASE("sorted insertion partitions are valid and group operators have the right algebra") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    const PauliSum h = oracle::random_pauli_sum(3, 15, rng);
    const FragmentSet fh = sorted_insertion(h, Compatibility::Commuting);
    CHECK(verify_partition(fh, h));
    for (const auto& g : fh.groups)
      for (const auto& [a, ca] : g.terms)
        for (const auto& [b, cb] : g.terms) {
          const oracle::Mat ma = oracle::word(a.to_string()), mb = oracle::word(b.to_string());
          CHECK((ma * mb - mb * ma).norm() < 1e-14);
        }
    const FragmentSet lcu = sorted_insertion(h, Compatibility::Anticommuting);
    CHECK(verify_partition(lcu, h));
    for (const auto& g : lcu.groups) {
      const oracle::Mat m = oracle::sum(g.as_sum(3));
      const double n2 = g.norm() * g.norm();
      CHECK((m * m - n2 * oracle::Mat::Identity(8, 8)).norm() < 1e-12);
    }
  }
}

TEST_CASE("grouping depends only on magnitudes and commutation structure") {
  // conjugating every word by a fixed Clifford-like relabelling (swap X and Z on
  // every qubit) keeps magnitudes and pairwise relations
  std::mt19937_64 rng(4);
  const PauliSum h = oracle::random_pauli_sum(3, 14, rng);
  PauliSum relabelled(3);
  for (const auto& [w, c] : h.terms()) relabelled.add(PauliWord(3, w.z(), w.x()), -c);
  const FragmentSet a = sorted_insertion(h, Compatibility::Commuting);
  const FragmentSet b = sorted_insertion(relabelled, Compatibility::Commuting);
  CHECK(decomposition_norm(a) == doctest::Approx(decomposition_norm(b)).epsilon(1e-14));
  CHECK(a.groups.size() == b.groups.size());
}

TEST_CASE("verify_partition rejects perturbed splits and wrong relations") {
  const PauliSum h = fixture_hamiltonian("h2");
  FragmentSet fs = sorted_insertion(h, Compatibility::Commuting);
  CHECK(verify_partition(fs, h));
  fs.groups[0].terms[0].second += 1e-6;
  const PartitionCheck bad = verify_partition(fs, h);
  CHECK_FALSE(bad);
  CHECK(bad.diagnostic.find("term") != std::string::npos);

  FragmentSet wrong = sorted_insertion(h, Compatibility::Commuting);
  wrong.mode = GroupingMode::LCU;
  CHECK_FALSE(verify_partition(wrong, h));
}

TEST_CASE("H2 sorted-insertion norms match Table I") {
  const PauliSum h = fixture_hamiltonian("h2");
  const double gamma = decomposition_norm(sorted_insertion(h, Compatibility::Commuting));
  const double beta = decomposition_norm(sorted_insertion(h, Compatibility::Anticommuting));
  CHECK(std::abs(gamma - 0.6398) / 0.6398 < 0.02);
  CHECK(std::abs(beta - 1.7267) / 1.7267 < 0.02);
}

TEST_CASE("term-wise fermionic weights") {
  FermionSum n(3);
  n.add_one_body(1, 1, 0.5);  // 0.5 E_11 = 1.0 n_1
  const FragmentSet fn = termwise_fermionic_grouping(n);
  REQUIRE(fn.fermion_groups.size() == 1);
  CHECK(fn.fermion_groups[0].coefficient == doctest::Approx(1.0));
  CHECK(decomposition_norm(fn) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(decomposition_norm(fn) == doctest::Approx(std::sqrt(2.0) * 0.5));  // E_rr per-unit sqrt(2)

  FermionSum e(3);
  e.add_one_body(0, 2, 1.0);
  CHECK(decomposition_norm(termwise_fermionic_grouping(e)) == doctest::Approx(1.0 / std::sqrt(2.0)));

  // per-unit weights of n_r and E_rs equal (Tr[O^2]/d)^{1/2}
  const double tr_n = normalized_trace_inner(jw_number(3, 1), jw_number(3, 1));
  const double tr_e = normalized_trace_inner(jw_excitation(3, 0, 2), jw_excitation(3, 0, 2));
  CHECK(std::sqrt(tr_n) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(std::sqrt(tr_e) == doctest::Approx(1.0 / std::sqrt(2.0)));

  ShiftForm sf;
  sf.n_orb = 4;
  sf.exc_number[{3, 0, 1}] = 1.0;
  sf.exc_number[{3, 1, 1}] = -1.0;
  sf.rest[{0, 1, 2, 3}] = 0.5;
  const double want = std::sqrt(0.5) + std::sqrt(2.0) + 0.5;
  CHECK(decomposition_norm(termwise_fermionic_grouping(sf)) == doctest::Approx(want));
  // four-index weight is exact: Tr[(E_pq E_rs + h.c.)^2]/d = 1
  const PauliSum ee = jordan_wigner([] {
    FermionSum f(4);
    f.add_two_body(0, 1, 2, 3, 1.0);
    return f;
  }());
  CHECK(normalized_trace_inner(ee, ee) == doctest::Approx(1.0));
}

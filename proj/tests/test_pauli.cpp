#include "doctest.h"
#include "oracles.hpp"
#include "qksd/errors.hpp"
#include "qksd/pauli.hpp"

using namespace qksd;

namespace {

std::vector<std::string> all_words(int n) {
  std::vector<std::string> out{""};
  for (int q = 0; q < n; ++q) {
    std::vector<std::string> next;
    for (const auto& s : out)
      for (char c : std::string("IXYZ")) next.push_back(s + c);
    out = next;
  }
  return out;
}

}  // namespace

TEST_CASE("single-qubit products") {
  auto xz = pauli_product(PauliWord::from_string("X"), PauliWord::from_string("Z"));
  CHECK(xz.word.to_string() == "Y");
  CHECK(xz.phase.value() == oracle::cplx(0, -1));

  for (const char* p : {"I", "X", "Y", "Z"}) {
    auto r = pauli_product(PauliWord::from_string("I"), PauliWord::from_string(p));
    CHECK(r.word.to_string() == p);
    CHECK(r.phase.power == 0);
  }

  auto xxzz = pauli_product(PauliWord::from_string("XX"), PauliWord::from_string("ZZ"));
  CHECK(xxzz.word.to_string() == "YY");
  CHECK(xxzz.phase.value() == oracle::cplx(-1, 0));
}

TEST_CASE("products and commutation agree with dense matrices on all two-qubit pairs") {
  const auto words = all_words(2);
  for (const auto& a : words) {
    for (const auto& b : words) {
      const auto pa = PauliWord::from_string(a);
      const auto pb = PauliWord::from_string(b);
      const auto r = pauli_product(pa, pb);
      const oracle::Mat lhs = oracle::word(a) * oracle::word(b);
      const oracle::Mat rhs = r.phase.value() * oracle::word(r.word.to_string());
      CHECK((lhs - rhs).norm() < 1e-14);
      CHECK(r.word.x() == (pa.x() ^ pb.x()));
      CHECK(r.word.z() == (pa.z() ^ pb.z()));

      const oracle::Mat comm = lhs - oracle::word(b) * oracle::word(a);
      CHECK(commutes(pa, pb) == (comm.norm() < 1e-14));
    }
  }
}

TEST_CASE("one-qubit commutation and associativity of tracked phases") {
  CHECK_FALSE(commutes(PauliWord::from_string("XI"), PauliWord::from_string("ZI")));
  CHECK(commutes(PauliWord::from_string("XX"), PauliWord::from_string("ZZ")));
  const auto words = all_words(2);
  for (const auto& a : words)
    for (const auto& b : words)
      for (const auto& c : {std::string("XY"), std::string("ZX"), std::string("YI")}) {
        const auto pa = PauliWord::from_string(a), pb = PauliWord::from_string(b),
                   pc = PauliWord::from_string(c);
        auto ab = pauli_product(pa, pb);
        auto abc = pauli_product(ab.word, pc);
        auto bc = pauli_product(pb, pc);
        auto a_bc = pauli_product(pa, bc.word);
        CHECK(abc.word == a_bc.word);
        CHECK((ab.phase.power + abc.phase.power) % 4 == (bc.phase.power + a_bc.phase.power) % 4);
      }
}

TEST_CASE("dimension mismatches throw") {
  CHECK_THROWS_AS(pauli_product(PauliWord::from_string("X"), PauliWord::from_string("XX")),
                  DimensionError);
  CHECK_THROWS_AS(commutes(PauliWord::from_string("X"), PauliWord::from_string("XX")),
                  DimensionError);
  CHECK_THROWS_AS(normalized_trace_inner(PauliSum(1), PauliSum(2)), DimensionError);
  CHECK_THROWS_AS(PauliWord::from_string("XQ"), ParseError);
}

TEST_CASE("normalized trace inner product") {
  PauliSum a(2);
  a.add(PauliWord::from_string("IZ"), 0.3);
  CHECK(normalized_trace_inner(a, a) == doctest::Approx(0.09).epsilon(1e-15));

  PauliSum b(2);
  b.add(PauliWord::from_string("XI"), 0.7);
  CHECK(normalized_trace_inner(a, b) == 0.0);

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const PauliSum x = oracle::random_pauli_sum(3, 12, rng);
    const PauliSum y = oracle::random_pauli_sum(3, 12, rng);
    const double dense = (oracle::sum(x).adjoint() * oracle::sum(y)).trace().real() / 8.0;
    CHECK(std::abs(normalized_trace_inner(x, y) - dense) < 1e-12);
    CHECK(std::abs(normalized_trace_inner(x, x) - x.l2_norm_squared()) < 1e-12);
  }
}

TEST_CASE("sums drop cancelled terms and round-trip through text") {
  PauliSum h(4);
  h.add(PauliWord::from_string("ZIIZ"), 0.3);
  h.add(PauliWord::from_string("ZIIZ"), -0.3);
  CHECK(h.empty());

  std::mt19937_64 rng(11);
  const PauliSum r = oracle::random_pauli_sum(5, 30, rng);
  const PauliSum back = PauliSum::from_text(r.to_text());
  REQUIRE(back.size() == r.size());
  for (const auto& [w, c] : r.terms()) CHECK(back.coefficient(w) == c);  // bit-exact

  const PauliSum parsed = PauliSum::from_text("# comment\n0.3 ZIIZ\n\n-1e-3 XYII\n");
  CHECK(parsed.n_qubits() == 4);
  CHECK(parsed.coefficient(PauliWord::from_string("ZIIZ")) == 0.3);
  CHECK_THROWS_AS(PauliSum::from_text("0.3 ZIIZ\n1.0 XX\n"), ParseError);
  CHECK_THROWS_AS(PauliSum::from_text("abc ZZ\n"), ParseError);
}

TEST_CASE("canonical order sorts by z bits then x bits") {
  const auto a = PauliWord::from_string("XI");  // x=1, z=0
  const auto b = PauliWord::from_string("ZI");  // x=0, z=1
  const auto c = PauliWord::from_string("IX");  // x=2, z=0
  CHECK(a < c);
  CHECK(c < b);
  CHECK(PauliWord(64, ~0ULL, 0).weight() == 64);
  CHECK_THROWS_AS(PauliWord(3, 8, 0), DimensionError);
}

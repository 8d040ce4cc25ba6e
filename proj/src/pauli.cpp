#include "qksd/pauli.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <sstream>

#include "qksd/errors.hpp"

namespace qksd {

namespace {

std::uint64_t qubit_mask(int n) { return n >= 64 ? ~0ULL : ((1ULL << n) - 1ULL); }

void check_same(const PauliWord& p, const PauliWord& q) {
  if (p.n_qubits() != q.n_qubits()) {
    throw DimensionError("Pauli words on " + std::to_string(p.n_qubits()) + " and " +
                         std::to_string(q.n_qubits()) + " qubits");
  }
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

PauliWord::PauliWord(int n_qubits, std::uint64_t x, std::uint64_t z)
    : n_qubits_(n_qubits), x_(x), z_(z) {
  if (n_qubits < 0 || n_qubits > kMaxQubits) {
    throw DimensionError("qubit count " + std::to_string(n_qubits) + " outside [0, 64]");
  }
  if (((x | z) & ~qubit_mask(n_qubits)) != 0) {
    throw DimensionError("Pauli bits set beyond qubit count " + std::to_string(n_qubits));
  }
}

PauliWord PauliWord::from_string(std::string_view text) {
  const int n = static_cast<int>(text.size());
  if (n > kMaxQubits) throw ParseError("Pauli string longer than 64 qubits");
  std::uint64_t x = 0, z = 0;
  for (int q = 0; q < n; ++q) {
    const std::uint64_t bit = 1ULL << q;
    switch (text[q]) {
      case 'I': break;
      case 'X': x |= bit; break;
      case 'Y': x |= bit; z |= bit; break;
      case 'Z': z |= bit; break;
      default:
        throw ParseError(std::string("invalid Pauli character '") + text[q] + "'");
    }
  }
  return PauliWord(n, x, z);
}

PauliWord PauliWord::single(int n_qubits, int qubit, char op) {
  if (qubit < 0 || qubit >= n_qubits) throw IndexError("qubit index out of range");
  const std::uint64_t bit = 1ULL << qubit;
  switch (op) {
    case 'X': return PauliWord(n_qubits, bit, 0);
    case 'Y': return PauliWord(n_qubits, bit, bit);
    case 'Z': return PauliWord(n_qubits, 0, bit);
    default: throw ParseError(std::string("invalid Pauli character '") + op + "'");
  }
}

int PauliWord::weight() const { return std::popcount(x_ | z_); }
int PauliWord::y_count() const { return std::popcount(x_ & z_); }

char PauliWord::op_at(int qubit) const {
  const bool xb = (x_ >> qubit) & 1ULL;
  const bool zb = (z_ >> qubit) & 1ULL;
  if (xb && zb) return 'Y';
  if (xb) return 'X';
  if (zb) return 'Z';
  return 'I';
}

std::string PauliWord::to_string() const {
  std::string s(static_cast<std::size_t>(n_qubits_), 'I');
  for (int q = 0; q < n_qubits_; ++q) s[q] = op_at(q);
  return s;
}

std::complex<double> Phase::value() const {
  switch (power & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

PauliProduct pauli_product(const PauliWord& p, const PauliWord& q) {
  check_same(p, q);
  const std::uint64_t rx = p.x() ^ q.x();
  const std::uint64_t rz = p.z() ^ q.z();
  // i^{|x1 z1|} X^x1 Z^z1 i^{|x2 z2|} X^x2 Z^z2 = i^{..} (-1)^{|z1 x2|} X^{x1^x2} Z^{z1^z2}
  int power = std::popcount(p.x() & p.z()) + std::popcount(q.x() & q.z()) -
              std::popcount(rx & rz) + 2 * std::popcount(p.z() & q.x());
  power = ((power % 4) + 4) % 4;
  return {Phase{power}, PauliWord(p.n_qubits(), rx, rz)};
}

bool commutes(const PauliWord& p, const PauliWord& q) {
  check_same(p, q);
  return ((std::popcount(p.x() & q.z()) + std::popcount(p.z() & q.x())) & 1) == 0;
}

PauliSum::PauliSum(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 0 || n_qubits > kMaxQubits) {
    throw DimensionError("qubit count " + std::to_string(n_qubits) + " outside [0, 64]");
  }
}

void PauliSum::add(const PauliWord& word, double coefficient) {
  if (word.n_qubits() != n_qubits_) {
    throw DimensionError("adding a " + std::to_string(word.n_qubits()) + "-qubit word to a " +
                         std::to_string(n_qubits_) + "-qubit sum");
  }
  if (!std::isfinite(coefficient)) throw std::invalid_argument("non-finite Pauli coefficient");
  if (coefficient == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(word, coefficient);
  if (!inserted) {
    it->second += coefficient;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double PauliSum::coefficient(const PauliWord& word) const {
  auto it = terms_.find(word);
  return it == terms_.end() ? 0.0 : it->second;
}

double PauliSum::identity_coefficient() const {
  return coefficient(PauliWord::identity(n_qubits_));
}

PauliSum PauliSum::without_identity() const {
  PauliSum out = *this;
  out.terms_.erase(PauliWord::identity(n_qubits_));
  return out;
}

PauliSum PauliSum::chopped(double tol) const {
  PauliSum out(n_qubits_);
  for (const auto& [w, c] : terms_) {
    if (std::abs(c) > tol) out.terms_.emplace_hint(out.terms_.end(), w, c);
  }
  return out;
}

double PauliSum::l1_norm(bool include_identity) const {
  double s = 0.0;
  for (const auto& [w, c] : terms_) {
    if (include_identity || !w.is_identity()) s += std::abs(c);
  }
  return s;
}

double PauliSum::l2_norm_squared() const {
  double s = 0.0;
  for (const auto& [w, c] : terms_) s += c * c;
  return s;
}

PauliSum& PauliSum::operator+=(const PauliSum& other) {
  if (other.n_qubits_ != n_qubits_) throw DimensionError("PauliSum qubit counts differ");
  for (const auto& [w, c] : other.terms_) add(w, c);
  return *this;
}

PauliSum& PauliSum::operator-=(const PauliSum& other) {
  if (other.n_qubits_ != n_qubits_) throw DimensionError("PauliSum qubit counts differ");
  for (const auto& [w, c] : other.terms_) add(w, -c);
  return *this;
}

PauliSum& PauliSum::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [w, c] : terms_) c *= s;
  return *this;
}

std::string PauliSum::to_text() const {
  std::string out;
  for (const auto& [w, c] : terms_) {
    out += format_double(c);
    out += ' ';
    out += w.to_string();
    out += '\n';
  }
  return out;
}

PauliSum PauliSum::from_text(std::string_view text, int n_qubits) {
  std::vector<std::pair<double, PauliWord>> parsed;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || line[first] == '#') {
      if (end == text.size()) break;
      continue;
    }
    line = line.substr(first);
    const auto sep = line.find_first_of(" \t");
    if (sep == std::string_view::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": expected '<coefficient> <word>'");
    }
    double c = 0.0;
    auto [ptr, ec] = std::from_chars(line.data(), line.data() + sep, c);
    if (ec != std::errc() || ptr != line.data() + sep) {
      throw ParseError("line " + std::to_string(line_no) + ": bad coefficient");
    }
    std::string_view word = line.substr(sep);
    word.remove_prefix(word.find_first_not_of(" \t"));
    const auto wend = word.find_last_not_of(" \t\r");
    word = word.substr(0, wend + 1);
    try {
      parsed.emplace_back(c, PauliWord::from_string(word));
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (end == text.size()) break;
  }
  if (parsed.empty()) {
    if (n_qubits < 0) throw ParseError("empty Pauli text without a qubit count");
    return PauliSum(n_qubits);
  }
  const int n = parsed.front().second.n_qubits();
  if (n_qubits >= 0 && n_qubits != n) throw DimensionError("word length disagrees with qubit count");
  PauliSum out(n);
  for (const auto& [c, w] : parsed) {
    if (w.n_qubits() != n) throw ParseError("Pauli words of differing length");
    out.add(w, c);
  }
  return out;
}

double normalized_trace_inner(const PauliSum& a, const PauliSum& b) {
  if (a.n_qubits() != b.n_qubits()) throw DimensionError("PauliSum qubit counts differ");
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  double s = 0.0;
  for (const auto& [w, c] : small.terms()) s += c * large.coefficient(w);
  return s;
}

}  // namespace qksd

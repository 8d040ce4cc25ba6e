#include "qksd/integrals.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

#include "qksd/errors.hpp"

namespace qksd {

IntegralSet::IntegralSet(int n_orb, int n_elec)
    : n_orb_(n_orb),
      n_elec_(n_elec),
      h_(static_cast<std::size_t>(n_orb) * n_orb, 0.0),
      g_(static_cast<std::size_t>(n_orb) * n_orb * n_orb * n_orb, 0.0) {
  if (n_orb < 0 || n_elec < 0) throw std::invalid_argument("negative orbital or electron count");
}

void IntegralSet::set_h(int p, int q, double v) {
  h_[idx2(p, q)] = v;
  h_[idx2(q, p)] = v;
}

void IntegralSet::set_g(int p, int q, int r, int s, double v) {
  for (auto [a, b, c, d] : {std::array{p, q, r, s}, std::array{q, p, r, s}, std::array{p, q, s, r},
                            std::array{q, p, s, r}, std::array{r, s, p, q}, std::array{s, r, p, q},
                            std::array{r, s, q, p}, std::array{s, r, q, p}}) {
    g_[idx4(a, b, c, d)] = v;
  }
}

void IntegralSet::validate(double tol) const {
  const int n = n_orb_;
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      if (!std::isfinite(h(p, q))) throw ParseError("non-finite one-body integral");
      if (std::abs(h(p, q) - h(q, p)) > tol) throw ParseError("one-body integrals not symmetric");
      for (int r = 0; r < n; ++r) {
        for (int s = 0; s < n; ++s) {
          const double v = g(p, q, r, s);
          if (!std::isfinite(v)) throw ParseError("non-finite two-body integral");
          if (std::abs(v - g(q, p, r, s)) > tol || std::abs(v - g(p, q, s, r)) > tol ||
              std::abs(v - g(r, s, p, q)) > tol) {
            throw ParseError("two-body integrals violate permutation symmetry");
          }
        }
      }
    }
  }
}

namespace {

struct SpatialRecord {
  double value;
  int i, j, k, l;
  std::size_t line;
};

int header_int(const std::string& header, const std::string& key) {
  const std::regex re(key + R"(\s*=\s*(-?\d+))", std::regex::ECMAScript);
  std::smatch m;
  if (!std::regex_search(header, m, re)) {
    throw ParseError("FCIDUMP header is missing " + key);
  }
  return std::stoi(m[1].str());
}

bool parse_double(std::string_view tok, double& out) {
  // from_chars does not accept a leading '+' or Fortran 'D' exponents
  std::string s(tok);
  if (!s.empty() && s.front() == '+') s.erase(0, 1);
  for (char& c : s) {
    if (c == 'D' || c == 'd') c = 'e';
  }
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_int(std::string_view tok, int& out) {
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

}  // namespace

IntegralSet parse_fcidump(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::string header;
  std::size_t line_no = 0;
  bool header_done = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string upper = line;
    for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    header += upper;
    header += ' ';
    if (upper.find("&END") != std::string::npos || upper.find('/') != std::string::npos) {
      header_done = true;
      break;
    }
  }
  if (!header_done) throw ParseError("FCIDUMP header not terminated by &END");
  const int norb = header_int(header, "NORB");
  const int nelec = header_int(header, "NELEC");
  if (norb < 0 || nelec < 0) throw ParseError("negative NORB or NELEC");
  if (2 * norb > 64) throw ParseError("more than 32 spatial orbitals is unsupported");

  std::vector<SpatialRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() != 5) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 'value i j k l'");
    }
    SpatialRecord r{};
    r.line = line_no;
    if (!parse_double(tok[0], r.value) || !std::isfinite(r.value)) {
      throw ParseError("line " + std::to_string(line_no) + ": non-numeric value '" + tok[0] + "'");
    }
    int* idx[4] = {&r.i, &r.j, &r.k, &r.l};
    for (int a = 0; a < 4; ++a) {
      if (!parse_int(tok[a + 1], *idx[a]) || *idx[a] < 0 || *idx[a] > norb) {
        throw ParseError("line " + std::to_string(line_no) + ": bad orbital index '" +
                         tok[a + 1] + "'");
      }
    }
    records.push_back(r);
  }

  // Spatial tensors with symmetry completion; track which entries were written.
  const std::size_t n = norb;
  std::vector<double> h(n * n, 0.0);
  std::vector<double> g(n * n * n * n, 0.0);
  std::vector<std::size_t> h_src(n * n, 0), g_src(n * n * n * n, 0);
  double e_core = 0.0;
  auto put = [](std::vector<double>& dst, std::vector<std::size_t>& src, std::size_t at, double v,
                std::size_t line) {
    if (src[at] != 0 && std::abs(dst[at] - v) > 1e-10) {
      throw ParseError("line " + std::to_string(line) + ": value disagrees with line " +
                       std::to_string(src[at]) + " under integral permutation symmetry");
    }
    dst[at] = v;
    src[at] = line;
  };
  for (const auto& r : records) {
    if (r.i == 0 && r.j == 0 && r.k == 0 && r.l == 0) {
      e_core = r.value;
    } else if (r.k == 0 && r.l == 0) {
      if (r.i == 0 || r.j == 0) {
        throw ParseError("line " + std::to_string(r.line) + ": orbital energy records unsupported");
      }
      const std::size_t i = r.i - 1, j = r.j - 1;
      put(h, h_src, i * n + j, r.value, r.line);
      put(h, h_src, j * n + i, r.value, r.line);
    } else {
      if (r.i == 0 || r.j == 0 || r.k == 0 || r.l == 0) {
        throw ParseError("line " + std::to_string(r.line) + ": partial zero index");
      }
      const std::size_t i = r.i - 1, j = r.j - 1, k = r.k - 1, l = r.l - 1;
      for (auto [a, b, c, d] : {std::array{i, j, k, l}, std::array{j, i, k, l},
                                std::array{i, j, l, k}, std::array{j, i, l, k},
                                std::array{k, l, i, j}, std::array{l, k, i, j},
                                std::array{k, l, j, i}, std::array{l, k, j, i}}) {
        put(g, g_src, ((a * n + b) * n + c) * n + d, r.value, r.line);
      }
    }
  }

  IntegralSet out(2 * norb, nelec);
  out.set_e_core(e_core);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = h[i * n + j];
      if (v == 0.0) continue;
      for (int s = 0; s < 2; ++s) out.set_h(2 * i + s, 2 * j + s, v);
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
          const double v = g[((i * n + j) * n + k) * n + l];
          if (v == 0.0) continue;
          for (int s1 = 0; s1 < 2; ++s1)
            for (int s2 = 0; s2 < 2; ++s2)
              out.set_g(2 * i + s1, 2 * j + s1, 2 * k + s2, 2 * l + s2, v);
        }
  return out;
}

IntegralSet load_fcidump(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open FCIDUMP '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_fcidump(ss.str());
}

}  // namespace qksd

#include "qksd/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "qksd/errors.hpp"

namespace qksd {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return hex64(fnv1a64(ss.str()));
}

namespace {

Json complex_array(const std::vector<cplx>& v) {
  Json a = Json::array();
  for (const cplx& z : v) a.push_back({z.real(), z.imag()});
  return a;
}

}  // namespace

Json to_json(const FragmentSet& fs) {
  Json j;
  j["mode"] = to_string(fs.mode);
  j["n_qubits"] = fs.n_qubits;
  j["identity"] = fs.identity;
  j["norm"] = decomposition_norm(fs);
  Json groups = Json::array();
  for (const auto& g : fs.groups) {
    Json terms = Json::array();
    for (const auto& [w, c] : g.terms) terms.push_back({{"term", w.to_string()}, {"coefficient", c}});
    groups.push_back({{"norm", g.norm()}, {"terms", std::move(terms)}});
  }
  j["groups"] = std::move(groups);
  if (!fs.fermion_groups.empty()) {
    Json fg = Json::array();
    for (const auto& f : fs.fermion_groups)
      fg.push_back({{"label", f.label}, {"coefficient", f.coefficient}, {"unit_weight", f.unit_weight}, {"norm", f.norm()}});
    j["fermion_groups"] = std::move(fg);
  }
  return j;
}

FragmentSet fragment_set_from_json(const Json& j) {
  try {
    FragmentSet fs;
    fs.mode = grouping_mode_from_string(j.at("mode").get<std::string>());
    fs.n_qubits = j.at("n_qubits").get<int>();
    fs.identity = j.value("identity", 0.0);
    for (const auto& g : j.at("groups")) {
      PauliFragment frag;
      for (const auto& t : g.at("terms")) {
        const PauliWord w = PauliWord::from_string(t.at("term").get<std::string>());
        if (w.n_qubits() != fs.n_qubits) throw ParseError("term length does not match n_qubits");
        frag.terms.emplace_back(w, t.at("coefficient").get<double>());
      }
      fs.groups.push_back(std::move(frag));
    }
    if (j.contains("fermion_groups")) {
      for (const auto& f : j.at("fermion_groups"))
        fs.fermion_groups.push_back(
            {f.at("label").get<std::string>(), f.at("coefficient").get<double>(), f.at("unit_weight").get<double>()});
    }
    return fs;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed fragment set: ") + e.what());
  } catch (const ConfigError& e) {
    throw ParseError(std::string("malformed fragment set: ") + e.what());
  }
}

Json to_json(const ShiftParams& sp) {
  Json j;
  j["n_orb"] = sp.n_orb;
  j["occ"] = sp.occ;
  Json t1 = Json::array();
  for (const auto& [q, v] : sp.tau1) t1.push_back({{"q", q}, {"value", v}});
  j["tau1"] = std::move(t1);
  Json t2 = Json::array();
  for (const auto& [k, v] : sp.tau2) t2.push_back({{"q", k[0]}, {"r", k[1]}, {"s", k[2]}, {"value", v}});
  j["tau2"] = std::move(t2);
  j["t"] = sp.t;
  return j;
}

Json to_json(const VarianceTable& vt) {
  Json j;
  j["mode"] = to_string(vt.mode);
  j["amplitude"] = complex_array(vt.amplitude);
  Json v = Json::array();
  for (const auto& x : vt.variance) v.push_back({x[0], x[1]});
  j["variance"] = std::move(v);
  return j;
}

Json to_json(const ShotAllocation& a) {
  Json j;
  Json m = Json::array();
  for (const auto& x : a.m) m.push_back({x[0], x[1]});
  j["fractions"] = std::move(m);
  j["shots"] = a.shots;
  return j;
}

Json to_json(const SplitSolution& s) {
  Json j;
  Json splits = Json::array();
  for (const auto& a : s.alpha) splits.push_back(std::vector<double>(a.data(), a.data() + a.size()));
  j["splits"] = std::move(splits);
  j["allocation"] = to_json(s.m);
  j["objective_trace"] = s.objective_trace;
  j["iterations"] = s.iterations;
  j["converged"] = s.converged;
  return j;
}

Json to_json(const KrylovEnsemble& e) {
  Json j;
  j["n"] = e.n;
  j["dt"] = e.dt;
  j["s_row"] = complex_array(e.s_row);
  j["h_row"] = complex_array(e.h_row);
  j["t_shift"] = e.t_shift;
  // JSON has no infinity
  j["shots"] = std::isinf(e.shots) ? Json("inf") : Json(e.shots);
  j["noise"] = e.noise;
  j["seed"] = e.seed;
  return j;
}

Json to_json(const GevpResult& g) {
  Json j;
  j["eigenvalues"] = std::vector<double>(g.eigenvalues.data(), g.eigenvalues.data() + g.eigenvalues.size());
  j["kept"] = g.kept;
  return j;
}

}  // namespace qksd

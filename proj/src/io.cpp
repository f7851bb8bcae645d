#include "c2data/io.hpp"

#include <sstream>

namespace c2data {

using nlohmann::json;

std::string write_model(const Structure& A) {
  std::ostringstream os;
  os << "domain:";
  for (int i = 0; i < A.n; ++i) os << (i ? "," : " ") << "e" << i;
  os << "\n";
  for (const auto& [c, e] : A.const_map) os << "const " << c << " -> e" << e << "\n";
  for (const auto& [p, tab] : A.unary)
    for (int i = 0; i < A.n; ++i)
      if (tab[i]) os << p << "(e" << i << ")\n";
  for (const auto& [r, tab] : A.binary)
    for (int i = 0; i < A.n; ++i)
      for (int j = 0; j < A.n; ++j)
        if (tab[(size_t)i * A.n + j]) os << r << "(e" << i << ",e" << j << ")\n";
  return os.str();
}

Structure read_model(const std::string& text) {
  Structure A;
  std::istringstream is(text);
  std::string line;
  std::map<std::string, int> elem;
  auto eidx = [&](const std::string& e) {
    auto it = elem.find(e);
    if (it == elem.end()) throw ParseError(0, 0, "unknown element " + e);
    return it->second;
  };
  while (std::getline(is, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::string stripped;
    for (char c : line)
      if (!isspace((unsigned char)c)) stripped += c;
    if (stripped.empty()) continue;
    if (stripped.rfind("domain:", 0) == 0) {
      std::string rest = stripped.substr(7);
      std::istringstream ds(rest);
      std::string name;
      while (std::getline(ds, name, ',')) {
        if (name.empty()) continue;
        elem[name] = A.n++;
      }
      continue;
    }
    if (stripped.rfind("const", 0) == 0) {
      // const c -> e0  (whitespace already stripped: "constc->e0")
      auto arrow = stripped.find("->");
      if (arrow == std::string::npos) throw ParseError(0, 0, "bad const line");
      std::string c = stripped.substr(5, arrow - 5);
      std::string e = stripped.substr(arrow + 2);
      A.const_map[c] = eidx(e);
      continue;
    }
    auto lp = stripped.find('(');
    auto rp = stripped.find(')');
    if (lp == std::string::npos || rp == std::string::npos)
      throw ParseError(0, 0, "bad atom line: " + line);
    std::string pred = stripped.substr(0, lp);
    std::string args = stripped.substr(lp + 1, rp - lp - 1);
    auto comma = args.find(',');
    if (comma == std::string::npos) {
      if (!A.unary.count(pred)) A.unary[pred].assign(A.n, 0);
      A.unary[pred][eidx(args)] = 1;
    } else {
      std::string a = args.substr(0, comma), b = args.substr(comma + 1);
      if (!A.binary.count(pred)) A.binary[pred].assign((size_t)A.n * A.n, 0);
      A.binary[pred][(size_t)eidx(a) * A.n + eidx(b)] = 1;
    }
  }
  return A;
}

json structure_to_json(const Structure& A) {
  json j;
  j["domainSize"] = A.n;
  json consts = json::object();
  for (const auto& [c, e] : A.const_map) consts[c] = e;
  j["constants"] = consts;
  json unary = json::object();
  for (const auto& [p, tab] : A.unary) {
    json elems = json::array();
    for (int i = 0; i < A.n; ++i)
      if (tab[i]) elems.push_back(i);
    unary[p] = elems;
  }
  j["unary"] = unary;
  json binary = json::object();
  for (const auto& [r, tab] : A.binary) {
    json pairs = json::array();
    for (int i = 0; i < A.n; ++i)
      for (int k = 0; k < A.n; ++k)
        if (tab[(size_t)i * A.n + k]) pairs.push_back(json::array({i, k}));
    binary[r] = pairs;
  }
  j["binary"] = binary;
  return j;
}

static json extnat_to_json(const ExtNat& e) {
  if (e.is_inf()) return json("inf");
  return json((long)e.value());
}

json star_to_json(const SignatureStar& s, const StarType& st) {
  json j;
  j["oneType"] = one_type_literals(s, st.pi);
  json counts = json::array();
  for (const auto& [mu, n] : st.counts) {
    json c;
    c["messageType"] = two_type_literals(s, mu);
    c["n"] = extnat_to_json(n);
    counts.push_back(c);
  }
  j["counts"] = counts;
  return j;
}

json frame_to_json(const SignatureStar& s, const Frame& f) {
  json j;
  json stars = json::array();
  for (const auto& st : f.stars) stars.push_back(star_to_json(s, st));
  j["stars"] = stars;
  j["nObservable"] = f.n_observable;
  json quiet = json::array();
  for (const auto& pr : f.quiet) {
    json q;
    q["first"] = one_type_literals(s, pr.first);
    q["second"] = one_type_literals(s, pr.second);
    auto it = f.theta.find(pr);
    if (it != f.theta.end()) q["theta"] = two_type_literals(s, it->second);
    quiet.push_back(q);
  }
  j["quietPairs"] = quiet;
  return j;
}

json certificate_to_json(const SatCertificate& cert, const NormalTheoryC2& t) {
  json j;
  j["mode"] = cert.finite_mode ? "finsat" : "sat";
  if (cert.small_model_branch) {
    j["branch"] = "smallModel";
    j["model"] = structure_to_json(cert.small);
    return j;
  }
  j["branch"] = "frame";
  j["paddingOverride"] = cert.padding_override;
  auto s = SignatureStar::make(t, cert.padding_override);
  j["dplus"] = structure_to_json(cert.dplus);
  j["frame"] = frame_to_json(s, cert.frame);
  j["delta"] = cert.delta_star;
  j["deltaCounts"] = cert.delta_counts;
  json atoms = json::array();
  for (const auto& a : cert.chosen_atoms) atoms.push_back(a.str());
  j["chosenAtoms"] = atoms;
  json sol = json::array();
  for (const auto& w : cert.solution) sol.push_back(extnat_to_json(w));
  j["solution"] = sol;
  return j;
}

json trace_to_json(const PipelineTrace& trace) {
  json j;
  j["partitions"] = trace.partitions;
  j["substitutions"] = {{"total", trace.xi_total}, {"vCyclic", trace.xi1},
                        {"vAcyclic", trace.xi2}};
  j["droppedVFormulas"] = trace.dropped_vformulas;
  j["groundChoices"] = trace.ground_choices;
  j["unsplittableComponents"] = trace.unsplittable_components;
  json fp = json::array();
  for (const auto& [p, shape] : trace.fresh_preds)
    fp.push_back(json::array({p, shape}));
  j["freshPredicates"] = fp;
  j["deltaPrime"] = trace.delta_prime;
  j["thetaConjuncts"] = trace.theta_conjuncts;
  j["branchVerdicts"] = trace.branch_verdicts;
  return j;
}

}  // namespace c2data

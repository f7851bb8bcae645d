// Command-line front end: satisfiability and finite satisfiability of a fixed
// two-variable counting theory against ground data, conjunctive query
// answering for guarded theories, a brute-force finite-model oracle, the
// 3SAT-instance generator, and the model-surgery passes.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "c2data/gen3sat.hpp"
#include "c2data/io.hpp"
#include "c2data/query_engine.hpp"
#include "c2data/sat_engine.hpp"
#include "c2data/surgery.hpp"

using namespace c2data;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

FormulaPtr load_theory(const std::string& path) {
  auto phis = parse_theory(slurp(path));
  if (phis.empty()) return mk_true();
  return mk_and_all(phis);
}

NormalTheoryC2 normalize_any(const FormulaPtr& phi) {
  if (check_fragment(phi, Fragment::GC2) == std::nullopt)
    return fold_gc2_to_c2(scott_gc2(phi));
  return scott_c2(phi);
}

int cmd_check(const std::string& theory, const std::string& data,
              const std::string& query, const std::string& frag) {
  Fragment f = frag == "GC2" ? Fragment::GC2
              : frag == "G2minus" ? Fragment::G2minus
              : frag == "L2minus" ? Fragment::L2minus : Fragment::C2;
  if (!theory.empty()) {
    auto phis = parse_theory(slurp(theory));
    for (size_t i = 0; i < phis.size(); ++i) {
      auto v = check_fragment(phis[i], f);
      if (v) {
        std::cout << "VIOLATION sentence " << (i + 1) << ": " << v->reason
                  << " (path";
        for (int p : v->path) std::cout << " " << p;
        std::cout << ")\n";
        return 0;
      }
    }
    std::cout << "OK " << fragment_name(f) << "\n";
  }
  if (!data.empty()) {
    parse_data(slurp(data));
    std::cout << "OK data\n";
  }
  if (!query.empty()) {
    parse_query(slurp(query));
    std::cout << "OK query\n";
  }
  return 0;
}

int cmd_normalize(const std::string& theory, const std::string& out,
                  const std::string& sidecar, bool gc2) {
  auto phi = load_theory(theory);
  std::string rendered;
  std::vector<std::pair<std::string, long>> counting;
  if (gc2) {
    auto t = scott_gc2(phi);
    rendered = render(t.phi_star());
    counting = t.counting;
  } else {
    auto t = normalize_any(phi);
    rendered = render(t.phi_star());
    counting = t.counting;
  }
  std::ostringstream os;
  os << rendered << "\n";
  if (out.empty())
    std::cout << os.str();
  else
    spit(out, os.str());
  nlohmann::json side = nlohmann::json::array();
  for (const auto& [f, c] : counting)
    side.push_back({{"predicate", f}, {"bound", c}});
  if (sidecar.empty())
    std::cout << side.dump(2) << "\n";
  else
    spit(sidecar, side.dump(2));
  return 0;
}

int cmd_sat(const std::string& theory, const std::string& data, bool finite,
            bool json_out, const RunConfig& cfg) {
  auto phi = load_theory(theory);
  auto t = normalize_any(phi);
  Dataset delta = data.empty() ? Dataset{} : parse_data(slurp(data));
  auto v = decide(t, delta, finite, cfg);
  const char* verdict = v.kind == Verdict::Kind::Sat ? "SAT"
                       : v.kind == Verdict::Kind::Unsat ? "UNSAT" : "INCONCLUSIVE";
  if (json_out) {
    nlohmann::json j;
    j["verdict"] = verdict;
    j["detail"] = v.detail;
    if (v.cert) j["certificate"] = certificate_to_json(*v.cert, t);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << verdict << "\n";
    if (!v.detail.empty()) std::cout << "# " << v.detail << "\n";
  }
  return v.kind == Verdict::Kind::Inconclusive ? 3 : 0;
}

int cmd_query(const std::string& theory, const std::string& data,
              const std::string& query, const std::string& tuple_str, bool finite,
              bool json_out, const std::string& trace_out,
              const std::string& model_out, const QueryConfig& cfg) {
  auto phi = load_theory(theory);
  auto q = parse_query(slurp(query));
  Dataset delta = data.empty() ? Dataset{} : parse_data(slurp(data));
  std::vector<std::string> tuple;
  if (!tuple_str.empty()) {
    std::istringstream ts(tuple_str);
    std::string c;
    while (std::getline(ts, c, ',')) tuple.push_back(c);
  }
  auto r = answer(phi, q, delta, tuple, finite, cfg);
  const char* verdict = r.kind == AnswerKind::Entailed ? "ENTAILED"
                       : r.kind == AnswerKind::NotEntailed ? "NOT_ENTAILED"
                                                           : "INCONCLUSIVE";
  if (json_out) {
    nlohmann::json j;
    j["verdict"] = verdict;
    j["detail"] = r.detail;
    j["trace"] = trace_to_json(r.trace);
    if (r.evidence && r.evidence->countermodel)
      j["countermodel"] = structure_to_json(*r.evidence->countermodel);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << verdict << "\n";
    if (r.evidence && r.evidence->countermodel) {
      if (!model_out.empty()) {
        spit(model_out, write_model(*r.evidence->countermodel));
        std::cout << "# countermodel written to " << model_out << "\n";
      } else {
        std::cout << "# countermodel:\n" << write_model(*r.evidence->countermodel);
      }
    }
  }
  if (!trace_out.empty()) spit(trace_out, trace_to_json(r.trace).dump(2));
  return r.kind == AnswerKind::Inconclusive ? 3 : 0;
}

int cmd_oracle(const std::string& theory, const std::string& data, int lo, int hi,
               const std::string& out, long budget) {
  std::vector<FormulaPtr> phis =
      theory.empty() ? std::vector<FormulaPtr>{} : parse_theory(slurp(theory));
  Dataset delta = data.empty() ? Dataset{} : parse_data(slurp(data));
  auto r = find_model(phis, delta, lo, hi, SearchBudget{budget});
  if (std::holds_alternative<Structure>(r)) {
    const auto& A = std::get<Structure>(r);
    std::cout << "MODEL size " << A.n << "\n";
    if (out.empty())
      std::cout << write_model(A);
    else
      spit(out, write_model(A));
    return 0;
  }
  if (std::holds_alternative<NoneWithin>(r)) {
    std::cout << "NONE_WITHIN " << std::get<NoneWithin>(r).hi << "\n";
    return 0;
  }
  std::cout << "BUDGET_EXCEEDED " << std::get<BudgetExceeded>(r).nodes << "\n";
  return 3;
}

int cmd_gen3sat(const std::string& cnf_path, const std::string& prefix) {
  auto cnf = parse_dimacs(slurp(cnf_path));
  spit(prefix + ".thy", gen3sat_theory());
  spit(prefix + ".facts", gen3sat_facts(cnf));
  std::cout << "wrote " << prefix << ".thy and " << prefix << ".facts ("
            << cnf.size() << " clauses)\n";
  return 0;
}

int cmd_surgery(const std::string& model_path, const std::string& theory,
                const std::string& op, int omega, const std::string& observable,
                bool strong_only, const std::string& out,
                const std::string& log_out) {
  auto A = read_model(slurp(model_path));
  auto phi = load_theory(theory);
  auto t = normalize_any(phi);
  auto s = SignatureStar::make(t, 0);
  for (const auto& p : s.unary_order)
    if (!A.unary.count(p)) A.unary[p].assign(A.n, 0);
  for (const auto& r : s.binary_order)
    if (!A.binary.count(r)) A.binary[r].assign((size_t)A.n * A.n, 0);
  std::set<int> O;
  if (!observable.empty()) {
    std::istringstream os_(observable);
    std::string c;
    while (std::getline(os_, c, ',')) {
      auto it = A.const_map.find(c);
      if (it == A.const_map.end()) throw std::runtime_error("unknown constant " + c);
      O.insert(it->second);
    }
  }
  SurgeryLog log;
  Structure B = A;
  if (op == "copies") {
    B = disjoint_copies(A, std::max(omega, 1));
  } else if (op == "vacuous") {
    B = silent_to_vacuous(A, s, O);
  } else if (op == "elim-strong") {
    B = eliminate_strong_tcycles(A, O, omega, t, s, {}, &log);
  } else if (op == "elim-t") {
    B = eliminate_tcycles(A, O, omega, t, s, {}, &log);
  } else if (op == "cycles") {
    auto cycles = find_tcycles(A, O, omega, strong_only, s);
    for (const auto& c : cycles) {
      std::cout << (c.strong ? "strong" : "weak") << " t-cycle:";
      for (int e : c.elems) std::cout << " e" << e;
      std::cout << "\n";
    }
    std::cout << cycles.size() << " cycles\n";
    return 0;
  } else {
    throw std::runtime_error("unknown surgery op " + op);
  }
  if (out.empty())
    std::cout << write_model(B);
  else
    spit(out, write_model(B));
  if (!log_out.empty()) {
    nlohmann::json j = log.events;
    spit(log_out, j.dump(2));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"certificate-producing reasoner for two-variable counting theories "
               "over ground data"};
  app.require_subcommand(1);

  std::string theory, data, query, frag = "C2", out, sidecar, tuple, trace_out;
  std::string cnf_path, prefix = "out", model_path, op = "cycles", observable;
  std::string model_out;
  bool json_out = false, gc2 = false, strong_only = false;
  int lo = 1, hi = 6, omega = 4;
  RunConfig cfg;
  QueryConfig qcfg;

  auto add_budget_opts = [&](CLI::App* c) {
    c->add_option("--node-budget", cfg.node_budget, "search node budget");
    c->add_option("--star-cap", cfg.star_cap, "star pool cap");
    c->add_option("--padding", cfg.padding_override,
                  "padding bit override (test-only; sound for SAT answers)");
  };

  auto* check = app.add_subcommand("check", "parse and fragment-check inputs");
  check->add_option("--theory", theory, "theory file (.thy)");
  check->add_option("--data", data, "data file (.facts)");
  check->add_option("--query", query, "query file (.cq)");
  check->add_option("--fragment", frag, "C2 | GC2 | G2minus | L2minus");

  auto* norm = app.add_subcommand("normalize", "emit the normal-form theory");
  norm->add_option("--theory", theory, "theory file")->required();
  norm->add_option("-o,--out", out, "output theory file");
  norm->add_option("--sidecar", sidecar, "counting-pair sidecar (JSON)");
  norm->add_flag("--gc2", gc2, "emit the guarded normal form");

  auto* sat = app.add_subcommand("sat", "satisfiability of theory + data");
  sat->add_option("--theory", theory, "theory file")->required();
  sat->add_option("--data", data, "data file");
  sat->add_flag("--json", json_out, "JSON envelope");
  add_budget_opts(sat);

  auto* finsat = app.add_subcommand("finsat", "finite satisfiability");
  finsat->add_option("--theory", theory, "theory file")->required();
  finsat->add_option("--data", data, "data file");
  finsat->add_flag("--json", json_out, "JSON envelope");
  add_budget_opts(finsat);

  auto* qry = app.add_subcommand("query", "certain answers over all models");
  qry->add_option("--theory", theory, "theory file")->required();
  qry->add_option("--data", data, "data file");
  qry->add_option("--query", query, "query file")->required();
  qry->add_option("--tuple", tuple, "comma-separated constants for the head");
  qry->add_option("--trace", trace_out, "pipeline trace JSON output");
  qry->add_option("--countermodel", model_out, "countermodel .model output");
  qry->add_flag("--json", json_out, "JSON envelope");

  auto* fqry = app.add_subcommand("finquery", "certain answers over finite models");
  fqry->add_option("--theory", theory, "theory file")->required();
  fqry->add_option("--data", data, "data file");
  fqry->add_option("--query", query, "query file")->required();
  fqry->add_option("--tuple", tuple, "comma-separated constants for the head");
  fqry->add_option("--trace", trace_out, "pipeline trace JSON output");
  fqry->add_option("--countermodel", model_out, "countermodel .model output");
  fqry->add_flag("--json", json_out, "JSON envelope");

  auto* oracle = app.add_subcommand("oracle", "brute-force finite model search");
  oracle->add_option("--theory", theory, "theory file");
  oracle->add_option("--data", data, "data file");
  oracle->add_option("--min", lo, "smallest domain size");
  oracle->add_option("--max", hi, "largest domain size");
  oracle->add_option("-o,--out", out, "model output file");
  oracle->add_option("--node-budget", cfg.node_budget, "search node budget");

  auto* gen = app.add_subcommand("gen-3sat", "emit the 3SAT reduction instance");
  gen->add_option("--cnf", cnf_path, "DIMACS-style input")->required();
  gen->add_option("-o,--prefix", prefix, "output file prefix");

  auto* surg = app.add_subcommand("surgery", "model surgery passes");
  surg->add_option("--model", model_path, ".model input")->required();
  surg->add_option("--theory", theory, "theory file")->required();
  surg->add_option("--op", op, "copies | vacuous | cycles | elim-strong | elim-t");
  surg->add_option("--omega", omega, "cycle length bound");
  surg->add_option("--observable", observable, "comma-separated constants");
  surg->add_flag("--strong-only", strong_only, "restrict to strong t-cycles");
  surg->add_option("-o,--out", out, "model output file");
  surg->add_option("--json-log", trace_out, "surgery log JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (check->parsed()) return cmd_check(theory, data, query, frag);
    if (norm->parsed()) return cmd_normalize(theory, out, sidecar, gc2);
    if (sat->parsed()) return cmd_sat(theory, data, false, json_out, cfg);
    if (finsat->parsed()) return cmd_sat(theory, data, true, json_out, cfg);
    if (qry->parsed())
      return cmd_query(theory, data, query, tuple, false, json_out, trace_out,
                       model_out, qcfg);
    if (fqry->parsed())
      return cmd_query(theory, data, query, tuple, true, json_out, trace_out,
                       model_out, qcfg);
    if (oracle->parsed())
      return cmd_oracle(theory, data, lo, hi, out, cfg.node_budget);
    if (gen->parsed()) return cmd_gen3sat(cnf_path, prefix);
    if (surg->parsed())
      return cmd_surgery(model_path, theory, op, omega, observable, strong_only,
                         out, trace_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

#include "c2data/query_engine.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <queue>
#include <sstream>

namespace c2data {

std::string UniversalClause::str() const {
  std::ostringstream os;
  os << "forall";
  for (const auto& v : vars) os << " " << v;
  os << " .";
  bool first = true;
  for (const auto& l : lits) {
    os << (first ? " " : " | ");
    first = false;
    os << "!" << l.pred << "(";
    for (size_t i = 0; i < l.args.size(); ++i) {
      if (i) os << ",";
      os << (l.args[i].is_var ? "" : "'") << l.args[i].name;
    }
    os << ")";
  }
  if (first) os << " false";
  return os.str();
}

// ---------------------------------------------------------------------------
// negate_and_instantiate
// ---------------------------------------------------------------------------

InstantiationResult negate_and_instantiate(const Query& q,
                                           const std::vector<std::string>& tuple,
                                           const std::vector<std::string>& K) {
  if (tuple.size() != q.head_vars.size()) throw ArityMismatch("query tuple");
  std::map<std::string, Term> head;
  for (size_t i = 0; i < tuple.size(); ++i) head[q.head_vars[i]] = cst(tuple[i]);

  const auto& xs = q.exist_vars;
  // codomain: the variables themselves plus all constants
  std::vector<Term> codomain;
  for (const auto& v : xs) codomain.push_back(var(v));
  for (const auto& c : K) codomain.push_back(cst(c));

  InstantiationResult out;
  std::vector<size_t> pick(xs.size(), 0);
  for (;;) {
    std::map<std::string, Term> xi = head;
    for (size_t i = 0; i < xs.size(); ++i) xi[xs[i]] = codomain[pick[i]];
    UniversalClause c;
    std::set<std::string> vars;
    for (const auto& at : q.atoms) {
      QLiteral l;
      l.pred = at.pred;
      for (const auto& a : at.consts) {
        Term t = xi.at(a);
        l.args.push_back(t);
        if (t.is_var) vars.insert(t.name);
      }
      c.lits.push_back(l);
    }
    c.vars.assign(vars.begin(), vars.end());
    (is_v_cyclic(c) ? out.dropped : out.kept).push_back(c);

    // advance the product
    size_t i = 0;
    while (i < xs.size() && ++pick[i] == codomain.size()) pick[i++] = 0;
    if (i == xs.size() || xs.empty()) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// v-cyclicity
// ---------------------------------------------------------------------------

bool is_v_cyclic(const UniversalClause& c) {
  std::vector<Term> nodes;
  auto node_id = [&](const Term& t) -> int {
    for (size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i] == t) return (int)i;
    nodes.push_back(t);
    return (int)nodes.size() - 1;
  };
  std::set<std::pair<int, int>> edges;
  auto add_edge = [&](int a, int b) {
    if (a == b) return;
    edges.insert({std::min(a, b), std::max(a, b)});
  };
  for (const auto& l : c.lits) {
    std::vector<int> ids;
    for (const auto& a : l.args) ids.push_back(node_id(a));
    if (ids.size() == 2) add_edge(ids[0], ids[1]);
  }
  // constants are pairwise linked
  std::vector<int> consts;
  for (size_t i = 0; i < nodes.size(); ++i)
    if (!nodes[i].is_var) consts.push_back((int)i);
  for (size_t i = 0; i < consts.size(); ++i)
    for (size_t j = i + 1; j < consts.size(); ++j) add_edge(consts[i], consts[j]);

  int n = (int)nodes.size();
  std::vector<std::vector<int>> adj(n);
  for (const auto& [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  // a cycle (length >= 3 in a simple graph) through a variable node v exists
  // iff two distinct neighbours of v are connected in G - v
  for (int v = 0; v < n; ++v) {
    if (!nodes[v].is_var) continue;
    const auto& nb = adj[v];
    for (size_t i = 0; i < nb.size(); ++i)
      for (size_t j = i + 1; j < nb.size(); ++j) {
        std::vector<uint8_t> seen(n, 0);
        seen[v] = 1;
        std::queue<int> bfs;
        bfs.push(nb[i]);
        seen[nb[i]] = 1;
        bool hit = false;
        while (!bfs.empty() && !hit) {
          int cur = bfs.front();
          bfs.pop();
          if (cur == nb[j]) hit = true;
          for (int nx : adj[cur])
            if (!seen[nx]) {
              seen[nx] = 1;
              bfs.push(nx);
            }
        }
        if (hit) return true;
      }
  }
  return false;
}

// ---------------------------------------------------------------------------
// clause_choices
// ---------------------------------------------------------------------------

ChoiceResult clause_choices(const UniversalClause& c, const Dataset& delta) {
  ChoiceResult out;
  std::vector<QLiteral> residue;
  for (const auto& l : c.lits) {
    bool ground = true;
    for (const auto& a : l.args)
      if (a.is_var) ground = false;
    if (!ground) {
      residue.push_back(l);
      continue;
    }
    GroundAtom beta;
    beta.pred = l.pred;
    for (const auto& a : l.args) beta.consts.push_back(a.name);
    if (delta.literals.count(GroundLiteral{false, beta})) {
      out.discharged = true;  // the negative literal already holds
      return out;
    }
    if (delta.literals.count(GroundLiteral{true, beta})) continue;  // refuted
    out.options.push_back(AssumeGround{GroundLiteral{false, beta}});
  }
  // split the residue into variable-disjoint components
  std::map<std::string, int> comp;
  int ncomp = 0;
  std::function<int(int)> find;  // union-find over component ids
  std::vector<int> parent;
  find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (const auto& l : residue) {
    int first = -1;
    for (const auto& a : l.args) {
      if (!a.is_var) continue;
      if (!comp.count(a.name)) {
        comp[a.name] = ncomp++;
        parent.push_back((int)parent.size());
      }
      int id = find(comp[a.name]);
      if (first < 0)
        first = id;
      else if (id != first)
        parent[id] = first;
    }
  }
  std::map<int, UniversalClause> comps;
  for (const auto& l : residue) {
    int id = -1;
    for (const auto& a : l.args)
      if (a.is_var) {
        id = find(comp[a.name]);
        break;
      }
    comps[id].lits.push_back(l);
  }
  for (auto& [id, cl] : comps) {
    std::set<std::string> vars;
    for (const auto& l : cl.lits)
      for (const auto& a : l.args)
        if (a.is_var) vars.insert(a.name);
    cl.vars.assign(vars.begin(), vars.end());
    out.options.push_back(Component{cl, true});
  }
  return out;
}

// ---------------------------------------------------------------------------
// eliminate_constant
// ---------------------------------------------------------------------------

std::string FreshPredTable::intern(const std::string& shape) {
  auto it = by_shape.find(shape);
  if (it != by_shape.end()) return it->second;
  std::string p = "_cq" + std::to_string(next++);
  by_shape[shape] = p;
  entries.push_back({p, shape});
  return p;
}

static UniversalClause canonical_rename(const UniversalClause& c) {
  std::map<std::string, std::string> ren;
  int n = 0;
  UniversalClause out;
  for (const auto& l : c.lits) {
    QLiteral m = l;
    for (auto& a : m.args) {
      if (!a.is_var || a.name == "z") continue;
      if (!ren.count(a.name)) ren[a.name] = "v" + std::to_string(n++);
      a.name = ren[a.name];
    }
    out.lits.push_back(m);
  }
  std::sort(out.lits.begin(), out.lits.end());
  std::set<std::string> vars;
  for (const auto& l : out.lits)
    for (const auto& a : l.args)
      if (a.is_var) vars.insert(a.name);
  out.vars.assign(vars.begin(), vars.end());
  return out;
}

ConstantElimination eliminate_constant(const UniversalClause& c, FreshPredTable& table) {
  std::set<std::string> consts;
  for (const auto& l : c.lits)
    for (const auto& a : l.args)
      if (!a.is_var) consts.insert(a.name);
  if (consts.empty()) return ConstantElimination{std::nullopt, c};
  if (consts.size() > 1) throw MultipleConstants();
  std::string c0 = *consts.begin();

  UniversalClause shaped;
  for (const auto& l : c.lits) {
    QLiteral m = l;
    for (auto& a : m.args)
      if (!a.is_var && a.name == c0) a = var("z");
    shaped.lits.push_back(m);
  }
  std::string key = canonical_rename(shaped).str();
  std::string p = table.intern(key);

  ConstantElimination out;
  out.fact = GroundLiteral{true, GroundAtom{p, {c0}}};
  out.clause = shaped;
  out.clause.lits.push_back(QLiteral{p, {var("z")}});
  std::set<std::string> vars(c.vars.begin(), c.vars.end());
  vars.insert("z");
  out.clause.vars.assign(vars.begin(), vars.end());
  return out;
}

// ---------------------------------------------------------------------------
// tree_rollup
// ---------------------------------------------------------------------------

FormulaPtr tree_rollup(const UniversalClause& c, const std::string& root) {
  // variables and adjacency from two-variable literals
  std::set<std::string> vars(c.vars.begin(), c.vars.end());
  if (!vars.count(root)) throw NotATree();
  for (const auto& l : c.lits)
    for (const auto& a : l.args)
      if (!a.is_var) throw NotATree();  // constant-free precondition

  std::map<std::string, std::set<std::string>> adj;
  for (const auto& l : c.lits) {
    if (l.args.size() == 2 && l.args[0].is_var && l.args[1].is_var &&
        l.args[0].name != l.args[1].name) {
      adj[l.args[0].name].insert(l.args[1].name);
      adj[l.args[1].name].insert(l.args[0].name);
    }
  }
  // BFS tree from the root
  std::map<std::string, std::string> parent;
  std::map<std::string, std::vector<std::string>> kids;
  std::set<std::string> seen{root};
  std::queue<std::string> bfs;
  bfs.push(root);
  while (!bfs.empty()) {
    auto v = bfs.front();
    bfs.pop();
    for (const auto& u : adj[v]) {
      if (seen.count(u)) {
        if (parent.count(v) && parent[v] == u) continue;
        if (u == v) continue;
        // an already-seen non-parent neighbour closes a cycle
        if (!(parent.count(v) && parent.at(v) == u)) throw NotATree();
      }
      seen.insert(u);
      parent[u] = v;
      kids[v].push_back(u);
      bfs.push(u);
    }
  }
  if (seen.size() != vars.size()) throw NotATree();  // splittable

  // literal buckets
  std::map<std::string, std::vector<QLiteral>> node_lits;
  std::map<std::pair<std::string, std::string>, std::vector<QLiteral>> edge_lits;
  for (const auto& l : c.lits) {
    std::set<std::string> lv;
    for (const auto& a : l.args) lv.insert(a.name);
    if (lv.size() == 1) {
      node_lits[*lv.begin()].push_back(l);
    } else {
      auto it = lv.begin();
      std::string a = *it++, b = *it;
      // orient parent-child
      if (parent.count(a) && parent.at(a) == b) std::swap(a, b);
      edge_lits[{a, b}].push_back(l);  // a = parent, b = child
    }
  }

  std::function<FormulaPtr(const std::string&, int)> roll =
      [&](const std::string& v, int depth) -> FormulaPtr {
    std::string name = depth % 2 ? "y" : "x";
    std::string child_name = depth % 2 ? "x" : "y";
    auto lit_formula = [&](const QLiteral& l, const std::string& vn,
                           const std::string& un) {
      std::vector<Term> args;
      for (const auto& a : l.args)
        args.push_back(var(a.name == v ? vn : un));
      return mk_not(mk_atom(l.pred, args));
    };
    FormulaPtr acc = mk_false();
    for (const auto& l : node_lits[v]) acc = s_or(acc, lit_formula(l, name, name));
    for (const auto& u : kids[v]) {
      auto psi = roll(u, depth + 1);
      const auto& elits = edge_lits[{v, u}];
      // guard with the first edge atom: forall y (gamma -> rest | psi)
      FormulaPtr rest = psi;
      for (size_t i = 1; i < elits.size(); ++i) {
        const auto& l = elits[i];
        std::vector<Term> args;
        for (const auto& a : l.args)
          args.push_back(var(a.name == v ? name : child_name));
        rest = s_or(mk_not(mk_atom(l.pred, args)), rest);
      }
      const auto& g = elits.at(0);
      std::vector<Term> gargs;
      for (const auto& a : g.args)
        gargs.push_back(var(a.name == v ? name : child_name));
      auto guarded = mk_forall(child_name, mk_implies(mk_atom(g.pred, gargs), rest));
      acc = s_or(acc, guarded);
    }
    return acc;
  };
  return roll(root, 0);
}

// ---------------------------------------------------------------------------
// answer()
// ---------------------------------------------------------------------------

namespace {

struct BranchOutcome {
  enum Kind { Unsat, Sat, Inconclusive } kind = Unsat;
  std::optional<SatCertificate> cert;
  NormalTheoryC2 theory;
  Dataset data;
};

struct DecideCache {
  std::map<std::string, NormalTheoryC2> theories;  // theta key -> folded theory
  std::map<std::string, BranchOutcome> outcomes;   // full key -> outcome
};

std::string render_theta_set(const std::vector<FormulaPtr>& thetas) {
  std::vector<std::string> rs;
  for (const auto& t : thetas) rs.push_back(render(t));
  std::sort(rs.begin(), rs.end());
  rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
  std::string out;
  for (const auto& r : rs) out += r + "\n";
  return out;
}

}  // namespace

AnswerResult answer(const FormulaPtr& phi, const Query& q, const Dataset& delta,
                    const std::vector<std::string>& tuple, bool finite_mode,
                    const QueryConfig& cfg) {
  if (auto v = check_fragment(phi, Fragment::GC2))
    throw FragmentViolationError(v->reason);
  if (tuple.size() != q.head_vars.size()) throw ArityMismatch("query tuple");

  AnswerResult res;
  PipelineTrace& trace = res.trace;

  // signature of interest: theory + query predicates
  Signature keep_sig = signature_of(phi);
  for (const auto& at : q.atoms) {
    if (at.consts.size() == 1)
      keep_sig.unary.insert(at.pred);
    else
      keep_sig.binary.insert(at.pred);
  }

  // merge explicitly equal constants
  std::set<std::string> kset = delta.constants();
  for (const auto& c : tuple) kset.insert(c);
  std::vector<std::string> all_consts(kset.begin(), kset.end());
  std::map<std::string, int> cid;
  for (size_t i = 0; i < all_consts.size(); ++i) cid[all_consts[i]] = (int)i;
  std::vector<int> uf(all_consts.size());
  for (size_t i = 0; i < uf.size(); ++i) uf[i] = (int)i;
  std::function<int(int)> find = [&](int x) {
    return uf[x] == x ? x : uf[x] = find(uf[x]);
  };
  std::set<std::pair<int, int>> forced_neq;
  for (const auto& e : delta.eqs) {
    int a = find(cid.at(e.lhs)), b = find(cid.at(e.rhs));
    if (e.equal && a != b) uf[std::max(a, b)] = std::min(a, b);
  }
  for (const auto& e : delta.eqs) {
    if (e.equal) continue;
    int a = find(cid.at(e.lhs)), b = find(cid.at(e.rhs));
    if (a == b) {  // c = d and c != d force a contradiction: everything entailed
      res.kind = AnswerKind::Entailed;
      res.detail = "the dataset is inconsistent";
      return res;
    }
    forced_neq.insert({std::min(a, b), std::max(a, b)});
  }
  // class representatives (after explicit merges)
  std::vector<int> reps;
  std::map<int, int> rep_pos;
  for (size_t i = 0; i < all_consts.size(); ++i)
    if (find((int)i) == (int)i) {
      rep_pos[(int)i] = (int)reps.size();
      reps.push_back((int)i);
    }
  int R = (int)reps.size();

  DecideCache cache;
  FreshPredTable fresh_table;  // global per answer() call
  bool any_inconclusive = false;
  long partitions_done = 0;

  // partitions of the representatives (restricted-growth strings)
  std::vector<int> block(R, 0);
  std::optional<QueryEvidence> sat_evidence;

  // ---- per-partition processing (reads the current `block`) ----
  std::function<void()> process_partition = [&]() {
    // block representative: least constant name per block
    std::map<int, std::string> block_name;
    for (int i = 0; i < R; ++i) {
      const std::string& nm = all_consts[reps[i]];
      auto it = block_name.find(block[i]);
      if (it == block_name.end() || nm < it->second) block_name[block[i]] = nm;
    }
    auto rep_of = [&](const std::string& c) -> std::string {
      int r = find(cid.at(c));
      return block_name.at(block[rep_pos.at(r)]);
    };

    // quotient dataset
    Dataset dq;
    for (const auto& l : delta.literals) {
      GroundLiteral m = l;
      for (auto& c : m.atom.consts) c = rep_of(c);
      // contradiction after merging: this partition admits no models
      GroundLiteral neg = m;
      neg.positive = !m.positive;
      if (dq.literals.count(neg)) {
        trace.branch_verdicts.push_back("partition contradiction");
        return;  // partition contributes UNSAT
      }
      dq.literals.insert(m);
    }
    // drop foreign-predicate literals (local consistency established above)
    {
      std::set<GroundLiteral> keep;
      for (const auto& l : dq.literals) {
        bool known = l.atom.consts.size() == 1 ? keep_sig.unary.count(l.atom.pred)
                                               : keep_sig.binary.count(l.atom.pred);
        if (known) keep.insert(l);
      }
      dq.literals = keep;
    }
    // pairwise distinctness of the block representatives
    std::vector<std::string> kp;
    for (const auto& [b, nm] : block_name) kp.push_back(nm);
    std::sort(kp.begin(), kp.end());
    for (size_t i = 0; i < kp.size(); ++i)
      for (size_t j = i + 1; j < kp.size(); ++j)
        dq.eqs.insert(ConstEq{false, kp[i], kp[j]});

    std::vector<std::string> tq;
    for (const auto& c : tuple) tq.push_back(rep_of(c));

    auto inst = negate_and_instantiate(q, tq, kp);
    trace.xi_total += (long)(inst.kept.size() + inst.dropped.size());
    trace.xi1 += (long)inst.dropped.size();
    trace.xi2 += (long)inst.kept.size();
    for (const auto& d : inst.dropped) trace.dropped_vformulas.push_back(d.str());

    // per-clause options
    std::vector<std::vector<Choice>> options;
    for (const auto& cl : inst.kept) {
      auto ch = clause_choices(cl, dq);
      if (ch.discharged) continue;
      if (ch.options.empty()) {
        trace.branch_verdicts.push_back("clause forces bottom");
        return;  // negated query unsatisfiable here: partition contributes UNSAT
      }
      options.push_back(ch.options);
    }

    long vectors = 1;
    for (const auto& o : options) {
      vectors *= (long)o.size();
      if (vectors > cfg.choice_vector_cap) {
        any_inconclusive = true;
        trace.branch_verdicts.push_back("choice vector cap");
        return;
      }
    }

    // iterate choice vectors
    std::vector<size_t> pick(options.size(), 0);
    auto run_vector = [&]() -> bool {  // true: stop (Sat found)
      Dataset data = dq;
      std::vector<FormulaPtr> thetas;
      std::vector<std::string> assumed_strs;
      for (size_t i = 0; i < options.size(); ++i) {
        const Choice& ch = options[i][pick[i]];
        if (std::holds_alternative<AssumeGround>(ch)) {
          const auto& ag = std::get<AssumeGround>(ch);
          data.literals.insert(ag.lit);
          std::ostringstream os;
          os << "!" << ag.lit.atom.pred << "(";
          for (size_t a = 0; a < ag.lit.atom.consts.size(); ++a)
            os << (a ? "," : "") << ag.lit.atom.consts[a];
          os << ")";
          assumed_strs.push_back(os.str());
          trace.ground_choices.push_back(os.str());
        } else {
          const auto& comp = std::get<Component>(ch);
          trace.unsplittable_components++;
          size_t fresh_before = fresh_table.entries.size();
          auto elim = eliminate_constant(comp.clause, fresh_table);
          for (size_t e = fresh_before; e < fresh_table.entries.size(); ++e)
            trace.fresh_preds.push_back(fresh_table.entries[e]);
          UniversalClause cf = elim.clause;
          std::string root = elim.fact ? "z" : cf.vars.at(0);
          if (elim.fact) {
            data.literals.insert(*elim.fact);
            trace.delta_prime.push_back(elim.fact->atom.pred + "(" +
                                        elim.fact->atom.consts[0] + ")");
          }
          auto rolled = tree_rollup(cf, root);
          auto fvs = free_vars(rolled);
          std::string fv = fvs.empty() ? "x" : *fvs.begin();
          FormulaPtr norm =
              fv == "x" ? mk_forall("x", rolled)
                        : mk_forall("x", substitute_var(rolled, fv, var("x")));
          thetas.push_back(norm);
        }
      }
      // dedup thetas
      std::sort(thetas.begin(), thetas.end(),
                [](const FormulaPtr& a, const FormulaPtr& b) {
                  return render(a) < render(b);
                });
      thetas.erase(std::unique(thetas.begin(), thetas.end(),
                               [](const FormulaPtr& a, const FormulaPtr& b) {
                                 return render(a) == render(b);
                               }),
                   thetas.end());
      for (const auto& th : thetas) trace.theta_conjuncts.push_back(render(th));

      std::string theta_key = render_theta_set(thetas);
      if (!cache.theories.count(theta_key)) {
        std::vector<FormulaPtr> conj{phi};
        for (const auto& th : thetas) conj.push_back(th);
        cache.theories[theta_key] = fold_gc2_to_c2(scott_gc2(mk_and_all(conj)));
      }
      const auto& theory = cache.theories.at(theta_key);

      std::string key = theta_key + "#" + data.render() + "#" +
                        (finite_mode ? "fin" : "inf");
      if (!cache.outcomes.count(key)) {
        auto verdict = decide(theory, data, finite_mode, cfg.sat);
        BranchOutcome oc;
        oc.theory = theory;
        oc.data = data;
        if (verdict.kind == Verdict::Kind::Sat) {
          oc.kind = BranchOutcome::Sat;
          oc.cert = verdict.cert;
        } else if (verdict.kind == Verdict::Kind::Unsat) {
          oc.kind = BranchOutcome::Unsat;
        } else {
          oc.kind = BranchOutcome::Inconclusive;
        }
        cache.outcomes[key] = oc;
        trace.branch_verdicts.push_back(
            key.substr(0, 24) + "... -> " +
            (oc.kind == BranchOutcome::Sat ? "SAT"
             : oc.kind == BranchOutcome::Unsat ? "UNSAT" : "INCONCLUSIVE"));
      }
      const auto& oc = cache.outcomes.at(key);
      if (oc.kind == BranchOutcome::Inconclusive) {
        any_inconclusive = true;
        return false;
      }
      if (oc.kind != BranchOutcome::Sat) return false;

      QueryEvidence ev;
      {
        std::ostringstream os;
        for (int i = 0; i < R; ++i) {
          if (i) os << " ";
          os << all_consts[reps[i]] << ":" << block[i];
        }
        ev.partition = os.str();
      }
      ev.assumed = assumed_strs;
      for (const auto& th : thetas) ev.theta.push_back(render(th));
      ev.cert = *oc.cert;
      ev.branch_theory = oc.theory;
      ev.branch_data = oc.data;
      if (cfg.realize_countermodel) {
        auto M = certificate_model(ev.cert, oc.theory, oc.data, cfg.countermodel_cap);
        if (M) {
          // alias the merged constants so the original names resolve
          Structure MM = *M;
          for (const auto& c : kset)
            if (!MM.const_map.count(c)) {
              auto r = rep_of(c);
              if (MM.const_map.count(r)) MM.const_map[c] = MM.const_map.at(r);
            }
          bool sat_psi = false;
          try {
            sat_psi = evaluate_query(MM, q, tuple);
          } catch (const std::exception&) {
            sat_psi = true;
          }
          if (sat_psi && !ev.cert.small_model_branch) {
            // short cycles let the query match: push them out
            try {
              auto S = SignatureStar::make(oc.theory, ev.cert.padding_override);
              std::set<int> O;
              for (const auto& [c, e] : MM.const_map) O.insert(e);
              int omega = (int)(2 * q.atoms.size() + 2);
              auto B = eliminate_tcycles(MM, O, omega, oc.theory, S, cfg.surgery);
              B.const_map = MM.const_map;
              if (!evaluate_query(B, q, tuple)) {
                MM = B;
                sat_psi = false;
              }
            } catch (const std::exception&) {
            }
          }
          if (!sat_psi) ev.countermodel = MM;
        }
      }
      sat_evidence = std::move(ev);
      return true;
    };

    if (options.empty()) {
      run_vector();
      return;
    }
    std::function<bool(size_t)> iterate = [&](size_t i) -> bool {
      if (i == options.size()) return run_vector();
      for (size_t k = 0; k < options[i].size(); ++k) {
        pick[i] = k;
        if (iterate(i + 1)) return true;
      }
      return false;
    };
    iterate(0);
  };

  std::function<bool(int, int)> walk = [&](int i, int used) -> bool {
    if (sat_evidence) return true;
    if (partitions_done > cfg.partition_cap) {
      any_inconclusive = true;
      return true;
    }
    if (i == R) {
      ++partitions_done;
      ++trace.partitions;
      process_partition();
      return sat_evidence.has_value();
    }
    for (int b = 0; b <= used; ++b) {
      block[i] = b;
      bool ok = true;
      for (int j = 0; j < i; ++j)
        if (block[j] == b) {
          int a = std::min(reps[j], reps[i]), c = std::max(reps[j], reps[i]);
          if (forced_neq.count({a, c})) ok = false;
        }
      if (ok && walk(i + 1, std::max(used, b + 1))) return true;
    }
    return false;
  };

  walk(0, 0);

  if (sat_evidence) {
    res.kind = AnswerKind::NotEntailed;
    res.evidence = std::move(sat_evidence);
    res.detail = "a branch is satisfiable";
  } else if (any_inconclusive) {
    res.kind = AnswerKind::Inconclusive;
    res.detail = "some branch was inconclusive";
  } else {
    res.kind = AnswerKind::Entailed;
    res.detail = "every branch is unsatisfiable";
  }
  return res;
}

}  // namespace c2data

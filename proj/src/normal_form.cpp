#include "c2data/normal_form.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <set>

namespace c2data {

// ---------------------------------------------------------------------------
// Simplifying constructors and small formula utilities
// ---------------------------------------------------------------------------

FormulaPtr s_not(FormulaPtr f) {
  if (f->kind == Kind::True) return mk_false();
  if (f->kind == Kind::False) return mk_true();
  if (f->kind == Kind::Not) return f->kids[0];
  return mk_not(std::move(f));
}

FormulaPtr s_and(FormulaPtr a, FormulaPtr b) {
  if (a->kind == Kind::False || b->kind == Kind::False) return mk_false();
  if (a->kind == Kind::True) return b;
  if (b->kind == Kind::True) return a;
  return mk_and(std::move(a), std::move(b));
}

FormulaPtr s_or(FormulaPtr a, FormulaPtr b) {
  if (a->kind == Kind::True || b->kind == Kind::True) return mk_true();
  if (a->kind == Kind::False) return b;
  if (b->kind == Kind::False) return a;
  return mk_or(std::move(a), std::move(b));
}

FormulaPtr s_implies(FormulaPtr a, FormulaPtr b) {
  if (a->kind == Kind::False) return mk_true();
  if (a->kind == Kind::True) return b;
  if (b->kind == Kind::True) return mk_true();
  if (b->kind == Kind::False) return s_not(std::move(a));
  return mk_implies(std::move(a), std::move(b));
}

FormulaPtr swap_xy(const FormulaPtr& f) {
  auto t1 = substitute_var(f, "x", var("__swap_tmp"));
  auto t2 = substitute_var(t1, "y", var("x"));
  return substitute_var(t2, "__swap_tmp", var("y"));
}

// Simultaneous rename {from1->x, from2->y}.
static FormulaPtr orient_to_xy(const FormulaPtr& f, const std::string& from1,
                               const std::string& from2) {
  if (from1 == "x" && from2 == "y") return f;
  auto t1 = substitute_var(f, from1, var("__o1"));
  auto t2 = substitute_var(t1, from2, var("__o2"));
  auto t3 = substitute_var(t2, "__o1", var("x"));
  return substitute_var(t3, "__o2", var("y"));
}

FormulaPtr resolve_equalities_distinct(const FormulaPtr& f) {
  switch (f->kind) {
    case Kind::Equal: {
      if (f->args[0] == f->args[1]) return mk_true();
      return mk_false();
    }
    case Kind::True:
    case Kind::False:
    case Kind::Atom:
      return f;
    case Kind::Not:
      return s_not(resolve_equalities_distinct(f->kids[0]));
    case Kind::And:
      return s_and(resolve_equalities_distinct(f->kids[0]),
                   resolve_equalities_distinct(f->kids[1]));
    case Kind::Or:
      return s_or(resolve_equalities_distinct(f->kids[0]),
                  resolve_equalities_distinct(f->kids[1]));
    case Kind::Implies:
      return s_implies(resolve_equalities_distinct(f->kids[0]),
                       resolve_equalities_distinct(f->kids[1]));
    case Kind::Iff: {
      auto a = resolve_equalities_distinct(f->kids[0]);
      auto b = resolve_equalities_distinct(f->kids[1]);
      if (a->kind == Kind::True) return b;
      if (b->kind == Kind::True) return a;
      if (a->kind == Kind::False) return s_not(b);
      if (b->kind == Kind::False) return s_not(a);
      return mk_iff(a, b);
    }
    default:
      throw std::logic_error("resolve_equalities: quantifier in matrix");
  }
}

// Exists -> >=1; <=C -> !(>=C+1); =C -> >=C & !(>=C+1); >=0 -> true.
static FormulaPtr desugar(const FormulaPtr& f) {
  switch (f->kind) {
    case Kind::True:
    case Kind::False:
    case Kind::Atom:
    case Kind::Equal:
      return f;
    case Kind::Exists:
      return mk_count(CountKind::Geq, 1, f->qvar, desugar(f->kids[0]));
    case Kind::Forall:
      return mk_forall(f->qvar, desugar(f->kids[0]));
    case Kind::Count: {
      auto body = desugar(f->kids[0]);
      switch (f->ck) {
        case CountKind::Geq:
          if (f->bound <= 0) return mk_true();
          return mk_count(CountKind::Geq, f->bound, f->qvar, body);
        case CountKind::Leq:
          return s_not(mk_count(CountKind::Geq, f->bound + 1, f->qvar, body));
        case CountKind::Eq: {
          auto ge = f->bound <= 0 ? mk_true()
                                  : mk_count(CountKind::Geq, f->bound, f->qvar, body);
          auto gt = mk_count(CountKind::Geq, f->bound + 1, f->qvar, body);
          return s_and(ge, s_not(gt));
        }
      }
      return f;
    }
    case Kind::Not:
      return s_not(desugar(f->kids[0]));
    case Kind::And:
      return s_and(desugar(f->kids[0]), desugar(f->kids[1]));
    case Kind::Or:
      return s_or(desugar(f->kids[0]), desugar(f->kids[1]));
    case Kind::Implies:
      return s_implies(desugar(f->kids[0]), desugar(f->kids[1]));
    case Kind::Iff:
      return mk_iff(desugar(f->kids[0]), desugar(f->kids[1]));
  }
  return f;
}

static bool is_qf(const FormulaPtr& f) {
  if (f->kind == Kind::Forall || f->kind == Kind::Exists || f->kind == Kind::Count)
    return false;
  for (const auto& k : f->kids)
    if (!is_qf(k)) return false;
  return true;
}

static std::string other_var(const std::string& v) { return v == "x" ? "y" : "x"; }

// ---------------------------------------------------------------------------
// The rewriting context
// ---------------------------------------------------------------------------

namespace {

struct QuantInfo {
  std::string q;
  bool pos_done = false;  // q -> exists
  bool neg_done = false;  // exists -> q
};

struct ScottCtx {
  bool gc2 = false;
  std::vector<FormulaPtr> chi;    // one-variable conjuncts over x
  std::vector<FormulaPtr> beta;   // matrix conjuncts over (x,y)   [C2]
  std::vector<GuardClause> gcls;  // guard clauses                 [GC2]
  std::vector<std::pair<std::string, long>> counting;
  std::map<std::string, QuantInfo> memo;
  std::set<std::string> used_names;
  int fresh_n = 0;

  std::string fresh(const char* stem) {
    for (;;) {
      std::string name = std::string("_") + stem + std::to_string(fresh_n++);
      if (!used_names.count(name)) {
        used_names.insert(name);
        return name;
      }
    }
  }

  FormulaPtr q_atom(const std::string& q, const std::string& v) {
    return mk_atom(q, {var(v)});
  }

  void emit_chi(FormulaPtr f) {
    f = resolve_equalities_distinct(f);
    if (f->kind == Kind::True) return;
    chi.push_back(std::move(f));
  }

  void emit_beta(FormulaPtr f) {
    f = resolve_equalities_distinct(f);
    if (f->kind == Kind::True) return;
    beta.push_back(std::move(f));
  }

  void emit_clause(const std::string& e, FormulaPtr b) {
    b = resolve_equalities_distinct(b);
    if (b->kind == Kind::True) return;
    gcls.push_back(GuardClause{e, std::move(b)});
  }

  // Removes one syntactic occurrence of the guard atom from a conjunction.
  static FormulaPtr strip_guard(const FormulaPtr& f, const FormulaPtr& guard_atom) {
    if (formula_equal(f, guard_atom)) return mk_true();
    if (f->kind == Kind::And) {
      auto a = strip_guard(f->kids[0], guard_atom);
      if (!formula_equal(a, f->kids[0])) return s_and(a, f->kids[1]);
      auto b = strip_guard(f->kids[1], guard_atom);
      return s_and(f->kids[0], b);
    }
    return f;
  }

  // Emits "body -> concl" as a guard clause keyed by body's guard atom,
  // transposing when the guard runs (y,x). body/concl are oriented over (x,y)
  // with x the owner.
  void emit_guarded_implication(const FormulaPtr& guard_atom, const FormulaPtr& body,
                                const FormulaPtr& concl) {
    assert(guard_atom && guard_atom->kind == Kind::Atom);
    bool forward = guard_atom->args[0].name == "x";
    if (forward) {
      emit_clause(guard_atom->pred, s_implies(strip_guard(body, guard_atom), concl));
    } else {
      auto body_t = swap_xy(strip_guard(body, guard_atom));
      auto concl_t = swap_xy(concl);
      emit_clause(guard_atom->pred, s_implies(body_t, concl_t));
    }
  }

  // Renames E_k = "exists>=k y (psi(x,y) & y != x)" by a fresh unary marker.
  // psi is quantifier-free, oriented over (x owner, y witness). guard_atom is
  // psi's guard (GC2); nullptr means unguarded.
  std::string rename_exists(const FormulaPtr& psi, const FormulaPtr& guard_atom,
                            long k, int need) {
    std::string key = std::to_string(k) + "|" + render(psi);
    auto it = memo.find(key);
    if (it == memo.end()) {
      QuantInfo qi;
      qi.q = fresh("q");
      it = memo.emplace(key, qi).first;
    }
    QuantInfo& qi = it->second;
    auto qx = q_atom(qi.q, "x");
    if (need >= 0 && !qi.pos_done) {
      qi.pos_done = true;
      std::string fq = fresh("f");
      counting.push_back({fq, k});
      auto fatom = mk_atom(fq, {var("x"), var("y")});
      if (gc2)
        emit_clause(fq, s_implies(qx, psi));
      else
        emit_beta(s_implies(s_and(qx, fatom), psi));
    }
    if (need <= 0 && !qi.neg_done) {
      qi.neg_done = true;
      if (gc2 && !guard_atom)
        throw UnsupportedShape("an unguarded existential needed negatively");
      if (k == 1) {
        if (gc2)
          emit_guarded_implication(guard_atom, psi, qx);
        else
          emit_beta(s_implies(psi, qx));
      } else {
        std::string g = fresh("g");
        std::string g2 = fresh("g");
        counting.push_back({g, k});
        counting.push_back({g2, 1});
        auto gat = mk_atom(g, {var("x"), var("y")});
        auto g2at = mk_atom(g2, {var("x"), var("y")});
        if (gc2) {
          emit_guarded_implication(guard_atom, s_and(s_not(qx), psi), gat);
          emit_clause(g2, s_implies(s_not(qx), s_and(gat, s_not(psi))));
        } else {
          emit_beta(s_implies(s_and(s_not(qx), psi), gat));
          emit_beta(s_implies(s_and(s_not(qx), g2at), s_and(gat, s_not(psi))));
        }
      }
    }
    return qi.q;
  }
};

static bool is_guard_atom(const FormulaPtr& f) {
  if (f->kind == Kind::Equal)
    return f->args[0].is_var && f->args[1].is_var && !(f->args[0] == f->args[1]);
  return f->kind == Kind::Atom && f->args.size() == 2 && f->args[0].is_var &&
         f->args[1].is_var && !(f->args[0] == f->args[1]);
}

struct Rewriter {
  ScottCtx& cx;

  FormulaPtr rw(const FormulaPtr& f, int pol, const std::string& ctx, bool spine) {
    switch (f->kind) {
      case Kind::True:
      case Kind::False:
      case Kind::Atom:
      case Kind::Equal:
        return f;
      case Kind::Not: {
        const auto& kid = f->kids[0];
        // Push negation through quantifiers: !forall == exists>=1 !body,
        // !exists>=1 == forall !body. This keeps hoisting opportunities alive.
        if (kid->kind == Kind::Forall)
          return rw_count(mk_count(CountKind::Geq, 1, kid->qvar, s_not(kid->kids[0])),
                          pol, ctx);
        if (kid->kind == Kind::Count && kid->ck == CountKind::Geq && kid->bound == 1)
          return rw_forall(mk_forall(kid->qvar, s_not(kid->kids[0])), pol, ctx, spine);
        return s_not(rw(kid, -pol, ctx, false));
      }
      case Kind::And:
        return s_and(rw(f->kids[0], pol, ctx, spine && pol == 1),
                     rw(f->kids[1], pol, ctx, spine && pol == 1));
      case Kind::Or:
        return s_or(rw(f->kids[0], pol, ctx, false), rw(f->kids[1], pol, ctx, false));
      case Kind::Implies:
        return s_implies(rw(f->kids[0], -pol, ctx, false),
                         rw(f->kids[1], pol, ctx, false));
      case Kind::Iff:
        return mk_iff(rw(f->kids[0], 0, ctx, false), rw(f->kids[1], 0, ctx, false));
      case Kind::Forall:
        return rw_forall(f, pol, ctx, spine);
      case Kind::Count:
        return rw_count(f, pol, ctx);
      case Kind::Exists:
        throw std::logic_error("desugar left an Exists");
    }
    return f;
  }

  bool mentions(const FormulaPtr& atom, const std::string& v) {
    for (const auto& t : atom->args)
      if (t.is_var && t.name == v) return true;
    return false;
  }

  // Recognizes a guarded universal body in any of the clause shapes
  //   gamma -> rho, !gamma, !gamma | rho1 | ..., rho0 | !gamma | ...
  // where gamma is a binary atom mentioning v. Returns (gamma, rho).
  std::optional<std::pair<FormulaPtr, FormulaPtr>> split_guarded(
      const FormulaPtr& body, const std::string& v) {
    auto guard_ok = [&](const FormulaPtr& g) {
      return g->kind == Kind::Atom && is_guard_atom(g) && mentions(g, v);
    };
    if (body->kind == Kind::Implies && guard_ok(body->kids[0]))
      return std::make_pair(body->kids[0], body->kids[1]);
    if (body->kind == Kind::Not && guard_ok(body->kids[0]))
      return std::make_pair(body->kids[0], mk_false());
    if (body->kind == Kind::Or) {
      std::vector<FormulaPtr> parts;
      std::function<void(const FormulaPtr&)> flat = [&](const FormulaPtr& f) {
        if (f->kind == Kind::Or) {
          flat(f->kids[0]);
          flat(f->kids[1]);
          return;
        }
        parts.push_back(f);
      };
      flat(body);
      for (size_t i = 0; i < parts.size(); ++i) {
        if (parts[i]->kind == Kind::Not && guard_ok(parts[i]->kids[0])) {
          FormulaPtr rho = mk_false();
          for (size_t j = 0; j < parts.size(); ++j)
            if (j != i) rho = s_or(rho, parts[j]);
          return std::make_pair(parts[i]->kids[0], rho);
        }
        if (parts[i]->kind == Kind::Implies && guard_ok(parts[i]->kids[0])) {
          FormulaPtr rho = parts[i]->kids[1];
          for (size_t j = 0; j < parts.size(); ++j)
            if (j != i) rho = s_or(rho, parts[j]);
          return std::make_pair(parts[i]->kids[0], rho);
        }
      }
    }
    return std::nullopt;
  }

  // forall u forall v phi(u,v): matrix conjunct plus diagonal instance.
  void emit_forall2(const FormulaPtr& oriented) {
    cx.emit_beta(oriented);
    cx.emit_chi(resolve_equalities_distinct(substitute_var(oriented, "y", var("x"))));
  }

  std::string rename_for(const FormulaPtr& psi_uv, const FormulaPtr& guard_uv, long k,
                         int need, const std::string& u, const std::string& v) {
    auto psi = resolve_equalities_distinct(orient_to_xy(psi_uv, u, v));
    FormulaPtr guard;
    if (guard_uv) guard = orient_to_xy(guard_uv, u, v);
    return cx.rename_exists(psi, guard, k, need);
  }

  FormulaPtr rw_forall(const FormulaPtr& f, int pol, const std::string& ctx,
                       bool spine) {
    const std::string& v = f->qvar;
    const FormulaPtr& body = f->kids[0];
    auto fv = free_vars(body);
    fv.erase(v);

    // forall v (v=u -> rho) == rho[v:=u]
    if (body->kind == Kind::Implies && body->kids[0]->kind == Kind::Equal &&
        is_guard_atom(body->kids[0]) && mentions(body->kids[0], v)) {
      const auto& g = body->kids[0];
      std::string u = g->args[0].name == v ? g->args[1].name : g->args[0].name;
      return rw(substitute_var(body->kids[1], v, var(u)), pol, ctx, false);
    }

    if (fv.empty()) {
      if (pol == 1 && spine) {
        auto inner = rw(body, 1, v, true);
        cx.emit_chi(substitute_var(inner, v, var("x")));
        return mk_true();
      }
      auto count = mk_count(CountKind::Geq, 1, v, s_not(body));
      return s_not(rw_count(count, -pol, ctx));
    }

    // guarded universal: forall v (gamma -> rho), including clause shapes
    if (cx.gc2) {
      if (auto split = split_guarded(body, v)) {
        const auto& [gamma, rho0] = *split;
        std::string u = *fv.begin();
        if (pol == 1 && spine) {
          auto rho = rw(rho0, 1, v, false);
          emit_guard_forall(gamma, rho, u, v);
          return mk_true();
        }
        auto count = mk_count(CountKind::Geq, 1, v, s_and(gamma, s_not(rho0)));
        return s_not(rw_count(count, -pol, ctx));
      }
      throw UnsupportedShape("unguarded universal over a two-variable body");
    }

    std::string u = *fv.begin();
    if (pol == 1 && spine) {
      auto rho = rw(body, 1, v, true);
      emit_forall2(resolve_equalities_distinct(orient_to_xy(rho, u, v)));
      return mk_true();
    }
    // forall v psi == psi[v:=u] & !E1(!psi)
    auto psi = rw(body, pol, v, false);
    auto diag = resolve_equalities_distinct(substitute_var(psi, v, var(u)));
    auto q = rename_for(s_not(psi), nullptr, 1, -pol, u, v);
    return s_and(diag, s_not(cx.q_atom(q, u)));
  }

  // Emits forall u forall v (gamma(u,v) -> rho(u,v)) as a guard clause in the
  // clause's own orientation, plus the diagonal one-variable instance.
  void emit_guard_forall(const FormulaPtr& gamma, const FormulaPtr& rho,
                         const std::string& u, const std::string& v) {
    auto oriented_gamma = orient_to_xy(gamma, u, v);
    auto oriented_rho = resolve_equalities_distinct(orient_to_xy(rho, u, v));
    if (oriented_gamma->args[0].name == "x") {
      cx.emit_clause(oriented_gamma->pred, oriented_rho);
    } else {
      cx.emit_clause(oriented_gamma->pred, swap_xy(oriented_rho));
    }
    // diagonal: gamma(u,u) -> rho[v:=u]
    auto diag = s_implies(substitute_var(gamma, v, var(u)),
                          substitute_var(rho, v, var(u)));
    cx.emit_chi(resolve_equalities_distinct(
        u == "x" ? diag : substitute_var(diag, u, var("x"))));
  }

  FormulaPtr rw_count(const FormulaPtr& f, int pol, const std::string& ctx = "") {
    const std::string& v = f->qvar;
    long k = f->bound;
    assert(f->ck == CountKind::Geq && k >= 1);
    const FormulaPtr& body = f->kids[0];
    auto fv = free_vars(body);
    fv.erase(v);
    if (fv.size() > 1)
      throw UnsupportedShape("counting quantifier with too many free variables");

    // Equality guard: exists>=k v (v=u & rho)
    {
      FormulaPtr g = body->kind == Kind::And ? body->kids[0] : body;
      if (g->kind == Kind::Equal && is_guard_atom(g) && mentions(g, v)) {
        std::string u = g->args[0].name == v ? g->args[1].name : g->args[0].name;
        if (k >= 2) return mk_false();
        FormulaPtr rho = body->kind == Kind::And ? body->kids[1] : mk_true();
        return rw(substitute_var(rho, v, var(u)), pol, ctx, false);
      }
    }

    std::string u;
    if (!fv.empty())
      u = *fv.begin();
    else
      u = ctx.empty() || ctx == v ? other_var(v) : ctx;

    FormulaPtr guard;
    if (cx.gc2) {
      FormulaPtr g = body->kind == Kind::And ? body->kids[0] : body;
      if (g->kind == Kind::Atom && is_guard_atom(g) && mentions(g, v))
        guard = g;
      else if (!fv.empty())
        throw UnsupportedShape("unguarded counting over a two-variable body");
    }

    auto psi = rw(body, pol, v, false);
    auto diag = resolve_equalities_distinct(substitute_var(psi, v, var(u)));
    FormulaPtr left;
    if (k == 1) {
      left = diag;
    } else {
      auto qk1 = rename_for(psi, guard, k - 1, pol, u, v);
      left = s_and(diag, cx.q_atom(qk1, u));
    }
    auto qk = rename_for(psi, guard, k, pol, u, v);
    auto piece = s_or(left, cx.q_atom(qk, u));
    if (!fv.empty()) return piece;
    if (!ctx.empty() && ctx != u) return substitute_var(piece, u, var(ctx));
    return piece;
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// Top-level sentence splitting
// ---------------------------------------------------------------------------

namespace {

// forall x exists=C y (f(x,y) & !(x=y)), up to conjunct order and equality
// orientation.
bool match_counting_conjunct(const FormulaPtr& f, std::string* pred, long* C) {
  if (f->kind != Kind::Forall) return false;
  const auto& q = f->kids[0];
  if (q->kind != Kind::Count || q->ck != CountKind::Eq || q->bound < 1) return false;
  if (q->qvar == f->qvar) return false;
  const auto& body = q->kids[0];
  if (body->kind != Kind::And) return false;
  auto check = [&](const FormulaPtr& at, const FormulaPtr& ne) -> bool {
    if (at->kind != Kind::Atom || at->args.size() != 2) return false;
    if (!(at->args[0] == var(f->qvar) && at->args[1] == var(q->qvar))) return false;
    if (ne->kind != Kind::Not || ne->kids[0]->kind != Kind::Equal) return false;
    const auto& e = ne->kids[0];
    bool ok = (e->args[0] == var(f->qvar) && e->args[1] == var(q->qvar)) ||
              (e->args[0] == var(q->qvar) && e->args[1] == var(f->qvar));
    if (!ok) return false;
    *pred = at->pred;
    *C = q->bound;
    return true;
  };
  return check(body->kids[0], body->kids[1]) || check(body->kids[1], body->kids[0]);
}

// forall x forall y (alpha | x = y)
bool match_alpha_block(const FormulaPtr& f, FormulaPtr* alpha) {
  if (f->kind != Kind::Forall) return false;
  const auto& g = f->kids[0];
  if (g->kind != Kind::Forall || g->qvar == f->qvar) return false;
  const auto& body = g->kids[0];
  if (body->kind != Kind::Or) return false;
  auto is_eq = [&](const FormulaPtr& e) {
    return e->kind == Kind::Equal && e->args[0].is_var && e->args[1].is_var &&
           !(e->args[0] == e->args[1]);
  };
  FormulaPtr a;
  if (is_eq(body->kids[1]) && is_qf(body->kids[0]))
    a = body->kids[0];
  else if (is_eq(body->kids[0]) && is_qf(body->kids[1]))
    a = body->kids[1];
  else
    return false;
  *alpha = orient_to_xy(a, f->qvar, g->qvar);
  return true;
}

// forall x forall y (e(x,y) -> (beta | x = y))
bool match_guard_clause(const FormulaPtr& f, std::string* guard, FormulaPtr* beta) {
  if (f->kind != Kind::Forall) return false;
  const auto& g = f->kids[0];
  if (g->kind != Kind::Forall || g->qvar == f->qvar) return false;
  const auto& body = g->kids[0];
  if (body->kind != Kind::Implies) return false;
  const auto& e = body->kids[0];
  if (e->kind != Kind::Atom || e->args.size() != 2) return false;
  if (!(e->args[0] == var(f->qvar) && e->args[1] == var(g->qvar))) return false;
  const auto& rhs = body->kids[1];
  if (!is_qf(rhs)) return false;
  if (rhs->kind != Kind::Or || rhs->kids[1]->kind != Kind::Equal) return false;
  *guard = e->pred;
  *beta = orient_to_xy(rhs->kids[0], f->qvar, g->qvar);
  return true;
}

struct UnitCollector {
  ScottCtx& cx;
  std::set<std::string> counting_preds_seen;

  void collect(const FormulaPtr& raw) {
    if (raw->kind == Kind::And) {
      collect(raw->kids[0]);
      collect(raw->kids[1]);
      return;
    }
    std::string pred, guard;
    long C;
    FormulaPtr alpha, beta;
    if (match_counting_conjunct(raw, &pred, &C) && !counting_preds_seen.count(pred)) {
      counting_preds_seen.insert(pred);
      cx.counting.push_back({pred, C});
      return;
    }
    if (!cx.gc2 && match_alpha_block(raw, &alpha)) {
      cx.emit_beta(alpha);
      return;
    }
    if (cx.gc2 && match_guard_clause(raw, &guard, &beta)) {
      cx.emit_clause(guard, beta);
      return;
    }
    auto f = desugar(raw);
    Rewriter rwr{cx};
    auto top = rwr.rw(f, 1, "", true);
    top = resolve_equalities_distinct(top);
    auto fv = free_vars(top);
    if (fv.empty()) {
      if (top->kind == Kind::False) cx.chi.push_back(mk_false());
      return;
    }
    if (fv.size() == 1) {
      std::string v = *fv.begin();
      cx.emit_chi(v == "x" ? top : substitute_var(top, v, var("x")));
      return;
    }
    if (cx.gc2)
      throw UnsupportedShape("two free variables at the top of a GC2 sentence");
    cx.emit_beta(top);
    cx.emit_chi(resolve_equalities_distinct(substitute_var(top, "y", var("x"))));
  }
};

FormulaPtr conjoin(const std::vector<FormulaPtr>& fs) {
  if (fs.empty()) return mk_true();
  FormulaPtr acc = fs[0];
  for (size_t i = 1; i < fs.size(); ++i) acc = s_and(acc, fs[i]);
  return acc;
}

}  // namespace

// ---------------------------------------------------------------------------
// scott_c2 / scott_gc2 / fold
// ---------------------------------------------------------------------------

NormalTheoryC2 scott_c2(const FormulaPtr& phi) {
  if (auto v = check_fragment(phi, Fragment::C2))
    throw FragmentViolationError(v->reason);
  ScottCtx cx;
  cx.gc2 = false;
  auto base = signature_of(phi);
  cx.used_names.insert(base.unary.begin(), base.unary.end());
  cx.used_names.insert(base.binary.begin(), base.binary.end());

  UnitCollector uc{cx, {}};
  uc.collect(phi);

  NormalTheoryC2 t;
  t.original = phi;
  t.one_var = conjoin(cx.chi);
  FormulaPtr alpha = conjoin(cx.beta);
  if (t.one_var->kind != Kind::True) alpha = s_and(t.one_var, alpha);
  t.alpha = alpha;
  t.counting = cx.counting;
  long maxC = 0;
  for (const auto& [p, c] : t.counting) maxC = std::max(maxC, c);
  t.C = std::max(1L, maxC);
  t.sigma = signature_of(phi);
  t.sigma.merge(signature_of(t.alpha));
  for (const auto& [p, c] : t.counting) t.sigma.binary.insert(p);
  t.sigma.constants.clear();
  return t;
}

NormalTheoryGC2 scott_gc2(const FormulaPtr& phi) {
  if (auto v = check_fragment(phi, Fragment::GC2))
    throw FragmentViolationError(v->reason);
  ScottCtx cx;
  cx.gc2 = true;
  auto base = signature_of(phi);
  cx.used_names.insert(base.unary.begin(), base.unary.end());
  cx.used_names.insert(base.binary.begin(), base.binary.end());

  UnitCollector uc{cx, {}};
  uc.collect(phi);

  NormalTheoryGC2 t;
  t.original = phi;
  t.alpha1 = conjoin(cx.chi);
  t.guards = cx.gcls;
  t.counting = cx.counting;
  long maxC = 0;
  for (const auto& [p, c] : t.counting) maxC = std::max(maxC, c);
  t.C = std::max(1L, maxC);
  t.sigma = signature_of(phi);
  t.sigma.merge(signature_of(t.alpha1));
  for (const auto& g : t.guards) {
    t.sigma.binary.insert(g.guard);
    t.sigma.merge(signature_of(g.beta));
  }
  for (const auto& [p, c] : t.counting) t.sigma.binary.insert(p);
  t.sigma.constants.clear();
  return t;
}

NormalTheoryC2 fold_gc2_to_c2(const NormalTheoryGC2& t) {
  NormalTheoryC2 out;
  out.original = t.original;
  out.one_var = t.alpha1;
  FormulaPtr alpha = t.alpha1->kind == Kind::True
                         ? mk_true()
                         : s_and(t.alpha1, swap_xy(t.alpha1));
  for (const auto& g : t.guards) {
    auto e_xy = mk_atom(g.guard, {var("x"), var("y")});
    auto e_yx = mk_atom(g.guard, {var("y"), var("x")});
    alpha = s_and(alpha, s_implies(e_xy, g.beta));
    alpha = s_and(alpha, s_implies(e_yx, swap_xy(g.beta)));
  }
  out.alpha = alpha;
  out.counting = t.counting;
  out.C = t.C;
  out.sigma = t.sigma;
  return out;
}

// ---------------------------------------------------------------------------
// phi* rendering and the small-model branch
// ---------------------------------------------------------------------------

static FormulaPtr counting_conjunct(const std::string& f, long C) {
  auto fat = mk_atom(f, {var("x"), var("y")});
  auto ne = mk_not(mk_equal(var("x"), var("y")));
  return mk_forall("x", mk_count(CountKind::Eq, C, "y", mk_and(fat, ne)));
}

FormulaPtr NormalTheoryC2::phi_star() const {
  auto eq = mk_equal(var("x"), var("y"));
  FormulaPtr out = mk_forall("x", mk_forall("y", mk_or(alpha, eq)));
  for (const auto& [f, c] : counting) out = mk_and(out, counting_conjunct(f, c));
  return out;
}

FormulaPtr NormalTheoryGC2::phi_star() const {
  FormulaPtr out = mk_forall("x", alpha1);
  auto eq = mk_equal(var("x"), var("y"));
  for (const auto& g : guards) {
    auto e_xy = mk_atom(g.guard, {var("x"), var("y")});
    out = mk_and(out,
                 mk_forall("x", mk_forall("y", mk_implies(e_xy, mk_or(g.beta, eq)))));
  }
  for (const auto& [f, c] : counting) out = mk_and(out, counting_conjunct(f, c));
  return out;
}

SmallModelResult small_model_check(const FormulaPtr& phi, const Dataset& delta, long C,
                                   SearchBudget budget) {
  auto r = find_model({phi}, delta, 1, (int)C, budget);
  if (std::holds_alternative<Structure>(r)) return std::get<Structure>(r);
  if (std::holds_alternative<NoneWithin>(r)) return std::get<NoneWithin>(r);
  return std::get<BudgetExceeded>(r);
}

}  // namespace c2data

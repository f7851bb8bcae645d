#include "c2data/typespace.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <sstream>

namespace c2data {

int SignatureStar::unary_index(const std::string& p) const {
  for (size_t i = 0; i < unary_order.size(); ++i)
    if (unary_order[i] == p) return (int)i;
  throw UnknownSymbol(p);
}

int SignatureStar::binary_index(const std::string& p) const {
  for (size_t i = 0; i < binary_order.size(); ++i)
    if (binary_order[i] == p) return (int)i;
  throw UnknownSymbol(p);
}

bool SignatureStar::is_counting(int bi) const {
  const std::string& p = binary_order[bi];
  return std::find(counting_preds.begin(), counting_preds.end(), p) !=
         counting_preds.end();
}

SignatureStar SignatureStar::make(const NormalTheoryC2& t, int padding_override) {
  SignatureStar s;
  s.base = t.sigma;
  long m = (long)t.counting.size();
  long mc = m * t.C;
  s.Z = (mc + 1) * (mc + 1);
  int cb = 0;
  while ((1L << cb) < s.Z) ++cb;
  if (padding_override >= 0) cb = padding_override;
  s.color_bits = cb;
  for (const auto& [p, c] : t.counting) {
    s.counting_preds.push_back(p);
    s.counting_bounds.push_back(c);
  }
  s.unary_order.assign(s.base.unary.begin(), s.base.unary.end());
  auto fresh_unary = [&](const std::string& stem, int i) {
    std::string name = stem + std::to_string(i);
    while (s.base.unary.count(name) || s.base.binary.count(name)) name = "_" + name;
    return name;
  };
  for (int i = 0; i < 2 * cb; ++i) {
    s.padding.push_back(fresh_unary("_pad", i));
    s.unary_order.push_back(s.padding.back());
  }
  {
    std::string o = "_obs";
    while (s.base.unary.count(o) || s.base.binary.count(o)) o = "_" + o;
    s.observable = o;
    s.unary_order.push_back(o);
  }
  s.binary_order.assign(s.base.binary.begin(), s.base.binary.end());
  if (s.bits() > 62) throw CapExceeded((long)s.bits());
  return s;
}

// ---------------------------------------------------------------------------
// Type algebra
// ---------------------------------------------------------------------------

TwoType invert(const TwoType& t) {
  TwoType o;
  o.tx = t.ty;
  o.ty = t.tx;
  uint64_t c = 0;
  for (int i = 0; i < 31; ++i) {
    uint64_t fwd = (t.cross >> (2 * i)) & 1;
    uint64_t bwd = (t.cross >> (2 * i + 1)) & 1;
    c |= (bwd << (2 * i)) | (fwd << (2 * i + 1));
  }
  o.cross = c;
  return o;
}

OneType tp1(const TwoType& t) { return t.tx; }
OneType tp2(const TwoType& t) { return t.ty; }

bool is_message(const SignatureStar& s, const TwoType& t) {
  for (int i = 0; i < s.b(); ++i)
    if (s.is_counting(i) && t.fwd(i)) return true;
  return false;
}

bool is_silent(const SignatureStar& s, const TwoType& t) {
  for (int i = 0; i < s.b(); ++i)
    if (s.is_counting(i) && (t.fwd(i) || t.bwd(i))) return false;
  return true;
}

bool is_vacuous(const TwoType& t) { return t.cross == 0; }

TwoTypeClass classify(const SignatureStar& s, const TwoType& t) {
  bool fwd = is_message(s, t);
  bool bwd = is_message(s, invert(t));
  if (fwd && bwd) return TwoTypeClass::InvertibleMessage;
  if (fwd || bwd) return TwoTypeClass::NonInvertibleMessage;
  return is_vacuous(t) ? TwoTypeClass::Vacuous : TwoTypeClass::SilentNonVacuous;
}

TwoType vacuous_product(const OneType& p1, const OneType& p2) {
  TwoType t;
  t.tx = p1;
  t.ty = p2;
  t.cross = 0;
  return t;
}

std::vector<OneType> enumerate_1types(const SignatureStar& s, long cap) {
  int nb = s.bits();
  if (nb > 40 || (1L << nb) > cap) throw CapExceeded(nb > 40 ? -1 : (1L << nb));
  std::vector<OneType> out;
  out.reserve((size_t)1 << nb);
  for (uint64_t v = 0; v < (1ULL << nb); ++v) out.push_back(OneType{v});
  return out;
}

std::vector<std::string> one_type_literals(const SignatureStar& s, const OneType& t) {
  std::vector<std::string> out;
  for (int i = 0; i < s.u(); ++i)
    out.push_back(std::string(t.get_unary(s, i) ? "" : "!") + s.unary_order[i] + "(x)");
  for (int i = 0; i < s.b(); ++i)
    out.push_back(std::string(t.get_self(s, i) ? "" : "!") + s.binary_order[i] +
                  "(x,x)");
  return out;
}

std::vector<std::string> two_type_literals(const SignatureStar& s, const TwoType& t) {
  std::vector<std::string> out;
  for (int i = 0; i < s.u(); ++i)
    out.push_back(std::string(t.tx.get_unary(s, i) ? "" : "!") + s.unary_order[i] +
                  "(x)");
  for (int i = 0; i < s.u(); ++i)
    out.push_back(std::string(t.ty.get_unary(s, i) ? "" : "!") + s.unary_order[i] +
                  "(y)");
  for (int i = 0; i < s.b(); ++i) {
    out.push_back(std::string(t.tx.get_self(s, i) ? "" : "!") + s.binary_order[i] +
                  "(x,x)");
    out.push_back(std::string(t.ty.get_self(s, i) ? "" : "!") + s.binary_order[i] +
                  "(y,y)");
    out.push_back(std::string(t.fwd(i) ? "" : "!") + s.binary_order[i] + "(x,y)");
    out.push_back(std::string(t.bwd(i) ? "" : "!") + s.binary_order[i] + "(y,x)");
  }
  return out;
}

std::string one_type_str(const SignatureStar& s, const OneType& t) {
  std::string out;
  for (const auto& l : one_type_literals(s, t)) {
    if (!out.empty()) out += " ";
    out += l;
  }
  return out;
}

std::string two_type_str(const SignatureStar& s, const TwoType& t) {
  std::string out;
  for (const auto& l : two_type_literals(s, t)) {
    if (!out.empty()) out += " ";
    out += l;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Star-types
// ---------------------------------------------------------------------------

bool star_invariant_ok(const SignatureStar& s, const StarType& st) {
  for (const auto& [mu, n] : st.counts) {
    if (!(n > ExtNat(0))) return false;
    if (!is_message(s, mu)) return false;
    if (!(tp1(mu) == st.pi)) return false;
  }
  return true;
}

bool star_bounded(const StarType& st, long D) {
  for (const auto& [mu, n] : st.counts)
    if (n > ExtNat((unsigned long)D)) return false;
  return true;
}

bool star_chromatic(const SignatureStar& s, const StarType& st) {
  std::map<OneType, ExtNat> inv_sum;
  for (const auto& [mu, n] : st.counts) {
    if (classify(s, mu) == TwoTypeClass::InvertibleMessage) {
      auto& acc = inv_sum[tp2(mu)];
      acc = acc + n;
    }
  }
  for (const auto& [pi2, c] : inv_sum) {
    if (c > ExtNat(1)) return false;
    if (pi2 == st.pi && c > ExtNat(0)) return false;
  }
  return true;
}

bool star_observable(const SignatureStar& s, const StarType& st) {
  return st.pi.get_unary(s, s.unary_index(s.observable));
}

OneType one_type_of(const Structure& A, const SignatureStar& s, int a) {
  OneType t;
  for (int i = 0; i < s.u(); ++i)
    if (A.get1(s.unary_order[i], a)) t.bits |= 1ULL << i;
  for (int i = 0; i < s.b(); ++i)
    if (A.get2(s.binary_order[i], a, a)) t.bits |= 1ULL << (s.u() + i);
  return t;
}

TwoType two_type_of(const Structure& A, const SignatureStar& s, int a, int b) {
  TwoType t;
  t.tx = one_type_of(A, s, a);
  t.ty = one_type_of(A, s, b);
  for (int i = 0; i < s.b(); ++i) {
    if (A.get2(s.binary_order[i], a, b)) t.cross |= 1ULL << (2 * i);
    if (A.get2(s.binary_order[i], b, a)) t.cross |= 1ULL << (2 * i + 1);
  }
  return t;
}

void set_two_type(Structure& A, const SignatureStar& s, int a, int b, const TwoType& t) {
  assert(a != b);
  for (int i = 0; i < s.b(); ++i) {
    A.set2(s.binary_order[i], a, b, t.fwd(i));
    A.set2(s.binary_order[i], b, a, t.bwd(i));
  }
}

StarType star_of(const Structure& A, int a, const SignatureStar& s) {
  StarType st;
  st.pi = one_type_of(A, s, a);
  for (int b = 0; b < A.n; ++b) {
    if (b == a) continue;
    TwoType t = two_type_of(A, s, a, b);
    if (is_message(s, t)) {
      auto& c = st.counts[t];
      c = c + ExtNat(1);
    }
  }
  return st;
}

// ---------------------------------------------------------------------------
// Chromatic / differentiated
// ---------------------------------------------------------------------------

static std::vector<std::vector<int>> invertible_neighbors(const Structure& A,
                                                          const SignatureStar& s) {
  std::vector<std::vector<int>> nb(A.n);
  for (int a = 0; a < A.n; ++a)
    for (int b = a + 1; b < A.n; ++b) {
      TwoType t = two_type_of(A, s, a, b);
      if (classify(s, t) == TwoTypeClass::InvertibleMessage) {
        nb[a].push_back(b);
        nb[b].push_back(a);
      }
    }
  return nb;
}

bool is_chromatic(const Structure& A, const SignatureStar& s) {
  auto nb = invertible_neighbors(A, s);
  std::vector<OneType> tp(A.n);
  for (int a = 0; a < A.n; ++a) tp[a] = one_type_of(A, s, a);
  for (int a = 0; a < A.n; ++a) {
    for (int b : nb[a]) {
      if (tp[a] == tp[b]) return false;
      for (int c : nb[b])
        if (c != a && tp[a] == tp[c]) return false;
    }
  }
  return true;
}

bool is_differentiated(const Structure& A, const SignatureStar& s) {
  std::map<OneType, long> counts;
  for (int a = 0; a < A.n; ++a) counts[one_type_of(A, s, a)]++;
  for (const auto& [t, u] : counts)
    if (u > 1 && u <= s.Z) return false;
  return true;
}

Structure recolor(const Structure& A, const SignatureStar& s) {
  Structure B = A;
  for (const auto& p : s.padding)
    if (!B.unary.count(p)) B.unary[p] = std::vector<uint8_t>(B.n, 0);
  if (!B.unary.count(s.observable))
    B.unary[s.observable] = std::vector<uint8_t>(B.n, 0);

  int cb = s.color_bits;
  auto nb = invertible_neighbors(B, s);
  std::vector<std::vector<int>> conflict(B.n);
  for (int a = 0; a < B.n; ++a) {
    for (int b : nb[a]) {
      conflict[a].push_back(b);
      for (int c : nb[b])
        if (c != a) conflict[a].push_back(c);
    }
  }
  std::vector<int> color(B.n, -1);
  long max_color = 0;
  for (int a = 0; a < B.n; ++a) {
    std::set<int> used;
    for (int b : conflict[a])
      if (color[b] >= 0) used.insert(color[b]);
    int c = 0;
    while (used.count(c)) ++c;
    color[a] = c;
    max_color = std::max(max_color, (long)c);
  }
  if (cb < 62 && max_color >= (1L << cb))
    throw ColoringFailure("not enough padding bits for the conflict colouring");
  for (int a = 0; a < B.n; ++a)
    for (int i = 0; i < cb; ++i)
      B.unary[s.padding[i]][a] = (uint8_t)((color[a] >> i) & 1);

  std::map<OneType, std::vector<int>> classes;
  for (int a = 0; a < B.n; ++a) classes[one_type_of(B, s, a)].push_back(a);
  for (const auto& [t, elems] : classes) {
    long u = (long)elems.size();
    if (u <= 1 || u > s.Z) continue;
    if (cb < 62 && u > (1L << cb))
      throw ColoringFailure("not enough padding bits for differentiation tags");
    for (size_t k = 0; k < elems.size(); ++k)
      for (int i = 0; i < cb; ++i)
        B.unary[s.padding[cb + i]][elems[k]] = (uint8_t)((k >> i) & 1);
  }

  if (!is_chromatic(B, s)) throw ColoringFailure("result is not chromatic");
  if (!is_differentiated(B, s)) throw ColoringFailure("result is not differentiated");
  return B;
}

// ---------------------------------------------------------------------------
// Star pool enumeration
// ---------------------------------------------------------------------------

std::vector<StarType> enumerate_star_pool(const SignatureStar& s, long C,
                                          StarFilters filters, long cap) {
  auto pis = enumerate_1types(s, cap);
  long m = (long)s.counting_preds.size();
  std::vector<StarType> out;

  int obs_idx = s.unary_index(s.observable);
  for (const auto& pi : pis) {
    if (filters.observable.has_value() &&
        (bool)((pi.bits >> obs_idx) & 1) != filters.observable.value())
      continue;
    if (m == 0) {
      StarType st;
      st.pi = pi;
      out.push_back(st);
      if ((long)out.size() > cap) throw CapExceeded((long)out.size());
      continue;
    }
    std::vector<TwoType> msgs;
    for (const auto& ty : pis) {
      uint64_t crossmax = 1ULL << (2 * s.b());
      for (uint64_t cr = 0; cr < crossmax; ++cr) {
        TwoType t;
        t.tx = pi;
        t.ty = ty;
        t.cross = cr;
        if (!is_message(s, t)) continue;
        msgs.push_back(t);
        if ((long)msgs.size() > cap) throw CapExceeded(4 * (long)msgs.size());
      }
    }
    std::vector<long> counts(msgs.size(), 0);
    std::function<void(size_t)> go = [&](size_t i) {
      if (i == msgs.size()) {
        StarType st;
        st.pi = pi;
        for (size_t j = 0; j < msgs.size(); ++j)
          if (counts[j] > 0) st.counts[msgs[j]] = ExtNat((unsigned long)counts[j]);
        if (filters.chromatic && !star_chromatic(s, st)) return;
        out.push_back(st);
        if ((long)out.size() > cap) throw CapExceeded((long)out.size());
        return;
      }
      for (long c = 0; c <= C; ++c) {
        counts[i] = c;
        go(i + 1);
      }
      counts[i] = 0;
    };
    go(0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Formula evaluation under types
// ---------------------------------------------------------------------------

static bool eval_type_rec(const SignatureStar& s, const Formula* f, const TwoType& t) {
  switch (f->kind) {
    case Kind::True: return true;
    case Kind::False: return false;
    case Kind::Atom: {
      if (f->args.size() == 1) {
        bool on_x = f->args[0].name == "x";
        int i = s.unary_index(f->pred);
        return on_x ? (t.tx.bits >> i) & 1 : (t.ty.bits >> i) & 1;
      }
      int i = s.binary_index(f->pred);
      bool a_x = f->args[0].name == "x";
      bool b_x = f->args[1].name == "x";
      if (a_x && b_x) return (t.tx.bits >> (s.u() + i)) & 1;
      if (!a_x && !b_x) return (t.ty.bits >> (s.u() + i)) & 1;
      if (a_x && !b_x) return t.fwd(i);
      return t.bwd(i);
    }
    case Kind::Equal:
      return f->args[0] == f->args[1];
    case Kind::Not: return !eval_type_rec(s, f->kids[0].get(), t);
    case Kind::And:
      return eval_type_rec(s, f->kids[0].get(), t) &&
             eval_type_rec(s, f->kids[1].get(), t);
    case Kind::Or:
      return eval_type_rec(s, f->kids[0].get(), t) ||
             eval_type_rec(s, f->kids[1].get(), t);
    case Kind::Implies:
      return !eval_type_rec(s, f->kids[0].get(), t) ||
             eval_type_rec(s, f->kids[1].get(), t);
    case Kind::Iff:
      return eval_type_rec(s, f->kids[0].get(), t) ==
             eval_type_rec(s, f->kids[1].get(), t);
    default:
      throw std::logic_error("quantifier under a 2-type evaluation");
  }
}

bool eval_under_two_type(const SignatureStar& s, const FormulaPtr& f, const TwoType& t) {
  return eval_type_rec(s, f.get(), t);
}

bool eval_under_one_type(const SignatureStar& s, const FormulaPtr& f, const OneType& t) {
  TwoType tt;
  tt.tx = t;
  tt.ty = t;
  tt.cross = 0;
  return eval_type_rec(s, f.get(), tt);
}

}  // namespace c2data

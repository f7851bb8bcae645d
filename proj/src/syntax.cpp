#include "c2data/syntax.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <functional>
#include <sstream>

namespace c2data {

void Signature::merge(const Signature& other) {
  unary.insert(other.unary.begin(), other.unary.end());
  binary.insert(other.binary.begin(), other.binary.end());
  constants.insert(other.constants.begin(), other.constants.end());
}

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

static FormulaPtr node(Kind k) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  return f;
}

FormulaPtr mk_true() { return node(Kind::True); }
FormulaPtr mk_false() { return node(Kind::False); }

FormulaPtr mk_atom(std::string pred, std::vector<Term> args, SrcSpan s) {
  auto f = std::make_shared<Formula>();
  f->kind = Kind::Atom;
  f->pred = std::move(pred);
  f->args = std::move(args);
  f->span = s;
  return f;
}

FormulaPtr mk_equal(Term a, Term b, SrcSpan s) {
  auto f = std::make_shared<Formula>();
  f->kind = Kind::Equal;
  f->args = {std::move(a), std::move(b)};
  f->span = s;
  return f;
}

static FormulaPtr binop(Kind k, FormulaPtr a, FormulaPtr b) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->kids = {std::move(a), std::move(b)};
  return f;
}

FormulaPtr mk_not(FormulaPtr g) {
  auto f = std::make_shared<Formula>();
  f->kind = Kind::Not;
  f->kids = {std::move(g)};
  return f;
}

FormulaPtr mk_and(FormulaPtr a, FormulaPtr b) { return binop(Kind::And, std::move(a), std::move(b)); }
FormulaPtr mk_or(FormulaPtr a, FormulaPtr b) { return binop(Kind::Or, std::move(a), std::move(b)); }
FormulaPtr mk_implies(FormulaPtr a, FormulaPtr b) { return binop(Kind::Implies, std::move(a), std::move(b)); }
FormulaPtr mk_iff(FormulaPtr a, FormulaPtr b) { return binop(Kind::Iff, std::move(a), std::move(b)); }

FormulaPtr mk_forall(std::string v, FormulaPtr body) {
  auto f = std::make_shared<Formula>();
  f->kind = Kind::Forall;
  f->qvar = std::move(v);
  f->kids = {std::move(body)};
  return f;
}

FormulaPtr mk_exists(std::string v, FormulaPtr body) {
  auto f = std::make_shared<Formula>();
  f->kind = Kind::Exists;
  f->qvar = std::move(v);
  f->kids = {std::move(body)};
  return f;
}

FormulaPtr mk_count(CountKind ck, long bound, std::string v, FormulaPtr body) {
  auto f = std::make_shared<Formula>();
  f->kind = Kind::Count;
  f->ck = ck;
  f->bound = bound;
  f->qvar = std::move(v);
  f->kids = {std::move(body)};
  return f;
}

FormulaPtr mk_and_all(const std::vector<FormulaPtr>& fs) {
  if (fs.empty()) return mk_true();
  FormulaPtr acc = fs[0];
  for (size_t i = 1; i < fs.size(); ++i) acc = mk_and(acc, fs[i]);
  return acc;
}

FormulaPtr mk_or_all(const std::vector<FormulaPtr>& fs) {
  if (fs.empty()) return mk_false();
  FormulaPtr acc = fs[0];
  for (size_t i = 1; i < fs.size(); ++i) acc = mk_or(acc, fs[i]);
  return acc;
}

// ---------------------------------------------------------------------------
// Rendering.  Precedence: ! > & > | > -> (right-assoc) > <->.
// ---------------------------------------------------------------------------

static int prec_of(Kind k) {
  switch (k) {
    case Kind::Iff: return 1;
    case Kind::Implies: return 2;
    case Kind::Or: return 3;
    case Kind::And: return 4;
    case Kind::Not: return 5;
    default: return 6;
  }
}

static void render_rec(const FormulaPtr& f, int parent_prec, std::ostream& os) {
  int p = prec_of(f->kind);
  switch (f->kind) {
    case Kind::True: os << "true"; return;
    case Kind::False: os << "false"; return;
    case Kind::Atom: {
      os << f->pred << "(";
      for (size_t i = 0; i < f->args.size(); ++i) {
        if (i) os << ",";
        os << f->args[i].name;
      }
      os << ")";
      return;
    }
    case Kind::Equal:
      if (parent_prec > 0) os << "(";
      os << f->args[0].name << " = " << f->args[1].name;
      if (parent_prec > 0) os << ")";
      return;
    case Kind::Not:
      os << "!";
      render_rec(f->kids[0], p + 1, os);
      return;
    case Kind::And:
    case Kind::Or:
    case Kind::Implies:
    case Kind::Iff: {
      const char* op = f->kind == Kind::And ? " & "
                     : f->kind == Kind::Or ? " | "
                     : f->kind == Kind::Implies ? " -> " : " <-> ";
      bool paren = p < parent_prec || (f->kind == Kind::Implies && parent_prec == p);
      if (paren) os << "(";
      render_rec(f->kids[0], p + 1, os);
      os << op;
      render_rec(f->kids[1], f->kind == Kind::Implies ? p : p + 1, os);
      if (paren) os << ")";
      return;
    }
    case Kind::Forall:
    case Kind::Exists:
    case Kind::Count: {
      if (parent_prec > 0) os << "(";
      if (f->kind == Kind::Forall) {
        os << "forall " << f->qvar << ". ";
      } else if (f->kind == Kind::Exists) {
        os << "exists " << f->qvar << ". ";
      } else {
        os << "exists"
           << (f->ck == CountKind::Geq ? ">=" : f->ck == CountKind::Leq ? "<=" : "=")
           << f->bound << " " << f->qvar << ". ";
      }
      render_rec(f->kids[0], 0, os);
      if (parent_prec > 0) os << ")";
      return;
    }
  }
}

std::string render(const FormulaPtr& f) {
  std::ostringstream os;
  render_rec(f, 0, os);
  return os.str();
}

bool formula_equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a->kind != b->kind) return false;
  if (a->pred != b->pred || a->args != b->args) return false;
  if (a->qvar != b->qvar || a->ck != b->ck || a->bound != b->bound) return false;
  if (a->kids.size() != b->kids.size()) return false;
  for (size_t i = 0; i < a->kids.size(); ++i)
    if (!formula_equal(a->kids[i], b->kids[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Variables and signatures
// ---------------------------------------------------------------------------

static void free_vars_rec(const FormulaPtr& f, std::set<std::string>& bound,
                          std::set<std::string>& out) {
  switch (f->kind) {
    case Kind::Atom:
    case Kind::Equal:
      for (const auto& t : f->args)
        if (t.is_var && !bound.count(t.name)) out.insert(t.name);
      return;
    case Kind::Forall:
    case Kind::Exists:
    case Kind::Count: {
      bool was = bound.count(f->qvar) != 0;
      bound.insert(f->qvar);
      free_vars_rec(f->kids[0], bound, out);
      if (!was) bound.erase(f->qvar);
      return;
    }
    default:
      for (const auto& k : f->kids) free_vars_rec(k, bound, out);
      return;
  }
}

std::set<std::string> free_vars(const FormulaPtr& f) {
  std::set<std::string> bound, out;
  free_vars_rec(f, bound, out);
  return out;
}

static void all_vars_rec(const FormulaPtr& f, std::set<std::string>& out) {
  if (f->kind == Kind::Atom || f->kind == Kind::Equal) {
    for (const auto& t : f->args)
      if (t.is_var) out.insert(t.name);
  }
  if (f->kind == Kind::Forall || f->kind == Kind::Exists || f->kind == Kind::Count)
    out.insert(f->qvar);
  for (const auto& k : f->kids) all_vars_rec(k, out);
}

std::set<std::string> all_vars(const FormulaPtr& f) {
  std::set<std::string> out;
  all_vars_rec(f, out);
  return out;
}

static void signature_rec(const FormulaPtr& f, Signature& sig) {
  if (f->kind == Kind::Atom) {
    if (f->args.size() == 1)
      sig.unary.insert(f->pred);
    else
      sig.binary.insert(f->pred);
    for (const auto& t : f->args)
      if (!t.is_var) sig.constants.insert(t.name);
  }
  if (f->kind == Kind::Equal) {
    for (const auto& t : f->args)
      if (!t.is_var) sig.constants.insert(t.name);
  }
  for (const auto& k : f->kids) signature_rec(k, sig);
}

Signature signature_of(const FormulaPtr& f) {
  Signature sig;
  signature_rec(f, sig);
  return sig;
}

Signature signature_of(const std::vector<FormulaPtr>& fs) {
  Signature sig;
  for (const auto& f : fs) signature_rec(f, sig);
  return sig;
}

FormulaPtr substitute_var(const FormulaPtr& f, const std::string& v, const Term& t) {
  switch (f->kind) {
    case Kind::True:
    case Kind::False:
      return f;
    case Kind::Atom:
    case Kind::Equal: {
      bool hit = false;
      for (const auto& a : f->args)
        if (a.is_var && a.name == v) hit = true;
      if (!hit) return f;
      auto g = std::make_shared<Formula>(*f);
      for (auto& a : g->args)
        if (a.is_var && a.name == v) a = t;
      return g;
    }
    case Kind::Forall:
    case Kind::Exists:
    case Kind::Count: {
      if (f->qvar == v) return f;
      auto g = std::make_shared<Formula>(*f);
      g->kids = {substitute_var(f->kids[0], v, t)};
      return g;
    }
    default: {
      auto g = std::make_shared<Formula>(*f);
      for (auto& k : g->kids) k = substitute_var(k, v, t);
      return g;
    }
  }
}

// ---------------------------------------------------------------------------
// Datasets
// ---------------------------------------------------------------------------

std::set<std::string> Dataset::constants() const {
  std::set<std::string> out;
  for (const auto& l : literals)
    for (const auto& c : l.atom.consts) out.insert(c);
  for (const auto& e : eqs) {
    out.insert(e.lhs);
    out.insert(e.rhs);
  }
  return out;
}

Signature Dataset::signature() const {
  Signature sig;
  for (const auto& l : literals) {
    if (l.atom.consts.size() == 1)
      sig.unary.insert(l.atom.pred);
    else
      sig.binary.insert(l.atom.pred);
  }
  sig.constants = constants();
  return sig;
}

std::string Dataset::render() const {
  std::ostringstream os;
  for (const auto& l : literals) {
    if (!l.positive) os << "!";
    os << l.atom.pred << "(" << l.atom.consts[0];
    if (l.atom.consts.size() == 2) os << "," << l.atom.consts[1];
    os << ")\n";
  }
  for (const auto& e : eqs)
    os << e.lhs << (e.equal ? " = " : " != ") << e.rhs << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

static std::string mk_parse_msg(int line, int col, const std::string& msg) {
  std::ostringstream os;
  os << "parse error at " << line << ":" << col << ": " << msg;
  return os.str();
}

ParseError::ParseError(int line_, int col_, std::string msg, std::vector<std::string> exp)
    : std::runtime_error(mk_parse_msg(line_, col_, msg)),
      line(line_), col(col_), expected(std::move(exp)) {}

ContradictionError::ContradictionError(GroundAtom a)
    : std::runtime_error("contradictory literals on " + a.pred), atom(std::move(a)) {}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

namespace {

enum class Tok {
  End, Ident, Number, String, LParen, RParen, Comma, Dot, Bang, Amp, Pipe,
  Arrow, DArrow, Eq, Neq, Geq, Leq, Turnstile
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  long num = 0;
  int line = 1, col = 1;
};

struct Lexer {
  const std::string& src;
  size_t pos = 0;
  int line = 1, col = 1;
  Token cur;

  explicit Lexer(const std::string& s) : src(s) { next(); }

  [[noreturn]] void fail(const std::string& msg, std::vector<std::string> exp = {}) {
    throw ParseError(cur.line, cur.col, msg, std::move(exp));
  }

  void advance(size_t n) {
    for (size_t i = 0; i < n; ++i) {
      if (pos < src.size() && src[pos] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++pos;
    }
  }

  void next() {
    for (;;) {
      while (pos < src.size() && isspace((unsigned char)src[pos])) advance(1);
      if (pos < src.size() && src[pos] == '#') {
        while (pos < src.size() && src[pos] != '\n') advance(1);
        continue;
      }
      break;
    }
    cur.line = line;
    cur.col = col;
    cur.text.clear();
    if (pos >= src.size()) {
      cur.kind = Tok::End;
      return;
    }
    char c = src[pos];
    if (isalpha((unsigned char)c) || c == '_') {
      size_t start = pos;
      while (pos < src.size() && (isalnum((unsigned char)src[pos]) || src[pos] == '_'))
        advance(1);
      cur.kind = Tok::Ident;
      cur.text = src.substr(start, pos - start);
      return;
    }
    if (isdigit((unsigned char)c)) {
      size_t start = pos;
      while (pos < src.size() && isdigit((unsigned char)src[pos])) advance(1);
      cur.kind = Tok::Number;
      cur.text = src.substr(start, pos - start);
      cur.num = std::stol(cur.text);
      return;
    }
    if (c == '"') {
      advance(1);
      size_t start = pos;
      while (pos < src.size() && src[pos] != '"') advance(1);
      if (pos >= src.size()) throw ParseError(cur.line, cur.col, "unterminated string");
      cur.kind = Tok::String;
      cur.text = src.substr(start, pos - start);
      advance(1);
      return;
    }
    if (src.compare(pos, 3, "<->") == 0) { cur.kind = Tok::DArrow; advance(3); return; }
    if (src.compare(pos, 2, "->") == 0) { cur.kind = Tok::Arrow; advance(2); return; }
    if (src.compare(pos, 2, "!=") == 0) { cur.kind = Tok::Neq; advance(2); return; }
    if (src.compare(pos, 2, ">=") == 0) { cur.kind = Tok::Geq; advance(2); return; }
    if (src.compare(pos, 2, "<=") == 0) { cur.kind = Tok::Leq; advance(2); return; }
    if (src.compare(pos, 2, ":-") == 0) { cur.kind = Tok::Turnstile; advance(2); return; }
    switch (c) {
      case '(': cur.kind = Tok::LParen; advance(1); return;
      case ')': cur.kind = Tok::RParen; advance(1); return;
      case ',': cur.kind = Tok::Comma; advance(1); return;
      case '.': cur.kind = Tok::Dot; advance(1); return;
      case '!': cur.kind = Tok::Bang; advance(1); return;
      case '&': cur.kind = Tok::Amp; advance(1); return;
      case '|': cur.kind = Tok::Pipe; advance(1); return;
      case '=': cur.kind = Tok::Eq; advance(1); return;
      default:
        throw ParseError(cur.line, cur.col, std::string("unexpected character '") + c + "'");
    }
  }
};

struct SentenceParser {
  Lexer& lx;
  explicit SentenceParser(Lexer& l) : lx(l) {}

  [[noreturn]] void fail(std::vector<std::string> exp) {
    lx.fail("unexpected token", std::move(exp));
  }

  FormulaPtr iff() {
    auto lhs = implies();
    while (lx.cur.kind == Tok::DArrow) {
      lx.next();
      lhs = mk_iff(lhs, implies());
    }
    return lhs;
  }

  FormulaPtr implies() {
    auto lhs = orf();
    if (lx.cur.kind == Tok::Arrow) {
      lx.next();
      return mk_implies(lhs, implies());  // right-assoc
    }
    return lhs;
  }

  FormulaPtr orf() {
    auto lhs = andf();
    while (lx.cur.kind == Tok::Pipe) {
      lx.next();
      lhs = mk_or(lhs, andf());
    }
    return lhs;
  }

  FormulaPtr andf() {
    auto lhs = unary();
    while (lx.cur.kind == Tok::Amp) {
      lx.next();
      lhs = mk_and(lhs, unary());
    }
    return lhs;
  }

  long number() {
    if (lx.cur.kind != Tok::Number) fail({"number"});
    long n = lx.cur.num;
    lx.next();
    return n;
  }

  std::string ident() {
    if (lx.cur.kind != Tok::Ident) fail({"identifier"});
    std::string s = lx.cur.text;
    lx.next();
    return s;
  }

  FormulaPtr unary() {
    if (lx.cur.kind == Tok::Bang) {
      lx.next();
      return mk_not(unary());
    }
    if (lx.cur.kind == Tok::Ident && lx.cur.text == "forall") {
      lx.next();
      std::string v = ident();
      if (lx.cur.kind != Tok::Dot) fail({"."});
      lx.next();
      return mk_forall(v, iff());
    }
    if (lx.cur.kind == Tok::Ident && lx.cur.text == "exists") {
      lx.next();
      bool counted = false;
      CountKind ck = CountKind::Geq;
      long n = 0;
      if (lx.cur.kind == Tok::Geq || lx.cur.kind == Tok::Leq || lx.cur.kind == Tok::Eq) {
        counted = true;
        ck = lx.cur.kind == Tok::Geq ? CountKind::Geq
            : lx.cur.kind == Tok::Leq ? CountKind::Leq : CountKind::Eq;
        lx.next();
        n = number();
      }
      std::string v = ident();
      if (lx.cur.kind != Tok::Dot) fail({"."});
      lx.next();
      auto body = iff();
      return counted ? mk_count(ck, n, v, body) : mk_exists(v, body);
    }
    return primary();
  }

  Term term() {
    if (lx.cur.kind != Tok::Ident) fail({"term"});
    Term t = var(lx.cur.text);
    lx.next();
    return t;
  }

  FormulaPtr primary() {
    SrcSpan sp{lx.cur.line, lx.cur.col};
    if (lx.cur.kind == Tok::LParen) {
      lx.next();
      auto f = iff();
      if (lx.cur.kind != Tok::RParen) fail({")"});
      lx.next();
      return f;
    }
    if (lx.cur.kind != Tok::Ident) fail({"formula"});
    std::string name = lx.cur.text;
    if (name == "true") {
      lx.next();
      return mk_true();
    }
    if (name == "false") {
      lx.next();
      return mk_false();
    }
    lx.next();
    if (lx.cur.kind == Tok::LParen) {
      lx.next();
      std::vector<Term> args;
      args.push_back(term());
      while (lx.cur.kind == Tok::Comma) {
        lx.next();
        args.push_back(term());
      }
      if (lx.cur.kind != Tok::RParen) fail({")", ","});
      lx.next();
      if (args.size() > 2)
        throw ParseError(sp.line, sp.col, "predicate arity > 2: " + name);
      return mk_atom(name, std::move(args), sp);
    }
    if (lx.cur.kind == Tok::Eq) {
      lx.next();
      return mk_equal(var(name), term(), sp);
    }
    if (lx.cur.kind == Tok::Neq) {
      lx.next();
      return mk_not(mk_equal(var(name), term(), sp));
    }
    fail({"(", "=", "!="});
  }
};

}  // namespace

FormulaPtr parse_sentence(const std::string& text) {
  Lexer lx(text);
  SentenceParser p(lx);
  auto f = p.iff();
  if (lx.cur.kind != Tok::End)
    throw ParseError(lx.cur.line, lx.cur.col, "trailing input");
  return f;
}

std::vector<FormulaPtr> parse_theory(const std::string& text) {
  std::vector<FormulaPtr> out;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    bool blank = true;
    for (char c : line)
      if (!isspace((unsigned char)c)) blank = false;
    if (blank) continue;
    try {
      out.push_back(parse_sentence(line));
    } catch (const ParseError& e) {
      throw ParseError(lineno, e.col, "in sentence: " + std::string(e.what()), e.expected);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Data files
// ---------------------------------------------------------------------------

Dataset parse_data(const std::string& text) {
  Dataset ds;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    bool blank = true;
    for (char c : line)
      if (!isspace((unsigned char)c)) blank = false;
    if (blank) continue;

    Lexer lx(line);
    try {
      bool neg = false;
      if (lx.cur.kind == Tok::Bang) {
        neg = true;
        lx.next();
      }
      if (lx.cur.kind != Tok::Ident)
        throw ParseError(1, lx.cur.col, "expected literal");
      std::string head = lx.cur.text;
      lx.next();
      if (lx.cur.kind == Tok::LParen) {
        lx.next();
        std::vector<std::string> cs;
        if (lx.cur.kind != Tok::Ident) throw ParseError(1, lx.cur.col, "expected constant");
        cs.push_back(lx.cur.text);
        lx.next();
        if (lx.cur.kind == Tok::Comma) {
          lx.next();
          if (lx.cur.kind != Tok::Ident) throw ParseError(1, lx.cur.col, "expected constant");
          cs.push_back(lx.cur.text);
          lx.next();
        }
        if (lx.cur.kind != Tok::RParen) throw ParseError(1, lx.cur.col, "expected )");
        lx.next();
        if (lx.cur.kind != Tok::End) throw ParseError(1, lx.cur.col, "trailing input");
        ds.literals.insert(GroundLiteral{!neg, GroundAtom{head, cs}});
      } else if (!neg && (lx.cur.kind == Tok::Eq || lx.cur.kind == Tok::Neq)) {
        bool equal = lx.cur.kind == Tok::Eq;
        lx.next();
        if (lx.cur.kind != Tok::Ident) throw ParseError(1, lx.cur.col, "expected constant");
        std::string rhs = lx.cur.text;
        lx.next();
        if (lx.cur.kind != Tok::End) throw ParseError(1, lx.cur.col, "trailing input");
        ds.eqs.insert(ConstEq{equal, head, rhs});
      } else {
        throw ParseError(1, lx.cur.col, "expected ( or = or !=");
      }
    } catch (const ParseError& e) {
      throw ParseError(lineno, e.col, std::string(e.what()), e.expected);
    }
  }
  for (const auto& l : ds.literals) {
    if (!l.positive) continue;
    if (ds.literals.count(GroundLiteral{false, l.atom}))
      throw ContradictionError(l.atom);
  }
  for (const auto& e : ds.eqs) {
    if (e.equal && ds.eqs.count(ConstEq{false, e.lhs, e.rhs}))
      throw ContradictionError(GroundAtom{"=", {e.lhs, e.rhs}});
    if (!e.equal && e.lhs == e.rhs)
      throw ContradictionError(GroundAtom{"=", {e.lhs, e.rhs}});
  }
  return ds;
}

// ---------------------------------------------------------------------------
// Query files
// ---------------------------------------------------------------------------

Query parse_query(const std::string& text) {
  std::string body;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    body += line + "\n";
  }
  Lexer lx(body);
  if (lx.cur.kind != Tok::Ident || lx.cur.text != "answer")
    throw ParseError(lx.cur.line, lx.cur.col, "expected 'answer'");
  lx.next();
  if (lx.cur.kind != Tok::LParen) throw ParseError(lx.cur.line, lx.cur.col, "expected (");
  lx.next();
  Query q;
  std::set<std::string> head;
  while (lx.cur.kind == Tok::Ident) {
    q.head_vars.push_back(lx.cur.text);
    head.insert(lx.cur.text);
    lx.next();
    if (lx.cur.kind == Tok::Comma) {
      lx.next();
      continue;
    }
    break;
  }
  if (lx.cur.kind != Tok::RParen) throw ParseError(lx.cur.line, lx.cur.col, "expected )");
  lx.next();
  if (lx.cur.kind != Tok::Turnstile) throw ParseError(lx.cur.line, lx.cur.col, "expected :-");
  lx.next();

  std::set<std::string> exist;
  auto term_name = [&]() -> std::string {
    if (lx.cur.kind == Tok::String || lx.cur.kind == Tok::Number)
      throw ConstantInQuery(lx.cur.text);
    if (lx.cur.kind != Tok::Ident)
      throw ParseError(lx.cur.line, lx.cur.col, "expected variable");
    std::string s = lx.cur.text;
    lx.next();
    return s;
  };

  bool first = true;
  while (lx.cur.kind != Tok::End) {
    if (!first) {
      if (lx.cur.kind != Tok::Comma) throw ParseError(lx.cur.line, lx.cur.col, "expected ,");
      lx.next();
    }
    first = false;
    if (lx.cur.kind != Tok::Ident)
      throw ParseError(lx.cur.line, lx.cur.col, "expected atom");
    std::string name = lx.cur.text;
    lx.next();
    if (lx.cur.kind == Tok::Eq || lx.cur.kind == Tok::Neq) throw EqualityInQuery();
    if (lx.cur.kind != Tok::LParen) throw ParseError(lx.cur.line, lx.cur.col, "expected (");
    lx.next();
    std::vector<std::string> args;
    args.push_back(term_name());
    while (lx.cur.kind == Tok::Comma) {
      lx.next();
      args.push_back(term_name());
    }
    if (lx.cur.kind != Tok::RParen) {
      if (lx.cur.kind == Tok::Eq || lx.cur.kind == Tok::Neq) throw EqualityInQuery();
      throw ParseError(lx.cur.line, lx.cur.col, "expected )");
    }
    lx.next();
    if (args.size() > 2)
      throw ParseError(lx.cur.line, lx.cur.col, "predicate arity > 2: " + name);
    for (const auto& a : args)
      if (!head.count(a)) exist.insert(a);
    q.atoms.push_back(GroundAtom{name, args});
  }
  if (q.atoms.empty())
    throw ParseError(lx.cur.line, lx.cur.col, "query body must be nonempty");
  q.exist_vars.assign(exist.begin(), exist.end());
  return q;
}

// ---------------------------------------------------------------------------
// Fragment checking
// ---------------------------------------------------------------------------

namespace {

struct FragChecker {
  std::optional<Violation> bad;

  void violate(const std::vector<int>& path, std::string reason) {
    if (!bad) bad = Violation{path, std::move(reason)};
  }

  // Variable discipline shared by all four fragments: only x and y, no
  // constants, counting bounds nonnegative.
  bool vars_ok(const FormulaPtr& f, std::vector<int>& path) {
    if (f->kind == Kind::Atom || f->kind == Kind::Equal) {
      for (const auto& t : f->args) {
        if (!t.is_var) {
          violate(path, "constants are not allowed in theories");
          return false;
        }
        if (t.name != "x" && t.name != "y") {
          violate(path, "only variables x and y may occur");
          return false;
        }
      }
      return true;
    }
    if (f->kind == Kind::Forall || f->kind == Kind::Exists || f->kind == Kind::Count) {
      if (f->qvar != "x" && f->qvar != "y") {
        violate(path, "only variables x and y may occur");
        return false;
      }
      if (f->kind == Kind::Count && f->bound < 0) {
        violate(path, "negative counting bound");
        return false;
      }
    }
    for (size_t i = 0; i < f->kids.size(); ++i) {
      path.push_back((int)i);
      bool ok = vars_ok(f->kids[i], path);
      path.pop_back();
      if (!ok) return false;
    }
    return true;
  }

  bool no_counting_no_equality(const FormulaPtr& f, std::vector<int>& path) {
    if (f->kind == Kind::Count) {
      violate(path, "counting quantifier not allowed in this fragment");
      return false;
    }
    if (f->kind == Kind::Equal) {
      violate(path, "equality not allowed in this fragment");
      return false;
    }
    for (size_t i = 0; i < f->kids.size(); ++i) {
      path.push_back((int)i);
      bool ok = no_counting_no_equality(f->kids[i], path);
      path.pop_back();
      if (!ok) return false;
    }
    return true;
  }

  static bool is_guard(const FormulaPtr& f) {
    if (f->kind == Kind::Equal)
      return f->args[0].is_var && f->args[1].is_var && !(f->args[0] == f->args[1]);
    if (f->kind != Kind::Atom || f->args.size() != 2) return false;
    return f->args[0].is_var && f->args[1].is_var && !(f->args[0] == f->args[1]);
  }

  bool gc2_ok(const FormulaPtr& f, std::vector<int>& path) {
    switch (f->kind) {
      case Kind::True:
      case Kind::False:
      case Kind::Atom:
      case Kind::Equal:
        return true;
      case Kind::Not:
      case Kind::And:
      case Kind::Or:
      case Kind::Implies:
      case Kind::Iff:
        for (size_t i = 0; i < f->kids.size(); ++i) {
          path.push_back((int)i);
          bool ok = gc2_ok(f->kids[i], path);
          path.pop_back();
          if (!ok) return false;
        }
        return true;
      case Kind::Forall:
      case Kind::Exists: {
        const FormulaPtr& body = f->kids[0];
        if (f->kind == Kind::Forall && body->kind == Kind::Implies &&
            is_guard(body->kids[0])) {
          path.push_back(0);
          path.push_back(1);
          bool ok = gc2_ok(body->kids[1], path);
          path.pop_back();
          path.pop_back();
          return ok;
        }
        if (f->kind == Kind::Exists) {
          if (is_guard(body)) return true;
          if (body->kind == Kind::And && is_guard(body->kids[0])) {
            path.push_back(0);
            path.push_back(1);
            bool ok = gc2_ok(body->kids[1], path);
            path.pop_back();
            path.pop_back();
            return ok;
          }
        }
        if (free_vars(body).size() <= 1) {
          path.push_back(0);
          bool ok = gc2_ok(body, path);
          path.pop_back();
          return ok;
        }
        violate(path, "unguarded quantifier over a two-free-variable formula");
        return false;
      }
      case Kind::Count: {
        const FormulaPtr& body = f->kids[0];
        if (f->ck == CountKind::Eq && f->bound <= 0) {
          violate(path, "exists=C requires C > 0 in a guarded position");
          return false;
        }
        if (is_guard(body)) return true;
        if (body->kind == Kind::And && is_guard(body->kids[0])) {
          path.push_back(0);
          path.push_back(1);
          bool ok = gc2_ok(body->kids[1], path);
          path.pop_back();
          path.pop_back();
          return ok;
        }
        violate(path, "counting quantifier does not occur in a guarded pattern");
        return false;
      }
    }
    return true;
  }
};

}  // namespace

std::optional<Violation> check_fragment(const FormulaPtr& f, Fragment mode) {
  FragChecker ck;
  std::vector<int> path;
  if (!ck.vars_ok(f, path)) return ck.bad;
  if (mode == Fragment::L2minus || mode == Fragment::G2minus) {
    std::vector<int> p;
    if (!ck.no_counting_no_equality(f, p)) return ck.bad;
  }
  if (mode == Fragment::GC2 || mode == Fragment::G2minus) {
    std::vector<int> p;
    if (!ck.gc2_ok(f, p)) return ck.bad;
  }
  return std::nullopt;
}

const Formula* resolve_path(const FormulaPtr& root, const std::vector<int>& path) {
  const Formula* cur = root.get();
  for (int i : path) {
    if (i < 0 || (size_t)i >= cur->kids.size()) return nullptr;
    cur = cur->kids[(size_t)i].get();
  }
  return cur;
}

std::string fragment_name(Fragment f) {
  switch (f) {
    case Fragment::C2: return "C2";
    case Fragment::GC2: return "GC2";
    case Fragment::G2minus: return "G2minus";
    case Fragment::L2minus: return "L2minus";
  }
  return "?";
}

}  // namespace c2data

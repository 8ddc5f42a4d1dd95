#include <sstream>

#include "cbv/syntax.hpp"

namespace cbv {

namespace {

int infixPrecedence(const Expr& e) {
  if (e.kind() != Expr::Kind::Apply || e.args().size() != 2) return 0;
  const auto& op = e.name();
  if (op == "+" || op == "-") return 1;
  if (op == "*") return 2;
  return 0;
}

void renderExpr(std::ostream& os, const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Var:
    case Expr::Kind::Const:
      os << e.name();
      return;
    case Expr::Kind::Apply: {
      int prec = infixPrecedence(e);
      if (prec > 0) {
        const Expr& lhs = e.args()[0];
        const Expr& rhs = e.args()[1];
        int lp = infixPrecedence(lhs);
        int rp = infixPrecedence(rhs);
        bool wrapL = lp > 0 && lp < prec;
        bool wrapR = rp > 0 && rp <= prec;
        if (wrapL) os << '(';
        renderExpr(os, lhs);
        if (wrapL) os << ')';
        os << ' ' << e.name() << ' ';
        if (wrapR) os << '(';
        renderExpr(os, rhs);
        if (wrapR) os << ')';
        return;
      }
      os << e.name() << '(';
      for (std::size_t i = 0; i < e.args().size(); ++i) {
        if (i > 0) os << ", ";
        renderExpr(os, e.args()[i]);
      }
      os << ')';
      return;
    }
  }
}

void renderExprList(std::ostream& os, std::span<const Expr> list) {
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (i > 0) os << ", ";
    renderExpr(os, list[i]);
  }
}

bool isInfixRelation(const std::string& rel) {
  return rel == "=" || rel == "<=" || rel == "<" || rel == ">=" || rel == ">";
}

bool isQuantifier(const Formula& f) {
  return f.kind() == Formula::Kind::Exists || f.kind() == Formula::Kind::Forall;
}

void renderFormula(std::ostream& os, const Formula& f);

void renderWrapped(std::ostream& os, const Formula& f, bool wrap) {
  if (wrap) os << '(';
  renderFormula(os, f);
  if (wrap) os << ')';
}

void renderFormula(std::ostream& os, const Formula& f) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::True:
      os << "true";
      return;
    case K::False:
      os << "false";
      return;
    case K::Atom:
      if (isInfixRelation(f.relation()) && f.terms().size() == 2) {
        renderExpr(os, f.terms()[0]);
        os << ' ' << f.relation() << ' ';
        renderExpr(os, f.terms()[1]);
      } else {
        os << f.relation() << '(';
        renderExprList(os, f.terms());
        os << ')';
      }
      return;
    case K::Not: {
      const Formula& sub = f.operands()[0];
      bool wrap = !(sub.kind() == K::Atom || sub.kind() == K::True || sub.kind() == K::False ||
                    sub.kind() == K::Not);
      os << '!';
      renderWrapped(os, sub, wrap);
      return;
    }
    case K::And:
    case K::Or: {
      const char* sep = f.kind() == K::And ? " & " : " | ";
      bool first = true;
      for (const auto& op : f.operands()) {
        if (!first) os << sep;
        first = false;
        bool wrap = isQuantifier(op) || op.kind() == K::Implies || op.kind() == f.kind() ||
                    (f.kind() == K::And && op.kind() == K::Or);
        renderWrapped(os, op, wrap);
      }
      return;
    }
    case K::Implies: {
      const Formula& lhs = f.operands()[0];
      const Formula& rhs = f.operands()[1];
      renderWrapped(os, lhs, isQuantifier(lhs) || lhs.kind() == K::Implies);
      os << " -> ";
      renderWrapped(os, rhs, isQuantifier(rhs));
      return;
    }
    case K::Exists:
    case K::Forall:
      os << (f.kind() == K::Exists ? "exists " : "forall ") << joinVars(f.bound()) << ": ";
      renderFormula(os, f.body());
      return;
  }
}

void renderStmt(std::ostream& os, const Stmt& s) {
  using K = Stmt::Kind;
  switch (s.kind()) {
    case K::Skip:
      os << "skip";
      return;
    case K::Assign:
      os << joinVars(s.vars()) << " := ";
      renderExprList(os, s.exprs());
      return;
    case K::Call:
      os << s.procedure() << '(';
      renderExprList(os, s.exprs());
      os << ')';
      return;
    case K::Seq: {
      bool wrap = s.first().kind() == K::Seq;
      if (wrap) os << "( ";
      renderStmt(os, s.first());
      if (wrap) os << " )";
      os << " ; ";
      renderStmt(os, s.second());
      return;
    }
    case K::If:
      os << "if ";
      renderFormula(os, s.condition());
      os << " then ";
      renderStmt(os, s.first());
      os << " else ";
      renderStmt(os, s.second());
      os << " fi";
      return;
    case K::While:
      os << "while ";
      renderFormula(os, s.condition());
      os << " do ";
      renderStmt(os, s.body());
      os << " od";
      return;
    case K::Block:
      os << "begin local ";
      if (s.vars().empty()) {
        os << "skip";
      } else {
        os << joinVars(s.vars()) << " := ";
        renderExprList(os, s.exprs());
      }
      os << " ; ";
      renderStmt(os, s.body());
      os << " end";
      return;
  }
}

template <typename T, typename F>
std::string render(const T& value, F fn) {
  std::ostringstream os;
  fn(os, value);
  return os.str();
}

}  // namespace

std::string joinVars(const VarList& vars) {
  std::string out;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (i > 0) out += ", ";
    out += vars[i];
  }
  return out;
}

std::string toString(const VarSet& vars) {
  std::string out = "{";
  bool first = true;
  for (const auto& v : vars) {
    if (!first) out += ", ";
    first = false;
    out += v;
  }
  return out + "}";
}

std::string toString(const Expr& e) { return render(e, renderExpr); }
std::string toString(const Formula& f) { return render(f, renderFormula); }
std::string toString(const Stmt& s) { return render(s, renderStmt); }

std::string toString(const ProcDecl& d) {
  return "proc " + d.name + "(" + joinVars(d.formals) + ") :: " + toString(d.body);
}

std::string toString(const Program& p) {
  std::string out;
  for (const auto& d : p.decls()) out += toString(d) + "\n";
  out += "main: " + toString(p.main()) + "\n";
  return out;
}

std::string toString(const Triple& t) {
  return "{" + toString(t.pre) + "} " + toString(t.stmt) + " {" + toString(t.post) + "}";
}

std::string toString(const Substitution& s) {
  std::ostringstream os;
  os << '[' << joinVars(s.vars()) << " := ";
  renderExprList(os, s.terms());
  os << ']';
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << toString(e); }
std::ostream& operator<<(std::ostream& os, const Formula& f) { return os << toString(f); }
std::ostream& operator<<(std::ostream& os, const Stmt& s) { return os << toString(s); }
std::ostream& operator<<(std::ostream& os, const Program& p) { return os << toString(p); }
std::ostream& operator<<(std::ostream& os, const Triple& t) { return os << toString(t); }

}  // namespace cbv

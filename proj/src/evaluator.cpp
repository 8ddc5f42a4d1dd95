#include "cbv/evaluator.hpp"

#include <algorithm>
#include <cmath>

#include "cbv/errors.hpp"

namespace cbv {

Support::Support(const VarSet& vars) : vars_(vars.begin(), vars.end()) {}

std::size_t Support::find(std::string_view var) const {
  auto it = std::lower_bound(vars_.begin(), vars_.end(), var);
  if (it == vars_.end() || *it != var) return vars_.size();
  return static_cast<std::size_t>(it - vars_.begin());
}

State::State(std::shared_ptr<const Support> support, Valuation values)
    : support_(std::move(support)), values_(std::move(values)) {
  if (values_.size() != support_->size()) throw EvalError("valuation does not match its support");
}

State::State(std::shared_ptr<const Support> support)
    : support_(std::move(support)), values_(support_->size(), 0) {}

Elem State::get(std::string_view var) const {
  std::size_t i = support_->find(var);
  return i == support_->size() ? Elem{0} : values_[i];
}

void State::set(std::string_view var, Elem value) {
  std::size_t i = support_->find(var);
  if (i == support_->size()) throw EvalError("variable '" + std::string(var) + "' is outside the state support");
  values_[i] = value;
}

std::string toString(const State& s, const Interpretation& I) {
  std::string out;
  for (std::size_t i = 0; i < s.support().size(); ++i) {
    if (i > 0) out += ", ";
    out += s.support().vars()[i] + " = " + I.constantFor(s.values()[i]);
  }
  return out.empty() ? "(empty state)" : out;
}

double stateCount(const Interpretation& I, std::size_t vars) {
  return std::pow(static_cast<double>(I.size()), static_cast<double>(vars));
}

std::uint64_t encode(const Valuation& v, std::size_t base) {
  std::uint64_t code = 0;
  for (std::size_t i = v.size(); i-- > 0;) code = code * base + v[i];
  return code;
}

void decode(std::uint64_t code, std::size_t base, Valuation& out) {
  for (auto& e : out) {
    e = static_cast<Elem>(code % base);
    code /= base;
  }
}

namespace detail {

struct ExprNode {
  enum class Op : std::uint8_t { Slot, Value, Fun };
  Op op = Op::Value;
  std::uint32_t slot = 0;
  Elem value = 0;
  const std::vector<Elem>* table = nullptr;
  std::vector<ExprNode> args;

  Elem eval(const Elem* env, std::size_t base) const {
    switch (op) {
      case Op::Slot:
        return env[slot];
      case Op::Value:
        return value;
      case Op::Fun: {
        std::size_t idx = 0;
        for (const auto& a : args) idx = idx * base + a.eval(env, base);
        return (*table)[idx];
      }
    }
    return 0;
  }
};

struct FormulaNode {
  enum class Op : std::uint8_t { True, False, Eq, Rel, Not, And, Or, Implies, Exists, Forall, Lookup };
  Op op = Op::True;
  std::vector<ExprNode> terms;
  const std::vector<bool>* relTable = nullptr;
  std::vector<FormulaNode> kids;
  std::vector<std::uint32_t> bound;
  std::unordered_set<std::uint64_t> keys;

  bool eval(Elem* env, std::size_t base) const {
    switch (op) {
      case Op::True:
        return true;
      case Op::False:
        return false;
      case Op::Eq:
        return terms[0].eval(env, base) == terms[1].eval(env, base);
      case Op::Rel: {
        std::size_t idx = 0;
        for (const auto& t : terms) idx = idx * base + t.eval(env, base);
        return (*relTable)[idx];
      }
      case Op::Not:
        return !kids[0].eval(env, base);
      case Op::And:
        for (const auto& k : kids) {
          if (!k.eval(env, base)) return false;
        }
        return true;
      case Op::Or:
        for (const auto& k : kids) {
          if (k.eval(env, base)) return true;
        }
        return false;
      case Op::Implies:
        return !kids[0].eval(env, base) || kids[1].eval(env, base);
      case Op::Exists:
      case Op::Forall: {
        bool want = op == Op::Exists;
        for (auto s : bound) env[s] = 0;
        while (true) {
          if (kids[0].eval(env, base) == want) return want;
          std::size_t i = 0;
          for (; i < bound.size(); ++i) {
            if (++env[bound[i]] < base) break;
            env[bound[i]] = 0;
          }
          if (i == bound.size()) return !want;
        }
      }
      case Op::Lookup: {
        std::uint64_t key = 0;
        for (const auto& t : terms) key = key * base + t.eval(env, base);
        return keys.count(key) > 0;
      }
    }
    return false;
  }
};

}  // namespace detail

namespace {

using detail::ExprNode;
using detail::FormulaNode;

class Compiler {
 public:
  Compiler(const Interpretation& I, const Support& support) : I_(I), top_(support.size()), max_(top_) {
    for (std::size_t i = 0; i < support.size(); ++i) {
      scopes_[support.vars()[i]].push_back(static_cast<std::uint32_t>(i));
    }
  }

  std::size_t frameSize() const { return max_; }

  ExprNode expr(const Expr& t) {
    ExprNode n;
    switch (t.kind()) {
      case Expr::Kind::Var: {
        auto it = scopes_.find(t.name());
        if (it == scopes_.end() || it->second.empty()) {
          n.op = ExprNode::Op::Value;
          n.value = 0;
        } else {
          n.op = ExprNode::Op::Slot;
          n.slot = it->second.back();
        }
        return n;
      }
      case Expr::Kind::Const: {
        auto c = I_.constant(t.name());
        if (!c) throw EvalError("unknown constant '" + t.name() + "' in model " + I_.name());
        n.op = ExprNode::Op::Value;
        n.value = *c;
        return n;
      }
      case Expr::Kind::Apply: {
        const auto* fn = I_.function(t.name());
        if (fn == nullptr) throw EvalError("unknown function symbol '" + t.name() + "' in model " + I_.name());
        if (fn->arity != t.args().size()) {
          throw EvalError("function '" + t.name() + "' applied to " + std::to_string(t.args().size()) +
                          " arguments, arity is " + std::to_string(fn->arity));
        }
        n.op = ExprNode::Op::Fun;
        n.table = &fn->table;
        for (const auto& a : t.args()) n.args.push_back(expr(a));
        return n;
      }
    }
    return n;
  }

  FormulaNode formula(const Formula& f) {
    using K = Formula::Kind;
    using Op = FormulaNode::Op;
    FormulaNode n;
    switch (f.kind()) {
      case K::True:
        n.op = Op::True;
        return n;
      case K::False:
        n.op = Op::False;
        return n;
      case K::Atom: {
        for (const auto& t : f.terms()) n.terms.push_back(expr(t));
        if (f.relation() == "=") {
          if (f.terms().size() != 2) throw EvalError("equality needs two arguments");
          n.op = Op::Eq;
          return n;
        }
        const auto* rel = I_.relation(f.relation());
        if (rel == nullptr) throw EvalError("unknown relation symbol '" + f.relation() + "' in model " + I_.name());
        if (rel->arity != f.terms().size()) {
          throw EvalError("relation '" + f.relation() + "' applied to " + std::to_string(f.terms().size()) +
                          " arguments, arity is " + std::to_string(rel->arity));
        }
        n.op = Op::Rel;
        n.relTable = &rel->table;
        return n;
      }
      case K::Not:
      case K::And:
      case K::Implies:
        n.op = f.kind() == K::Not ? Op::Not : f.kind() == K::And ? Op::And : Op::Implies;
        for (const auto& op : f.operands()) n.kids.push_back(formula(op));
        return n;
      case K::Or:
        if (lookupTable(f, n)) return n;
        n.op = Op::Or;
        for (const auto& op : f.operands()) n.kids.push_back(formula(op));
        return n;
      case K::Exists:
      case K::Forall: {
        n.op = f.kind() == K::Exists ? Op::Exists : Op::Forall;
        for (const auto& v : f.bound()) {
          auto slot = static_cast<std::uint32_t>(top_++);
          n.bound.push_back(slot);
          scopes_[v].push_back(slot);
        }
        max_ = std::max(max_, top_);
        n.kids.push_back(formula(f.body()));
        for (const auto& v : f.bound()) scopes_[v].pop_back();
        top_ -= f.bound().size();
        return n;
      }
    }
    return n;
  }

 private:
  // A disjunction of conjunctions `t1 = c1 & ... & tk = ck` over one fixed
  // term list becomes a hash lookup of the evaluated terms.
  bool lookupTable(const Formula& f, FormulaNode& n) {
    std::vector<Expr> lhs;
    std::vector<std::vector<Elem>> rows;
    for (const auto& d : f.operands()) {
      std::vector<Formula> atoms;
      if (d.kind() == Formula::Kind::And) {
        atoms.assign(d.operands().begin(), d.operands().end());
      } else {
        atoms.push_back(d);
      }
      std::vector<Expr> terms;
      std::vector<Elem> row;
      for (const auto& a : atoms) {
        if (a.kind() != Formula::Kind::Atom || a.relation() != "=" || a.terms().size() != 2 ||
            a.terms()[1].kind() != Expr::Kind::Const) {
          return false;
        }
        auto c = I_.constant(a.terms()[1].name());
        if (!c) return false;
        terms.push_back(a.terms()[0]);
        row.push_back(*c);
      }
      if (rows.empty()) {
        lhs = terms;
      } else if (terms != lhs) {
        return false;
      }
      rows.push_back(std::move(row));
    }
    if (stateCount(I_, lhs.size()) > 9.0e18) return false;
    n.op = FormulaNode::Op::Lookup;
    for (const auto& t : lhs) n.terms.push_back(expr(t));
    for (const auto& row : rows) {
      std::uint64_t key = 0;
      for (Elem e : row) key = key * I_.size() + e;
      n.keys.insert(key);
    }
    return true;
  }

  const Interpretation& I_;
  std::map<std::string, std::vector<std::uint32_t>, std::less<>> scopes_;
  std::size_t top_;
  std::size_t max_;
};

}  // namespace

CompiledExpr::CompiledExpr(const Expr& t, const Interpretation& I, const Support& support)
    : base_(I.size()) {
  Compiler c(I, support);
  root_ = std::make_shared<detail::ExprNode>(c.expr(t));
}

Elem CompiledExpr::eval(const Elem* env) const { return root_->eval(env, base_); }

CompiledFormula::CompiledFormula(const Formula& f, const Interpretation& I, const Support& support)
    : base_(I.size()) {
  Compiler c(I, support);
  root_ = std::make_shared<detail::FormulaNode>(c.formula(f));
  frameSize_ = c.frameSize();
}

bool CompiledFormula::eval(Elem* frame) const { return root_->eval(frame, base_); }

bool CompiledFormula::holds(const Valuation& v) const {
  std::vector<Elem> frame(std::max(frameSize_, v.size()), 0);
  std::copy(v.begin(), v.end(), frame.begin());
  return eval(frame.data());
}

Elem evalExpr(const Interpretation& I, const State& s, const Expr& t) {
  return CompiledExpr(t, I, s.support()).eval(s.values().data());
}

bool holds(const Interpretation& I, const State& s, const Formula& p) {
  return CompiledFormula(p, I, s.support()).holds(s.values());
}

}  // namespace cbv

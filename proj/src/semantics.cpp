#include "cbv/semantics.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

#include "cbv/analysis.hpp"
#include "cbv/errors.hpp"

namespace cbv {

StateSet::StateSet(std::shared_ptr<const Support> support, std::size_t base, std::vector<std::uint64_t> codes)
    : support_(std::move(support)), base_(base), codes_(std::move(codes)) {
  std::sort(codes_.begin(), codes_.end());
  codes_.erase(std::unique(codes_.begin(), codes_.end()), codes_.end());
}

bool StateSet::contains(const Valuation& v) const {
  return std::binary_search(codes_.begin(), codes_.end(), encode(v, base_));
}

std::vector<State> StateSet::states() const {
  std::vector<State> out;
  out.reserve(codes_.size());
  Valuation v(support_->size());
  for (auto c : codes_) {
    decode(c, base_, v);
    out.emplace_back(support_, v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Compiled statements

namespace {

struct CStmt {
  Stmt::Kind kind = Stmt::Kind::Skip;
  std::vector<std::uint32_t> slots;
  std::vector<CompiledExpr> exprs;
  std::optional<CompiledFormula> cond;
  std::vector<CStmt> kids;
  std::size_t proc = 0;
};

constexpr std::size_t kInlineArgs = 16;

}  // namespace

struct Semantics::Machine {
  std::shared_ptr<const Support> support;
  std::size_t base = 0;
  CStmt root;
  /// Slot in `support` of each variable of the procedure environment.
  std::vector<std::uint32_t> envSlots;
  std::vector<std::vector<std::uint32_t>> formalSlots;
  const std::vector<std::vector<std::int64_t>>* tables = nullptr;

  bool run(Valuation& v) const { return exec(root, v); }

  bool exec(const CStmt& s, Valuation& v) const {
    using K = Stmt::Kind;
    switch (s.kind) {
      case K::Skip:
        return true;
      case K::Assign: {
        Elem buf[kInlineArgs];
        std::vector<Elem> big;
        Elem* vals = s.exprs.size() <= kInlineArgs ? buf : (big.resize(s.exprs.size()), big.data());
        for (std::size_t i = 0; i < s.exprs.size(); ++i) vals[i] = s.exprs[i].eval(v.data());
        for (std::size_t i = 0; i < s.slots.size(); ++i) v[s.slots[i]] = vals[i];
        return true;
      }
      case K::Call:
        return call(s, v);
      case K::Seq:
        return exec(s.kids[0], v) && exec(s.kids[1], v);
      case K::If:
        return exec(s.cond->eval(v.data()) ? s.kids[0] : s.kids[1], v);
      case K::While:
        return loop(s, v);
      case K::Block: {
        std::size_t n = s.slots.size();
        std::vector<Elem> saved(n);
        std::vector<Elem> vals(n);
        for (std::size_t i = 0; i < n; ++i) {
          saved[i] = v[s.slots[i]];
          vals[i] = s.exprs[i].eval(v.data());
        }
        for (std::size_t i = 0; i < n; ++i) v[s.slots[i]] = vals[i];
        if (!exec(s.kids[0], v)) return false;
        for (std::size_t i = 0; i < n; ++i) v[s.slots[i]] = saved[i];
        return true;
      }
    }
    return false;
  }

  bool call(const CStmt& s, Valuation& v) const {
    const auto& formals = formalSlots[s.proc];
    std::size_t n = formals.size();
    Elem vals[kInlineArgs];
    Elem saved[kInlineArgs];
    std::vector<Elem> bigVals, bigSaved;
    Elem* pv = vals;
    Elem* ps = saved;
    if (n > kInlineArgs) {
      bigVals.resize(n);
      bigSaved.resize(n);
      pv = bigVals.data();
      ps = bigSaved.data();
    }
    for (std::size_t i = 0; i < n; ++i) pv[i] = s.exprs[i].eval(v.data());
    for (std::size_t i = 0; i < n; ++i) {
      ps[i] = v[formals[i]];
      v[formals[i]] = pv[i];
    }
    std::uint64_t code = 0;
    for (std::size_t i = envSlots.size(); i-- > 0;) code = code * base + v[envSlots[i]];
    std::int64_t result = (*tables)[s.proc][code];
    if (result < 0) return false;
    auto r = static_cast<std::uint64_t>(result);
    for (auto slot : envSlots) {
      v[slot] = static_cast<Elem>(r % base);
      r /= base;
    }
    for (std::size_t i = 0; i < n; ++i) v[formals[i]] = ps[i];
    return true;
  }

  // Brent's cycle detection over loop-head states.
  bool loop(const CStmt& s, Valuation& v) const {
    Valuation saved = v;
    std::size_t power = 1;
    std::size_t lam = 0;
    while (s.cond->eval(v.data())) {
      if (!exec(s.kids[0], v)) return false;
      if (v == saved) return false;
      if (++lam == power) {
        saved = v;
        power *= 2;
        lam = 0;
      }
    }
    return true;
  }
};

namespace {

CStmt compileStmt(const Stmt& s, const Program& prog, const Interpretation& I, const Support& support) {
  using K = Stmt::Kind;
  CStmt c;
  c.kind = s.kind();
  auto slotOf = [&](const std::string& v) {
    std::size_t i = support.find(v);
    if (i == support.size()) throw EvalError("state support does not contain '" + v + "'");
    return static_cast<std::uint32_t>(i);
  };
  switch (s.kind()) {
    case K::Skip:
      break;
    case K::Assign:
    case K::Block:
      for (const auto& v : s.vars()) c.slots.push_back(slotOf(v));
      for (const auto& t : s.exprs()) c.exprs.emplace_back(t, I, support);
      if (s.kind() == K::Block) c.kids.push_back(compileStmt(s.body(), prog, I, support));
      break;
    case K::Call: {
      const ProcDecl& d = prog.decl(s.procedure());
      c.proc = static_cast<std::size_t>(&d - prog.decls().data());
      for (const auto& t : s.exprs()) c.exprs.emplace_back(t, I, support);
      break;
    }
    case K::Seq:
    case K::If:
      if (s.kind() == K::If) c.cond.emplace(s.condition(), I, support);
      c.kids.push_back(compileStmt(s.first(), prog, I, support));
      c.kids.push_back(compileStmt(s.second(), prog, I, support));
      break;
    case K::While:
      c.cond.emplace(s.condition(), I, support);
      c.kids.push_back(compileStmt(s.body(), prog, I, support));
      break;
  }
  return c;
}

}  // namespace

Semantics::Semantics(Program prog, Interpretation I, std::size_t budget)
    : prog_(std::move(prog)), interp_(std::move(I)), budget_(budget) {}

Semantics::~Semantics() = default;

void Semantics::requireBudget(std::size_t vars) const {
  double need = stateCount(interp_, vars);
  if (need > static_cast<double>(budget_)) throw BudgetExceeded(need, budget_);
}

std::unique_ptr<Semantics::Machine> Semantics::compile(const Stmt& s,
                                                       std::shared_ptr<const Support> support) const {
  prog_.validateStmt(s);
  const ProcEnv& env = procEnv();
  auto m = std::make_unique<Machine>();
  m->base = interp_.size();
  m->root = compileStmt(s, prog_, interp_, *support);
  for (const auto& v : env.support->vars()) {
    std::size_t i = support->find(v);
    if (i == support->size()) throw EvalError("state support does not contain '" + v + "'");
    m->envSlots.push_back(static_cast<std::uint32_t>(i));
  }
  for (const auto& d : prog_.decls()) {
    std::vector<std::uint32_t> slots;
    for (const auto& u : d.formals) slots.push_back(static_cast<std::uint32_t>(support->find(u)));
    m->formalSlots.push_back(std::move(slots));
  }
  m->tables = &env.tables;
  m->support = std::move(support);
  return m;
}

const ProcEnv& Semantics::procEnv() const {
  if (env_) return *env_;
  auto env = std::make_unique<ProcEnv>();
  env->support = std::make_shared<const Support>(declVars(prog_));
  const Support& vd = *env->support;
  requireBudget(vd.size());
  std::size_t base = interp_.size();
  auto space = static_cast<std::size_t>(stateCount(interp_, vd.size()));
  std::size_t n = prog_.decls().size();
  env->tables.assign(n, std::vector<std::int64_t>(space, -1));

  std::vector<std::vector<std::int64_t>> previous = env->tables;
  std::vector<Machine> bodies(n);
  for (std::size_t p = 0; p < n; ++p) {
    Machine& m = bodies[p];
    m.base = base;
    m.support = env->support;
    m.root = compileStmt(prog_.decls()[p].body, prog_, interp_, vd);
    for (std::size_t i = 0; i < vd.size(); ++i) m.envSlots.push_back(static_cast<std::uint32_t>(i));
    for (const auto& d : prog_.decls()) {
      std::vector<std::uint32_t> slots;
      for (const auto& u : d.formals) slots.push_back(static_cast<std::uint32_t>(vd.find(u)));
      m.formalSlots.push_back(std::move(slots));
    }
    m.tables = &previous;
  }

  Valuation v(vd.size());
  while (true) {
    bool changed = false;
    for (std::size_t p = 0; p < n; ++p) {
      auto& table = env->tables[p];
      for (std::size_t c = 0; c < space; ++c) {
        if (table[c] >= 0) continue;
        decode(c, base, v);
        if (bodies[p].run(v)) {
          table[c] = static_cast<std::int64_t>(encode(v, base));
          changed = true;
        }
      }
    }
    if (!changed) break;
    ++env->productiveIterations;
    previous = env->tables;
  }
  env_ = std::move(env);
  return *env_;
}

Outcome Semantics::meaning(const Stmt& s, const State& sigma) const {
  auto m = compile(s, sigma.supportPtr());
  Valuation v = sigma.values();
  if (!m->run(v)) return std::nullopt;
  return State(sigma.supportPtr(), std::move(v));
}

VarSet Semantics::tripleSupport(const Triple& t) const {
  VarSet vars = programVars(prog_, t.stmt);
  for (const auto& v : freeVars(t.pre)) vars.insert(v);
  for (const auto& v : freeVars(t.post)) vars.insert(v);
  return vars;
}

namespace {

// Odometer over all valuations of a support; slot 0 varies fastest.
bool nextValuation(Valuation& v, std::size_t base) {
  for (auto& e : v) {
    if (++e < base) return true;
    e = 0;
  }
  return false;
}

}  // namespace

TripleVerdict Semantics::tripleHolds(const Triple& t) const {
  auto support = std::make_shared<const Support>(tripleSupport(t));
  requireBudget(support->size());
  auto m = compile(t.stmt, support);
  CompiledFormula pre(t.pre, interp_, *support);
  CompiledFormula post(t.post, interp_, *support);
  std::size_t k = support->size();
  std::vector<Elem> frame(std::max({pre.frameSize(), post.frameSize(), k}), 0);
  TripleVerdict verdict;
  Valuation sigma(k, 0);
  Valuation v;
  do {
    ++verdict.statesChecked;
    std::copy(sigma.begin(), sigma.end(), frame.begin());
    if (!pre.eval(frame.data())) continue;
    v = sigma;
    if (!m->run(v)) continue;
    std::copy(v.begin(), v.end(), frame.begin());
    if (post.eval(frame.data())) continue;
    verdict.holds = false;
    verdict.counterexample = State(support, sigma);
    verdict.finalState = State(support, v);
    return verdict;
  } while (nextValuation(sigma, interp_.size()));
  return verdict;
}

StateSet Semantics::strongestPost(const Formula& p, const Stmt& s, const VarSet& extra) const {
  VarSet vars = programVars(prog_, s);
  for (const auto& v : freeVars(p)) vars.insert(v);
  vars.insert(extra.begin(), extra.end());
  auto support = std::make_shared<const Support>(vars);
  requireBudget(support->size());
  auto m = compile(s, support);
  CompiledFormula pre(p, interp_, *support);
  std::size_t k = support->size();
  std::vector<Elem> frame(std::max(pre.frameSize(), k), 0);
  std::vector<std::uint64_t> codes;
  Valuation sigma(k, 0);
  Valuation v;
  do {
    std::copy(sigma.begin(), sigma.end(), frame.begin());
    if (!pre.eval(frame.data())) continue;
    v = sigma;
    if (m->run(v)) codes.push_back(encode(v, interp_.size()));
  } while (nextValuation(sigma, interp_.size()));
  return StateSet(support, interp_.size(), std::move(codes));
}

Formula Semantics::spFormula(const Formula& p, const Stmt& s, const VarSet& extra) const {
  return define(strongestPost(p, s, extra));
}

StateSet Semantics::loopReachable(const Formula& p, const Stmt& loop, const VarSet& extra) const {
  if (loop.kind() != Stmt::Kind::While) throw std::invalid_argument("loopReachable needs a while statement");
  VarSet vars = programVars(prog_, loop);
  for (const auto& v : freeVars(p)) vars.insert(v);
  vars.insert(extra.begin(), extra.end());
  auto support = std::make_shared<const Support>(vars);
  requireBudget(support->size());
  auto body = compile(loop.body(), support);
  CompiledFormula guard(loop.condition(), interp_, *support);
  CompiledFormula pre(p, interp_, *support);
  std::size_t k = support->size();
  std::size_t base = interp_.size();
  std::vector<Elem> frame(std::max(pre.frameSize(), k), 0);
  std::unordered_set<std::uint64_t> seen;
  std::vector<std::uint64_t> work;
  Valuation sigma(k, 0);
  do {
    std::copy(sigma.begin(), sigma.end(), frame.begin());
    if (!pre.eval(frame.data())) continue;
    auto c = encode(sigma, base);
    if (seen.insert(c).second) work.push_back(c);
  } while (nextValuation(sigma, base));
  Valuation v(k);
  while (!work.empty()) {
    auto c = work.back();
    work.pop_back();
    decode(c, base, v);
    if (!guard.eval(v.data())) continue;
    if (!body->run(v)) continue;
    auto next = encode(v, base);
    if (seen.insert(next).second) work.push_back(next);
  }
  return StateSet(support, base, std::vector<std::uint64_t>(seen.begin(), seen.end()));
}

Formula Semantics::define(const StateSet& set) const {
  if (set.empty()) return interp_.falsum();
  const std::size_t base = interp_.size();
  VarList vars = set.support().vars();
  std::vector<std::uint64_t> codes = set.codes();
  // Drop variables in which the set is closed, one at a time.
  for (std::size_t i = 0; i < vars.size();) {
    std::uint64_t stride = 1;
    for (std::size_t j = 0; j < i; ++j) stride *= base;
    std::unordered_set<std::uint64_t> members(codes.begin(), codes.end());
    bool closed = true;
    for (auto c : codes) {
      std::uint64_t digit = (c / stride) % base;
      std::uint64_t origin = c - digit * stride;
      for (std::uint64_t d = 0; d < base && closed; ++d) {
        if (!members.count(origin + d * stride)) closed = false;
      }
      if (!closed) break;
    }
    if (!closed) {
      ++i;
      continue;
    }
    std::vector<std::uint64_t> reduced;
    reduced.reserve(codes.size() / base + 1);
    for (auto c : codes) {
      if ((c / stride) % base != 0) continue;
      reduced.push_back(c % stride + (c / (stride * base)) * stride);
    }
    std::sort(reduced.begin(), reduced.end());
    reduced.erase(std::unique(reduced.begin(), reduced.end()), reduced.end());
    codes = std::move(reduced);
    vars.erase(vars.begin() + static_cast<std::ptrdiff_t>(i));
  }
  if (vars.empty()) return Formula::truth();
  std::vector<Valuation> rows;
  Valuation v(vars.size());
  for (auto c : codes) {
    decode(c, base, v);
    rows.push_back(v);
  }
  std::sort(rows.begin(), rows.end());
  std::vector<Formula> disjuncts;
  disjuncts.reserve(rows.size());
  for (const auto& row : rows) {
    std::vector<Formula> eqs;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      eqs.push_back(Formula::eq(Expr::var(vars[i]), Expr::constant(interp_.constantFor(row[i]))));
    }
    disjuncts.push_back(conjoin(std::move(eqs)));
  }
  return disjoin(std::move(disjuncts));
}

// ---------------------------------------------------------------------------
// Environment/store evaluator

namespace {

class FuelEvaluator {
 public:
  using Env = std::map<std::string, std::size_t, std::less<>>;

  struct Diverges {};
  struct NoFuel {};

  FuelEvaluator(const Program& prog, const Interpretation& I, Scope scope, std::size_t fuel)
      : prog_(prog), I_(I), scope_(scope), fuel_(fuel) {}

  Env globals;
  std::vector<Elem> store;
  std::size_t maxDepth = 0;

  void exec(const Stmt& s, const Env& env) {
    using K = Stmt::Kind;
    switch (s.kind()) {
      case K::Skip:
        return;
      case K::Assign: {
        std::vector<Elem> vals;
        for (const auto& t : s.exprs()) vals.push_back(eval(t, env));
        for (std::size_t i = 0; i < vals.size(); ++i) store[location(s.vars()[i], env)] = vals[i];
        return;
      }
      case K::Seq:
        exec(s.first(), env);
        exec(s.second(), env);
        return;
      case K::If:
        exec(test(s.condition(), env) ? s.first() : s.second(), env);
        return;
      case K::While: {
        std::vector<Elem> saved = store;
        std::size_t power = 1;
        std::size_t lam = 0;
        while (test(s.condition(), env)) {
          exec(s.body(), env);
          if (store == saved) throw Diverges{};
          if (++lam == power) {
            saved = store;
            power *= 2;
            lam = 0;
          }
        }
        return;
      }
      case K::Block: {
        std::vector<Elem> vals;
        for (const auto& t : s.exprs()) vals.push_back(eval(t, env));
        std::size_t mark = store.size();
        Env inner = env;
        for (std::size_t i = 0; i < vals.size(); ++i) {
          inner[s.vars()[i]] = store.size();
          store.push_back(vals[i]);
        }
        exec(s.body(), inner);
        store.resize(mark);
        return;
      }
      case K::Call: {
        const ProcDecl& d = prog_.decl(s.procedure());
        std::vector<Elem> vals;
        for (const auto& t : s.exprs()) vals.push_back(eval(t, env));
        if (depth_ >= fuel_) throw NoFuel{};
        std::size_t mark = store.size();
        Env inner = scope_ == Scope::Static ? globals : env;
        for (std::size_t i = 0; i < vals.size(); ++i) {
          inner[d.formals[i]] = store.size();
          store.push_back(vals[i]);
        }
        ++depth_;
        maxDepth = std::max(maxDepth, depth_);
        exec(d.body, inner);
        --depth_;
        store.resize(mark);
        return;
      }
    }
  }

 private:
  std::size_t location(const std::string& var, const Env& env) const {
    auto it = env.find(var);
    if (it == env.end()) throw EvalError("state support does not contain '" + var + "'");
    return it->second;
  }

  Elem eval(const Expr& t, const Env& env) const {
    switch (t.kind()) {
      case Expr::Kind::Var:
        return store[location(t.name(), env)];
      case Expr::Kind::Const: {
        auto c = I_.constant(t.name());
        if (!c) throw EvalError("unknown constant '" + t.name() + "'");
        return *c;
      }
      case Expr::Kind::Apply: {
        const auto* fn = I_.function(t.name());
        if (fn == nullptr || fn->arity != t.args().size()) {
          throw EvalError("unknown function symbol '" + t.name() + "'");
        }
        std::size_t idx = 0;
        for (const auto& a : t.args()) idx = idx * I_.size() + eval(a, env);
        return fn->table[idx];
      }
    }
    return 0;
  }

  bool test(const Formula& f, const Env& env) const {
    using K = Formula::Kind;
    switch (f.kind()) {
      case K::True:
        return true;
      case K::False:
        return false;
      case K::Atom: {
        if (f.relation() == "=") return eval(f.terms()[0], env) == eval(f.terms()[1], env);
        const auto* rel = I_.relation(f.relation());
        if (rel == nullptr || rel->arity != f.terms().size()) {
          throw EvalError("unknown relation symbol '" + f.relation() + "'");
        }
        std::size_t idx = 0;
        for (const auto& t : f.terms()) idx = idx * I_.size() + eval(t, env);
        return rel->table[idx];
      }
      case K::Not:
        return !test(f.operands()[0], env);
      case K::And:
        return std::all_of(f.operands().begin(), f.operands().end(),
                           [&](const Formula& g) { return test(g, env); });
      case K::Or:
        return std::any_of(f.operands().begin(), f.operands().end(),
                           [&](const Formula& g) { return test(g, env); });
      case K::Implies:
        return !test(f.operands()[0], env) || test(f.operands()[1], env);
      case K::Exists:
      case K::Forall:
        throw EvalError("quantified guard");
    }
    return false;
  }

  const Program& prog_;
  const Interpretation& I_;
  Scope scope_;
  std::size_t fuel_;
  std::size_t depth_ = 0;
};

}  // namespace

FuelRun runWithFuel(const Program& prog, const Interpretation& I, const Stmt& s, const State& sigma,
                    Scope scope, std::size_t fuel) {
  prog.validateStmt(s);
  FuelEvaluator ev(prog, I, scope, fuel);
  const Support& sup = sigma.support();
  for (std::size_t i = 0; i < sup.size(); ++i) {
    ev.globals[sup.vars()[i]] = i;
    ev.store.push_back(sigma.values()[i]);
  }
  FuelRun result;
  try {
    ev.exec(s, ev.globals);
    result.status = FuelRun::Status::Terminated;
    result.final = State(sigma.supportPtr(), Valuation(ev.store.begin(), ev.store.begin() + sup.size()));
  } catch (const FuelEvaluator::Diverges&) {
    result.status = FuelRun::Status::Diverged;
  } catch (const FuelEvaluator::NoFuel&) {
    result.status = FuelRun::Status::OutOfFuel;
  }
  result.maxDepth = ev.maxDepth;
  return result;
}

}  // namespace cbv

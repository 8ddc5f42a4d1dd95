#include "generators.hpp"

#include <algorithm>

#include "cbv/analysis.hpp"

namespace cbv::gen {

Generator::Generator(std::uint64_t seed, Config config) : rng_(seed), config_(std::move(config)) {}

std::size_t Generator::uniform(std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
}

bool Generator::chance(double p) { return std::bernoulli_distribution(p)(rng_); }

Expr Generator::constant() { return Expr::constant(chance(0.5) ? "0" : "1"); }

Expr Generator::expr(const VarList& vars, std::size_t depth) {
  if (vars.empty() || (depth > 0 && chance(0.15))) return constant();
  if (depth == 0 || chance(0.55)) return Expr::var(pick(vars));
  static const std::vector<std::string> ops{"+", "+", "-", "*"};
  const std::string& op = pick(ops);
  Expr lhs = Expr::var(pick(vars));
  Expr rhs = chance(0.5) ? constant() : expr(vars, depth - 1);
  return Expr::apply(op, {lhs, rhs});
}

Formula Generator::guard(const VarList& vars) {
  auto atom = [&]() {
    Expr a = Expr::var(pick(vars));
    Expr b = chance(0.6) ? constant() : expr(vars, 1);
    return chance(0.7) ? Formula::eq(a, b) : Formula::atom("<=", {a, b});
  };
  switch (uniform(0, 5)) {
    case 0:
      return Formula::negation(atom());
    case 1:
      return Formula::conj({atom(), atom()});
    case 2:
      return Formula::disj({atom(), atom()});
    default:
      return atom();
  }
}

Formula Generator::assertion(const VarList& vars, std::size_t depth) {
  if (depth == 0 || chance(0.3)) {
    if (chance(0.1)) return chance(0.5) ? Formula::truth() : Formula::falsity();
    Expr a = expr(vars, 1);
    Expr b = chance(0.5) ? constant() : expr(vars, 1);
    return chance(0.75) ? Formula::eq(a, b) : Formula::atom("<=", {a, b});
  }
  switch (uniform(0, 5)) {
    case 0:
      return Formula::negation(assertion(vars, depth - 1));
    case 1:
      return Formula::conj({assertion(vars, depth - 1), assertion(vars, depth - 1)});
    case 2:
      return Formula::disj({assertion(vars, depth - 1), assertion(vars, depth - 1)});
    case 3:
      return Formula::implies(assertion(vars, depth - 1), assertion(vars, depth - 1));
    default: {
      std::string b = chance(0.5) ? pick(vars) : std::string("q");
      VarList inner = vars;
      if (std::find(inner.begin(), inner.end(), b) == inner.end()) inner.push_back(b);
      Formula body = assertion(inner, depth - 1);
      return chance(0.5) ? Formula::exists({b}, body) : Formula::forall({b}, body);
    }
  }
}

Formula Generator::precondition(const VarList& vars) {
  std::size_t n = uniform(0, 2);
  std::vector<Formula> atoms;
  for (std::size_t i = 0; i < n; ++i) {
    Expr a = Expr::var(pick(vars));
    Expr b = chance(0.6) ? constant() : Expr::var(pick(vars));
    atoms.push_back(chance(0.8) ? Formula::eq(a, b) : Formula::atom("<=", {a, b}));
  }
  return conjoin(std::move(atoms));
}

Stmt Generator::stmt(std::size_t depth, const VarList& scope) {
  std::size_t choice = depth <= 1 ? 0 : uniform(0, 9);
  if (choice >= 8 && !config_.loops) choice = 4;
  if (choice == 7 && !config_.blocks) choice = 5;
  switch (choice) {
    case 0:
    case 1:
    case 2: {
      if (!decls_.empty() && chance(config_.callRate)) {
        const ProcDecl& d = pick(decls_);
        ExprList args;
        for (std::size_t i = 0; i < d.formals.size(); ++i) args.push_back(expr(scope, 1));
        return Stmt::call(d.name, std::move(args));
      }
      if (chance(0.12)) return Stmt::skip();
      std::size_t n = chance(0.8) ? 1 : 2;
      VarList targets;
      ExprList sources;
      for (std::size_t i = 0; i < n; ++i) {
        const std::string& v = pick(scope);
        if (std::find(targets.begin(), targets.end(), v) != targets.end()) continue;
        targets.push_back(v);
        sources.push_back(expr(scope));
      }
      return Stmt::assign(std::move(targets), std::move(sources));
    }
    case 3:
    case 4:
    case 5:
      return Stmt::seq(stmt(depth - 1, scope), stmt(depth - 1, scope));
    case 6:
      return Stmt::ifThenElse(guard(scope), stmt(depth - 1, scope), stmt(depth - 1, scope));
    case 7: {
      std::string local;
      if (config_.clashFree) {
        local = chance(0.5) ? "l" : "m";
      } else {
        VarList pool = scope;
        pool.push_back("a");
        local = pick(pool);
      }
      Expr init = expr(scope, 1);
      VarList inner = scope;
      if (std::find(inner.begin(), inner.end(), local) == inner.end()) inner.push_back(local);
      return Stmt::block({local}, {init}, stmt(depth - 1, inner));
    }
    default: {
      // A counting loop terminates unless the body resets the counter.
      if (chance(0.6)) {
        const std::string& c = pick(scope);
        Expr cv = Expr::var(c);
        Formula g = Formula::negation(Formula::eq(cv, Expr::constant("0")));
        Stmt step = Stmt::assign({c}, {Expr::apply("-", {cv, Expr::constant("1")})});
        return Stmt::loop(g, Stmt::seq(stmt(depth - 1, scope), step));
      }
      return Stmt::loop(guard(scope), stmt(depth - 1, scope));
    }
  }
}

Program Generator::program() {
  decls_.clear();
  static const std::vector<std::string> names{"P", "Q", "R"};
  std::size_t n = uniform(0, config_.maxProcs);
  for (std::size_t i = 0; i < n; ++i) {
    ProcDecl d{names[i], {}, Stmt::skip()};
    std::size_t k = uniform(0, config_.maxFormals);
    for (std::size_t j = 0; j < k; ++j) {
      d.formals.push_back(config_.clashFree ? "f" + std::to_string(2 * i + j) : (j == 0 ? "a" : "b"));
    }
    decls_.push_back(std::move(d));
  }
  for (auto& d : decls_) {
    VarList scope = config_.globals;
    for (const auto& f : d.formals) {
      if (std::find(scope.begin(), scope.end(), f) == scope.end()) scope.push_back(f);
    }
    d.body = stmt(uniform(1, config_.maxDepth - 1), scope);
  }
  Stmt main = stmt(uniform(2, config_.maxDepth), config_.globals);
  return Program(decls_, main);
}

Triple Generator::trueTriple(const Semantics& sem) {
  const Program& prog = sem.program();
  Formula p = precondition(config_.globals);
  const Stmt& s = prog.main();
  Formula sp = sem.spFormula(p, s);
  Formula q = sp;
  switch (uniform(0, 4)) {
    case 0:
      break;
    case 1:
      q = Formula::disj({sp, assertion(config_.globals)});
      break;
    case 2: {
      VarSet free = freeVars(sp);
      VarList hidden;
      for (const auto& v : free) {
        if (chance(0.5)) hidden.push_back(v);
      }
      if (!hidden.empty()) q = Formula::exists(hidden, sp);
      break;
    }
    case 3: {
      Formula guess = assertion(config_.globals);
      q = sem.tripleHolds(Triple{p, s, guess}).holds ? guess : Formula::disj({sp, guess});
      break;
    }
    default:
      q = Formula::truth();
      break;
  }
  return Triple{p, s, q};
}

std::vector<State> allStates(const VarSet& support, std::size_t domainSize) {
  auto sup = std::make_shared<const Support>(support);
  std::vector<State> out;
  Valuation v(sup->size(), 0);
  while (true) {
    out.emplace_back(sup, v);
    std::size_t i = 0;
    for (; i < v.size(); ++i) {
      if (++v[i] < domainSize) break;
      v[i] = 0;
    }
    if (i == v.size()) break;
  }
  return out;
}

}  // namespace cbv::gen

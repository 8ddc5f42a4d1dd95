#include "cbv/model.hpp"

#include <fstream>
#include <sstream>

#include "cbv/errors.hpp"

namespace cbv {

namespace {

std::size_t power(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) r *= base;
  return r;
}

std::vector<std::string> words(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

[[noreturn]] void modelError(std::size_t line, const std::string& msg) {
  throw ModelError("model line " + std::to_string(line) + ": " + msg);
}

bool isNumeral(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

}  // namespace

Interpretation Interpretation::zmod(std::size_t n) {
  if (n < 1 || n > 256) throw ModelError("zmod size must be between 1 and 256");
  Interpretation I;
  I.name_ = "zmod:" + std::to_string(n);
  for (std::size_t i = 0; i < n; ++i) {
    I.elements_.push_back(std::to_string(i));
    I.constants_.emplace(std::to_string(i), static_cast<Elem>(i));
  }
  Function add{2, {}}, sub{2, {}}, mul{2, {}};
  Relation le{2, {}}, lt{2, {}}, ge{2, {}}, gt{2, {}};
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      add.table.push_back(static_cast<Elem>((a + b) % n));
      sub.table.push_back(static_cast<Elem>((a + n - b) % n));
      mul.table.push_back(static_cast<Elem>((a * b) % n));
      le.table.push_back(a <= b);
      lt.table.push_back(a < b);
      ge.table.push_back(a >= b);
      gt.table.push_back(a > b);
    }
  }
  I.functions_ = {{"+", add}, {"-", sub}, {"*", mul}};
  I.relations_ = {{"<=", le}, {"<", lt}, {">=", ge}, {">", gt}};
  I.finish();
  return I;
}

Interpretation Interpretation::parse(std::string_view text) {
  Interpretation I;
  std::map<std::string, Elem> byName;
  std::map<std::string, std::vector<bool>> defined;
  auto element = [&](std::size_t line, const std::string& w) {
    auto it = byName.find(w);
    if (it == byName.end()) modelError(line, "unknown element '" + w + "'");
    return it->second;
  };
  std::istringstream is{std::string(text)};
  std::string raw;
  std::size_t lineNo = 0;
  while (std::getline(is, raw)) {
    ++lineNo;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    auto w = words(raw);
    if (w.empty()) continue;
    if (w[0] == "zmod") {
      if (w.size() != 2 || !isNumeral(w[1]) || !I.elements_.empty()) {
        modelError(lineNo, "expected 'zmod N' before any other declaration");
      }
      I = zmod(std::stoul(w[1]));
      for (std::size_t e = 0; e < I.elements_.size(); ++e) byName[I.elements_[e]] = static_cast<Elem>(e);
      continue;
    }
    if (w[0] == "domain:" || w[0] == "domain") {
      if (!I.elements_.empty()) modelError(lineNo, "domain declared twice");
      std::size_t start = w[0] == "domain" ? 2 : 1;
      if (w[0] == "domain" && (w.size() < 2 || w[1] != ":")) modelError(lineNo, "expected 'domain:'");
      for (std::size_t i = start; i < w.size(); ++i) {
        if (!byName.emplace(w[i], static_cast<Elem>(I.elements_.size())).second) {
          modelError(lineNo, "duplicate element '" + w[i] + "'");
        }
        I.elements_.push_back(w[i]);
      }
      if (I.elements_.empty()) modelError(lineNo, "empty domain");
      continue;
    }
    if (I.elements_.empty()) modelError(lineNo, "declarations must follow 'domain:'");
    if (w[0] == "const") {
      if (w.size() != 4 || w[2] != "=") modelError(lineNo, "expected 'const SYMBOL = ELEMENT'");
      if (!isNumeral(w[1])) modelError(lineNo, "constant symbols must be numerals");
      Elem e = element(lineNo, w[3]);
      auto [it, fresh] = I.constants_.emplace(w[1], e);
      if (!fresh && it->second != e) modelError(lineNo, "constant '" + w[1] + "' redefined");
      continue;
    }
    if (w[0] == "fun") {
      if (w.size() < 5 || w[2] != ":" || w[w.size() - 2] != "->") {
        modelError(lineNo, "expected 'fun F : ARGS -> RESULT'");
      }
      std::size_t arity = w.size() - 5;
      auto& fn = I.functions_[w[1]];
      auto& seen = defined["fun " + w[1]];
      if (seen.empty()) {
        fn.arity = arity;
        fn.table.assign(power(I.size(), arity), 0);
        seen.assign(fn.table.size(), false);
      } else if (fn.arity != arity) {
        modelError(lineNo, "function '" + w[1] + "' used with two arities");
      }
      std::size_t idx = 0;
      for (std::size_t i = 0; i < arity; ++i) idx = idx * I.size() + element(lineNo, w[3 + i]);
      fn.table[idx] = element(lineNo, w.back());
      seen[idx] = true;
      continue;
    }
    if (w[0] == "rel") {
      std::string name = w[1];
      if (auto slash = name.find('/'); slash != std::string::npos && w.size() == 2) {
        std::string ar = name.substr(slash + 1);
        name.resize(slash);
        if (!isNumeral(ar)) modelError(lineNo, "expected 'rel R/ARITY'");
        auto& rel = I.relations_[name];
        rel.arity = std::stoul(ar);
        rel.table.assign(power(I.size(), rel.arity), false);
        continue;
      }
      if (w.size() < 3 || w[2] != ":") modelError(lineNo, "expected 'rel R : ARGS'");
      if (name == "=") modelError(lineNo, "equality is builtin");
      std::size_t arity = w.size() - 3;
      auto [it, fresh] = I.relations_.try_emplace(name);
      auto& rel = it->second;
      if (fresh || rel.table.empty()) {
        rel.arity = arity;
        rel.table.assign(power(I.size(), arity), false);
      } else if (rel.arity != arity) {
        modelError(lineNo, "relation '" + name + "' used with two arities");
      }
      std::size_t idx = 0;
      for (std::size_t i = 0; i < arity; ++i) idx = idx * I.size() + element(lineNo, w[3 + i]);
      rel.table[idx] = true;
      continue;
    }
    modelError(lineNo, "unknown declaration '" + w[0] + "'");
  }
  if (I.elements_.empty()) throw ModelError("model declares no domain");
  for (const auto& [key, seen] : defined) {
    for (bool b : seen) {
      if (!b) throw ModelError(key.substr(4) + ": function table is not total");
    }
  }
  if (I.name_.empty()) I.name_ = "model";
  I.finish();
  return I;
}

Interpretation Interpretation::load(const std::string& spec) {
  if (spec.rfind("zmod:", 0) == 0) {
    std::string n = spec.substr(5);
    if (!isNumeral(n)) throw ModelError("bad builtin model '" + spec + "'");
    return zmod(std::stoul(n));
  }
  std::ifstream in(spec);
  if (!in) throw ModelError("cannot read model file '" + spec + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  Interpretation I = parse(buf.str());
  I.name_ = spec;
  return I;
}

void Interpretation::finish() {
  canonical_.assign(elements_.size(), "");
  for (const auto& [sym, e] : constants_) {
    if (canonical_[e].empty() || std::stoul(sym) < std::stoul(canonical_[e])) canonical_[e] = sym;
  }
  for (std::size_t e = 0; e < canonical_.size(); ++e) {
    if (canonical_[e].empty()) {
      throw ModelError("element '" + elements_[e] + "' is not denoted by any constant");
    }
  }
}

std::optional<Elem> Interpretation::constant(std::string_view symbol) const {
  auto it = constants_.find(symbol);
  if (it == constants_.end()) return std::nullopt;
  return it->second;
}

const Interpretation::Function* Interpretation::function(std::string_view symbol) const {
  auto it = functions_.find(symbol);
  return it == functions_.end() ? nullptr : &it->second;
}

const Interpretation::Relation* Interpretation::relation(std::string_view symbol) const {
  auto it = relations_.find(symbol);
  return it == relations_.end() ? nullptr : &it->second;
}

Formula Interpretation::falsum() const {
  auto zero = constant("0");
  auto one = constant("1");
  if (zero && one && *zero != *one) return Formula::eq(Expr::constant("0"), Expr::constant("1"));
  return Formula::falsity();
}

}  // namespace cbv

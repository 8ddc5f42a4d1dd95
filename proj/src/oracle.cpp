#include "cbv/oracle.hpp"

#include <algorithm>

#include "cbv/analysis.hpp"

namespace cbv {

std::string toString(const ValidityVerdict& v, const Interpretation& I) {
  switch (v.kind) {
    case ValidityVerdict::Kind::Valid:
      return "valid";
    case ValidityVerdict::Kind::Invalid:
      return "invalid, counterexample: " + toString(*v.counterexample, I);
    case ValidityVerdict::Kind::OverBudget:
      return "over budget (" + std::to_string(static_cast<long double>(v.required)) + " states)";
  }
  return "";
}

ValidityVerdict BruteForceOracle::isValid(const Formula& p) const {
  auto support = std::make_shared<const Support>(freeVars(p));
  std::size_t k = support->size();
  ValidityVerdict verdict;
  double need = stateCount(I_, k);
  if (need > static_cast<double>(budget_)) {
    verdict.kind = ValidityVerdict::Kind::OverBudget;
    verdict.required = need;
    return verdict;
  }
  CompiledFormula f(p, I_, *support);
  std::vector<Elem> frame(std::max(f.frameSize(), k), 0);
  const std::size_t base = I_.size();
  while (true) {
    if (!f.eval(frame.data())) {
      verdict.kind = ValidityVerdict::Kind::Invalid;
      verdict.counterexample = State(support, Valuation(frame.begin(), frame.begin() + k));
      return verdict;
    }
    std::size_t i = 0;
    for (; i < k; ++i) {
      if (++frame[i] < base) break;
      frame[i] = 0;
    }
    if (i == k) return verdict;
  }
}

}  // namespace cbv

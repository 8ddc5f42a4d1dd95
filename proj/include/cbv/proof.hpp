#pragma once

// Derivation trees and the textual proof format:
//
//   node  ::= '(' RULE '{' pre '}' stmt '{' post '}' (key '=' value)* node* ')'
//   value ::= '[' vars ':=' terms ']'
//
// Assertions may use the reserved `$k` names. `#` starts a comment.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cbv/syntax.hpp"

namespace cbv {

enum class Rule {
  Skip,
  Assign,
  Comp,
  If,
  While,
  Cons,
  Block,
  Call,
  Recursion,
  Recursion1,
  Subst,
  Inv,
  Exists,
  Assume,
};

std::string_view ruleName(Rule r);
std::optional<Rule> ruleFromName(std::string_view name);

struct Derivation {
  Rule rule = Rule::Skip;
  Triple conclusion;
  std::vector<Derivation> children;
  /// SUBST: the renaming [x̄ := ȳ].
  std::optional<Substitution> map;

  friend bool operator==(const Derivation&, const Derivation&) = default;
};

std::string renderProof(const Derivation& d);
Derivation parseProof(std::string_view text);
Derivation readProofFile(const std::string& path);
void writeProofFile(const std::string& path, const Derivation& d);

}  // namespace cbv

#pragma once

// Finite first-order interpretations. Elements are small integers
// 0..size-1; every element is denoted by at least one constant symbol.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cbv/syntax.hpp"

namespace cbv {

using Elem = std::uint16_t;

class Interpretation {
 public:
  struct Function {
    std::size_t arity = 0;
    /// Row-major over argument tuples, first argument most significant.
    std::vector<Elem> table;
  };
  struct Relation {
    std::size_t arity = 0;
    std::vector<bool> table;
  };

  /// Integers mod n: numerals 0..n-1, + - *, = and <= on representatives.
  static Interpretation zmod(std::size_t n);
  /// Model-file syntax:
  ///   domain: d0 d1 d2
  ///   const 0 = d0
  ///   fun + : d1 d2 -> d0
  ///   rel <= : d0 d1
  ///   rel R/2            (declares an empty relation)
  ///   zmod 3             (start from the builtin model)
  static Interpretation parse(std::string_view text);
  /// "zmod:N" or a model-file path.
  static Interpretation load(const std::string& spec);

  std::size_t size() const { return elements_.size(); }
  const std::string& elementName(Elem e) const { return elements_.at(e); }
  /// The canonical constant symbol denoting `e`.
  const std::string& constantFor(Elem e) const { return canonical_.at(e); }
  std::optional<Elem> constant(std::string_view symbol) const;
  const Function* function(std::string_view symbol) const;
  const Relation* relation(std::string_view symbol) const;
  const std::string& name() const { return name_; }

  /// `0 = 1` when those constants exist and differ, `false` otherwise.
  Formula falsum() const;

 private:
  Interpretation() = default;
  void finish();

  std::string name_;
  std::vector<std::string> elements_;
  std::map<std::string, Elem, std::less<>> constants_;
  std::vector<std::string> canonical_;
  std::map<std::string, Function, std::less<>> functions_;
  std::map<std::string, Relation, std::less<>> relations_;
};

}  // namespace cbv

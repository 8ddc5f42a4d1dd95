#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "cbv/syntax.hpp"

namespace cbv {

struct ParseOptions {
  /// Accept `begin local skip ; S end` in source text.
  bool allowEmptyBlock = true;
  /// Accept names from the reserved `$k` namespace (proof files only).
  bool allowFresh = false;
};

struct Token {
  enum class Kind { Ident, Fresh, Number, Symbol, End };
  Kind kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

std::vector<Token> tokenize(std::string_view text);

/// Recursive-descent parser over a token stream. The grammar is LL(1) apart
/// from a bounded backtrack at `(` inside assertions, where a parenthesised
/// formula and a parenthesised term share a prefix.
class Parser {
 public:
  Parser(std::string_view text, ParseOptions options = {});

  Program program();
  Stmt stmt();
  Formula formula();
  Expr expr();
  Triple triple();
  VarList varList();
  ExprList exprList();
  Substitution substitution();

  const Token& peek(std::size_t ahead = 0) const;
  bool at(std::string_view symbol) const;
  bool atEnd() const { return peek().kind == Token::Kind::End; }
  bool accept(std::string_view symbol);
  void expect(std::string_view symbol);
  std::string identifier();
  [[noreturn]] void fail(std::vector<std::string> expected) const;

 private:
  Stmt simpleStmt();
  bool atDeclStart(std::size_t ahead) const;
  Formula implication();
  Formula disjunction();
  Formula conjunction();
  Formula unary();
  Formula primary();
  Formula atomFormula();
  Expr additive();
  Expr multiplicative();
  Expr termAtom();
  std::string variable();

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  ParseOptions options_;
};

Program parseProgram(std::string_view text, ParseOptions options = {});
Stmt parseStmt(std::string_view text, ParseOptions options = {});
Formula parseFormula(std::string_view text, ParseOptions options = {});
Expr parseExpr(std::string_view text, ParseOptions options = {});
Triple parseTriple(std::string_view text, ParseOptions options = {});

}  // namespace cbv

#include "cbv/parser.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "cbv/errors.hpp"

namespace cbv {

namespace {

constexpr std::array kKeywords = {"proc", "main", "skip", "if",     "then",  "else",   "fi",
                                  "while", "do",  "od",   "begin", "local", "end",   "true",
                                  "false", "exists", "forall"};

bool isKeyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

bool isRelOp(const Token& t) {
  return t.kind == Token::Kind::Symbol &&
         (t.text == "=" || t.text == "<=" || t.text == "<" || t.text == ">=" || t.text == ">");
}

bool isIdentStart(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool isIdentChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t line = 1;
  std::size_t col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    std::size_t startLine = line;
    std::size_t startCol = col;
    std::size_t start = i;
    if (isIdentStart(c)) {
      std::size_t j = i;
      while (j < text.size() && isIdentChar(text[j])) ++j;
      advance(j - i);
      out.push_back({Token::Kind::Ident, std::string(text.substr(start, i - start)), startLine, startCol});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      advance(j - i);
      out.push_back({Token::Kind::Number, std::string(text.substr(start, i - start)), startLine, startCol});
      continue;
    }
    if (c == '$') {
      std::size_t j = i + 1;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      if (j == i + 1) throw ParseError(startLine, startCol, "$", {"fresh variable $k"});
      advance(j - i);
      out.push_back({Token::Kind::Fresh, std::string(text.substr(start, i - start)), startLine, startCol});
      continue;
    }
    static constexpr std::array kTwoChar = {":=", "::", "->", "<=", ">="};
    std::string_view rest = text.substr(i);
    bool matched = false;
    for (std::string_view sym : kTwoChar) {
      if (rest.starts_with(sym)) {
        advance(2);
        out.push_back({Token::Kind::Symbol, std::string(sym), startLine, startCol});
        matched = true;
        break;
      }
    }
    if (matched) continue;
    static constexpr std::string_view kOneChar = "(),;:{}[]=<>+-*&|!";
    if (kOneChar.find(c) != std::string_view::npos) {
      advance(1);
      out.push_back({Token::Kind::Symbol, std::string(1, c), startLine, startCol});
      continue;
    }
    throw ParseError(startLine, startCol, std::string(1, c), {"a token"});
  }
  out.push_back({Token::Kind::End, "", line, col});
  return out;
}

Parser::Parser(std::string_view text, ParseOptions options)
    : tokens_(tokenize(text)), options_(options) {}

const Token& Parser::peek(std::size_t ahead) const {
  return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
}

bool Parser::at(std::string_view symbol) const {
  const Token& t = peek();
  return (t.kind == Token::Kind::Symbol || t.kind == Token::Kind::Ident) && t.text == symbol;
}

bool Parser::accept(std::string_view symbol) {
  if (!at(symbol)) return false;
  ++pos_;
  return true;
}

void Parser::expect(std::string_view symbol) {
  if (!accept(symbol)) fail({"'" + std::string(symbol) + "'"});
}

void Parser::fail(std::vector<std::string> expected) const {
  const Token& t = peek();
  throw ParseError(t.line, t.column, t.kind == Token::Kind::End ? "end of input" : t.text,
                   std::move(expected));
}

std::string Parser::identifier() {
  const Token& t = peek();
  if (t.kind != Token::Kind::Ident || isKeyword(t.text)) fail({"identifier"});
  ++pos_;
  return t.text;
}

std::string Parser::variable() {
  const Token& t = peek();
  if (t.kind == Token::Kind::Fresh) {
    if (!options_.allowFresh) {
      throw ParseError(t.line, t.column, t.text, {"a source variable ($-names are reserved)"});
    }
    ++pos_;
    return t.text;
  }
  if (t.kind != Token::Kind::Ident || isKeyword(t.text)) fail({"variable"});
  ++pos_;
  return t.text;
}

VarList Parser::varList() {
  VarList vars{variable()};
  while (accept(",")) vars.push_back(variable());
  return vars;
}

ExprList Parser::exprList() {
  ExprList list{expr()};
  while (accept(",")) list.push_back(expr());
  return list;
}

bool Parser::atDeclStart(std::size_t ahead) const {
  const Token& t = peek(ahead);
  if (t.kind == Token::Kind::Ident && t.text == "proc") return true;
  if (t.kind != Token::Kind::Ident || isKeyword(t.text)) return false;
  if (peek(ahead + 1).text != "(" || peek(ahead + 1).kind != Token::Kind::Symbol) return false;
  std::size_t k = ahead + 2;
  while (peek(k).kind != Token::Kind::End && peek(k).text != ")") ++k;
  return peek(k + 1).kind == Token::Kind::Symbol && peek(k + 1).text == "::";
}

Program Parser::program() {
  std::vector<ProcDecl> decls;
  while (atDeclStart(0)) {
    accept("proc");
    ProcDecl d{identifier(), {}, Stmt::skip()};
    expect("(");
    if (!at(")")) d.formals = varList();
    expect(")");
    expect("::");
    d.body = stmt();
    decls.push_back(std::move(d));
  }
  if (!at("main")) fail({"'proc'", "'main'"});
  ++pos_;
  expect(":");
  Stmt main = stmt();
  if (!atEnd()) fail({"';'", "end of input"});
  return Program(std::move(decls), std::move(main));
}

Stmt Parser::stmt() {
  Stmt first = simpleStmt();
  if (!at(";")) return first;
  // A trailing `;` may separate a declaration body from what follows.
  const Token& next = peek(1);
  if (next.kind == Token::Kind::End || (next.kind == Token::Kind::Ident && next.text == "main") ||
      atDeclStart(1)) {
    ++pos_;
    return first;
  }
  ++pos_;
  return Stmt::seq(std::move(first), stmt());
}

Stmt Parser::simpleStmt() {
  if (accept("skip")) return Stmt::skip();
  if (accept("if")) {
    Formula cond = formula();
    if (!cond.isQuantifierFree()) fail({"quantifier-free guard"});
    expect("then");
    Stmt a = stmt();
    expect("else");
    Stmt b = stmt();
    expect("fi");
    return Stmt::ifThenElse(std::move(cond), std::move(a), std::move(b));
  }
  if (accept("while")) {
    Formula cond = formula();
    if (!cond.isQuantifierFree()) fail({"quantifier-free guard"});
    expect("do");
    Stmt body = stmt();
    expect("od");
    return Stmt::loop(std::move(cond), std::move(body));
  }
  if (accept("begin")) {
    expect("local");
    VarList locals;
    ExprList inits;
    if (at("skip")) {
      if (!options_.allowEmptyBlock) fail({"local variable list (empty blocks are disabled)"});
      ++pos_;
    } else {
      locals = varList();
      expect(":=");
      inits = exprList();
    }
    expect(";");
    Stmt body = stmt();
    expect("end");
    return Stmt::block(std::move(locals), std::move(inits), std::move(body));
  }
  if (accept("(")) {
    Stmt inner = stmt();
    expect(")");
    return inner;
  }
  const Token& t = peek();
  if ((t.kind == Token::Kind::Ident && !isKeyword(t.text)) || t.kind == Token::Kind::Fresh) {
    if (t.kind == Token::Kind::Ident && peek(1).kind == Token::Kind::Symbol && peek(1).text == "(") {
      std::string name = identifier();
      expect("(");
      ExprList args;
      if (!at(")")) args = exprList();
      expect(")");
      return Stmt::call(std::move(name), std::move(args));
    }
    VarList targets = varList();
    expect(":=");
    ExprList sources = exprList();
    return Stmt::assign(std::move(targets), std::move(sources));
  }
  fail({"statement"});
}

Formula Parser::formula() { return implication(); }

Formula Parser::implication() {
  Formula lhs = disjunction();
  if (accept("->")) return Formula::implies(std::move(lhs), implication());
  return lhs;
}

Formula Parser::disjunction() {
  std::vector<Formula> ops{conjunction()};
  while (accept("|")) ops.push_back(conjunction());
  return ops.size() == 1 ? ops.front() : Formula::disj(std::move(ops));
}

Formula Parser::conjunction() {
  std::vector<Formula> ops{unary()};
  while (accept("&")) ops.push_back(unary());
  return ops.size() == 1 ? ops.front() : Formula::conj(std::move(ops));
}

Formula Parser::unary() {
  if (accept("!")) return Formula::negation(unary());
  bool isExists = at("exists");
  if (isExists || at("forall")) {
    ++pos_;
    VarList vars = varList();
    expect(":");
    Formula body = formula();
    try {
      return isExists ? Formula::exists(std::move(vars), std::move(body))
                      : Formula::forall(std::move(vars), std::move(body));
    } catch (const std::invalid_argument&) {
      fail({"duplicate-free bound variables"});
    } catch (const ProgramError&) {
      fail({"duplicate-free bound variables"});
    }
  }
  return primary();
}

Formula Parser::primary() {
  if (accept("true")) return Formula::truth();
  if (accept("false")) return Formula::falsity();
  if (at("(")) {
    std::size_t save = pos_;
    ++pos_;
    try {
      Formula inner = formula();
      if (accept(")")) {
        const Token& next = peek();
        bool continuesTerm = isRelOp(next) || (next.kind == Token::Kind::Symbol &&
                                               (next.text == "+" || next.text == "-" || next.text == "*"));
        if (!continuesTerm) return inner;
      }
    } catch (const ParseError&) {
    }
    pos_ = save;
  }
  return atomFormula();
}

Formula Parser::atomFormula() {
  Expr lhs = expr();
  if (isRelOp(peek())) {
    std::string rel = peek().text;
    ++pos_;
    Expr rhs = expr();
    return Formula::atom(std::move(rel), {std::move(lhs), std::move(rhs)});
  }
  if (lhs.kind() == Expr::Kind::Apply && !lhs.name().empty() &&
      isIdentStart(lhs.name().front())) {
    return Formula::atom(lhs.name(), ExprList(lhs.args().begin(), lhs.args().end()));
  }
  fail({"relation symbol"});
}

Expr Parser::expr() { return additive(); }

Expr Parser::additive() {
  Expr lhs = multiplicative();
  while (at("+") || at("-")) {
    std::string op = peek().text;
    ++pos_;
    lhs = Expr::apply(op, {lhs, multiplicative()});
  }
  return lhs;
}

Expr Parser::multiplicative() {
  Expr lhs = termAtom();
  while (accept("*")) lhs = Expr::apply("*", {lhs, termAtom()});
  return lhs;
}

Expr Parser::termAtom() {
  const Token& t = peek();
  if (t.kind == Token::Kind::Number) {
    ++pos_;
    return Expr::constant(t.text);
  }
  if (accept("(")) {
    Expr inner = expr();
    expect(")");
    return inner;
  }
  if (t.kind == Token::Kind::Ident && !isKeyword(t.text) && peek(1).kind == Token::Kind::Symbol &&
      peek(1).text == "(") {
    std::string fn = identifier();
    expect("(");
    ExprList args;
    if (!at(")")) args = exprList();
    expect(")");
    return Expr::apply(std::move(fn), std::move(args));
  }
  if (t.kind == Token::Kind::Ident || t.kind == Token::Kind::Fresh) return Expr::var(variable());
  fail({"expression"});
}

Triple Parser::triple() {
  expect("{");
  Formula pre = formula();
  expect("}");
  Stmt s = stmt();
  expect("{");
  Formula post = formula();
  expect("}");
  return Triple{std::move(pre), std::move(s), std::move(post)};
}

Substitution Parser::substitution() {
  expect("[");
  VarList vars;
  ExprList terms;
  if (!at(":=")) vars = varList();
  expect(":=");
  if (!at("]")) terms = exprList();
  expect("]");
  if (vars.size() != terms.size()) fail({"equal-length substitution lists"});
  return Substitution(std::move(vars), std::move(terms));
}

namespace {

template <typename T, typename F>
T parseWhole(std::string_view text, ParseOptions options, F fn) {
  Parser p(text, options);
  T value = fn(p);
  if (!p.atEnd()) p.fail({"end of input"});
  return value;
}

}  // namespace

Program parseProgram(std::string_view text, ParseOptions options) {
  Parser p(text, options);
  return p.program();
}

Stmt parseStmt(std::string_view text, ParseOptions options) {
  return parseWhole<Stmt>(text, options, [](Parser& p) { return p.stmt(); });
}

Formula parseFormula(std::string_view text, ParseOptions options) {
  return parseWhole<Formula>(text, options, [](Parser& p) { return p.formula(); });
}

Expr parseExpr(std::string_view text, ParseOptions options) {
  return parseWhole<Expr>(text, options, [](Parser& p) { return p.expr(); });
}

Triple parseTriple(std::string_view text, ParseOptions options) {
  return parseWhole<Triple>(text, options, [](Parser& p) { return p.triple(); });
}

}  // namespace cbv

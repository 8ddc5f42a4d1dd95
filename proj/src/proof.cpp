#include "cbv/proof.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include "cbv/errors.hpp"
#include "cbv/parser.hpp"

namespace cbv {

namespace {

constexpr std::array<std::pair<Rule, std::string_view>, 14> kRuleNames = {{
    {Rule::Skip, "SKIP"},
    {Rule::Assign, "ASSIGN"},
    {Rule::Comp, "COMP"},
    {Rule::If, "IF"},
    {Rule::While, "WHILE"},
    {Rule::Cons, "CONS"},
    {Rule::Block, "BLOCK"},
    {Rule::Call, "CALL"},
    {Rule::Recursion, "RECURSION"},
    {Rule::Recursion1, "RECURSION1"},
    {Rule::Subst, "SUBST"},
    {Rule::Inv, "INV"},
    {Rule::Exists, "EXISTS"},
    {Rule::Assume, "ASSUME"},
}};

void render(std::ostringstream& os, const Derivation& d, std::size_t indent) {
  os << std::string(indent, ' ') << '(' << ruleName(d.rule) << ' ' << toString(d.conclusion);
  if (d.map) os << " map=" << toString(*d.map);
  for (const auto& c : d.children) {
    os << '\n';
    render(os, c, indent + 2);
  }
  os << ')';
}

Derivation parseNode(Parser& p) {
  p.expect("(");
  const Token& head = p.peek();
  auto rule = ruleFromName(head.text);
  if (head.kind != Token::Kind::Ident || !rule) p.fail({"rule name"});
  p.accept(head.text);
  Derivation d;
  d.rule = *rule;
  d.conclusion = p.triple();
  while (p.peek().kind == Token::Kind::Ident) {
    if (p.peek().text != "map") p.fail({"'map'", "'('", "')'"});
    p.accept("map");
    p.expect("=");
    if (d.map) p.fail({"a single 'map'"});
    d.map = p.substitution();
  }
  while (p.at("(")) d.children.push_back(parseNode(p));
  p.expect(")");
  return d;
}

}  // namespace

std::string_view ruleName(Rule r) {
  for (const auto& [rule, name] : kRuleNames) {
    if (rule == r) return name;
  }
  return "?";
}

std::optional<Rule> ruleFromName(std::string_view name) {
  for (const auto& [rule, n] : kRuleNames) {
    if (n == name) return rule;
  }
  return std::nullopt;
}

std::string renderProof(const Derivation& d) {
  std::ostringstream os;
  render(os, d, 0);
  os << '\n';
  return os.str();
}

Derivation parseProof(std::string_view text) {
  Parser p(text, ParseOptions{.allowEmptyBlock = true, .allowFresh = true});
  Derivation d = parseNode(p);
  if (!p.atEnd()) p.fail({"end of input"});
  return d;
}

Derivation readProofFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read proof file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parseProof(buf.str());
}

void writeProofFile(const std::string& path, const Derivation& d) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write proof file '" + path + "'");
  out << renderProof(d);
  if (!out) throw Error("failed writing proof file '" + path + "'");
}

}  // namespace cbv

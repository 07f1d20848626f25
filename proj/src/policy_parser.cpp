// Copyright 2026 the meshplane authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cctype>
#include <sstream>

#include "mesh/errors.hpp"
#include "mesh/policy.hpp"

namespace mesh {

const char* to_string(Action v) {
  switch (v) {
    case Action::kRead: return "read";
    case Action::kWrite: return "write";
    case Action::kManage: return "manage";
  }
  return "";
}

const char* to_string(Effect v) {
  switch (v) {
    case Effect::kAllow: return "allow";
    case Effect::kDeny: return "deny";
  }
  return "";
}

std::optional<Action> action_from_string(const std::string& s) {
  if (s == "read") return Action::kRead;
  if (s == "write") return Action::kWrite;
  if (s == "manage") return Action::kManage;
  return std::nullopt;
}

namespace {

enum class TokenKind { kWord, kString, kPunct, kEnd };

struct Token {
  TokenKind kind = TokenKind::kEnd;
  std::string text;
  int line = 1;
  int column = 1;
};

bool word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
         c == '/' || c == '*';
}

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  Token next() {
    skip_space();
    Token token;
    token.line = line_;
    token.column = column_;
    if (pos_ >= text_.size()) {
      token.kind = TokenKind::kEnd;
      return token;
    }
    char c = text_[pos_];
    if (c == '"') {
      advance();
      std::string value;
      while (pos_ < text_.size() && text_[pos_] != '"') {
        if (text_[pos_] == '\n') fail(token, "unterminated string");
        value += text_[pos_];
        advance();
      }
      if (pos_ >= text_.size()) fail(token, "unterminated string");
      advance();  // closing quote
      token.kind = TokenKind::kString;
      token.text = std::move(value);
      return token;
    }
    if (word_char(c)) {
      std::string value;
      while (pos_ < text_.size() && word_char(text_[pos_])) {
        value += text_[pos_];
        advance();
      }
      token.kind = TokenKind::kWord;
      token.text = std::move(value);
      return token;
    }
    if (c == '{' || c == '}' || c == '(' || c == ')' || c == ';' || c == ':') {
      token.kind = TokenKind::kPunct;
      token.text = std::string(1, c);
      advance();
      return token;
    }
    fail(token, std::string("unexpected character '") + c + "'");
  }

  [[noreturn]] static void fail(const Token& at, const std::string& message) {
    std::ostringstream out;
    out << "line " << at.line << ", column " << at.column << ": " << message;
    throw MeshError(ErrorCode::kParse, out.str());
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {  // comment to end of line
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : lexer_(text) { current_ = lexer_.next(); }

  Policy parse() {
    Policy policy;
    expect_word("policy");
    policy.name = expect_string("policy name");
    expect_word("scope");
    policy.scope = parse_scope();
    expect_punct("{");
    while (!at_punct("}")) {
      policy.rules.push_back(parse_rule());
    }
    expect_punct("}");
    if (current_.kind != TokenKind::kEnd) {
      Lexer::fail(current_, "expected end of input after policy block");
    }
    check_scope_consistency(policy);
    return policy;
  }

 private:
  PolicyScope parse_scope() {
    auto word = expect_any_word("scope kind");
    if (word == "global") return {PolicyScope::Kind::kGlobal, ""};
    if (word == "domain") return {PolicyScope::Kind::kDomain, expect_any_word("domain name")};
    if (word == "product") return {PolicyScope::Kind::kProduct, expect_any_word("product id")};
    Lexer::fail(previous_, "scope must be global, domain or product");
  }

  Rule parse_rule() {
    Rule rule;
    auto effect = expect_any_word("allow or deny");
    if (effect == "allow") {
      rule.effect = Effect::kAllow;
    } else if (effect == "deny") {
      rule.effect = Effect::kDeny;
    } else {
      Lexer::fail(previous_, "expected 'allow' or 'deny', got '" + effect + "'");
    }
    auto action = expect_any_word("action");
    auto parsed_action = action_from_string(action);
    if (!parsed_action) {
      Lexer::fail(previous_, "unknown action '" + action + "' (read, write or manage)");
    }
    rule.action = *parsed_action;
    expect_word("on");
    rule.resource = parse_resource();
    expect_word("to");
    rule.subject = parse_subject();
    if (at_word("when")) {
      consume();
      rule.condition = parse_condition();
    }
    expect_punct(";");
    return rule;
  }

  ResourcePattern parse_resource() {
    ResourcePattern pattern;
    pattern.product_glob = expect_any_word("resource pattern");
    if (at_punct(":")) {
      consume();
      pattern.port_glob = expect_any_word("port pattern");
      if (at_punct(":")) {
        consume();
        pattern.column_glob = expect_any_word("column pattern");
      }
    }
    return pattern;
  }

  SubjectExpr parse_subject() {
    SubjectExpr expr;
    if (at_word("any")) {
      consume();
      expr.any = true;
      return expr;
    }
    expr.disjuncts.push_back(parse_subject_conjunction());
    while (at_word("or")) {
      consume();
      expr.disjuncts.push_back(parse_subject_conjunction());
    }
    return expr;
  }

  std::vector<SubjectTerm> parse_subject_conjunction() {
    std::vector<SubjectTerm> terms{parse_subject_term()};
    while (at_word("and")) {
      consume();
      terms.push_back(parse_subject_term());
    }
    return terms;
  }

  SubjectTerm parse_subject_term() {
    SubjectTerm term;
    if (at_word("not")) {
      consume();
      term.negated = true;
    }
    auto kind = expect_any_word("subject matcher");
    if (kind == "role") term.kind = SubjectTermKind::kRole;
    else if (kind == "user") term.kind = SubjectTermKind::kUser;
    else if (kind == "domain") term.kind = SubjectTermKind::kDomain;
    else if (kind == "attr") term.kind = SubjectTermKind::kAttr;
    else Lexer::fail(previous_, "expected role, user, domain or attr, got '" + kind + "'");
    expect_punct("(");
    term.name = expect_any_word("matcher argument");
    expect_punct(")");
    return term;
  }

  Condition parse_condition() {
    Condition cond;
    cond.disjuncts.push_back(parse_label_conjunction());
    while (at_word("or")) {
      consume();
      cond.disjuncts.push_back(parse_label_conjunction());
    }
    return cond;
  }

  std::vector<LabelTerm> parse_label_conjunction() {
    std::vector<LabelTerm> terms{parse_label_term()};
    while (at_word("and")) {
      consume();
      terms.push_back(parse_label_term());
    }
    return terms;
  }

  LabelTerm parse_label_term() {
    LabelTerm term;
    if (at_word("not")) {
      consume();
      term.negated = true;
    }
    expect_word("label");
    expect_punct("(");
    term.label = expect_any_word("label name");
    expect_punct(")");
    return term;
  }

  // Scope(product) policies may only reference resources of that product;
  // scope(domain) only resources within that domain.
  void check_scope_consistency(const Policy& policy) {
    for (std::size_t i = 0; i < policy.rules.size(); ++i) {
      const auto& glob = policy.rules[i].resource.product_glob;
      if (policy.scope.kind == PolicyScope::Kind::kProduct && glob != policy.scope.name) {
        throw MeshError(ErrorCode::kScopeMismatch,
                        "policy '" + policy.name + "' rule " + std::to_string(i) +
                            ": product-scope policies must target exactly '" + policy.scope.name +
                            "', got '" + glob + "'");
      }
      if (policy.scope.kind == PolicyScope::Kind::kDomain &&
          !glob.starts_with(policy.scope.name + "/")) {
        throw MeshError(ErrorCode::kScopeMismatch,
                        "policy '" + policy.name + "' rule " + std::to_string(i) +
                            ": domain-scope policies must target '" + policy.scope.name +
                            "/...', got '" + glob + "'");
      }
    }
  }

  bool at_word(const char* w) const {
    return current_.kind == TokenKind::kWord && current_.text == w;
  }
  bool at_punct(const char* p) const {
    return current_.kind == TokenKind::kPunct && current_.text == p;
  }

  void consume() {
    previous_ = current_;
    current_ = lexer_.next();
  }

  void expect_word(const char* w) {
    if (!at_word(w)) {
      Lexer::fail(current_, "expected '" + std::string(w) + "', got '" + describe(current_) + "'");
    }
    consume();
  }

  std::string expect_any_word(const char* what) {
    if (current_.kind != TokenKind::kWord) {
      Lexer::fail(current_, "expected " + std::string(what) + ", got '" + describe(current_) + "'");
    }
    auto text = current_.text;
    consume();
    return text;
  }

  std::string expect_string(const char* what) {
    if (current_.kind != TokenKind::kString) {
      Lexer::fail(current_,
                  "expected quoted " + std::string(what) + ", got '" + describe(current_) + "'");
    }
    auto text = current_.text;
    consume();
    return text;
  }

  void expect_punct(const char* p) {
    if (!at_punct(p)) {
      Lexer::fail(current_, "expected '" + std::string(p) + "', got '" + describe(current_) + "'");
    }
    consume();
  }

  static std::string describe(const Token& token) {
    switch (token.kind) {
      case TokenKind::kEnd: return "end of input";
      case TokenKind::kString: return "\"" + token.text + "\"";
      default: return token.text;
    }
  }

  Lexer lexer_;
  Token current_;
  Token previous_;
};

void write_subject(std::ostringstream& out, const SubjectExpr& subject) {
  if (subject.any) {
    out << "any";
    return;
  }
  bool first_disjunct = true;
  for (const auto& conjunction : subject.disjuncts) {
    if (!first_disjunct) out << " or ";
    first_disjunct = false;
    bool first_term = true;
    for (const auto& term : conjunction) {
      if (!first_term) out << " and ";
      first_term = false;
      if (term.negated) out << "not ";
      switch (term.kind) {
        case SubjectTermKind::kRole: out << "role"; break;
        case SubjectTermKind::kUser: out << "user"; break;
        case SubjectTermKind::kDomain: out << "domain"; break;
        case SubjectTermKind::kAttr: out << "attr"; break;
      }
      out << "(" << term.name << ")";
    }
  }
}

void write_condition(std::ostringstream& out, const Condition& condition) {
  bool first_disjunct = true;
  for (const auto& conjunction : condition.disjuncts) {
    if (!first_disjunct) out << " or ";
    first_disjunct = false;
    bool first_term = true;
    for (const auto& term : conjunction) {
      if (!first_term) out << " and ";
      first_term = false;
      if (term.negated) out << "not ";
      out << "label(" << term.label << ")";
    }
  }
}

}  // namespace

Policy parse_policy(const std::string& text) { return Parser(text).parse(); }

std::string serialize_rule(const Rule& rule) {
  std::ostringstream out;
  out << to_string(rule.effect) << " " << to_string(rule.action) << " on "
      << rule.resource.product_glob;
  if (rule.resource.port_glob) {
    out << ":" << *rule.resource.port_glob;
    if (rule.resource.column_glob) out << ":" << *rule.resource.column_glob;
  }
  out << " to ";
  write_subject(out, rule.subject);
  if (rule.condition) {
    out << " when ";
    write_condition(out, *rule.condition);
  }
  out << ";";
  return out.str();
}

std::string serialize_policy(const Policy& policy) {
  std::ostringstream out;
  out << "policy \"" << policy.name << "\" scope ";
  switch (policy.scope.kind) {
    case PolicyScope::Kind::kGlobal: out << "global"; break;
    case PolicyScope::Kind::kDomain: out << "domain " << policy.scope.name; break;
    case PolicyScope::Kind::kProduct: out << "product " << policy.scope.name; break;
  }
  out << " {\n";
  for (const auto& rule : policy.rules) {
    out << "  " << serialize_rule(rule) << "\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace mesh

// Copyright 2026 The legone Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "legone/dsl.h"

#include <cctype>
#include <map>
#include <nlohmann/json.hpp>
#include <regex>
#include <set>
#include <sstream>

#include "legone/blocks.h"
#include "legone/json_io.h"

namespace legone {

std::string Diagnostic::ToString(std::string_view file) const {
  std::ostringstream os;
  os << file << ":" << loc.line << ":" << loc.col << ": "
     << (severity == Severity::kError ? "error" : "warning") << "[" << code
     << "]: " << message;
  return os.str();
}

bool HasErrors(const std::vector<Diagnostic>& diags) {
  for (const auto& d : diags) {
    if (d.severity == Severity::kError) return true;
  }
  return false;
}

std::string Argument::ToString() const {
  switch (kind) {
    case Kind::kIdent:
      return ident;
    case Kind::kPayoff:
      return payoff.ToString();
    case Kind::kNumber:
      return number.ToString();
  }
  return "?";
}

namespace {

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { kIdent, kNumber, kSym, kNewline, kEnd };

struct Token {
  Tok kind;
  std::string text;
  SourceLoc loc;
};

struct LexOutput {
  std::vector<Token> tokens;
  std::vector<Diagnostic> diags;
};

LexOutput Lex(std::string_view src) {
  LexOutput out;
  int line = 1, col = 1;
  int depth = 0;
  std::size_t i = 0;
  auto emit = [&](Tok k, std::string text, SourceLoc loc) {
    out.tokens.push_back({k, std::move(text), loc});
  };
  auto emit_newline = [&](SourceLoc loc) {
    if (!out.tokens.empty() && out.tokens.back().kind != Tok::kNewline) {
      emit(Tok::kNewline, "\\n", loc);
    }
  };
  while (i < src.size()) {
    char c = src[i];
    SourceLoc loc{line, col};
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') {
        ++i;
        ++col;
      }
      continue;
    }
    if (c == '\n') {
      if (depth == 0) emit_newline(loc);
      ++i;
      ++line;
      col = 1;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      ++col;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) ||
                                src[j] == '_')) {
        ++j;
      }
      emit(Tok::kIdent, std::string(src.substr(i, j - i)), loc);
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    bool dot_number = c == '.' && i + 1 < src.size() &&
                      std::isdigit(static_cast<unsigned char>(src[i + 1]));
    if (std::isdigit(static_cast<unsigned char>(c)) || dot_number) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && src[j] == '.' && j + 1 < src.size() &&
          std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
          ++j;
        }
      }
      emit(Tok::kNumber, std::string(src.substr(i, j - i)), loc);
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    static const char* kTwo[] = {"<=", ">=", "==", "->"};
    bool matched = false;
    for (const char* s : kTwo) {
      if (src.substr(i, 2) == s) {
        emit(Tok::kSym, s, loc);
        i += 2;
        col += 2;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    static const std::string kOne = "()[],:.=+-*/<>";
    if (kOne.find(c) != std::string::npos) {
      if (c == '(' || c == '[') ++depth;
      if ((c == ')' || c == ']') && depth > 0) --depth;
      emit(Tok::kSym, std::string(1, c), loc);
      ++i;
      ++col;
      continue;
    }
    Diagnostic d;
    d.code = "LexError";
    d.loc = loc;
    if (static_cast<unsigned char>(c) >= 0x80) {
      d.message = "non-ASCII character in source";
      while (i < src.size() && static_cast<unsigned char>(src[i]) >= 0x80) ++i;
    } else {
      d.message = std::string("unexpected character '") + c + "'";
      ++i;
    }
    ++col;
    out.diags.push_back(d);
  }
  emit_newline({line, col});
  out.tokens.push_back({Tok::kEnd, "<end of input>", {line, col}});
  return out;
}

// ---------------------------------------------------------------------------
// Parser

struct ParseError {
  Diagnostic diag;
  std::size_t pos;
};

const std::regex kBasePayoff("u([1-9])");
const std::regex kLossName("f([1-9])");

bool IsReserved(const std::string& s) {
  static const std::set<std::string> kWords = {
      "players", "option", "block", "end", "def", "return", "forall",
      "exists", "in", "and", "or", "realize", "None", "Real", "Payoff",
      "Comp", "min", "max", "select", "delta", "f"};
  if (kWords.count(s)) return true;
  return std::regex_match(s, kBasePayoff) || std::regex_match(s, kLossName) ||
         std::regex_match(s, std::regex("Strategy[0-9]+"));
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  SourceProgram ParseProgram(std::vector<Diagnostic>& diags);
  Expr ParseStandaloneExpr(int players);
  Formula ParseStandaloneFormula(int players);

 private:
  const Token& Peek(std::size_t k = 0) const {
    std::size_t p = std::min(pos_ + k, toks_.size() - 1);
    return toks_[p];
  }
  bool IsSym(const char* s, std::size_t k = 0) const {
    return Peek(k).kind == Tok::kSym && Peek(k).text == s;
  }
  bool IsIdent(std::size_t k = 0) const { return Peek(k).kind == Tok::kIdent; }
  bool IsWord(const char* w, std::size_t k = 0) const {
    return IsIdent(k) && Peek(k).text == w;
  }
  bool AtNewline() const { return Peek().kind == Tok::kNewline; }
  bool AtEnd() const { return Peek().kind == Tok::kEnd; }
  Token Next() {
    Token t = Peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }

  [[noreturn]] void Fail(const SourceLoc& loc, const std::string& code,
                         const std::string& msg) {
    Diagnostic d;
    d.code = code;
    d.loc = loc;
    d.message = msg;
    throw ParseError{d, pos_};
  }
  [[noreturn]] void FailHere(const std::string& msg) {
    Fail(Peek().loc, "SyntaxError", msg + ", found '" + Peek().text + "'");
  }

  void Expect(const char* sym) {
    if (!IsSym(sym)) FailHere(std::string("expected '") + sym + "'");
    Next();
  }
  void ExpectWord(const char* w) {
    if (!IsWord(w)) FailHere(std::string("expected '") + w + "'");
    Next();
  }
  std::string ExpectIdent(const char* what) {
    if (!IsIdent()) FailHere(std::string("expected ") + what);
    return Next().text;
  }
  void ExpectNewline() {
    if (!AtNewline() && !AtEnd()) FailHere("expected end of line");
    if (AtNewline()) Next();
  }
  void SkipNewlines() {
    while (AtNewline()) Next();
  }
  void SkipLine() {
    while (!AtNewline() && !AtEnd()) Next();
    if (AtNewline()) Next();
  }

  BasicType ParseType();
  Rational ParseRationalLiteral();
  PayoffExpr ParsePayoffLiteral();
  std::vector<std::string> ParseArgList();
  bool ParenFollowedByParen(std::size_t k) const;

  Expr ParseExpr();
  Expr ParseTermExpr();
  Expr ParseUnary();
  Expr ParsePrimary();
  Expr ParseMaxPayoff(const PayoffExpr& p, const SourceLoc& loc);

  Formula ParseDisj();
  Formula ParseConj();
  Formula ParseUnit();
  AtomicProperty ParseAtomic();
  bool AtCmp() const;
  CmpOp ParseCmp();

  void ParseBlock(SourceProgram& prog, std::vector<Diagnostic>& diags);
  Param ParseParam();
  void ParseAlgorithm(SourceProgram& prog, std::vector<Diagnostic>& diags);
  Statement ParseStatement();
  Argument ParseArgument();

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int players_ = 2;
};

BasicType Parser::ParseType() {
  SourceLoc loc = Peek().loc;
  std::string t = ExpectIdent("a type");
  if (t == "None") return BasicType::None();
  if (t == "Real") return BasicType::Real();
  if (t == "Payoff") return BasicType::Payoff();
  if (t == "Comp") return BasicType::Comp();
  std::smatch m;
  static const std::regex kStrat("Strategy([1-9])");
  if (std::regex_match(t, m, kStrat)) {
    return BasicType::Strategy(std::stoi(m[1]));
  }
  Fail(loc, "SyntaxError", "unknown type '" + t + "'");
}

Rational Parser::ParseRationalLiteral() {
  bool neg = false;
  if (IsSym("-")) {
    Next();
    neg = true;
  }
  if (Peek().kind != Tok::kNumber) FailHere("expected a number");
  Token t = Next();
  Rational v;
  try {
    v = Rational::Parse(t.text);
    if (IsSym("/") && Peek(1).kind == Tok::kNumber) {
      Next();
      Rational d = Rational::Parse(Next().text);
      if (d.IsZero()) Fail(t.loc, "SyntaxError", "division by zero");
      v /= d;
    }
  } catch (const std::overflow_error&) {
    Fail(t.loc, "LexError", "numeric literal out of range");
  }
  return neg ? -v : v;
}

PayoffExpr Parser::ParsePayoffLiteral() {
  SourceLoc loc = Peek().loc;
  std::vector<std::pair<int, Rational>> terms;
  bool first = true;
  while (true) {
    Rational sign = 1;
    if (IsSym("-")) {
      Next();
      sign = -1;
    } else if (!first) {
      if (!IsSym("+")) break;
      Next();
    }
    Rational coef = 1;
    if (Peek().kind == Tok::kNumber) {
      coef = ParseRationalLiteral();
      Expect("*");
    }
    SourceLoc uloc = Peek().loc;
    std::string name = ExpectIdent("a base payoff u1..ur");
    std::smatch m;
    if (!std::regex_match(name, m, kBasePayoff)) {
      Fail(uloc, "SyntaxError",
           "payoff literals combine base payoffs u1..ur, found '" + name + "'");
    }
    terms.push_back({std::stoi(m[1]), sign * coef});
    first = false;
    if (!IsSym("+") && !IsSym("-")) break;
  }
  PayoffExpr p = PayoffExpr::Combination(std::move(terms));
  if (p.coeffs.empty()) {
    Fail(loc, "TypeMismatch", "payoff literal has no nonzero coefficient");
  }
  return p;
}

std::vector<std::string> Parser::ParseArgList() {
  Expect("(");
  std::vector<std::string> args;
  if (!IsSym(")")) {
    while (true) {
      if (IsSym("*")) {
        Next();
        args.push_back(kBoundSlot);
      } else {
        args.push_back(ExpectIdent("a strategy name"));
      }
      if (!IsSym(",")) break;
      Next();
    }
  }
  Expect(")");
  return args;
}

// True when the parenthesis at offset k closes and is immediately followed by
// another '(' - the shape of a payoff-literal head like (u1 - u2)(x, y).
bool Parser::ParenFollowedByParen(std::size_t k) const {
  if (!IsSym("(", k)) return false;
  int depth = 0;
  for (std::size_t p = pos_ + k; p < toks_.size(); ++p) {
    const Token& t = toks_[p];
    if (t.kind == Tok::kEnd || t.kind == Tok::kNewline) return false;
    if (t.kind != Tok::kSym) continue;
    if (t.text == "(") ++depth;
    if (t.text == ")" && --depth == 0) {
      return p + 1 < toks_.size() && toks_[p + 1].kind == Tok::kSym &&
             toks_[p + 1].text == "(";
    }
  }
  return false;
}

Expr Parser::ParseExpr() {
  Expr e = ParseTermExpr();
  while (IsSym("+") || IsSym("-")) {
    bool add = Next().text == "+";
    Expr r = ParseTermExpr();
    e = add ? MakeAdd(e, r) : MakeSub(e, r);
  }
  return e;
}

Expr Parser::ParseTermExpr() {
  Expr e = ParseUnary();
  while (IsSym("*") || IsSym("/")) {
    Token op = Next();
    Expr r = ParseUnary();
    if (op.text == "/") {
      if (auto c = ConstValue(r); c && c->IsZero()) {
        Fail(op.loc, "SyntaxError", "division by the constant zero");
      }
      e = MakeDiv(e, r);
    } else {
      e = MakeMul(e, r);
    }
  }
  return e;
}

Expr Parser::ParseUnary() {
  if (IsSym("-")) {
    Next();
    return MakeNeg(ParseUnary());
  }
  return ParsePrimary();
}

Expr Parser::ParseMaxPayoff(const PayoffExpr& p, const SourceLoc& loc) {
  std::vector<std::string> args = ParseArgList();
  int bound = 0;
  for (std::size_t s = 0; s < args.size(); ++s) {
    if (args[s] == kBoundSlot) {
      if (bound) Fail(loc, "SyntaxError", "max term binds exactly one slot");
      bound = static_cast<int>(s) + 1;
    }
  }
  if (!bound) Fail(loc, "SyntaxError", "max term needs one '*' slot");
  return MakeTerm(Term::MaxPayoff(bound, p, args));
}

Expr Parser::ParsePrimary() {
  const Token& t = Peek();
  SourceLoc loc = t.loc;
  auto no_star = [&](const std::vector<std::string>& args) {
    for (const auto& a : args) {
      if (a == kBoundSlot) Fail(loc, "SyntaxError", "'*' is only allowed in max terms");
    }
  };
  if (t.kind == Tok::kNumber) {
    try {
      return MakeConst(Rational::Parse(Next().text));
    } catch (const std::overflow_error&) {
      Fail(loc, "LexError", "numeric literal out of range");
    }
  }
  if (IsSym("(")) {
    if (ParenFollowedByParen(0)) {
      Next();
      PayoffExpr p = ParsePayoffLiteral();
      Expect(")");
      auto args = ParseArgList();
      no_star(args);
      return MakeTerm(Term::PayoffApp(p, args));
    }
    Next();
    Expr e = ParseExpr();
    Expect(")");
    return e;
  }
  if (t.kind != Tok::kIdent) FailHere("expected an expression");
  std::string name = t.text;
  std::smatch m;
  if (name == "delta") {
    Next();
    return MakeVar(kDeltaName);
  }
  if ((name == "min" || name == "max") && IsSym("(", 1) &&
      !(name == "max" && ParenFollowedByParen(1))) {
    Next();
    Expect("(");
    std::vector<Expr> kids{ParseExpr()};
    while (IsSym(",")) {
      Next();
      kids.push_back(ParseExpr());
    }
    Expect(")");
    return name == "min" ? MakeMin(kids) : MakeMax(kids);
  }
  if (name == "max") {
    Next();
    if (IsSym("(")) {
      Next();
      PayoffExpr p = ParsePayoffLiteral();
      Expect(")");
      return ParseMaxPayoff(p, loc);
    }
    SourceLoc hloc = Peek().loc;
    std::string head = ExpectIdent("a payoff after 'max'");
    PayoffExpr p;
    if (std::regex_match(head, m, kBasePayoff)) {
      p = PayoffExpr::Base(std::stoi(m[1]));
    } else if (IsReserved(head)) {
      Fail(hloc, "SyntaxError", "'" + head + "' is not a payoff");
    } else {
      p = PayoffExpr::Variable(head);
    }
    return ParseMaxPayoff(p, loc);
  }
  if (name == "select" && IsSym("(", 1)) {
    Next();
    Expect("(");
    Expr c = ParseExpr();
    Expect(",");
    Expr a = ParseExpr();
    Expect(",");
    Expr b = ParseExpr();
    Expect(")");
    return MakeSelect(c, a, b);
  }
  if (name == "f" && IsSym("(", 1)) {
    Next();
    auto args = ParseArgList();
    no_star(args);
    std::vector<Expr> losses;
    for (int i = 1; i <= players_; ++i) {
      losses.push_back(MakeTerm(Term::Loss(i, args)));
    }
    return MakeMax(losses);
  }
  if (std::regex_match(name, m, kLossName) && IsSym("(", 1)) {
    Next();
    auto args = ParseArgList();
    no_star(args);
    return MakeTerm(Term::Loss(std::stoi(m[1]), args));
  }
  if (std::regex_match(name, m, kBasePayoff) && IsSym("(", 1)) {
    Next();
    auto args = ParseArgList();
    no_star(args);
    return MakeTerm(Term::PayoffApp(PayoffExpr::Base(std::stoi(m[1])), args));
  }
  if (IsReserved(name)) {
    Fail(loc, "SyntaxError", "unexpected keyword '" + name + "' in expression");
  }
  Next();
  if (IsSym("(")) {
    auto args = ParseArgList();
    no_star(args);
    return MakeTerm(Term::PayoffApp(PayoffExpr::Variable(name), args));
  }
  return MakeVar(name);
}

bool Parser::AtCmp() const {
  return IsSym("<=") || IsSym(">=") || IsSym("=") || IsSym("==") ||
         IsSym("<") || IsSym(">");
}

CmpOp Parser::ParseCmp() {
  if (!AtCmp()) FailHere("expected a comparison operator");
  std::string s = Next().text;
  if (s == "<=") return CmpOp::kLe;
  if (s == ">=") return CmpOp::kGe;
  if (s == "<") return CmpOp::kLt;
  if (s == ">") return CmpOp::kGt;
  return CmpOp::kEq;
}

AtomicProperty Parser::ParseAtomic() {
  AtomicProperty a;
  while (IsWord("forall") || IsWord("exists")) {
    bool forall = Next().text == "forall";
    while (true) {
      SourceLoc bloc = Peek().loc;
      std::string name = ExpectIdent("a bound variable");
      if (IsReserved(name)) {
        Fail(bloc, "SyntaxError", "'" + name + "' cannot be bound");
      }
      if (forall) {
        Expect(":");
        BasicType t = ParseType();
        if (t.IsStrategy()) {
          a.forall_strategies.push_back({t.player, name});
        } else if (t.kind == TypeKind::kPayoff) {
          a.forall_payoffs.push_back(name);
        } else {
          Fail(bloc, "TypeMismatch",
               "universal quantifiers range over strategies or payoffs, not " +
                   t.ToString());
        }
      } else {
        RealBinder b;
        b.name = name;
        if (IsSym(":")) {
          Next();
          BasicType t = ParseType();
          if (t.kind != TypeKind::kReal) {
            Fail(bloc, "TypeMismatch", "existential variables are Real");
          }
        }
        if (IsWord("in")) {
          Next();
          Expect("[");
          b.lo = ParseRationalLiteral();
          Expect(",");
          b.hi = ParseRationalLiteral();
          Expect("]");
          if (b.hi < b.lo) Fail(bloc, "SyntaxError", "empty interval");
        }
        a.exists.push_back(b);
      }
      if (!IsSym(",")) break;
      Next();
    }
    Expect(".");
  }
  Comparison c1;
  c1.lhs = ParseExpr();
  c1.op = ParseCmp();
  c1.rhs = ParseExpr();
  a.body.push_back(c1);
  if (AtCmp()) {
    SourceLoc oloc = Peek().loc;
    CmpOp op2 = ParseCmp();
    if (op2 != c1.op || (op2 != CmpOp::kLe && op2 != CmpOp::kGe)) {
      Fail(oloc, "SyntaxError",
           "chained comparisons must repeat the same '<=' or '>='");
    }
    Comparison c2;
    c2.lhs = c1.rhs;
    c2.op = op2;
    c2.rhs = ParseExpr();
    a.body.push_back(c2);
  }
  return a;
}

Formula Parser::ParseUnit() {
  std::size_t save = pos_;
  if (!IsSym("(")) return MakeAtom(ParseAtomic());
  try {
    return MakeAtom(ParseAtomic());
  } catch (const ParseError& first) {
    pos_ = save;
    try {
      Next();
      Formula f = ParseDisj();
      Expect(")");
      return f;
    } catch (const ParseError& second) {
      throw second.pos >= first.pos ? second : first;
    }
  }
}

Formula Parser::ParseConj() {
  std::vector<Formula> kids{ParseUnit()};
  while (IsWord("and")) {
    Next();
    kids.push_back(ParseUnit());
  }
  return kids.size() == 1 ? kids[0] : MakeAnd(std::move(kids));
}

Formula Parser::ParseDisj() {
  std::vector<Formula> kids{ParseConj()};
  while (IsWord("or")) {
    Next();
    kids.push_back(ParseConj());
  }
  return kids.size() == 1 ? kids[0] : MakeOr(std::move(kids));
}

Param Parser::ParseParam() {
  SourceLoc loc = Peek().loc;
  Param p;
  p.name = ExpectIdent("a parameter name");
  if (IsReserved(p.name)) {
    Fail(loc, "SyntaxError", "'" + p.name + "' is a reserved word");
  }
  Expect(":");
  p.type = ParseType();
  return p;
}

void Parser::ParseBlock(SourceProgram& prog, std::vector<Diagnostic>& diags) {
  BlockDecl b;
  b.loc = Peek().loc;
  ExpectWord("block");
  b.name = ExpectIdent("a block name");
  Expect("(");
  if (!IsSym(")")) {
    while (true) {
      b.inputs.push_back(ParseParam());
      if (!IsSym(",")) break;
      Next();
    }
  }
  Expect(")");
  Expect("->");
  if (IsWord("None")) {
    Next();
  } else if (IsSym("(")) {
    Next();
    while (true) {
      b.outputs.push_back(ParseParam());
      if (!IsSym(",")) break;
      Next();
    }
    Expect(")");
  } else {
    b.outputs.push_back(ParseParam());
  }
  if (IsWord("realize")) {
    Next();
    SourceLoc rloc = Peek().loc;
    std::string kind = ExpectIdent("a realization kind");
    if (kind == "assume") {
      b.realize = Realize::kAssume;
    } else if (kind == "nash") {
      b.realize = Realize::kNash;
    } else {
      Fail(rloc, "SyntaxError", "unknown realization '" + kind +
                                    "' (expected assume or nash)");
    }
  }
  Expect(":");
  ExpectNewline();
  std::vector<Formula> lines;
  while (!IsWord("end")) {
    if (AtEnd()) Fail(Peek().loc, "SyntaxError", "missing 'end' for block " + b.name);
    if (IsWord("block") || IsWord("def")) {
      Fail(Peek().loc, "SyntaxError", "missing 'end' for block " + b.name);
    }
    try {
      lines.push_back(ParseDisj());
      ExpectNewline();
    } catch (const ParseError& e) {
      diags.push_back(e.diag);
      SkipLine();
    }
  }
  Next();
  ExpectNewline();
  b.encoding = MakeAnd(std::move(lines));
  prog.blocks.push_back(std::move(b));
}

Argument Parser::ParseArgument() {
  Argument a;
  a.loc = Peek().loc;
  bool payoff = IsSym("-") ||
                (IsIdent() && std::regex_match(Peek().text, kBasePayoff)) ||
                (Peek().kind == Tok::kNumber &&
                 (IsSym("*", 1) || (IsSym("/", 1) && IsSym("*", 3))));
  if (payoff) {
    a.kind = Argument::Kind::kPayoff;
    a.payoff = ParsePayoffLiteral();
  } else if (Peek().kind == Tok::kNumber) {
    a.kind = Argument::Kind::kNumber;
    a.number = ParseRationalLiteral();
  } else {
    a.kind = Argument::Kind::kIdent;
    a.ident = ExpectIdent("an argument");
  }
  return a;
}

Statement Parser::ParseStatement() {
  Statement st;
  st.loc = Peek().loc;
  bool bare_call = IsIdent() && IsSym("(", 1);
  if (!bare_call) {
    while (true) {
      SourceLoc loc = Peek().loc;
      std::string name = ExpectIdent("an assignment target");
      if (IsReserved(name)) {
        Fail(loc, "SyntaxError", "'" + name + "' is a reserved word");
      }
      st.outputs.push_back(name);
      if (IsSym(":")) {
        Next();
        st.annotations.push_back(ParseType());
      } else {
        st.annotations.push_back(std::nullopt);
      }
      if (!IsSym(",")) break;
      Next();
    }
    Expect("=");
  }
  st.block = ExpectIdent("a block name");
  Expect("(");
  if (!IsSym(")")) {
    while (true) {
      st.args.push_back(ParseArgument());
      if (!IsSym(",")) break;
      Next();
    }
  }
  Expect(")");
  ExpectNewline();
  return st;
}

void Parser::ParseAlgorithm(SourceProgram& prog,
                            std::vector<Diagnostic>& diags) {
  ExpectWord("def");
  prog.algorithm.name = ExpectIdent("an algorithm name");
  Expect("(");
  Expect(")");
  Expect(":");
  ExpectNewline();
  std::set<std::string> assigned;
  auto ssa = [&](const SourceLoc& loc, const std::string& msg) {
    Diagnostic d;
    d.code = "SSAViolation";
    d.loc = loc;
    d.message = msg;
    diags.push_back(d);
  };
  while (true) {
    SkipNewlines();
    if (AtEnd()) {
      Fail(Peek().loc, "SyntaxError", "missing 'end' for algorithm");
    }
    if (IsWord("end")) {
      Next();
      ExpectNewline();
      return;
    }
    try {
      if (IsWord("return")) {
        SourceLoc loc = Peek().loc;
        Next();
        if (prog.algorithm.return_profile) {
          Fail(loc, "SyntaxError", "second return statement");
        }
        std::vector<std::string> names;
        while (true) {
          SourceLoc nloc = Peek().loc;
          names.push_back(ExpectIdent("a returned strategy"));
          if (!assigned.count(names.back())) {
            ssa(nloc, "'" + names.back() + "' returned before assignment");
          }
          if (!IsSym(",")) break;
          Next();
        }
        ExpectNewline();
        prog.algorithm.return_profile = names;
        prog.algorithm.return_loc = loc;
        continue;
      }
      if (prog.algorithm.return_profile) {
        Fail(Peek().loc, "SyntaxError", "statement after return");
      }
      Statement st = ParseStatement();
      for (const auto& a : st.args) {
        if (a.kind == Argument::Kind::kIdent && !assigned.count(a.ident)) {
          ssa(a.loc, "'" + a.ident + "' used before assignment");
        }
      }
      for (const auto& o : st.outputs) {
        if (!assigned.insert(o).second) {
          ssa(st.loc, "'" + o + "' assigned more than once");
        }
      }
      prog.algorithm.statements.push_back(std::move(st));
    } catch (const ParseError& e) {
      diags.push_back(e.diag);
      SkipLine();
    }
  }
}

SourceProgram Parser::ParseProgram(std::vector<Diagnostic>& diags) {
  SourceProgram prog;
  bool seen_players = false, seen_def = false;
  while (true) {
    SkipNewlines();
    if (AtEnd()) break;
    try {
      if (IsWord("players")) {
        SourceLoc loc = Peek().loc;
        Next();
        if (seen_players) Fail(loc, "DuplicateName", "player count declared twice");
        if (Peek().kind != Tok::kNumber) FailHere("expected the player count");
        Token t = Next();
        int r = 0;
        if (t.text.find('.') == std::string::npos && t.text.size() <= 2) {
          r = std::stoi(t.text);
        }
        if (r < 2 || r > 9) {
          Fail(t.loc, "SyntaxError", "player count must be an integer in [2,9]");
        }
        prog.player_count = players_ = r;
        seen_players = true;
        ExpectNewline();
      } else if (IsWord("option")) {
        Next();
        SourceLoc loc = Peek().loc;
        std::string opt = ExpectIdent("an option name");
        if (opt == "auto_return") {
          prog.options.auto_return_optimal_mixing = true;
        } else if (opt == "concrete_delta") {
          prog.options.delta_symbolic = false;
        } else {
          Fail(loc, "SyntaxError", "unknown option '" + opt + "'");
        }
        ExpectNewline();
      } else if (IsWord("block")) {
        ParseBlock(prog, diags);
      } else if (IsWord("def")) {
        SourceLoc loc = Peek().loc;
        if (seen_def) Fail(loc, "DuplicateName", "second algorithm definition");
        seen_def = true;
        ParseAlgorithm(prog, diags);
      } else {
        FailHere("expected 'players', 'option', 'block' or 'def'");
      }
    } catch (const ParseError& e) {
      diags.push_back(e.diag);
      // Resynchronize at the next top-level keyword.
      while (!AtEnd()) {
        SkipLine();
        if (IsWord("players") || IsWord("option") || IsWord("block") ||
            IsWord("def")) {
          break;
        }
      }
    }
  }
  std::set<std::string> names;
  for (const auto& b : prog.blocks) {
    auto dup = [&](const std::string& msg) {
      Diagnostic d;
      d.code = "DuplicateName";
      d.loc = b.loc;
      d.message = msg;
      diags.push_back(d);
    };
    if (!names.insert(b.name).second) dup("block '" + b.name + "' declared twice");
    if (ParseLibraryName(b.name)) {
      dup("block '" + b.name + "' shadows a library block");
    }
    std::set<std::string> params;
    for (const auto* list : {&b.inputs, &b.outputs}) {
      for (const auto& p : *list) {
        if (!params.insert(p.name).second) {
          dup("parameter '" + p.name + "' repeated in block " + b.name);
        }
      }
    }
  }
  return prog;
}

Expr Parser::ParseStandaloneExpr(int players) {
  players_ = players;
  SkipNewlines();
  Expr e = ParseExpr();
  SkipNewlines();
  if (!AtEnd()) FailHere("unexpected trailing input");
  return e;
}

Formula Parser::ParseStandaloneFormula(int players) {
  players_ = players;
  SkipNewlines();
  Formula f = ParseDisj();
  SkipNewlines();
  if (!AtEnd()) FailHere("unexpected trailing input");
  return f;
}

// ---------------------------------------------------------------------------
// Typecheck helpers

struct Resolved {
  std::optional<Signature> sig;
  std::string code;
  std::string message;
  bool library = false;
};

BasicType ArgType(const Argument& a,
                  const std::map<std::string, BasicType>& env) {
  switch (a.kind) {
    case Argument::Kind::kPayoff:
      return BasicType::Payoff();
    case Argument::Kind::kNumber:
      return BasicType::Real();
    case Argument::Kind::kIdent: {
      auto it = env.find(a.ident);
      return it == env.end() ? BasicType::None() : it->second;
    }
  }
  return BasicType::None();
}

Resolved ResolveStatement(const SourceProgram& prog, const Statement& st,
                          const std::vector<BasicType>& arg_types) {
  Resolved r;
  if (const BlockDecl* b = FindUserBlock(prog, st.block)) {
    Signature s;
    for (const auto& p : b->inputs) s.inputs.push_back(p.type);
    for (const auto& p : b->outputs) s.outputs.push_back(p.type);
    r.sig = s;
    return r;
  }
  if (auto ref = ParseLibraryName(st.block)) {
    SignatureCheck sc = LibrarySignature(*ref, prog.player_count, arg_types);
    r.library = true;
    r.sig = sc.signature;
    r.code = sc.code;
    r.message = sc.message;
    return r;
  }
  r.code = "UnknownBlock";
  r.message = "unknown block '" + st.block + "'";
  return r;
}

void CheckEncoding(const SourceProgram& prog, const BlockDecl& b,
                   std::vector<Diagnostic>& diags) {
  const int r = prog.player_count;
  auto err = [&](const std::string& code, const std::string& msg) {
    Diagnostic d;
    d.code = code;
    d.loc = b.loc;
    d.message = "in block " + b.name + ": " + msg;
    diags.push_back(d);
  };
  std::map<std::string, BasicType> formals;
  for (const auto* list : {&b.inputs, &b.outputs}) {
    for (const auto& p : *list) formals[p.name] = p.type;
  }
  VisitAtoms(b.encoding, [&](const AtomicProperty& a) {
    std::map<std::string, BasicType> scope = formals;
    for (const auto& s : a.forall_strategies) {
      if (s.player > r) {
        err("TypeMismatch", "quantifier over Strategy" +
                                std::to_string(s.player) + " in a " +
                                std::to_string(r) + "-player program");
      }
      scope[s.name] = BasicType::Strategy(s.player);
    }
    for (const auto& u : a.forall_payoffs) scope[u] = BasicType::Payoff();
    for (const auto& e : a.exists) scope[e.name] = BasicType::Real();
    auto check_args = [&](const Term& t) {
      if (static_cast<int>(t.args.size()) != r) {
        err("ArityMismatch", t.ToString() + " has " +
                                 std::to_string(t.args.size()) +
                                 " arguments, expected " + std::to_string(r));
        return;
      }
      for (int s = 0; s < r; ++s) {
        const std::string& n = t.args[s];
        if (n == kBoundSlot) continue;
        auto it = scope.find(n);
        if (it == scope.end()) {
          err("TypeMismatch", "'" + n + "' is not declared in " + t.ToString());
        } else if (it->second != BasicType::Strategy(s + 1)) {
          err("TypeMismatch", "slot " + std::to_string(s + 1) + " of " +
                                  t.ToString() + " expects Strategy" +
                                  std::to_string(s + 1) + ", '" + n + "' is " +
                                  it->second.ToString());
        }
      }
    };
    auto check_payoff = [&](const PayoffExpr& p, const Term& t) {
      if (p.IsVariable()) {
        auto it = scope.find(p.variable);
        if (it == scope.end() || it->second.kind != TypeKind::kPayoff) {
          err("TypeMismatch",
              "'" + p.variable + "' is not a payoff in " + t.ToString());
        }
        return;
      }
      for (const auto& [k, c] : p.coeffs) {
        if (k > r) err("TypeMismatch", "payoff u" + std::to_string(k) +
                                           " does not exist for " +
                                           std::to_string(r) + " players");
      }
    };
    for (const auto& c : a.body) {
      for (const Expr* side : {&c.lhs, &c.rhs}) {
        VisitTerms(*side, [&](const Term& t) {
          switch (t.kind) {
            case TermKind::kPayoff:
            case TermKind::kMaxPayoff:
              check_payoff(t.payoff, t);
              check_args(t);
              break;
            case TermKind::kLoss:
              if (t.player > r) {
                err("TypeMismatch", "loss f" + std::to_string(t.player) +
                                        " does not exist");
              }
              check_args(t);
              break;
            case TermKind::kRealVar: {
              if (t.name == kDeltaName) break;
              auto it = scope.find(t.name);
              if (it == scope.end() || it->second.kind != TypeKind::kReal) {
                err("TypeMismatch", "'" + t.name + "' is not a Real variable");
              }
              break;
            }
            case TermKind::kConstant:
              break;
          }
        });
      }
    }
  });
}

// ---------------------------------------------------------------------------
// Printing

std::string TypeText(const BasicType& t) { return t.ToString(); }

std::string FormulaInline(const Formula& f) {
  if (f->kind == FormulaKind::kAtom) return AtomToString(f->atom);
  std::string sep = f->kind == FormulaKind::kAnd ? " and " : " or ";
  std::string out;
  for (std::size_t i = 0; i < f->kids.size(); ++i) {
    if (i) out += sep;
    const Formula& k = f->kids[i];
    if (k->kind == FormulaKind::kAtom) {
      out += FormulaInline(k);
    } else {
      out += "(" + FormulaInline(k) + ")";
    }
  }
  return out;
}

std::string ParamText(const Param& p) {
  return p.name + ": " + TypeText(p.type);
}

nlohmann::json TypeJson(const BasicType& t) { return t.ToString(); }

}  // namespace

// ---------------------------------------------------------------------------
// Public API

ParseResult Parse(std::string_view source) {
  ParseResult res;
  LexOutput lex = Lex(source);
  res.diagnostics = lex.diags;
  Parser p(std::move(lex.tokens));
  SourceProgram prog = p.ParseProgram(res.diagnostics);
  if (!HasErrors(res.diagnostics)) res.program = std::move(prog);
  return res;
}

const BlockDecl* FindUserBlock(const SourceProgram& prog,
                               const std::string& name) {
  for (const auto& b : prog.blocks) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

std::vector<Diagnostic> Typecheck(const SourceProgram& prog) {
  std::vector<Diagnostic> diags;
  const int r = prog.player_count;
  auto add = [&](const std::string& code, const SourceLoc& loc,
                 const std::string& msg, Severity sev = Severity::kError) {
    Diagnostic d;
    d.code = code;
    d.loc = loc;
    d.message = msg;
    d.severity = sev;
    diags.push_back(d);
  };
  if (r < 2) add("TypeMismatch", {1, 1}, "at least two players required");
  for (const auto& b : prog.blocks) {
    for (const auto* list : {&b.inputs, &b.outputs}) {
      for (const auto& p : *list) {
        if (p.type.IsStrategy() && p.type.player > r) {
          add("TypeMismatch", b.loc,
              "parameter '" + p.name + "' of block " + b.name + " has type " +
                  p.type.ToString() + " in a " + std::to_string(r) +
                  "-player program");
        }
        if (p.type.kind == TypeKind::kNone) {
          add("TypeMismatch", b.loc,
              "parameter '" + p.name + "' cannot have type None");
        }
      }
    }
    for (const auto& p : b.outputs) {
      if (p.type.kind == TypeKind::kComp) {
        add("TypeMismatch", b.loc,
            "block " + b.name + " cannot output the comparison type");
      }
    }
    if (b.realize == Realize::kAssume && !b.outputs.empty()) {
      add("TypeMismatch", b.loc,
          "block " + b.name + " realized as an assumption must output None");
    }
    if (b.realize == Realize::kNash) {
      std::set<int> players;
      for (const auto& p : b.outputs) {
        if (!p.type.IsStrategy() || !players.insert(p.type.player).second) {
          add("TypeMismatch", b.loc,
              "block " + b.name +
                  " realized as an equilibrium must output one strategy per "
                  "distinct player");
          break;
        }
      }
    }
    CheckEncoding(prog, b, diags);
  }

  std::map<std::string, BasicType> env;
  for (const auto& st : prog.algorithm.statements) {
    std::vector<BasicType> arg_types;
    for (const auto& a : st.args) {
      if (a.kind == Argument::Kind::kPayoff) {
        for (const auto& [k, c] : a.payoff.coeffs) {
          if (k > r) {
            add("TypeMismatch", a.loc,
                "payoff u" + std::to_string(k) + " does not exist for " +
                    std::to_string(r) + " players");
          }
        }
      }
      arg_types.push_back(ArgType(a, env));
    }
    Resolved res = ResolveStatement(prog, st, arg_types);
    auto bind_annotations = [&]() {
      for (std::size_t k = 0; k < st.outputs.size(); ++k) {
        if (st.annotations[k]) env[st.outputs[k]] = *st.annotations[k];
      }
    };
    if (!res.sig) {
      Severity sev = res.code == "BranchingUnsupported" ? Severity::kWarning
                                                         : Severity::kError;
      add(res.code, st.loc, res.message, sev);
      bind_annotations();
      continue;
    }
    const Signature& sig = *res.sig;
    if (sig.inputs.size() != st.args.size()) {
      add("ArityMismatch", st.loc,
          st.block + " expects " + std::to_string(sig.inputs.size()) +
              " argument(s), got " + std::to_string(st.args.size()));
    } else {
      for (std::size_t k = 0; k < st.args.size(); ++k) {
        const Argument& a = st.args[k];
        if (a.kind == Argument::Kind::kIdent && !env.count(a.ident)) continue;
        if (arg_types[k] != sig.inputs[k]) {
          add("TypeMismatch", a.loc,
              "argument " + std::to_string(k + 1) + " of " + st.block +
                  " expects " + sig.inputs[k].ToString() + ", got " +
                  arg_types[k].ToString() + " ('" + a.ToString() + "')");
        } else if (a.kind == Argument::Kind::kNumber &&
                   (a.number < 0 || a.number > 1)) {
          add("TypeMismatch", a.loc,
              "mixing coefficient " + a.number.ToString() +
                  " outside [0,1]");
        }
      }
    }
    if (sig.outputs.size() != st.outputs.size()) {
      add("ArityMismatch", st.loc,
          st.block + " produces " + std::to_string(sig.outputs.size()) +
              " output(s), assigned to " + std::to_string(st.outputs.size()));
      bind_annotations();
      continue;
    }
    for (std::size_t k = 0; k < st.outputs.size(); ++k) {
      if (st.annotations[k] && *st.annotations[k] != sig.outputs[k]) {
        add("TypeMismatch", st.loc,
            "'" + st.outputs[k] + "' annotated " +
                st.annotations[k]->ToString() + " but " + st.block +
                " produces " + sig.outputs[k].ToString());
      }
      env[st.outputs[k]] = sig.outputs[k];
    }
  }
  if (prog.algorithm.return_profile) {
    const auto& ret = *prog.algorithm.return_profile;
    if (static_cast<int>(ret.size()) != r) {
      add("ArityMismatch", prog.algorithm.return_loc,
          "return lists " + std::to_string(ret.size()) +
              " strategies, expected one per player (" + std::to_string(r) +
              ")");
    } else {
      for (int k = 0; k < r; ++k) {
        auto it = env.find(ret[k]);
        if (it != env.end() && it->second != BasicType::Strategy(k + 1)) {
          add("TypeMismatch", prog.algorithm.return_loc,
              "return position " + std::to_string(k + 1) + " expects Strategy" +
                  std::to_string(k + 1) + ", '" + ret[k] + "' is " +
                  it->second.ToString());
        }
      }
    }
  }
  return diags;
}

ParseResult ParseAndCheck(std::string_view source) {
  ParseResult res = Parse(source);
  if (!res.program) return res;
  std::vector<Diagnostic> tc = Typecheck(*res.program);
  res.diagnostics.insert(res.diagnostics.end(), tc.begin(), tc.end());
  if (HasErrors(res.diagnostics)) res.program.reset();
  return res;
}

std::string PrettyPrint(const SourceProgram& prog) {
  std::ostringstream os;
  os << "players " << prog.player_count << "\n";
  if (prog.options.auto_return_optimal_mixing) os << "option auto_return\n";
  if (!prog.options.delta_symbolic) os << "option concrete_delta\n";
  for (const auto& b : prog.blocks) {
    os << "\nblock " << b.name << "(";
    for (std::size_t i = 0; i < b.inputs.size(); ++i) {
      if (i) os << ", ";
      os << ParamText(b.inputs[i]);
    }
    os << ") -> ";
    if (b.outputs.empty()) {
      os << "None";
    } else {
      os << "(";
      for (std::size_t i = 0; i < b.outputs.size(); ++i) {
        if (i) os << ", ";
        os << ParamText(b.outputs[i]);
      }
      os << ")";
    }
    if (b.realize == Realize::kAssume) os << " realize assume";
    if (b.realize == Realize::kNash) os << " realize nash";
    os << ":\n";
    if (b.encoding->kind == FormulaKind::kAnd) {
      for (const auto& line : b.encoding->kids) {
        os << "  " << FormulaInline(line) << "\n";
      }
    } else {
      os << "  " << FormulaInline(b.encoding) << "\n";
    }
    os << "end\n";
  }
  os << "\ndef " << prog.algorithm.name << "():\n";
  for (const auto& st : prog.algorithm.statements) {
    os << "  ";
    for (std::size_t k = 0; k < st.outputs.size(); ++k) {
      if (k) os << ", ";
      os << st.outputs[k];
      if (st.annotations[k]) os << ": " << st.annotations[k]->ToString();
    }
    if (!st.outputs.empty()) os << " = ";
    os << st.block << "(";
    for (std::size_t k = 0; k < st.args.size(); ++k) {
      if (k) os << ", ";
      os << st.args[k].ToString();
    }
    os << ")\n";
  }
  if (prog.algorithm.return_profile) {
    os << "  return ";
    const auto& ret = *prog.algorithm.return_profile;
    for (std::size_t k = 0; k < ret.size(); ++k) {
      if (k) os << ", ";
      os << ret[k];
    }
    os << "\n";
  }
  os << "end\n";
  return os.str();
}

std::string DumpAstJson(const SourceProgram& prog) {
  using nlohmann::json;
  json j;
  j["players"] = prog.player_count;
  j["options"] = {{"auto_return_optimal_mixing",
                   prog.options.auto_return_optimal_mixing},
                  {"delta_symbolic", prog.options.delta_symbolic}};
  json blocks = json::array();
  for (const auto& b : prog.blocks) {
    json jb;
    jb["name"] = b.name;
    json in = json::array(), out = json::array();
    for (const auto& p : b.inputs) in.push_back({{"name", p.name}, {"type", TypeJson(p.type)}});
    for (const auto& p : b.outputs) out.push_back({{"name", p.name}, {"type", TypeJson(p.type)}});
    jb["inputs"] = in;
    jb["outputs"] = out;
    jb["realize"] = b.realize == Realize::kAssume ? "assume"
                    : b.realize == Realize::kNash ? "nash"
                                                  : "default";
    jb["encoding"] = FormulaToJson(b.encoding);
    jb["line"] = b.loc.line;
    blocks.push_back(jb);
  }
  j["blocks"] = blocks;
  json stmts = json::array();
  for (const auto& st : prog.algorithm.statements) {
    json js;
    json outs = json::array();
    for (std::size_t k = 0; k < st.outputs.size(); ++k) {
      outs.push_back({{"name", st.outputs[k]},
                      {"type", st.annotations[k]
                                   ? json(st.annotations[k]->ToString())
                                   : json(nullptr)}});
    }
    json args = json::array();
    for (const auto& a : st.args) {
      const char* kind = a.kind == Argument::Kind::kIdent    ? "ident"
                         : a.kind == Argument::Kind::kPayoff ? "payoff"
                                                             : "number";
      args.push_back({{"kind", kind}, {"value", a.ToString()}});
    }
    js["outputs"] = outs;
    js["block"] = st.block;
    js["args"] = args;
    js["line"] = st.loc.line;
    stmts.push_back(js);
  }
  json alg;
  alg["name"] = prog.algorithm.name;
  alg["statements"] = stmts;
  alg["return"] = prog.algorithm.return_profile
                      ? json(*prog.algorithm.return_profile)
                      : json(nullptr);
  j["algorithm"] = alg;
  return j.dump(2);
}

std::vector<std::pair<std::string, BasicType>> StrategyVariables(
    const SourceProgram& prog) {
  std::vector<std::pair<std::string, BasicType>> out;
  std::map<std::string, BasicType> env;
  for (const auto& st : prog.algorithm.statements) {
    std::vector<BasicType> arg_types;
    for (const auto& a : st.args) arg_types.push_back(ArgType(a, env));
    Resolved res = ResolveStatement(prog, st, arg_types);
    for (std::size_t k = 0; k < st.outputs.size(); ++k) {
      std::optional<BasicType> t;
      if (res.sig && k < res.sig->outputs.size()) t = res.sig->outputs[k];
      if (!t && st.annotations[k]) t = *st.annotations[k];
      if (!t) continue;
      env[st.outputs[k]] = *t;
      out.push_back({st.outputs[k], *t});
    }
  }
  return out;
}

std::vector<PayoffExpr> PayoffLiterals(const SourceProgram& prog) {
  std::vector<PayoffExpr> out;
  for (const auto& st : prog.algorithm.statements) {
    for (const auto& a : st.args) {
      if (a.kind != Argument::Kind::kPayoff) continue;
      bool seen = false;
      for (const auto& p : out) seen = seen || p == a.payoff;
      if (!seen) out.push_back(a.payoff);
    }
  }
  return out;
}

Expr ParseExprText(std::string_view text, int players) {
  LexOutput lex = Lex(text);
  if (!lex.diags.empty()) {
    throw std::invalid_argument(lex.diags[0].ToString("expr"));
  }
  Parser p(std::move(lex.tokens));
  try {
    return p.ParseStandaloneExpr(players);
  } catch (const ParseError& e) {
    throw std::invalid_argument(e.diag.ToString("expr"));
  }
}

Formula ParseFormulaText(std::string_view text, int players) {
  LexOutput lex = Lex(text);
  if (!lex.diags.empty()) {
    throw std::invalid_argument(lex.diags[0].ToString("formula"));
  }
  Parser p(std::move(lex.tokens));
  try {
    return p.ParseStandaloneFormula(players);
  } catch (const ParseError& e) {
    throw std::invalid_argument(e.diag.ToString("formula"));
  }
}

}  // namespace legone

#include "rerl/parser.hpp"

#include <cctype>
#include <charconv>
#include <set>
#include <vector>

#include "rerl/error.hpp"

namespace rerl {
namespace {

enum class Tok { Atom, Keyword, Var, Int, Float, PidLit, RefLit, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
  std::int64_t int_value = 0;
  double float_value = 0.0;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::End:
      return "end of input";
    case Tok::Atom:
      return "atom '" + t.text + "'";
    case Tok::Var:
      return "variable " + t.text;
    case Tok::Int:
    case Tok::Float:
      return "number " + t.text;
    default:
      return "'" + t.text + "'";
  }
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      if (pos_ >= src_.size()) {
        out.push_back(Token{Tok::End, "", line_, col_});
        return out;
      }
      out.push_back(next());
    }
  }

 private:
  char peek(std::size_t off = 0) const { return pos_ + off < src_.size() ? src_[pos_ + off] : '\0'; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(line_, col_, msg); }

  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '@';
  }

  // `<p12>` or `<t3>`
  bool runtime_literal_ahead() const {
    if (peek() != '<' || (peek(1) != 'p' && peek(1) != 't')) return false;
    std::size_t i = 2;
    if (!std::isdigit(static_cast<unsigned char>(peek(i)))) return false;
    while (std::isdigit(static_cast<unsigned char>(peek(i)))) ++i;
    return peek(i) == '>';
  }

  Token next() {
    Token t{Tok::Punct, "", line_, col_};
    char c = peek();
    if (runtime_literal_ahead()) {
      t.kind = peek(1) == 'p' ? Tok::PidLit : Tok::RefLit;
      advance();
      advance();
      std::string digits;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        digits += peek();
        advance();
      }
      advance();  // '>'
      t.text = digits;
      t.int_value = std::stoll(digits);
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string word;
      while (ident_char(peek())) {
        word += peek();
        advance();
      }
      t.text = word;
      if (std::isupper(static_cast<unsigned char>(word[0])) || word[0] == '_')
        t.kind = Tok::Var;
      else
        t.kind = is_keyword(word) ? Tok::Keyword : Tok::Atom;
      return t;
    }
    if (c == '\'') {
      advance();
      std::string name;
      while (peek() != '\'') {
        if (pos_ >= src_.size()) fail("unterminated quoted atom");
        if (peek() == '\\') advance();
        name += peek();
        advance();
      }
      advance();
      t.kind = Tok::Atom;
      t.text = name;
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return number(t);
    static const char* kTwoChar[] = {"->", "=<", ">=", "==", "/="};
    for (const char* p : kTwoChar) {
      if (peek() == p[0] && peek(1) == p[1]) {
        advance();
        advance();
        t.text = p;
        return t;
      }
    }
    static const std::string kOneChar = "(){}[],;|=!+-*/<>";
    if (kOneChar.find(c) != std::string::npos) {
      advance();
      t.text = std::string(1, c);
      return t;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  Token number(Token t) {
    std::string text;
    bool is_float = false;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      text += peek();
      advance();
    }
    if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
      is_float = true;
      text += '.';
      advance();
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        text += peek();
        advance();
      }
    }
    if ((peek() == 'e' || peek() == 'E') &&
        (std::isdigit(static_cast<unsigned char>(peek(1))) ||
         ((peek(1) == '+' || peek(1) == '-') && std::isdigit(static_cast<unsigned char>(peek(2)))))) {
      is_float = true;
      text += 'e';
      advance();
      if (peek() == '+' || peek() == '-') {
        text += peek();
        advance();
      }
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        text += peek();
        advance();
      }
    }
    t.text = text;
    if (is_float) {
      t.kind = Tok::Float;
      t.float_value = std::stod(text);
    } else {
      t.kind = Tok::Int;
      auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), t.int_value);
      if (ec != std::errc()) throw SyntaxError(t.line, t.col, "integer literal out of range");
    }
    return t;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

struct FunRef {
  FunName name;
  int line;
  int col;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(Lexer(src).run()) {}

  Module module() {
    expect_keyword("module");
    Module m;
    m.name = expect_atom();
    expect_punct("=");
    do {
      const Token& at = cur();
      FunDef def = fundef();
      if (m.funs.count(def.name))
        throw SyntaxError(at.line, at.col, "duplicate function " + def.name.to_string());
      m.funs.emplace(def.name, std::move(def));
    } while (accept_punct(","));
    expect_end();
    for (const auto& ref : refs_) {
      if (!m.funs.count(ref.name))
        throw SyntaxError(ref.line, ref.col, "undefined function " + ref.name.to_string());
    }
    return m;
  }

  Expr lone_expr() {
    Expr e = expr();
    expect_end();
    return e;
  }

  Pat lone_pattern() {
    Pat p = pattern();
    expect_end();
    return p;
  }

  FunName lone_fun_name() {
    FunName f = fun_name();
    expect_end();
    return f;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail_expected(const std::string& what) const {
    throw SyntaxError(cur().line, cur().col, "expected " + what + ", found " + describe(cur()));
  }

  bool is_punct(std::string_view p) const { return cur().kind == Tok::Punct && cur().text == p; }
  bool is_keyword_tok(std::string_view k) const { return cur().kind == Tok::Keyword && cur().text == k; }

  bool accept_punct(std::string_view p) {
    if (!is_punct(p)) return false;
    take();
    return true;
  }

  bool accept_keyword(std::string_view k) {
    if (!is_keyword_tok(k)) return false;
    take();
    return true;
  }

  void expect_punct(std::string_view p) {
    if (!accept_punct(p)) fail_expected("'" + std::string(p) + "'");
  }

  void expect_keyword(std::string_view k) {
    if (!accept_keyword(k)) fail_expected("'" + std::string(k) + "'");
  }

  void expect_end() {
    if (cur().kind != Tok::End) fail_expected("end of input");
  }

  std::string expect_atom() {
    if (cur().kind != Tok::Atom) fail_expected("atom");
    return take().text;
  }

  std::string expect_var() {
    if (cur().kind != Tok::Var) fail_expected("variable");
    return take().text;
  }

  FunName fun_name() {
    FunName f;
    f.atom = expect_atom();
    expect_punct("/");
    if (cur().kind != Tok::Int) fail_expected("arity");
    f.arity = static_cast<std::uint32_t>(take().int_value);
    return f;
  }

  FunDef fundef() {
    FunDef def;
    def.name = fun_name();
    expect_punct("=");
    expect_keyword("fun");
    const Token& open = cur();
    expect_punct("(");
    std::set<std::string> seen;
    if (!is_punct(")")) {
      do {
        const Token& at = cur();
        std::string v = expect_var();
        if (v != kAnonymous && !seen.insert(v).second)
          throw SyntaxError(at.line, at.col, "duplicate parameter " + v);
        def.params.push_back(v);
      } while (accept_punct(","));
    }
    expect_punct(")");
    if (def.params.size() != def.name.arity)
      throw SyntaxError(open.line, open.col,
                        "arity mismatch for " + def.name.to_string() + ": declared " +
                            std::to_string(def.name.arity) + ", defined with " +
                            std::to_string(def.params.size()) + " parameters");
    expect_punct("->");
    def.body = expr();
    return def;
  }

  // expr := or_expr ['!' expr]
  Expr expr() {
    Expr lhs = binary(1);
    if (accept_punct("!")) return Expr::send(std::move(lhs), expr());
    return lhs;
  }

  static int precedence_of(const Token& t) {
    if (t.kind == Tok::Keyword) {
      if (t.text == "or") return 1;
      if (t.text == "and") return 2;
      if (t.text == "rem") return 5;
      return -1;
    }
    if (t.kind != Tok::Punct) return -1;
    const auto& s = t.text;
    if (s == "==" || s == "/=" || s == "<" || s == "=<" || s == ">" || s == ">=") return 3;
    if (s == "+" || s == "-") return 4;
    if (s == "*" || s == "/") return 5;
    return -1;
  }

  Expr binary(int min_prec) {
    if (min_prec > 5) return unary();
    Expr lhs = binary(min_prec + 1);
    for (;;) {
      int p = precedence_of(cur());
      if (p != min_prec) return lhs;
      const Token& op_tok = cur();
      std::string op = take().text;
      Expr rhs = binary(min_prec + 1);
      lhs = Expr::call(op, {std::move(lhs), std::move(rhs)});
      if (p == 3 && precedence_of(cur()) == 3)
        throw SyntaxError(op_tok.line, op_tok.col, "comparison operators do not chain");
    }
  }

  Expr unary() {
    if (accept_keyword("not")) return Expr::call("not", {unary()});
    if (accept_punct("-")) {
      Expr arg = unary();
      if (arg.is_value() && arg.value().kind() == Value::Kind::Int)
        return Expr::val(Value::integer(-arg.value().as_int()));
      if (arg.is_value() && arg.value().kind() == Value::Kind::Float)
        return Expr::val(Value::floating(-arg.value().as_float()));
      return Expr::call("-", {std::move(arg)});
    }
    return primary();
  }

  std::vector<Expr> expr_list(std::string_view close) {
    std::vector<Expr> out;
    if (is_punct(close)) return out;
    do {
      out.push_back(expr());
    } while (accept_punct(","));
    return out;
  }

  std::shared_ptr<const ClauseList> clauses() {
    auto out = std::make_shared<ClauseList>();
    do {
      Clause c{pattern(), Expr::val(Value::atom("true")), Expr()};
      if (accept_keyword("when")) {
        const Token& at = cur();
        c.guard = expr();
        if (!is_guard(c.guard))
          throw SyntaxError(at.line, at.col, "guards may only use variables, literals and built-ins");
      }
      expect_punct("->");
      c.body = expr();
      out->push_back(std::move(c));
    } while (accept_punct(";"));
    return out;
  }

  static bool is_guard(const Expr& e) {
    switch (e.kind()) {
      case Expr::Kind::Var:
      case Expr::Kind::Val:
        return true;
      case Expr::Kind::Call:
      case Expr::Kind::Tuple:
      case Expr::Kind::Cons:
        for (const auto& k : e.kids()) {
          if (!is_guard(k)) return false;
        }
        return true;
      default:
        return false;
    }
  }

  std::vector<Expr> checked_args(const FunName& f, const Token& at, std::string_view close) {
    std::vector<Expr> args = expr_list(close);
    if (args.size() != f.arity)
      throw SyntaxError(at.line, at.col,
                        f.to_string() + " called with " + std::to_string(args.size()) + " arguments");
    return args;
  }

  Expr primary() {
    const Token& t = cur();
    switch (t.kind) {
      case Tok::Var: {
        take();
        if (t.text == kAnonymous)
          throw SyntaxError(t.line, t.col, "'_' cannot be used as an expression");
        return Expr::var(t.text);
      }
      case Tok::Atom:
        take();
        return Expr::val(Value::atom(t.text));
      case Tok::Int:
        take();
        return Expr::val(Value::integer(t.int_value));
      case Tok::Float:
        take();
        return Expr::val(Value::floating(t.float_value));
      case Tok::PidLit:
        take();
        return Expr::val(Value::pid(Pid{static_cast<std::uint64_t>(t.int_value)}));
      case Tok::RefLit:
        take();
        return Expr::val(Value::ref(UniqueId{static_cast<std::uint64_t>(t.int_value)}));
      case Tok::Punct:
        return bracketed();
      case Tok::Keyword:
        return keyword_expr();
      case Tok::End:
        break;
    }
    fail_expected("expression");
  }

  Expr bracketed() {
    if (accept_punct("(")) {
      Expr e = expr();
      expect_punct(")");
      return e;
    }
    if (accept_punct("{")) {
      std::vector<Expr> elems = expr_list("}");
      expect_punct("}");
      return Expr::tuple(std::move(elems));
    }
    if (accept_punct("[")) {
      if (accept_punct("]")) return Expr::val(Value::nil());
      std::vector<Expr> elems = expr_list("]");
      Expr tail = Expr::val(Value::nil());
      if (accept_punct("|")) tail = expr();
      expect_punct("]");
      for (auto it = elems.rbegin(); it != elems.rend(); ++it) tail = Expr::cons(*it, tail);
      return tail;
    }
    fail_expected("expression");
  }

  Expr keyword_expr() {
    const Token& t = cur();
    if (accept_keyword("let")) {
      std::string v = expect_var();
      expect_punct("=");
      Expr bound = expr();
      expect_keyword("in");
      return Expr::let(std::move(v), std::move(bound), expr());
    }
    if (accept_keyword("case")) {
      Expr scrutinee = expr();
      expect_keyword("of");
      auto cls = clauses();
      expect_keyword("end");
      return Expr::case_of(std::move(scrutinee), std::move(cls));
    }
    if (accept_keyword("receive")) {
      auto cls = clauses();
      expect_keyword("end");
      return Expr::receive(std::move(cls));
    }
    if (accept_keyword("spawn")) {
      expect_punct("(");
      const Token& at = cur();
      FunName f = fun_name();
      refs_.push_back({f, at.line, at.col});
      expect_punct(",");
      expect_punct("[");
      std::vector<Expr> args = checked_args(f, at, "]");
      expect_punct("]");
      expect_punct(")");
      return Expr::spawn(std::move(f), std::move(args));
    }
    if (accept_keyword("apply")) {
      const Token& at = cur();
      FunName f = fun_name();
      refs_.push_back({f, at.line, at.col});
      expect_punct("(");
      std::vector<Expr> args = checked_args(f, at, ")");
      expect_punct(")");
      return Expr::apply(std::move(f), std::move(args));
    }
    if (accept_keyword("call")) {
      std::string op;
      if (cur().kind == Tok::Atom || cur().kind == Tok::Keyword)
        op = take().text;
      else
        fail_expected("built-in operator name");
      expect_punct("(");
      std::vector<Expr> args = expr_list(")");
      expect_punct(")");
      return Expr::call(std::move(op), std::move(args));
    }
    if (accept_keyword("self")) {
      expect_punct("(");
      expect_punct(")");
      return Expr::self_call();
    }
    if (accept_keyword("check")) return Expr::check();
    throw SyntaxError(t.line, t.col, "unexpected keyword '" + t.text + "'");
  }

  Pat pattern() {
    const Token& t = cur();
    switch (t.kind) {
      case Tok::Var:
        take();
        return Pat::var(t.text);
      case Tok::Atom:
        take();
        return Pat::lit(Value::atom(t.text));
      case Tok::Int:
        take();
        return Pat::lit(Value::integer(t.int_value));
      case Tok::Float:
        take();
        return Pat::lit(Value::floating(t.float_value));
      case Tok::PidLit:
        take();
        return Pat::lit(Value::pid(Pid{static_cast<std::uint64_t>(t.int_value)}));
      case Tok::RefLit:
        take();
        return Pat::lit(Value::ref(UniqueId{static_cast<std::uint64_t>(t.int_value)}));
      default:
        break;
    }
    if (accept_punct("-")) {
      const Token& n = cur();
      if (n.kind == Tok::Int) {
        take();
        return Pat::lit(Value::integer(-n.int_value));
      }
      if (n.kind == Tok::Float) {
        take();
        return Pat::lit(Value::floating(-n.float_value));
      }
      fail_expected("number");
    }
    if (accept_punct("{")) {
      std::vector<Pat> elems;
      if (!is_punct("}")) {
        do {
          elems.push_back(pattern());
        } while (accept_punct(","));
      }
      expect_punct("}");
      return Pat::tuple(std::move(elems));
    }
    if (accept_punct("[")) {
      if (accept_punct("]")) return Pat::lit(Value::nil());
      std::vector<Pat> elems;
      do {
        elems.push_back(pattern());
      } while (accept_punct(","));
      Pat tail = Pat::lit(Value::nil());
      if (accept_punct("|")) tail = pattern();
      expect_punct("]");
      for (auto it = elems.rbegin(); it != elems.rend(); ++it) tail = Pat::cons(*it, tail);
      return tail;
    }
    fail_expected("pattern");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<FunRef> refs_;
};

}  // namespace

Module parse_module(std::string_view text) { return Parser(text).module(); }
Expr parse_expr(std::string_view text) { return Parser(text).lone_expr(); }
Pat parse_pattern(std::string_view text) { return Parser(text).lone_pattern(); }
FunName parse_fun_name(std::string_view text) { return Parser(text).lone_fun_name(); }

}  // namespace rerl

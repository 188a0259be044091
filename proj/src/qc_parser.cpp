#include <charconv>
#include <cmath>

#include "qospred/qc.hpp"

namespace qospred::qc {

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& msg)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
      line(line),
      column(column) {}

bool is_boolean(const Term& t) {
  if (const auto* c = std::get_if<Const>(&t)) return std::holds_alternative<bool>(c->value);
  if (const auto* e = std::get_if<Eval>(&t)) return !e->formula.is_query();
  return false;
}

namespace {

enum class Tok { Ident, Number, String, LParen, RParen, LBracket, RBracket, Cmp, Query, End };

struct Token {
  Tok kind;
  std::string_view text;
  std::size_t column;  // 1-based
  double number = 0.0;
  Comparator cmp = Comparator::Equal;
};

bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9') || c == '.'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_cmp_char(char c) { return c == '<' || c == '>' || c == '=' || c == '!'; }

class Lexer {
 public:
  Lexer(std::string_view src, std::size_t line) : src_(src), line_(line) {}

  Token next() {
    skip_ws();
    const std::size_t start = pos_;
    const std::size_t col = start + 1;
    if (pos_ >= src_.size()) return {Tok::End, {}, col};
    const char c = src_[pos_];

    // UTF-8 comparison symbols: ≤ (E2 89 A4), ≥ (E2 89 A5), ≠ (E2 89 A0).
    if (static_cast<unsigned char>(c) == 0xE2 && src_.substr(pos_, 2) == "\xE2\x89") {
      const auto sym = src_.substr(pos_, 3);
      if (auto cmp = parse_comparator(sym)) {
        pos_ += 3;
        return {Tok::Cmp, sym, col, 0.0, *cmp};
      }
    }
    switch (c) {
      case '(': ++pos_; return {Tok::LParen, src_.substr(start, 1), col};
      case ')': ++pos_; return {Tok::RParen, src_.substr(start, 1), col};
      case '[': ++pos_; return {Tok::LBracket, src_.substr(start, 1), col};
      case ']': ++pos_; return {Tok::RBracket, src_.substr(start, 1), col};
      default: break;
    }
    if (c == '"') {
      ++pos_;
      while (pos_ < src_.size() && src_[pos_] != '"') ++pos_;
      if (pos_ >= src_.size()) throw ParseError(line_, col, "unterminated string literal");
      ++pos_;
      return {Tok::String, src_.substr(start + 1, pos_ - start - 2), col};
    }
    if (c == '=' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '?') {
      pos_ += 2;
      return {Tok::Query, src_.substr(start, 2), col};
    }
    if (is_cmp_char(c)) {
      while (pos_ < src_.size() && is_cmp_char(src_[pos_])) ++pos_;
      const auto text = src_.substr(start, pos_ - start);
      auto cmp = parse_comparator(text);
      if (!cmp) throw ParseError(line_, col, "unknown comparator '" + std::string(text) + "'");
      return {Tok::Cmp, text, col, 0.0, *cmp};
    }
    if (is_digit(c) || ((c == '-' || c == '+' || c == '.') && pos_ + 1 < src_.size() &&
                        (is_digit(src_[pos_ + 1]) || src_[pos_ + 1] == '.'))) {
      return number(start, col);
    }
    if (is_ident_start(c)) {
      while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
      return {Tok::Ident, src_.substr(start, pos_ - start), col};
    }
    throw ParseError(line_, col, "unexpected character '" + std::string(1, c) + "'");
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() &&
           (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\r' || src_[pos_] == '\n')) {
      ++pos_;
    }
  }

  Token number(std::size_t start, std::size_t col) {
    if (src_[pos_] == '-' || src_[pos_] == '+') ++pos_;
    while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
    }
    // Exponent only when followed by a digit, so "30m" or "2e" stay split.
    if (pos_ + 1 < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (src_[p] == '-' || src_[p] == '+') ++p;
      if (p < src_.size() && is_digit(src_[p])) {
        pos_ = p;
        while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
      }
    }
    const auto text = src_.substr(start, pos_ - start);
    const char* first = text.data();
    if (*first == '+') ++first;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
      throw ParseError(line_, col, "malformed number '" + std::string(text) + "'");
    }
    return {Tok::Number, text, col, v};
  }

  std::string_view src_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  Parser(std::string_view src, std::size_t line) : lex_(src, line), line_(line) { advance(); }

  Qc parse() {
    Qc qc;
    qc.body = compare();
    if (cur_.kind == Tok::Ident && (cur_.text == "along" || cur_.text == "within")) {
      qc.op = cur_.text == "along" ? TemporalOp::Along : TemporalOp::Within;
      advance();
      qc.duration_min = duration();
    }
    if (cur_.kind != Tok::End) error("unexpected '" + std::string(cur_.text) + "'");
    return qc;
  }

 private:
  [[noreturn]] void error(const std::string& msg) const { throw ParseError(line_, cur_.column, msg); }

  void advance() { cur_ = lex_.next(); }

  Token expect(Tok kind, std::string_view what) {
    if (cur_.kind != kind) {
      error("expected " + std::string(what) +
            (cur_.kind == Tok::End ? " at end of input" : ", found '" + std::string(cur_.text) + "'"));
    }
    Token t = cur_;
    advance();
    return t;
  }

  void expect_keyword(std::string_view kw) {
    if (cur_.kind != Tok::Ident || cur_.text != kw) {
      error("expected '" + std::string(kw) + "'");
    }
    advance();
  }

  Compare compare() {
    Compare c;
    const std::size_t lhs_col = cur_.column;
    c.lhs = term();
    if (cur_.kind != Tok::Cmp) error("expected comparator");
    c.op = cur_.cmp;
    const std::size_t op_col = cur_.column;
    advance();
    c.rhs = term();
    const bool lb = is_boolean(c.lhs);
    const bool rb = is_boolean(c.rhs);
    if (lb != rb) throw ParseError(line_, lhs_col, "cannot compare a boolean with a number");
    if (lb && c.op != Comparator::Equal && c.op != Comparator::NotEqual) {
      throw ParseError(line_, op_col, "booleans only support = and !=");
    }
    return c;
  }

  Term term() {
    if (cur_.kind == Tok::Number) {
      const double v = cur_.number;
      advance();
      return Const{v};
    }
    if (cur_.kind != Tok::Ident) error("expected a KPI name, number, boolean or eval(...)");
    const auto text = cur_.text;
    if (text == "true" || text == "false") {
      advance();
      return Const{text == "true"};
    }
    if (text == "eval") {
      advance();
      expect(Tok::LParen, "'('");
      Eval e{csl()};
      expect(Tok::RParen, "')'");
      return e;
    }
    if (text == "along" || text == "within") error("'" + std::string(text) + "' is reserved");
    advance();
    return KpiRef{std::string(text)};
  }

  CslFormula csl() {
    CslFormula f;
    expect_keyword("P");
    if (cur_.kind == Tok::Query) {
      advance();
    } else if (cur_.kind == Tok::Cmp) {
      const Comparator cmp = cur_.cmp;
      advance();
      const std::size_t col = cur_.column;
      const double p = expect(Tok::Number, "probability bound").number;
      if (!(p >= 0.0 && p <= 1.0)) throw ParseError(line_, col, "probability bound outside [0, 1]");
      f.bound = ProbBound{cmp, p};
    } else {
      error("expected '=?' or a comparator after 'P'");
    }
    expect(Tok::LBracket, "'['");
    expect_keyword("F");
    if (cur_.kind != Tok::Cmp || cur_.cmp != Comparator::LessEqual) error("expected '<=' after 'F'");
    advance();
    const std::size_t col = cur_.column;
    f.time_bound = expect(Tok::Number, "time bound").number;
    if (!(f.time_bound > 0.0)) throw ParseError(line_, col, "time bound must be positive");
    f.goal_label = std::string(expect(Tok::String, "quoted label").text);
    if (f.goal_label.empty()) error("empty label");
    expect(Tok::RBracket, "']'");
    return f;
  }

  double duration() {
    const std::size_t col = cur_.column;
    if (cur_.kind != Tok::Number) throw ParseError(line_, col, "malformed duration: expected a number");
    const double v = cur_.number;
    advance();
    if (cur_.kind != Tok::Ident || (cur_.text != "m" && cur_.text != "h")) {
      throw ParseError(line_, col, "malformed duration: expected unit 'm' or 'h'");
    }
    const double minutes = cur_.text == "h" ? v * 60.0 : v;
    advance();
    if (!(minutes > 0.0)) throw ParseError(line_, col, "malformed duration: must be positive");
    return minutes;
  }

  Lexer lex_;
  std::size_t line_;
  Token cur_{Tok::End, {}, 1};
};

std::string number_text(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

Qc parse_qc(std::string_view text, std::size_t line) { return Parser(text, line).parse(); }

std::string print(const CslFormula& f) {
  std::string out = "P";
  if (f.bound) {
    out += to_string(f.bound->comparator);
    out += number_text(f.bound->threshold);
  } else {
    out += "=?";
  }
  out += " [ F<=" + number_text(f.time_bound) + " \"" + f.goal_label + "\" ]";
  return out;
}

std::string print(const Term& t) {
  struct Visitor {
    std::string operator()(const KpiRef& k) const { return k.name; }
    std::string operator()(const Const& c) const {
      if (const bool* b = std::get_if<bool>(&c.value)) return *b ? "true" : "false";
      return number_text(std::get<double>(c.value));
    }
    std::string operator()(const Eval& e) const { return "eval(" + print(e.formula) + ")"; }
  };
  return std::visit(Visitor{}, t);
}

std::string print(const Qc& qc) {
  std::string out = print(qc.body.lhs);
  out += ' ';
  out += to_string(qc.body.op);
  out += ' ';
  out += print(qc.body.rhs);
  if (qc.op != TemporalOp::None) {
    out += qc.op == TemporalOp::Along ? " along " : " within ";
    out += number_text(qc.duration_min) + "m";
  }
  return out;
}

std::vector<NamedQc> parse_qc_file(std::string_view text) {
  std::vector<NamedQc> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first != std::string_view::npos && line[first] != '#') {
      out.push_back({"qc" + std::to_string(out.size() + 1), line_no, parse_qc(line, line_no)});
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return out;
}

}  // namespace qospred::qc

#include "autodistill/ltlf/parser.hpp"

#include <cctype>

namespace autodistill::ltlf {

namespace {

enum class Tok { Ident, True, False, Not, And, Or, LParen, RParen,
                 Next, Eventually, Always, Until, Release, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) { advance(); }

  const Token& peek() const { return token_; }

  Token take() {
    Token t = token_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      if (text_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
    token_.line = line_;
    token_.column = col_;
    token_.text.clear();
    if (pos_ >= text_.size()) {
      token_.kind = Tok::End;
      return;
    }
    char c = text_[pos_];
    auto single = [&](Tok k) {
      token_.kind = k;
      token_.text = c;
      ++pos_;
      ++col_;
    };
    switch (c) {
      case '!': single(Tok::Not); return;
      case '&': single(Tok::And); return;
      case '|': single(Tok::Or); return;
      case '(': single(Tok::LParen); return;
      case ')': single(Tok::RParen); return;
      default: break;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_'))
        ++pos_;
      token_.text = text_.substr(start, pos_ - start);
      col_ += static_cast<int>(token_.text.size());
      if (token_.text == "true") token_.kind = Tok::True;
      else if (token_.text == "false") token_.kind = Tok::False;
      else if (token_.text == "X") token_.kind = Tok::Next;
      else if (token_.text == "F") token_.kind = Tok::Eventually;
      else if (token_.text == "G") token_.kind = Tok::Always;
      else if (token_.text == "U") token_.kind = Tok::Until;
      else if (token_.text == "R") token_.kind = Tok::Release;
      else token_.kind = Tok::Ident;
      return;
    }
    throw ParseError(line_, col_, std::string("unexpected character '") + c +
                                      "'");
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token token_;
};

class Parser {
 public:
  Parser(const std::string& text, const AtomSet& atoms)
      : lex_(text), atoms_(atoms) {}

  FormulaRef parse_formula() {
    FormulaRef f = parse_disj();
    const Token& t = lex_.peek();
    if (t.kind != Tok::End)
      throw ParseError(t.line, t.column, "unexpected '" + t.text + "'");
    return f;
  }

 private:
  FormulaRef parse_disj() {
    std::vector<FormulaRef> parts{parse_conj()};
    while (lex_.peek().kind == Tok::Or) {
      lex_.take();
      parts.push_back(parse_conj());
    }
    return Formula::disj(std::move(parts));
  }

  FormulaRef parse_conj() {
    std::vector<FormulaRef> parts{parse_temporal()};
    while (lex_.peek().kind == Tok::And) {
      lex_.take();
      parts.push_back(parse_temporal());
    }
    return Formula::conj(std::move(parts));
  }

  FormulaRef parse_temporal() {
    FormulaRef left = parse_unary();
    Tok k = lex_.peek().kind;
    if (k == Tok::Until || k == Tok::Release) {
      lex_.take();
      FormulaRef right = parse_temporal();  // right-associative
      return k == Tok::Until ? Formula::until(left, right)
                             : Formula::release(left, right);
    }
    return left;
  }

  FormulaRef parse_unary() {
    const Token t = lex_.peek();
    switch (t.kind) {
      case Tok::Not: lex_.take(); return Formula::negate(parse_unary());
      case Tok::Next: lex_.take(); return Formula::next(parse_unary());
      case Tok::Eventually:
        lex_.take();
        return Formula::eventually(parse_unary());
      case Tok::Always: lex_.take(); return Formula::always(parse_unary());
      default: return parse_atom();
    }
  }

  FormulaRef parse_atom() {
    const Token t = lex_.take();
    switch (t.kind) {
      case Tok::True: return Formula::tru();
      case Tok::False: return Formula::fls();
      case Tok::Ident: {
        int idx = atoms_.index(t.text);
        if (idx < 0) throw UnknownPropositionError(t.line, t.column, t.text);
        return Formula::prop(idx);
      }
      case Tok::LParen: {
        FormulaRef f = parse_disj();
        const Token& close = lex_.peek();
        if (close.kind != Tok::RParen)
          throw ParseError(close.line, close.column, "expected ')'");
        lex_.take();
        return f;
      }
      case Tok::End:
        throw ParseError(t.line, t.column, "unexpected end of input");
      default:
        throw ParseError(t.line, t.column, "unexpected '" + t.text + "'");
    }
  }

  Lexer lex_;
  const AtomSet& atoms_;
};

}  // namespace

FormulaRef parse(const std::string& text, const AtomSet& atoms) {
  return Parser(text, atoms).parse_formula();
}

}  // namespace autodistill::ltlf

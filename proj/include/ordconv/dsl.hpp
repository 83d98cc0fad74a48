#pragma once

#include <cctype>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ordconv/symfunc.hpp"

namespace ordconv {

/// Parse failure with 1-based source position.
struct DslParseError : std::runtime_error {
  DslParseError(int line_, int col_, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line_) + ", col " +
                           std::to_string(col_) + ": " + msg),
        line(line_),
        col(col_) {}
  int line;
  int col;
};

namespace detail_dsl {

// Grammar:
//   spec   := piece { ";" piece }
//   piece  := bound ".." bound ":" expr
//   bound  := rational | "inf"
//   expr   := ["-"] term { ("+"|"-") term } | "0"
//   term   := factor { "*" factor }
//   factor := "x" ["^" "(" rational ")" | "^" rational]
//           | "ln(x)" ["^" integer] | rational
struct Lexer {
  std::string_view src;
  std::size_t pos = 0;
  int line = 1, col = 1;

  struct Token {
    enum Kind { Number, X, LnX, Caret, LParen, RParen, Star, Plus, Minus,
                Colon, Semi, DotDot, Inf, End } kind;
    std::string text;
    int line, col;
  };

  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) {
      if (src[pos] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++pos;
    }
  }

  bool starts(std::string_view s) const { return src.substr(pos, s.size()) == s; }

  Token next() {
    skip_ws();
    Token t{Token::End, "", line, col};
    if (pos >= src.size()) return t;
    auto take = [&](Token::Kind k, std::size_t n) {
      t.kind = k;
      t.text = std::string(src.substr(pos, n));
      pos += n;
      col += static_cast<int>(n);
      return t;
    };
    char c = src[pos];
    if (starts("..")) return take(Token::DotDot, 2);
    if (starts("ln(x)")) return take(Token::LnX, 5);
    if (starts("inf")) return take(Token::Inf, 3);
    switch (c) {
      case 'x': return take(Token::X, 1);
      case '^': return take(Token::Caret, 1);
      case '(': return take(Token::LParen, 1);
      case ')': return take(Token::RParen, 1);
      case '*': return take(Token::Star, 1);
      case '+': return take(Token::Plus, 1);
      case '-': return take(Token::Minus, 1);
      case ':': return take(Token::Colon, 1);
      case ';': return take(Token::Semi, 1);
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t n = 0;
      bool slash = false, dot = false, exp = false;
      while (pos + n < src.size()) {
        char d = src[pos + n];
        if (std::isdigit(static_cast<unsigned char>(d))) { ++n; continue; }
        if (d == '/' && !slash && !dot && !exp) { slash = true; ++n; continue; }
        if (d == '.' && !dot && !slash && !exp) {
          // ".." terminates the number (range operator)
          if (pos + n + 1 < src.size() && src[pos + n + 1] == '.') break;
          dot = true;
          ++n;
          continue;
        }
        if ((d == 'e' || d == 'E') && !exp && !slash && n > 0) {
          exp = true;
          ++n;
          if (pos + n < src.size() && (src[pos + n] == '+' || src[pos + n] == '-')) ++n;
          continue;
        }
        break;
      }
      if (n == 0) throw DslParseError(line, col, "malformed number");
      return take(Token::Number, n);
    }
    throw DslParseError(line, col, std::string("unexpected character '") + c + "'");
  }
};

}  // namespace detail_dsl

/// Parses the piecewise-function DSL, e.g. "0..1: 1; 1..inf: x^(-2/3)".
/// Numbers are exact rationals (decimal literals included); the pieces must
/// partition (0, inf) explicitly, with gaps, overlaps, a nonzero start or a
/// finite end reported as partition errors.
inline PiecewiseFn parse_function(std::string_view text) {
  using Lexer = detail_dsl::Lexer;
  using Token = Lexer::Token;
  Lexer lex{text};
  Token tok = lex.next();

  auto advance = [&]() { tok = lex.next(); };
  auto expect = [&](Token::Kind k, const char* what) {
    if (tok.kind != k)
      throw DslParseError(tok.line, tok.col,
                          std::string("expected ") + what + (tok.kind == Token::End
                                                                 ? " before end of input"
                                                                 : ""));
    Token t = tok;
    advance();
    return t;
  };
  auto parse_rational_tok = [&](const Token& t) {
    auto r = Rational::parse(t.text);
    if (!r) throw DslParseError(t.line, t.col, "malformed rational '" + t.text + "'");
    return *r;
  };
  auto parse_scalar_tok = [&](const Token& t) -> Scalar {
    if (auto r = Rational::parse(t.text)) return Scalar(*r);
    char* end = nullptr;
    double v = std::strtod(t.text.c_str(), &end);
    if (end == nullptr || *end != '\0')
      throw DslParseError(t.line, t.col, "malformed number '" + t.text + "'");
    return Scalar::inexact(v);
  };

  // factor := x [^ e] | ln(x) [^ k] | rational; accumulated into one term
  auto parse_term = [&](bool negative) {
    Scalar coeff(negative ? -1 : 1);
    Rational expo(0);
    int logpow = 0;
    bool first = true;
    for (;;) {
      if (tok.kind == Token::Number) {
        coeff *= parse_scalar_tok(tok);
        advance();
      } else if (tok.kind == Token::X) {
        advance();
        Rational e(1);
        if (tok.kind == Token::Caret) {
          advance();
          if (tok.kind == Token::LParen) {
            advance();
            bool neg = false;
            if (tok.kind == Token::Minus) {
              neg = true;
              advance();
            }
            Rational v = parse_rational_tok(expect(Token::Number, "rational exponent"));
            expect(Token::RParen, "')'");
            e = neg ? -v : v;
          } else {
            bool neg = false;
            if (tok.kind == Token::Minus) {
              neg = true;
              advance();
            }
            Rational v = parse_rational_tok(expect(Token::Number, "rational exponent"));
            e = neg ? -v : v;
          }
        }
        expo += e;
      } else if (tok.kind == Token::LnX) {
        advance();
        int k = 1;
        if (tok.kind == Token::Caret) {
          advance();
          Token t = expect(Token::Number, "integer log power");
          Rational v = parse_rational_tok(t);
          if (!v.is_integer() || v.is_negative())
            throw DslParseError(t.line, t.col, "log power must be a nonnegative integer");
          k = static_cast<int>(v.num());
        }
        logpow += k;
      } else {
        if (first)
          throw DslParseError(tok.line, tok.col, "expected a factor");
        break;
      }
      first = false;
      if (tok.kind == Token::Star) {
        advance();
        continue;
      }
      break;
    }
    return PowerLogTerm{coeff, expo, logpow};
  };

  auto parse_expr = [&]() {
    std::vector<PowerLogTerm> terms;
    bool neg = false;
    if (tok.kind == Token::Minus) {
      neg = true;
      advance();
    }
    terms.push_back(parse_term(neg));
    while (tok.kind == Token::Plus || tok.kind == Token::Minus) {
      bool m = tok.kind == Token::Minus;
      advance();
      terms.push_back(parse_term(m));
    }
    return terms;
  };

  std::vector<Piece> pieces;
  for (;;) {
    if (tok.kind == Token::Inf)
      throw DslParseError(tok.line, tok.col, "lower bound cannot be inf");
    Rational lo = parse_rational_tok(expect(Token::Number, "lower bound"));
    expect(Token::DotDot, "'..'");
    UpperBound hi;
    if (tok.kind == Token::Inf) {
      advance();
    } else {
      hi = parse_rational_tok(expect(Token::Number, "upper bound"));
    }
    expect(Token::Colon, "':'");
    std::vector<PowerLogTerm> terms = parse_expr();
    terms.erase(std::remove_if(terms.begin(), terms.end(),
                               [](const PowerLogTerm& t) { return t.coeff.is_zero(); }),
                terms.end());
    pieces.push_back(Piece{lo, hi, std::move(terms)});
    if (tok.kind == Token::Semi) {
      advance();
      continue;
    }
    if (tok.kind == Token::End) break;
    throw DslParseError(tok.line, tok.col, "expected ';' or end of input");
  }

  // Strict partition validation with positions already consumed; reuse the
  // library checks but reject the zero-fill convenience.
  if (!pieces.empty() && pieces.back().hi)
    throw DslParseError(1, 1, "partition error: last piece must end at inf");
  try {
    return PiecewiseFn::from_pieces(std::move(pieces));
  } catch (const MalformedPartitionError& e) {
    throw DslParseError(1, 1, std::string("partition error: ") + e.what());
  }
}

namespace detail_dsl {

inline std::string exponent_text(const Rational& e) {
  if (e.is_integer() && e.is_positive()) return "^" + e.str();
  return "^(" + e.str() + ")";
}

inline std::string term_text(const PowerLogTerm& t, bool abs_coeff) {
  Scalar c = abs_coeff && t.coeff.is_negative() ? -t.coeff : t.coeff;
  std::string factors;
  if (!t.exponent.is_zero()) {
    factors += "x";
    if (t.exponent != Rational(1)) factors += exponent_text(t.exponent);
  }
  if (t.log_power > 0) {
    if (!factors.empty()) factors += "*";
    factors += "ln(x)";
    if (t.log_power > 1) factors += "^" + std::to_string(t.log_power);
  }
  bool unit = c == Scalar(1);
  if (factors.empty()) return c.str();
  if (unit) return factors;
  return c.str() + "*" + factors;
}

}  // namespace detail_dsl

/// Canonical DSL text; reparsing yields a symbolically equal function.
inline std::string serialize_function(const PiecewiseFn& f) {
  PiecewiseFn z = normalize(f);
  std::string out;
  for (std::size_t i = 0; i < z.pieces().size(); ++i) {
    const Piece& pc = z.pieces()[i];
    if (i) out += "; ";
    out += pc.lo.str() + ".." + (pc.hi ? pc.hi->str() : "inf") + ": ";
    if (pc.terms.empty()) {
      out += "0";
      continue;
    }
    for (std::size_t t = 0; t < pc.terms.size(); ++t) {
      const PowerLogTerm& term = pc.terms[t];
      if (t == 0) {
        if (term.coeff.is_negative()) out += "-";
        out += detail_dsl::term_text(term, true);
      } else {
        out += term.coeff.is_negative() ? " - " : " + ";
        out += detail_dsl::term_text(term, true);
      }
    }
  }
  return out;
}

}  // namespace ordconv

#pragma once

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ltlsem/formula.hpp"

namespace ltlsem {

struct ParseError : std::runtime_error {
  ParseError(std::size_t pos, const std::string& what)
      : std::runtime_error("parse error at position " + std::to_string(pos) + ": " + what),
        position(pos) {}
  std::size_t position;
};

namespace detail {

// Grammar, loosest to tightest:
//   implies := or ('->' or)*          (right-assoc, a -> b desugars to !a | b)
//   or      := and ('|' and)*
//   and     := until ('&' until)*
//   until   := unary ('U' until)?     (right-assoc)
//   unary   := ('!' | 'X' | 'F' | 'G') unary | primary
//   primary := 'true' | 'false' | atom | '(' implies ')'
// Atoms match [a-z][a-z0-9_]*; X/F/G/U are the only uppercase tokens.
class Parser {
public:
  explicit Parser(std::string_view text) : text_(text) {}

  Formula run() {
    Formula f = parse_implies();
    skip_ws();
    if (pos_ != text_.size()) {
      char c = text_[pos_];
      if (std::isupper(static_cast<unsigned char>(c)))
        throw ParseError(pos_, std::string("unknown operator '") + c + "'");
      throw ParseError(pos_, std::string("unexpected trailing input '") + c + "'");
    }
    return f;
  }

private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) { ++pos_; return true; }
    return false;
  }

  bool eat_arrow() {
    skip_ws();
    if (pos_ + 1 < text_.size() && text_[pos_] == '-' && text_[pos_ + 1] == '>') {
      pos_ += 2;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  Formula parse_implies() {
    Formula lhs = parse_or();
    if (eat_arrow()) {
      Formula rhs = parse_implies();
      return Formula::disj({Formula::negate(lhs), rhs});
    }
    return lhs;
  }

  Formula parse_or() {
    std::vector<Formula> parts{parse_and()};
    while (eat('|')) parts.push_back(parse_and());
    return parts.size() == 1 ? parts.front() : Formula::disj(std::move(parts));
  }

  Formula parse_and() {
    std::vector<Formula> parts{parse_until()};
    while (peek() == '&') { eat('&'); parts.push_back(parse_until()); }
    return parts.size() == 1 ? parts.front() : Formula::conj(std::move(parts));
  }

  Formula parse_until() {
    Formula lhs = parse_unary();
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == 'U') {
      ++pos_;
      return Formula::until(lhs, parse_until());
    }
    return lhs;
  }

  Formula parse_unary() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError(pos_, "unexpected end of input");
    char c = text_[pos_];
    switch (c) {
      case '!': ++pos_; return Formula::negate(parse_unary());
      case 'X': ++pos_; return Formula::next(parse_unary());
      case 'F': ++pos_; return Formula::finally(parse_unary());
      case 'G': ++pos_; return Formula::globally(parse_unary());
      default: return parse_primary();
    }
  }

  Formula parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError(pos_, "unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      std::size_t open = pos_;
      ++pos_;
      Formula f = parse_implies();
      if (!eat(')')) throw ParseError(open, "unmatched '('");
      return f;
    }
    if (std::isupper(static_cast<unsigned char>(c)))
      throw ParseError(pos_, std::string("unknown operator '") + c + "'");
    if (!std::islower(static_cast<unsigned char>(c)))
      throw ParseError(pos_, std::string("unexpected character '") + c + "'");
    std::size_t start = pos_;
    while (pos_ < text_.size()) {
      char d = text_[pos_];
      if (std::islower(static_cast<unsigned char>(d)) ||
          std::isdigit(static_cast<unsigned char>(d)) || d == '_') {
        ++pos_;
      } else {
        break;
      }
    }
    std::string name(text_.substr(start, pos_ - start));
    if (name == "true") return Formula::tt();
    if (name == "false") return Formula::ff();
    return Formula::atom(std::move(name));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// Parses the ASCII formula grammar and returns the canonical form.
inline Formula parse(std::string_view text) {
  return canonicalize(detail::Parser(text).run());
}

}  // namespace ltlsem

#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "modelforge/errors.hpp"
#include "modelforge/logic/formula.hpp"
#include "modelforge/logic/vocabulary.hpp"

// ASCII formula syntax:
//
//   formula := disj
//   disj    := conj ('|' conj)*
//   conj    := unary ('&' unary)*
//   unary   := '!' unary | ('forall' | 'exists') var '.' formula | primary
//   primary := '(' formula ')' | 'true' | 'false' | var '=' var
//            | ident '(' var (',' var)* ')'
//   var     := 'x' digits
//
// A quantifier's scope extends as far right as possible.

namespace modelforge {

namespace detail {

class FormulaParser {
 public:
  FormulaParser(std::string_view text, const Vocabulary* voc) : text_(text), voc_(voc) {}

  Formula parse() {
    Formula f = disjunction();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  std::string_view peek_word() {
    skip_space();
    std::size_t end = pos_;
    while (end < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
      ++end;
    return text_.substr(pos_, end - pos_);
  }

  std::string_view take_word() {
    auto w = peek_word();
    pos_ += w.size();
    return w;
  }

  int variable() {
    auto start = pos_;
    auto w = take_word();
    if (!is_variable_name(w)) {
      pos_ = start;
      fail("expected a variable x<N>");
    }
    if (w.size() > 7) fail("variable index too large");
    return std::stoi(std::string(w.substr(1)));
  }

  Formula disjunction() {
    std::vector<Formula> parts{conjunction()};
    while (accept('|')) parts.push_back(conjunction());
    return parts.size() == 1 ? parts.front() : Formula::disjunction(std::move(parts));
  }

  Formula conjunction() {
    std::vector<Formula> parts{unary()};
    while (accept('&')) parts.push_back(unary());
    return parts.size() == 1 ? parts.front() : Formula::conjunction(std::move(parts));
  }

  Formula unary() {
    if (accept('!')) return Formula::negation(unary());
    auto w = peek_word();
    if (w == "forall" || w == "exists") {
      take_word();
      skip_space();
      int v = variable();
      expect('.');
      Formula body = disjunction();
      return w == "forall" ? Formula::forall(v, body) : Formula::exists(v, body);
    }
    return primary();
  }

  Formula primary() {
    if (accept('(')) {
      Formula f = disjunction();
      expect(')');
      return f;
    }
    auto start = pos_;
    auto w = take_word();
    if (w.empty()) fail("expected a formula");
    if (w == "true") return Formula::truth();
    if (w == "false") return Formula::falsity();
    if (is_variable_name(w)) {
      pos_ = start;
      int lhs = variable();
      expect('=');
      skip_space();
      int rhs = variable();
      return Formula::equal(lhs, rhs);
    }
    if (!is_identifier(w) || is_reserved_word(w)) {
      pos_ = start;
      fail("expected a relation symbol");
    }
    std::string name(w);
    expect('(');
    std::vector<int> args;
    do {
      skip_space();
      args.push_back(variable());
    } while (accept(','));
    expect(')');
    if (voc_) voc_->require(name, static_cast<int>(args.size()));
    return Formula::atom(std::move(name), std::move(args));
  }

  std::string_view text_;
  const Vocabulary* voc_;
  std::size_t pos_ = 0;
};

inline void print_into(std::string& out, const Formula& f);

inline void print_operand(std::string& out, const Formula& f, bool parenthesize) {
  if (parenthesize) out += '(';
  print_into(out, f);
  if (parenthesize) out += ')';
}

inline void print_into(std::string& out, const Formula& f) {
  switch (f.kind()) {
    case Kind::Atom: {
      out += f.symbol();
      out += '(';
      for (std::size_t k = 0; k < f.vars().size(); ++k) {
        if (k) out += ',';
        out += 'x';
        out += std::to_string(f.vars()[k]);
      }
      out += ')';
      return;
    }
    case Kind::Equal:
      out += 'x' + std::to_string(f.vars()[0]) + "=x" + std::to_string(f.vars()[1]);
      return;
    case Kind::Not: {
      out += '!';
      const auto& b = f.body();
      const bool tight = b.kind() == Kind::Atom || b.kind() == Kind::Equal || b.kind() == Kind::Not ||
                         (b.children().empty() && !b.is_quantifier());
      print_operand(out, b, !tight);
      return;
    }
    case Kind::And:
    case Kind::Or: {
      if (f.children().empty()) {
        out += f.kind() == Kind::And ? "true" : "false";
        return;
      }
      const char* sep = f.kind() == Kind::And ? " & " : " | ";
      for (std::size_t k = 0; k < f.children().size(); ++k) {
        if (k) out += sep;
        const auto& c = f.children()[k];
        // '&' binds tighter than '|'; quantifiers always get parentheses.
        bool wrap = c.is_quantifier();
        if (f.kind() == Kind::And && c.kind() == Kind::Or && !c.children().empty()) wrap = true;
        print_operand(out, c, wrap);
      }
      return;
    }
    case Kind::Exists:
    case Kind::Forall:
      out += f.kind() == Kind::Exists ? "exists x" : "forall x";
      out += std::to_string(f.bound_var());
      out += ". ";
      print_into(out, f.body());
      return;
  }
}

}  // namespace detail

// Parses `text`, checking every atom against `voc`.
inline Formula parse_formula(std::string_view text, const Vocabulary& voc) {
  return detail::FormulaParser(text, &voc).parse();
}

// Parses without a vocabulary; atoms are accepted with any symbol and arity.
inline Formula parse_formula(std::string_view text) { return detail::FormulaParser(text, nullptr).parse(); }

inline std::string to_string(const Formula& f) {
  std::string out;
  detail::print_into(out, f);
  return out;
}

// Throws VocabularyError if an atom of `f` is not in `voc` with matching arity.
inline void check_vocabulary(const Formula& f, const Vocabulary& voc) {
  if (f.kind() == Kind::Atom) {
    voc.require(f.symbol(), static_cast<int>(f.vars().size()));
    return;
  }
  for (const auto& c : f.children()) check_vocabulary(c, voc);
}

}  // namespace modelforge

#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "modelforge/errors.hpp"

namespace modelforge {

struct Symbol {
  std::string name;
  int arity = 1;

  friend bool operator==(const Symbol&, const Symbol&) = default;
};

namespace detail {

// Names of the form x<digits> are variables in the formula syntax.
inline bool is_variable_name(std::string_view s) {
  if (s.size() < 2 || s[0] != 'x') return false;
  return std::all_of(s.begin() + 1, s.end(), [](unsigned char c) { return std::isdigit(c); });
}

inline bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto head = static_cast<unsigned char>(s[0]);
  if (!std::isalpha(head) && head != '_') return false;
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isalnum(c) || c == '_'; });
}

inline bool is_reserved_word(std::string_view s) {
  return s == "forall" || s == "exists" || s == "true" || s == "false";
}

}  // namespace detail

// A purely relational vocabulary. Equality is built in and never listed here.
class Vocabulary {
 public:
  Vocabulary() = default;

  explicit Vocabulary(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {
    for (std::size_t k = 0; k < symbols_.size(); ++k) {
      const auto& s = symbols_[k];
      if (!detail::is_identifier(s.name) || detail::is_variable_name(s.name) ||
          detail::is_reserved_word(s.name))
        throw VocabularyError("invalid relation symbol name '" + s.name + "'");
      if (s.arity < 1)
        throw VocabularyError("relation symbol '" + s.name + "' must have arity >= 1");
      for (std::size_t j = 0; j < k; ++j)
        if (symbols_[j].name == s.name)
          throw VocabularyError("duplicate relation symbol '" + s.name + "'");
    }
  }

  const std::vector<Symbol>& symbols() const noexcept { return symbols_; }
  std::size_t size() const noexcept { return symbols_.size(); }
  const Symbol& operator[](std::size_t k) const { return symbols_.at(k); }

  std::optional<std::size_t> index_of(std::string_view name) const noexcept {
    for (std::size_t k = 0; k < symbols_.size(); ++k)
      if (symbols_[k].name == name) return k;
    return std::nullopt;
  }

  // Throws VocabularyError when `name` is unknown or used with the wrong arity.
  std::size_t require(std::string_view name, int arity) const {
    auto k = index_of(name);
    if (!k) throw VocabularyError("unknown relation symbol '" + std::string(name) + "'");
    if (symbols_[*k].arity != arity)
      throw VocabularyError("symbol '" + std::string(name) + "' has arity " +
                            std::to_string(symbols_[*k].arity) + ", used with " +
                            std::to_string(arity) + " arguments");
    return *k;
  }

  friend bool operator==(const Vocabulary&, const Vocabulary&) = default;

 private:
  std::vector<Symbol> symbols_;
};

}  // namespace modelforge

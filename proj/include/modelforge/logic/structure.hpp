#pragma once

#include <concepts>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "modelforge/errors.hpp"
#include "modelforge/logic/vocabulary.hpp"

namespace modelforge {

using Element = int;
using Tuple = std::vector<Element>;

// A finite relational structure with universe {0, ..., size-1}. Relations are
// stored as dense truth tables indexed in mixed radix (first coordinate most
// significant), which keeps lookups branch-free for the small universes this
// library targets.
class Structure {
 public:
  Structure() = default;

  Structure(Vocabulary vocabulary, int universe_size)
      : vocabulary_(std::move(vocabulary)), size_(universe_size) {
    if (size_ < 1) throw InvalidInput("universe size must be at least 1");
    tables_.reserve(vocabulary_.size());
    for (const auto& s : vocabulary_.symbols()) {
      std::size_t cells = 1;
      for (int k = 0; k < s.arity; ++k) {
        cells *= static_cast<std::size_t>(size_);
        if (cells > (std::size_t{1} << 28))
          throw BudgetExceeded("relation table for '" + s.name + "' is too large");
      }
      tables_.emplace_back(cells, std::uint8_t{0});
    }
  }

  const Vocabulary& vocabulary() const noexcept { return vocabulary_; }
  int size() const noexcept { return size_; }

  bool holds(std::size_t symbol, std::span<const Element> args) const {
    return tables_[symbol][offset(args)] != 0;
  }

  void set(std::size_t symbol, std::span<const Element> args, bool value = true) {
    check_tuple(symbol, args);
    tables_[symbol][offset(args)] = value ? 1 : 0;
  }

  template <std::integral S>
  void set(S symbol, std::span<const Element> args, bool value = true) {
    set(static_cast<std::size_t>(symbol), args, value);
  }
  template <std::integral S>
  bool holds(S symbol, std::span<const Element> args) const {
    return holds(static_cast<std::size_t>(symbol), args);
  }

  // Symbol addressed by name; checked.
  template <typename Name>
    requires(std::convertible_to<const Name&, std::string_view> && !std::integral<Name>)
  void set(const Name& name, const Tuple& args, bool value = true) {
    set(vocabulary_.require(name, static_cast<int>(args.size())), std::span<const Element>(args), value);
  }

  template <typename Name>
    requires(std::convertible_to<const Name&, std::string_view> && !std::integral<Name>)
  bool holds(const Name& name, const Tuple& args) const {
    auto k = vocabulary_.require(name, static_cast<int>(args.size()));
    check_tuple(k, args);
    return holds(k, args);
  }

  // Tuples of the relation in lexicographic order.
  std::vector<Tuple> tuples(std::size_t symbol) const {
    std::vector<Tuple> out;
    const int arity = vocabulary_[symbol].arity;
    Tuple t(static_cast<std::size_t>(arity), 0);
    for (std::size_t cell = 0; cell < tables_[symbol].size(); ++cell) {
      if (tables_[symbol][cell]) {
        std::size_t rest = cell;
        for (int k = arity - 1; k >= 0; --k) {
          t[static_cast<std::size_t>(k)] = static_cast<Element>(rest % static_cast<std::size_t>(size_));
          rest /= static_cast<std::size_t>(size_);
        }
        out.push_back(t);
      }
    }
    return out;
  }

  const std::vector<std::uint8_t>& table(std::size_t symbol) const { return tables_[symbol]; }

  friend bool operator==(const Structure&, const Structure&) = default;

 private:
  std::size_t offset(std::span<const Element> args) const noexcept {
    std::size_t off = 0;
    for (Element a : args) off = off * static_cast<std::size_t>(size_) + static_cast<std::size_t>(a);
    return off;
  }

  void check_tuple(std::size_t symbol, std::span<const Element> args) const {
    if (symbol >= tables_.size()) throw InvalidInput("symbol index out of range");
    if (static_cast<int>(args.size()) != vocabulary_[symbol].arity)
      throw InvalidInput("tuple length does not match arity of '" + vocabulary_[symbol].name + "'");
    for (Element a : args)
      if (a < 0 || a >= size_)
        throw InvalidInput("element " + std::to_string(a) + " outside universe of size " +
                           std::to_string(size_));
  }

  Vocabulary vocabulary_;
  int size_ = 0;
  std::vector<std::vector<std::uint8_t>> tables_;
};

// Strict linear order 0 < 1 < ... < n-1 on the binary symbol `name`.
inline Structure make_chain(int n, const std::string& name = "R") {
  Structure s(Vocabulary({{name, 2}}), n);
  for (Element a = 0; a < n; ++a)
    for (Element b = a + 1; b < n; ++b) s.set(0, std::vector<Element>{a, b});
  return s;
}

}  // namespace modelforge

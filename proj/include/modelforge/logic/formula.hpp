#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "modelforge/errors.hpp"

namespace modelforge {

enum class Kind : std::uint8_t { Atom, Equal, Not, And, Or, Exists, Forall };

// Immutable first-order formula over a relational vocabulary with equality.
// Variables are x0, x1, ... and are represented by their index.
//
// Conjunctions and disjunctions are n-ary; the smart constructors flatten
// nested connectives of the same kind and unwrap singletons, so the empty
// conjunction is "true" and the empty disjunction is "false".
class Formula {
 public:
  // Default-constructed formula is the empty conjunction.
  Formula() : Formula(truth()) {}

  static Formula atom(std::string symbol, std::vector<int> args) {
    for (int v : args) check_var(v);
    Node n;
    n.kind = Kind::Atom;
    n.symbol = std::move(symbol);
    n.vars = std::move(args);
    return Formula(std::move(n));
  }

  static Formula equal(int lhs, int rhs) {
    check_var(lhs);
    check_var(rhs);
    Node n;
    n.kind = Kind::Equal;
    n.vars = {lhs, rhs};
    return Formula(std::move(n));
  }

  static Formula negation(Formula f) {
    Node n;
    n.kind = Kind::Not;
    n.children.push_back(std::move(f));
    return Formula(std::move(n));
  }

  static Formula conjunction(std::vector<Formula> parts) { return junction(Kind::And, std::move(parts)); }
  static Formula disjunction(std::vector<Formula> parts) { return junction(Kind::Or, std::move(parts)); }

  static Formula exists(int var, Formula body) { return quantifier(Kind::Exists, var, std::move(body)); }
  static Formula forall(int var, Formula body) { return quantifier(Kind::Forall, var, std::move(body)); }

  static Formula truth() {
    static const Formula t = make_empty(Kind::And);
    return t;
  }
  static Formula falsity() {
    static const Formula f = make_empty(Kind::Or);
    return f;
  }

  Kind kind() const noexcept { return node_->kind; }
  const std::string& symbol() const noexcept { return node_->symbol; }
  // Atom arguments, the two sides of an equality, or the bound variable.
  const std::vector<int>& vars() const noexcept { return node_->vars; }
  const std::vector<Formula>& children() const noexcept { return node_->children; }
  int bound_var() const noexcept { return node_->vars.front(); }
  const Formula& body() const noexcept { return node_->children.front(); }

  bool is_truth() const noexcept { return kind() == Kind::And && children().empty(); }
  bool is_falsity() const noexcept { return kind() == Kind::Or && children().empty(); }
  bool is_quantifier() const noexcept { return kind() == Kind::Exists || kind() == Kind::Forall; }

  // Sorted, duplicate-free.
  const std::vector<int>& free_vars() const noexcept { return node_->free_vars; }
  bool is_sentence() const noexcept { return free_vars().empty(); }
  // Largest variable index occurring free or bound, -1 when there is none.
  int max_var() const noexcept { return node_->max_var; }
  int quantifier_rank() const noexcept { return node_->rank; }
  std::size_t hash() const noexcept { return node_->hash; }
  std::size_t size() const noexcept { return node_->size; }

  friend std::strong_ordering compare(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return std::strong_ordering::equal;
    if (auto c = a.kind() <=> b.kind(); c != 0) return c;
    if (auto c = a.symbol() <=> b.symbol(); c != 0) return c;
    if (auto c = a.vars() <=> b.vars(); c != 0) return c;
    const auto& ac = a.children();
    const auto& bc = b.children();
    for (std::size_t k = 0; k < std::min(ac.size(), bc.size()); ++k)
      if (auto c = compare(ac[k], bc[k]); c != 0) return c;
    return ac.size() <=> bc.size();
  }

  friend std::strong_ordering operator<=>(const Formula& a, const Formula& b) { return compare(a, b); }
  friend bool operator==(const Formula& a, const Formula& b) {
    return a.node_ == b.node_ || (a.hash() == b.hash() && compare(a, b) == 0);
  }

 private:
  struct Node {
    Kind kind = Kind::And;
    std::string symbol;
    std::vector<int> vars;
    std::vector<Formula> children;
    std::vector<int> free_vars;
    int max_var = -1;
    int rank = 0;
    std::size_t hash = 0;
    std::size_t size = 1;
  };

  explicit Formula(Node n) {
    finish(n);
    node_ = std::make_shared<const Node>(std::move(n));
  }

  static void check_var(int v) {
    if (v < 0) throw InvalidInput("variable index must be non-negative");
  }

  static Formula make_empty(Kind k) {
    Node n;
    n.kind = k;
    return Formula(std::move(n));
  }

  static Formula junction(Kind k, std::vector<Formula> parts) {
    std::vector<Formula> flat;
    flat.reserve(parts.size());
    for (auto& p : parts) {
      if (p.kind() == k)
        flat.insert(flat.end(), p.children().begin(), p.children().end());
      else
        flat.push_back(std::move(p));
    }
    if (flat.size() == 1) return flat.front();
    Node n;
    n.kind = k;
    n.children = std::move(flat);
    return Formula(std::move(n));
  }

  static Formula quantifier(Kind k, int var, Formula body) {
    check_var(var);
    Node n;
    n.kind = k;
    n.vars = {var};
    n.children.push_back(std::move(body));
    return Formula(std::move(n));
  }

  static void hash_combine(std::size_t& seed, std::size_t v) noexcept {
    seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
  }

  static void finish(Node& n) {
    std::size_t h = static_cast<std::size_t>(n.kind) + 1;
    hash_combine(h, std::hash<std::string>{}(n.symbol));
    for (int v : n.vars) hash_combine(h, static_cast<std::size_t>(v));
    for (const auto& c : n.children) {
      hash_combine(h, c.hash());
      n.size += c.size();
      n.max_var = std::max(n.max_var, c.max_var());
      n.rank = std::max(n.rank, c.quantifier_rank());
    }
    n.hash = h;
    for (int v : n.vars) n.max_var = std::max(n.max_var, v);

    switch (n.kind) {
      case Kind::Atom:
      case Kind::Equal:
        n.free_vars = n.vars;
        break;
      case Kind::Exists:
      case Kind::Forall: {
        n.rank += 1;
        const int bound = n.vars.front();
        for (int v : n.children.front().free_vars())
          if (v != bound) n.free_vars.push_back(v);
        break;
      }
      default:
        for (const auto& c : n.children)
          n.free_vars.insert(n.free_vars.end(), c.free_vars().begin(), c.free_vars().end());
    }
    std::sort(n.free_vars.begin(), n.free_vars.end());
    n.free_vars.erase(std::unique(n.free_vars.begin(), n.free_vars.end()), n.free_vars.end());
  }

  std::shared_ptr<const Node> node_;
};

struct FormulaHash {
  std::size_t operator()(const Formula& f) const noexcept { return f.hash(); }
};

// Sorts and deduplicates the operands of every conjunction and disjunction,
// recursively. Two formulas that differ only in operand order or repetition
// normalize to the same value.
inline Formula normalize(const Formula& f) {
  switch (f.kind()) {
    case Kind::Atom:
    case Kind::Equal:
      return f;
    case Kind::Not:
      return Formula::negation(normalize(f.body()));
    case Kind::Exists:
      return Formula::exists(f.bound_var(), normalize(f.body()));
    case Kind::Forall:
      return Formula::forall(f.bound_var(), normalize(f.body()));
    case Kind::And:
    case Kind::Or: {
      std::vector<Formula> parts;
      parts.reserve(f.children().size());
      for (const auto& c : f.children()) parts.push_back(normalize(c));
      // Flatten first so that operands lifted out of nested junctions get sorted too.
      Formula flat = f.kind() == Kind::And ? Formula::conjunction(std::move(parts))
                                           : Formula::disjunction(std::move(parts));
      if (flat.kind() != f.kind()) return flat;
      std::vector<Formula> ops = flat.children();
      std::sort(ops.begin(), ops.end());
      ops.erase(std::unique(ops.begin(), ops.end()), ops.end());
      return f.kind() == Kind::And ? Formula::conjunction(std::move(ops))
                                   : Formula::disjunction(std::move(ops));
    }
  }
  return f;
}

// Negation normal form: negations pushed down to atoms and equalities.
inline Formula to_nnf(const Formula& f, bool negate = false) {
  switch (f.kind()) {
    case Kind::Atom:
    case Kind::Equal:
      return negate ? Formula::negation(f) : f;
    case Kind::Not:
      return to_nnf(f.body(), !negate);
    case Kind::And:
    case Kind::Or: {
      std::vector<Formula> parts;
      for (const auto& c : f.children()) parts.push_back(to_nnf(c, negate));
      const bool as_and = (f.kind() == Kind::And) != negate;
      return as_and ? Formula::conjunction(std::move(parts)) : Formula::disjunction(std::move(parts));
    }
    case Kind::Exists:
    case Kind::Forall: {
      const bool as_exists = (f.kind() == Kind::Exists) != negate;
      auto body = to_nnf(f.body(), negate);
      return as_exists ? Formula::exists(f.bound_var(), body) : Formula::forall(f.bound_var(), body);
    }
  }
  return f;
}

}  // namespace modelforge

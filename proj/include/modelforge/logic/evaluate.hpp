#pragma once

#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "modelforge/errors.hpp"
#include "modelforge/logic/formula.hpp"
#include "modelforge/logic/structure.hpp"
#include "modelforge/logic/syntax.hpp"

namespace modelforge {

// Partial map from variable indices to universe elements.
class Assignment {
 public:
  Assignment() = default;
  Assignment(std::initializer_list<std::pair<int, Element>> binds) {
    for (auto [v, e] : binds) bind(v, e);
  }

  // x_k := tuple[k]
  static Assignment from_tuple(std::span<const Element> tuple) {
    Assignment a;
    a.slots_.assign(tuple.begin(), tuple.end());
    return a;
  }

  void bind(int var, Element e) {
    if (var < 0) throw InvalidInput("negative variable index");
    if (e < 0) throw InvalidInput("negative element");
    if (static_cast<std::size_t>(var) >= slots_.size()) slots_.resize(static_cast<std::size_t>(var) + 1, -1);
    slots_[static_cast<std::size_t>(var)] = e;
  }

  std::optional<Element> get(int var) const {
    if (var < 0 || static_cast<std::size_t>(var) >= slots_.size() || slots_[static_cast<std::size_t>(var)] < 0)
      return std::nullopt;
    return slots_[static_cast<std::size_t>(var)];
  }

  // Unbound slots hold -1.
  const std::vector<Element>& slots() const noexcept { return slots_; }

 private:
  std::vector<Element> slots_;
};

// A formula compiled against one structure: symbols are resolved once so the
// same check can be run for many assignments.
class Evaluator {
 public:
  Evaluator(const Structure& m, const Formula& f) : m_(&m), free_(f.free_vars()) {
    check_vocabulary(f, m.vocabulary());
    width_ = static_cast<std::size_t>(f.max_var() + 1);
    root_ = compile(f);
  }

  const std::vector<int>& free_vars() const noexcept { return free_; }

  bool operator()(const Assignment& a) const {
    std::vector<Element> env(std::max(width_, a.slots().size()), -1);
    std::copy(a.slots().begin(), a.slots().end(), env.begin());
    for (int v : free_) {
      Element e = env[static_cast<std::size_t>(v)];
      if (e < 0) throw EvaluationError("free variable x" + std::to_string(v) + " is unbound");
      if (e >= m_->size())
        throw EvaluationError("x" + std::to_string(v) + " bound to element outside the universe");
    }
    return eval(root_, env);
  }

  // Unchecked fast path: env must bind every free variable to an element of
  // the universe and have room for every variable of the formula.
  bool run(std::vector<Element>& env) const { return eval(root_, env); }
  std::size_t width() const noexcept { return width_; }

 private:
  struct Node {
    Kind kind;
    int symbol = -1;
    int var = -1;
    int var2 = -1;
    int first = 0;  // into args_ (atoms) or kids_ (connectives)
    int count = 0;
  };

  int compile(const Formula& f) {
    Node n{f.kind()};
    switch (f.kind()) {
      case Kind::Atom:
        n.symbol = static_cast<int>(*m_->vocabulary().index_of(f.symbol()));
        n.first = static_cast<int>(args_.size());
        n.count = static_cast<int>(f.vars().size());
        args_.insert(args_.end(), f.vars().begin(), f.vars().end());
        break;
      case Kind::Equal:
        n.var = f.vars()[0];
        n.var2 = f.vars()[1];
        break;
      case Kind::Exists:
      case Kind::Forall:
        n.var = f.bound_var();
        [[fallthrough]];
      default: {
        std::vector<int> kids;
        for (const auto& c : f.children()) kids.push_back(compile(c));
        n.first = static_cast<int>(kids_.size());
        n.count = static_cast<int>(kids.size());
        kids_.insert(kids_.end(), kids.begin(), kids.end());
      }
    }
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size()) - 1;
  }

  bool eval(int idx, std::vector<Element>& env) const {
    const Node& n = nodes_[static_cast<std::size_t>(idx)];
    switch (n.kind) {
      case Kind::Atom: {
        const auto z = static_cast<std::size_t>(m_->size());
        std::size_t off = 0;
        for (int k = 0; k < n.count; ++k)
          off = off * z + static_cast<std::size_t>(env[static_cast<std::size_t>(args_[static_cast<std::size_t>(n.first + k)])]);
        return m_->table(static_cast<std::size_t>(n.symbol))[off] != 0;
      }
      case Kind::Equal:
        return env[static_cast<std::size_t>(n.var)] == env[static_cast<std::size_t>(n.var2)];
      case Kind::Not:
        return !eval(kids_[static_cast<std::size_t>(n.first)], env);
      case Kind::And:
        for (int k = 0; k < n.count; ++k)
          if (!eval(kids_[static_cast<std::size_t>(n.first + k)], env)) return false;
        return true;
      case Kind::Or:
        for (int k = 0; k < n.count; ++k)
          if (eval(kids_[static_cast<std::size_t>(n.first + k)], env)) return true;
        return false;
      case Kind::Exists:
      case Kind::Forall: {
        const bool want = n.kind == Kind::Exists;
        auto& slot = env[static_cast<std::size_t>(n.var)];
        const Element saved = slot;
        bool result = !want;
        for (Element e = 0; e < m_->size(); ++e) {
          slot = e;
          if (eval(kids_[static_cast<std::size_t>(n.first)], env) == want) {
            result = want;
            break;
          }
        }
        slot = saved;
        return result;
      }
    }
    return false;
  }

  const Structure* m_;
  std::vector<int> free_;
  std::size_t width_ = 0;
  std::vector<Node> nodes_;
  std::vector<int> args_;
  std::vector<int> kids_;
  int root_ = 0;
};

// Truth of `f` in `m` under `a`. Quantifiers range over the whole universe.
inline bool evaluate(const Structure& m, const Formula& f, const Assignment& a = {}) {
  return Evaluator(m, f)(a);
}

// Truth of `f` with x_k bound to tuple[k].
inline bool satisfies(const Structure& m, const Formula& f, std::span<const Element> tuple) {
  return Evaluator(m, f)(Assignment::from_tuple(tuple));
}

}  // namespace modelforge

#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "modelforge/errors.hpp"
#include "modelforge/filter/filter.hpp"
#include "modelforge/logic/evaluate.hpp"
#include "modelforge/logic/structure.hpp"

namespace modelforge {

// A choice function f ∈ ∏ M_i, one element per coordinate.
using ChoiceFunction = std::vector<Element>;

inline constexpr std::size_t kDefaultProductBudget = 1'000'000;

// The reduced product ∏ M_i / D. Equivalence and relations are always
// available on representatives; the explicit quotient structure is built only
// when the number of choice functions is within budget.
class ReducedProduct {
 public:
  ReducedProduct(std::vector<Structure> factors, FilterOnIndex filter,
                 std::size_t budget = kDefaultProductBudget)
      : factors_(std::move(factors)), filter_(std::move(filter)) {
    if (static_cast<int>(factors_.size()) != filter_.index_size())
      throw InvalidInput("number of factors does not match the filter's index set");
    for (const auto& m : factors_)
      if (!(m.vocabulary() == factors_.front().vocabulary()))
        throw VocabularyError("factors do not share a vocabulary");
    count_ = 1;
    for (const auto& m : factors_) {
      count_ *= static_cast<std::size_t>(m.size());
      if (count_ > budget) {
        count_ = 0;
        break;
      }
    }
    if (count_ != 0) materialize();
  }

  const std::vector<Structure>& factors() const noexcept { return factors_; }
  const FilterOnIndex& filter() const noexcept { return filter_; }
  const Vocabulary& vocabulary() const noexcept { return factors_.front().vocabulary(); }
  int index_size() const noexcept { return static_cast<int>(factors_.size()); }

  bool materialized() const noexcept { return count_ != 0; }
  // Number of choice functions; 0 when over budget.
  std::size_t function_count() const noexcept { return count_; }

  void check_function(const ChoiceFunction& f) const {
    if (f.size() != factors_.size()) throw InvalidInput("choice function has wrong length");
    for (std::size_t i = 0; i < f.size(); ++i)
      if (f[i] < 0 || f[i] >= factors_[i].size())
        throw InvalidInput("choice function value outside factor " + std::to_string(i));
  }

  IndexSet agreement(const ChoiceFunction& f, const ChoiceFunction& g) const {
    IndexSet s(factors_.size());
    for (std::size_t i = 0; i < f.size(); ++i)
      if (f[i] == g[i]) s.set(i);
    return s;
  }

  bool equivalent(const ChoiceFunction& f, const ChoiceFunction& g) const {
    return filter_.member(agreement(f, g));
  }

  // {i : M_i ⊨ R(f_1(i), ..., f_r(i))} ∈ D
  bool holds(std::size_t symbol, std::span<const ChoiceFunction> args) const {
    IndexSet s(factors_.size());
    Tuple at(args.size());
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      for (std::size_t k = 0; k < args.size(); ++k) at[k] = args[k][i];
      if (factors_[i].holds(symbol, at)) s.set(i);
    }
    return filter_.member(s);
  }

  // Lexicographically least member of the class of f: f on the kernel, 0 elsewhere.
  ChoiceFunction canonical(const ChoiceFunction& f) const {
    ChoiceFunction c(f.size(), 0);
    const auto& k = filter_.kernel();
    for (auto i = k.find_first(); i != IndexSet::npos; i = k.find_next(i)) c[i] = f[i];
    return c;
  }

  const Structure& quotient() const {
    require_materialized();
    return quotient_;
  }

  // Canonical representative of each class, in lexicographic order.
  const std::vector<ChoiceFunction>& representatives() const {
    require_materialized();
    return reps_;
  }

  int class_of(const ChoiceFunction& f) const {
    require_materialized();
    check_function(f);
    return class_index_.at(canonical(f));
  }

  // Visits every choice function in lexicographic order.
  template <typename Visit>
  void for_each_function(Visit&& visit) const {
    ChoiceFunction f(factors_.size(), 0);
    while (true) {
      visit(static_cast<const ChoiceFunction&>(f));
      std::size_t k = f.size();
      while (k > 0 && f[k - 1] == factors_[k - 1].size() - 1) f[--k] = 0;
      if (k == 0) return;
      ++f[k - 1];
    }
  }

  // Choice function with mixed-radix index `code` (first coordinate most significant).
  ChoiceFunction decode(std::size_t code) const {
    ChoiceFunction f(factors_.size(), 0);
    for (std::size_t k = f.size(); k-- > 0;) {
      f[k] = static_cast<Element>(code % static_cast<std::size_t>(factors_[k].size()));
      code /= static_cast<std::size_t>(factors_[k].size());
    }
    return f;
  }

 private:
  void require_materialized() const {
    if (!materialized()) throw BudgetExceeded("reduced product has more choice functions than the budget allows");
  }

  void materialize() {
    for_each_function([&](const ChoiceFunction& f) {
      auto key = canonical(f);
      if (!class_index_.count(key)) {
        class_index_.emplace(key, static_cast<int>(reps_.size()));
        reps_.push_back(key);
      }
    });
    const int classes = static_cast<int>(reps_.size());
    quotient_ = Structure(vocabulary(), classes);
    for (std::size_t s = 0; s < vocabulary().size(); ++s) {
      const int arity = vocabulary()[s].arity;
      std::vector<int> cls(static_cast<std::size_t>(arity), 0);
      std::vector<ChoiceFunction> args(static_cast<std::size_t>(arity));
      while (true) {
        for (int k = 0; k < arity; ++k) args[static_cast<std::size_t>(k)] = reps_[static_cast<std::size_t>(cls[static_cast<std::size_t>(k)])];
        if (holds(s, args)) quotient_.set(s, cls);
        int k = arity;
        while (k > 0 && cls[static_cast<std::size_t>(k - 1)] == classes - 1) cls[static_cast<std::size_t>(--k)] = 0;
        if (k == 0) break;
        ++cls[static_cast<std::size_t>(k - 1)];
      }
    }
  }

  std::vector<Structure> factors_;
  FilterOnIndex filter_;
  std::size_t count_ = 0;
  std::vector<ChoiceFunction> reps_;
  std::map<ChoiceFunction, int> class_index_;
  Structure quotient_;
};

inline ReducedProduct reduced_product(std::vector<Structure> factors, FilterOnIndex filter,
                                      std::size_t budget = kDefaultProductBudget) {
  return ReducedProduct(std::move(factors), std::move(filter), budget);
}

struct LosVerdict {
  bool product = false;
  bool factor = false;
  bool agree() const noexcept { return product == factor; }
};

// Truth of a sentence in ∏M_i/D versus in the factor D is concentrated on.
inline LosVerdict los_check(const ReducedProduct& product, const Formula& sentence) {
  if (!product.filter().is_ultrafilter()) throw PreconditionFailure("los_check needs an ultrafilter");
  if (!sentence.is_sentence()) throw InvalidInput("los_check needs a sentence");
  const int j = product.filter().generating_index();
  return {evaluate(product.quotient(), sentence), evaluate(product.factors()[static_cast<std::size_t>(j)], sentence)};
}

inline LosVerdict los_check(std::vector<Structure> factors, FilterOnIndex filter, const Formula& sentence) {
  if (!filter.is_ultrafilter()) throw PreconditionFailure("los_check needs an ultrafilter");
  return los_check(ReducedProduct(std::move(factors), std::move(filter)), sentence);
}

}  // namespace modelforge

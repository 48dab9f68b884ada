#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "modelforge/logic/formula.hpp"
#include "modelforge/logic/vocabulary.hpp"

// Sentence enumeration over a relational vocabulary.
//
// The stream consists of the sentences ∃x0 h and ∀x0 h, where h ranges over
// the Hintikka formulas of rank q-1 in one free variable, for q = 1..qr.
// A rank-r Hintikka formula over x_0..x_{k-1} is
//
//     α  ∧  ⋀_{τ∈S} ∃x_k τ  ∧  ∀x_k ⋁_{τ∈S} τ
//
// with α a complete atomic type and S a nonempty set of rank-(r-1) Hintikka
// formulas over x_0..x_k that extend α. Every tuple satisfies exactly one
// Hintikka formula of each rank, so two structures satisfy the same sentences
// of quantifier rank ≤ qr iff they agree on every sentence of the stream, and
// every such sentence is a Boolean combination of stream elements.

namespace modelforge {

namespace detail {

// Complete atomic type over k variables: an equality partition and the truth
// value of every relation on tuples of class representatives.
struct AtomicType {
  std::vector<int> cls;                          // class of each variable, restricted growth
  int classes = 0;
  std::vector<std::vector<std::uint8_t>> bits;  // per symbol, mixed radix over classes

  Formula formula(const Vocabulary& voc) const {
    std::vector<Formula> parts;
    const int k = static_cast<int>(cls.size());
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) {
        auto eq = Formula::equal(i, j);
        parts.push_back(cls[static_cast<std::size_t>(i)] == cls[static_cast<std::size_t>(j)] ? eq : Formula::negation(eq));
      }
    std::vector<int> rep(static_cast<std::size_t>(classes), -1);
    for (int i = k - 1; i >= 0; --i) rep[static_cast<std::size_t>(cls[static_cast<std::size_t>(i)])] = i;
    for (std::size_t s = 0; s < voc.size(); ++s) {
      const int arity = voc[s].arity;
      std::vector<int> idx(static_cast<std::size_t>(arity), 0);
      for (std::size_t cell = 0; cell < bits[s].size(); ++cell) {
        std::size_t rest = cell;
        for (int a = arity - 1; a >= 0; --a) {
          idx[static_cast<std::size_t>(a)] = rep[rest % static_cast<std::size_t>(classes)];
          rest /= static_cast<std::size_t>(classes);
        }
        auto at = Formula::atom(voc[s].name, idx);
        parts.push_back(bits[s][cell] ? at : Formula::negation(at));
      }
    }
    return normalize(Formula::conjunction(std::move(parts)));
  }
};

inline std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// All atomic types over k+1 variables whose restriction to the first k is `a`.
inline std::vector<AtomicType> extensions(const AtomicType& a, const Vocabulary& voc) {
  std::vector<AtomicType> out;
  // The new variable equals an existing class: nothing new to decide.
  for (int c = 0; c < a.classes; ++c) {
    AtomicType t = a;
    t.cls.push_back(c);
    out.push_back(std::move(t));
  }
  // The new variable starts a new class; decide every cell that mentions it.
  const int n = a.classes + 1;
  std::vector<std::vector<std::size_t>> fresh_cells(voc.size());
  std::size_t fresh_total = 0;
  for (std::size_t s = 0; s < voc.size(); ++s) {
    const int arity = voc[s].arity;
    for (std::size_t cell = 0; cell < ipow(static_cast<std::size_t>(n), arity); ++cell) {
      std::size_t rest = cell;
      bool mentions = false;
      for (int k = 0; k < arity; ++k) {
        if (rest % static_cast<std::size_t>(n) == static_cast<std::size_t>(a.classes)) mentions = true;
        rest /= static_cast<std::size_t>(n);
      }
      if (mentions) fresh_cells[s].push_back(cell);
    }
    fresh_total += fresh_cells[s].size();
  }
  if (fresh_total > 20) return out;  // callers treat this as truncation
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << fresh_total); ++mask) {
    AtomicType t;
    t.cls = a.cls;
    t.cls.push_back(a.classes);
    t.classes = n;
    t.bits.resize(voc.size());
    std::size_t bit = 0;
    for (std::size_t s = 0; s < voc.size(); ++s) {
      const int arity = voc[s].arity;
      t.bits[s].assign(ipow(static_cast<std::size_t>(n), arity), 0);
      // Copy old cells: reindex from radix n-1 to radix n.
      for (std::size_t cell = 0; cell < a.bits[s].size(); ++cell) {
        std::size_t rest = cell, mapped = 0, scale = 1;
        for (int k = 0; k < arity; ++k) {
          mapped += (rest % static_cast<std::size_t>(a.classes)) * scale;
          rest /= static_cast<std::size_t>(a.classes);
          scale *= static_cast<std::size_t>(n);
        }
        t.bits[s][mapped] = a.bits[s][cell];
      }
      for (std::size_t cell : fresh_cells[s]) t.bits[s][cell] = (mask >> bit++) & 1U;
    }
    out.push_back(std::move(t));
  }
  return out;
}

inline bool extension_truncated(const AtomicType& a, const Vocabulary& voc) {
  std::size_t fresh_total = 0;
  const std::size_t n = static_cast<std::size_t>(a.classes) + 1;
  for (const auto& s : voc.symbols()) fresh_total += ipow(n, s.arity) - ipow(n - 1, s.arity);
  return fresh_total > 20;
}

// Visits nonempty subsets of {0..n-1} by increasing size, then lexicographically.
inline bool for_each_subset_by_size(int n, const std::function<bool(const std::vector<int>&)>& visit) {
  for (int size = 1; size <= n; ++size) {
    std::vector<int> idx(static_cast<std::size_t>(size));
    for (int k = 0; k < size; ++k) idx[static_cast<std::size_t>(k)] = k;
    while (true) {
      if (!visit(idx)) return false;
      int k = size - 1;
      while (k >= 0 && idx[static_cast<std::size_t>(k)] == n - size + k) --k;
      if (k < 0) break;
      ++idx[static_cast<std::size_t>(k)];
      for (int j = k + 1; j < size; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return true;
}

class HintikkaEnumerator {
 public:
  HintikkaEnumerator(const Vocabulary& voc, std::size_t list_cap) : voc_(voc), list_cap_(list_cap) {}

  bool truncated() const noexcept { return truncated_; }

  // Visits rank-r Hintikka formulas whose atomic part is `base`.
  bool for_each(int rank, const AtomicType& base, const std::function<bool(const Formula&)>& visit) {
    Formula alpha = base.formula(voc_);
    if (rank == 0) return visit(alpha);
    const int k = static_cast<int>(base.cls.size());
    std::vector<Formula> below;
    if (extension_truncated(base, voc_)) truncated_ = true;
    for (const auto& ext : extensions(base, voc_)) {
      bool more = for_each(rank - 1, ext, [&](const Formula& f) {
        if (below.size() >= list_cap_) {
          truncated_ = true;
          return false;
        }
        below.push_back(f);
        return true;
      });
      if (!more) break;
    }
    return for_each_subset_by_size(static_cast<int>(below.size()), [&](const std::vector<int>& pick) {
      std::vector<Formula> parts{alpha};
      std::vector<Formula> options;
      for (int p : pick) {
        parts.push_back(Formula::exists(k, below[static_cast<std::size_t>(p)]));
        options.push_back(below[static_cast<std::size_t>(p)]);
      }
      parts.push_back(Formula::forall(k, Formula::disjunction(std::move(options))));
      return visit(normalize(Formula::conjunction(std::move(parts))));
    });
  }

 private:
  const Vocabulary& voc_;
  std::size_t list_cap_;
  bool truncated_ = false;
};

}  // namespace detail

struct SentenceStream {
  std::vector<Formula> sentences;
  // False when the budget ran out or an intermediate list had to be cut.
  bool complete = true;
};

// Streams sentences of quantifier rank ≤ qr to `visit` (which may return false
// to stop early). Returns whether the enumeration was exhaustive.
inline bool for_each_sentence(const Vocabulary& voc, int qr, std::size_t budget,
                              const std::function<bool(const Formula&)>& visit) {
  std::size_t emitted = 0;
  bool exhausted = false;
  detail::HintikkaEnumerator hint(voc, budget);
  detail::AtomicType empty;
  empty.bits.resize(voc.size());
  for (std::size_t s = 0; s < voc.size(); ++s) empty.bits[s].assign(voc[s].arity == 0 ? 1 : 0, 0);
  const auto singles = detail::extensions(empty, voc);
  if (detail::extension_truncated(empty, voc)) return false;
  for (int q = 1; q <= qr && !exhausted; ++q) {
    for (const auto& base : singles) {
      bool more = hint.for_each(q - 1, base, [&](const Formula& h) {
        for (const auto& s : {Formula::exists(0, h), Formula::forall(0, h)}) {
          if (emitted >= budget) {
            exhausted = true;
            return false;
          }
          ++emitted;
          if (!visit(s)) {
            exhausted = true;
            return false;
          }
        }
        return true;
      });
      if (!more) break;
    }
  }
  return !exhausted && !hint.truncated();
}

inline SentenceStream enumerate_sentences(const Vocabulary& voc, int qr, std::size_t budget) {
  SentenceStream out;
  out.complete = for_each_sentence(voc, qr, budget, [&](const Formula& f) {
    out.sentences.push_back(f);
    return true;
  });
  return out;
}

}  // namespace modelforge

#pragma once

// Test-only helpers: exhaustive structure enumeration, random formula
// generation, and a naive reference evaluator used as an oracle.

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "modelforge/logic/formula.hpp"
#include "modelforge/logic/structure.hpp"

namespace mftest {

using namespace modelforge;

// Every structure with universe size 1..max_size over one binary symbol R.
inline std::vector<Structure> all_binary_structures(int max_size, const std::string& name = "R") {
  std::vector<Structure> out;
  for (int z = 1; z <= max_size; ++z) {
    const int cells = z * z;
    for (std::uint32_t mask = 0; mask < (1U << cells); ++mask) {
      Structure s(Vocabulary({{name, 2}}), z);
      for (int c = 0; c < cells; ++c)
        if (mask >> c & 1U) s.set(0, std::vector<Element>{c / z, c % z});
      out.push_back(std::move(s));
    }
  }
  return out;
}

inline bool next_permutation_of(std::vector<int>& p) { return std::next_permutation(p.begin(), p.end()); }

// Lexicographically least relabelling of a binary structure, as a key.
inline std::vector<std::uint8_t> iso_key(const Structure& s) {
  std::vector<int> p(static_cast<std::size_t>(s.size()));
  for (int k = 0; k < s.size(); ++k) p[static_cast<std::size_t>(k)] = k;
  std::vector<std::uint8_t> best;
  do {
    std::vector<std::uint8_t> key;
    key.push_back(static_cast<std::uint8_t>(s.size()));
    for (std::size_t sym = 0; sym < s.vocabulary().size(); ++sym) {
      for (int a = 0; a < s.size(); ++a)
        for (int b = 0; b < s.size(); ++b)
          key.push_back(s.holds(sym, std::vector<Element>{p[static_cast<std::size_t>(a)], p[static_cast<std::size_t>(b)]}));
    }
    if (best.empty() || key < best) best = key;
  } while (next_permutation_of(p));
  return best;
}

// One structure per isomorphism class (binary symbols only).
inline std::vector<Structure> binary_structures_up_to_iso(int max_size) {
  std::map<std::vector<std::uint8_t>, Structure> seen;
  for (auto& s : all_binary_structures(max_size)) seen.emplace(iso_key(s), s);
  std::vector<Structure> out;
  for (auto& [k, s] : seen) out.push_back(s);
  return out;
}

// Uniform random formula over one binary symbol R with variables x0..x_{vars-1}.
class FormulaGen {
 public:
  explicit FormulaGen(std::uint64_t seed, int vars = 3, std::vector<Symbol> symbols = {{"R", 2}})
      : rng_(seed), vars_(vars), symbols_(std::move(symbols)) {}

  Formula operator()(int depth) {
    const int choice = static_cast<int>(rng_() % (depth <= 0 ? 2 : 8));
    switch (choice) {
      case 0: {
        const auto& s = symbols_[rng_() % symbols_.size()];
        std::vector<int> args;
        for (int k = 0; k < s.arity; ++k) args.push_back(var());
        return Formula::atom(s.name, args);
      }
      case 1:
        return Formula::equal(var(), var());
      case 2:
        return Formula::negation((*this)(depth - 1));
      case 3:
      case 4: {
        std::vector<Formula> parts;
        const int n = static_cast<int>(rng_() % 4);  // 0..3 operands; 0 gives true/false
        for (int k = 0; k < n; ++k) parts.push_back((*this)(depth - 1));
        return choice == 3 ? Formula::conjunction(parts) : Formula::disjunction(parts);
      }
      case 5:
      case 6:
        return Formula::exists(var(), (*this)(depth - 1));
      default:
        return Formula::forall(var(), (*this)(depth - 1));
    }
  }

  int var() { return static_cast<int>(rng_() % static_cast<std::uint64_t>(vars_)); }
  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
  int vars_;
  std::vector<Symbol> symbols_;
};

// Reference evaluator: direct recursion on the definition of satisfaction,
// with an explicit variable map and the checked symbol lookup path.
inline bool naive_eval(const Structure& m, const Formula& f, std::map<int, Element> env) {
  switch (f.kind()) {
    case Kind::Atom: {
      Tuple t;
      for (int v : f.vars()) t.push_back(env.at(v));
      return m.holds(f.symbol(), t);
    }
    case Kind::Equal:
      return env.at(f.vars()[0]) == env.at(f.vars()[1]);
    case Kind::Not:
      return !naive_eval(m, f.body(), env);
    case Kind::And: {
      bool all = true;
      for (const auto& c : f.children()) all = naive_eval(m, c, env) && all;
      return all;
    }
    case Kind::Or: {
      bool any = false;
      for (const auto& c : f.children()) any = naive_eval(m, c, env) || any;
      return any;
    }
    case Kind::Exists:
    case Kind::Forall: {
      int count = 0;
      for (Element e = 0; e < m.size(); ++e) {
        env[f.bound_var()] = e;
        if (naive_eval(m, f.body(), env)) ++count;
      }
      return f.kind() == Kind::Exists ? count > 0 : count == m.size();
    }
  }
  return false;
}

}  // namespace mftest

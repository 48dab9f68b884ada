#pragma once

#include <algorithm>
#include <exception>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "modelforge/coherent/family.hpp"
#include "modelforge/embedding/theta.hpp"
#include "modelforge/errors.hpp"
#include "modelforge/filter/filter.hpp"
#include "modelforge/filter/reduced_product.hpp"
#include "modelforge/logic/delta.hpp"
#include "modelforge/logic/evaluate.hpp"
#include "modelforge/logic/syntax.hpp"

namespace modelforge {

class WitnessNotFound : public Error {
 public:
  WitnessNotFound(int index, int element, Formula formula)
      : Error("no witness in N at index " + std::to_string(index) + ", element " + std::to_string(element) +
              " for " + to_string(formula)),
        index_(index),
        element_(element),
        formula_(std::move(formula)) {}

  int index() const noexcept { return index_; }
  int element() const noexcept { return element_; }
  // The existential N failed to satisfy, with x_0..x_{m-1} standing for the
  // images of u[ζ][i].
  const Formula& formula() const noexcept { return formula_; }

 private:
  int index_;
  int element_;
  Formula formula_;
};

struct WitnessStep {
  int zeta = 0;
  int index = 0;
  int gamma = -1;  // max u[ζ][i], or -1 when u[ζ][i] is empty
  Element chosen = 0;
};

struct EmbeddingResult {
  // f[ζ][i]
  std::vector<std::vector<Element>> f;
  // θ^ζ_i, indexed [i][ζ]
  std::vector<std::vector<Formula>> theta;
  std::vector<std::vector<int>> delta_parts;
  std::vector<WitnessStep> trace;

  ChoiceFunction function_of(int zeta) const { return f.at(static_cast<std::size_t>(zeta)); }
};

struct EmbeddingOptions {
  int b_bound = 2;
  int jobs = 1;
};

namespace detail {

// Least b ∈ N with N ⊨ θ(params, b).
inline std::optional<Element> least_witness(const Structure& n, const Formula& theta, Tuple params) {
  Evaluator ev(n, theta);
  std::vector<Element> env(std::max(ev.width(), params.size() + 1), -1);
  std::copy(params.begin(), params.end(), env.begin());
  for (Element b = 0; b < n.size(); ++b) {
    env[params.size()] = b;
    if (ev.run(env)) return b;
  }
  return std::nullopt;
}

template <typename Work>
void parallel_for(int count, int jobs, Work&& work) {
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int k = 0; k < count; ++k) work(k);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  for (int t = 0; t < jobs; ++t)
    pool.emplace_back([&, t] {
      for (int k = t; k < count; k += jobs) {
        try {
          work(k);
        } catch (...) {
          errors[static_cast<std::size_t>(k)] = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace detail

// For each i independently and ζ ascending, f[ζ](i) is the least element of
// N realizing θ^ζ_i over the images of u[ζ][i]. Throws WitnessNotFound when
// no such element exists.
inline EmbeddingResult build_embedding(const Structure& m, const Structure& n, const DeltaSet& delta,
                                       const FilterOnIndex& d, const RegularityWitness& w, const CoherentFamily& f,
                                       EmbeddingOptions opt = {}) {
  if (!(m.vocabulary() == n.vocabulary())) throw VocabularyError("M and N have different vocabularies");
  for (const auto& phi : delta.formulas()) check_vocabulary(phi, m.vocabulary());
  if (f.element_count() != m.size()) throw InvalidInput("family element count differs from the size of M");
  if (f.index_size() != d.index_size()) throw InvalidInput("family and filter have different index sets");
  auto report = check_coherent(f, d, opt.b_bound);
  if (!report.ok()) {
    std::string why;
    for (const auto* c : {&report.bounded, &report.below, &report.covering, &report.coherent})
      if (!c->ok) why += (why.empty() ? "" : "; ") + c->detail;
    throw PreconditionFailure("family is not coherent for the filter: " + why);
  }

  const int z = m.size(), idx = d.index_size();
  EmbeddingResult r;
  r.delta_parts = delta_partition(delta, w, idx);
  r.f.assign(static_cast<std::size_t>(z), std::vector<Element>(static_cast<std::size_t>(idx), 0));
  r.theta.assign(static_cast<std::size_t>(idx), {});
  std::vector<std::vector<WitnessStep>> traces(static_cast<std::size_t>(idx));

  detail::parallel_for(idx, opt.jobs, [&](int i) {
    const auto is = static_cast<std::size_t>(i);
    ThetaLadder ladder(m, f, i, select_formulas(delta, r.delta_parts[is]));
    for (int zeta = z - 1; zeta >= 0; --zeta) ladder.theta(zeta);
    for (int zeta = 0; zeta < z; ++zeta) {
      const auto& u = f.u(zeta, i);
      Tuple params;
      for (int xi : u) params.push_back(r.f[static_cast<std::size_t>(xi)][is]);
      const Formula& th = ladder.theta(zeta);
      auto b = detail::least_witness(n, th, params);
      if (!b) throw WitnessNotFound(i, zeta, Formula::exists(static_cast<int>(u.size()), th));
      r.f[static_cast<std::size_t>(zeta)][is] = *b;
      traces[is].push_back({zeta, i, u.empty() ? -1 : u.back(), *b});
    }
    for (int zeta = 0; zeta < z; ++zeta) r.theta[is].push_back(ladder.theta(zeta));
  });
  for (int zeta = 0; zeta < z; ++zeta)
    for (int i = 0; i < idx; ++i) r.trace.push_back(traces[static_cast<std::size_t>(i)][static_cast<std::size_t>(zeta)]);
  return r;
}

struct BaseCaseFailure {
  int index = 0;
  int zeta = 0;
  Formula sentence;
};

// The existentials ∃x_0 θ^ζ_i for u[ζ][i] = ∅ that fail in N.
inline std::vector<BaseCaseFailure> check_base_case_precondition(const Structure& m, const Structure& n, const DeltaSet& delta,
                                                                 const RegularityWitness& w, const CoherentFamily& f) {
  std::vector<BaseCaseFailure> out;
  const auto parts = delta_partition(delta, w, f.index_size());
  for (int i = 0; i < f.index_size(); ++i) {
    ThetaLadder ladder(m, f, i, select_formulas(delta, parts[static_cast<std::size_t>(i)]));
    for (int zeta = 0; zeta < f.element_count(); ++zeta) {
      if (!f.u(zeta, i).empty()) continue;
      auto s = Formula::exists(0, ladder.theta(zeta));
      if (!evaluate(n, s)) out.push_back({i, zeta, s});
    }
  }
  return out;
}

// Every complete Δ-type of a q-tuple realized in M is realized in N; by
// maximality this is the same as N satisfying every weakly Δ-existential
// sentence with at most q variables that M satisfies. Returns M-tuples whose
// type N omits.
inline std::vector<Tuple> audit_transfer(const Structure& m, const Structure& n, const DeltaSet& delta, int q) {
  if (q < 1) throw InvalidInput("audit width must be positive");
  std::vector<Formula> insts;
  for (const auto& phi : delta.formulas()) {
    const auto p = placements(phi, q);
    insts.insert(insts.end(), p.begin(), p.end());
  }
  auto profile = [](const std::vector<Evaluator>& evs, std::vector<Element>& env) {
    std::vector<bool> bits;
    for (const auto& ev : evs) bits.push_back(ev.run(env));
    return bits;
  };
  auto for_each_tuple = [](int size, int q2, auto&& visit) {
    if (size == 0) return;
    std::vector<Element> t(static_cast<std::size_t>(q2), 0);
    while (true) {
      visit(t);
      int k = q2;
      while (k > 0 && t[static_cast<std::size_t>(k - 1)] == size - 1) t[static_cast<std::size_t>(--k)] = 0;
      if (k == 0) return;
      ++t[static_cast<std::size_t>(k - 1)];
    }
  };
  std::vector<Evaluator> ev_m, ev_n;
  std::size_t width = static_cast<std::size_t>(q);
  for (const auto& f : insts) {
    ev_m.emplace_back(m, f);
    ev_n.emplace_back(n, f);
    width = std::max(width, ev_m.back().width());
  }
  std::set<std::vector<bool>> realized_n;
  for_each_tuple(n.size(), q, [&](const std::vector<Element>& t) {
    std::vector<Element> env(width, 0);
    std::copy(t.begin(), t.end(), env.begin());
    realized_n.insert(profile(ev_n, env));
  });
  std::vector<Tuple> missing;
  std::set<std::vector<bool>> reported;
  for_each_tuple(m.size(), q, [&](const std::vector<Element>& t) {
    std::vector<Element> env(width, 0);
    std::copy(t.begin(), t.end(), env.begin());
    auto p = profile(ev_m, env);
    if (!realized_n.count(p) && reported.insert(p).second) missing.push_back(t);
  });
  return missing;
}

struct EmbeddingViolation {
  Formula formula;  // φ or ¬φ
  Tuple tuple;      // elements of M
  IndexSet agreement;
};

struct EmbeddingReport {
  std::size_t checked = 0;
  std::vector<EmbeddingViolation> violations;
  bool ok() const noexcept { return violations.empty(); }
};

// For every φ ∈ Δ, its negation, and every tuple of M of the formula's width
// (at most arity_bound): M ⊨ φ(ā) implies {i : N_i ⊨ φ(f(ā)(i))} ∈ D.
inline EmbeddingReport verify_delta_embedding(const Structure& m, const std::vector<Structure>& factors,
                                              const FilterOnIndex& d, const EmbeddingResult& r, const DeltaSet& delta,
                                              int arity_bound, std::size_t max_violations = 64) {
  if (static_cast<int>(factors.size()) != d.index_size()) throw InvalidInput("one factor per index is required");
  if (static_cast<int>(r.f.size()) != m.size()) throw InvalidInput("embedding does not cover M");
  EmbeddingReport rep;
  for (const auto& phi : delta.formulas()) {
    const int width = phi.free_vars().empty() ? 0 : phi.free_vars().back() + 1;
    if (width > arity_bound) continue;
    Evaluator in_m(m, phi);
    std::vector<Evaluator> in_n;
    for (const auto& nf : factors) in_n.emplace_back(nf, phi);
    std::vector<Element> t(static_cast<std::size_t>(width), 0);
    while (true) {
      std::vector<Element> env(std::max<std::size_t>(in_m.width(), t.size()), 0);
      std::copy(t.begin(), t.end(), env.begin());
      const bool truth = in_m.run(env);
      IndexSet agree(factors.size());
      for (std::size_t i = 0; i < factors.size(); ++i) {
        std::vector<Element> envn(std::max<std::size_t>(in_n[i].width(), t.size()), 0);
        for (std::size_t k = 0; k < t.size(); ++k) envn[k] = r.f[static_cast<std::size_t>(t[k])][i];
        if (in_n[i].run(envn) == truth) agree.set(i);
      }
      ++rep.checked;
      if (!d.member(agree) && rep.violations.size() < max_violations)
        rep.violations.push_back({truth ? phi : Formula::negation(phi), t, agree});
      int k = width;
      while (k > 0 && t[static_cast<std::size_t>(k - 1)] == m.size() - 1) t[static_cast<std::size_t>(--k)] = 0;
      if (k == 0) break;
      ++t[static_cast<std::size_t>(k - 1)];
    }
  }
  return rep;
}

struct InductionFailure {
  int index = 0;
  int zeta = 0;
};

// (IH) replay: N ⊨ θ^ζ_i(f(u[ζ][i])(i), f[ζ](i)) for every i and ζ.
inline std::vector<InductionFailure> check_induction_hypothesis(const Structure& n, const CoherentFamily& f,
                                                                const EmbeddingResult& r) {
  std::vector<InductionFailure> out;
  for (int i = 0; i < f.index_size(); ++i)
    for (int zeta = 0; zeta < f.element_count(); ++zeta) {
      Tuple t;
      for (int xi : f.u(zeta, i)) t.push_back(r.f[static_cast<std::size_t>(xi)][static_cast<std::size_t>(i)]);
      t.push_back(r.f[static_cast<std::size_t>(zeta)][static_cast<std::size_t>(i)]);
      if (!satisfies(n, r.theta[static_cast<std::size_t>(i)][static_cast<std::size_t>(zeta)], t)) out.push_back({i, zeta});
    }
  return out;
}

}  // namespace modelforge

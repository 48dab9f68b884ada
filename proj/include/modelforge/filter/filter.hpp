#pragma once

#include <string>
#include <vector>

#include "modelforge/errors.hpp"
#include "modelforge/filter/index_set.hpp"

namespace modelforge {

// Filter on {0..n-1} generated by a family of subsets. On a finite index set
// every filter is principal: X is a member iff X contains the kernel, the
// intersection of all generators. Improper filters are rejected.
class FilterOnIndex {
 public:
  FilterOnIndex(int index_size, std::vector<IndexSet> generators)
      : n_(index_size), generators_(std::move(generators)), kernel_(full_index_set(index_size)) {
    if (n_ < 1) throw InvalidInput("index set must be nonempty");
    for (const auto& g : generators_) {
      if (static_cast<int>(g.size()) != n_) throw InvalidInput("generator has wrong index-set size");
      kernel_ &= g;
    }
    if (kernel_.none()) throw InvalidInput("generators have empty intersection: filter is improper");
  }

  static FilterOnIndex trivial(int n) { return FilterOnIndex(n, {full_index_set(n)}); }
  static FilterOnIndex principal(int n, int j) { return FilterOnIndex(n, {make_index_set(n, {j})}); }

  int index_size() const noexcept { return n_; }
  const std::vector<IndexSet>& generators() const noexcept { return generators_; }
  const IndexSet& kernel() const noexcept { return kernel_; }

  bool member(const IndexSet& x) const {
    if (static_cast<int>(x.size()) != n_) throw InvalidInput("subset has wrong index-set size");
    return kernel_.is_subset_of(x);
  }

  bool member(const std::vector<int>& x) const { return member(make_index_set(n_, x)); }

  bool is_ultrafilter() const noexcept { return kernel_.count() == 1; }

  // The coordinate a principal ultrafilter is concentrated on.
  int generating_index() const {
    if (!is_ultrafilter()) throw PreconditionFailure("filter is not an ultrafilter");
    return static_cast<int>(kernel_.find_first());
  }

 private:
  int n_;
  std::vector<IndexSet> generators_;
  IndexSet kernel_;
};

struct RegularityReport {
  std::vector<int> non_members;    // α with A_α ∉ D
  std::vector<int> over_cap;       // i with |w_i| > cap
  bool ok() const noexcept { return non_members.empty() && over_cap.empty(); }
};

// Sets ⟨A_α⟩ that each belong to a filter, with every index lying in at most
// `cap` of them.
class RegularityWitness {
 public:
  RegularityWitness(std::vector<IndexSet> sets, int cap) : sets_(std::move(sets)), cap_(cap) {
    if (cap_ < 0) throw InvalidInput("multiplicity cap must be non-negative");
    for (const auto& s : sets_)
      if (!sets_.empty() && s.size() != sets_.front().size()) throw InvalidInput("witness sets differ in size");
  }

  const std::vector<IndexSet>& sets() const noexcept { return sets_; }
  std::size_t size() const noexcept { return sets_.size(); }
  int cap() const noexcept { return cap_; }

  // w_i = {α : i ∈ A_α}
  std::vector<int> multiplicity_set(int i) const {
    std::vector<int> w;
    for (std::size_t a = 0; a < sets_.size(); ++a)
      if (sets_[a].test(static_cast<std::size_t>(i))) w.push_back(static_cast<int>(a));
    return w;
  }

  RegularityReport validate(const FilterOnIndex& d) const {
    RegularityReport r;
    for (std::size_t a = 0; a < sets_.size(); ++a)
      if (static_cast<int>(sets_[a].size()) != d.index_size() || !d.member(sets_[a]))
        r.non_members.push_back(static_cast<int>(a));
    for (int i = 0; i < d.index_size(); ++i)
      if (static_cast<int>(multiplicity_set(i).size()) > cap_) r.over_cap.push_back(i);
    return r;
  }

 private:
  std::vector<IndexSet> sets_;
  int cap_;
};

}  // namespace modelforge

// One line per acceptance criterion; exit status is the number of failures.
#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <unistd.h>

#include "../support.hpp"
#include "modelforge/modelforge.hpp"

using namespace modelforge;
using io::json;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

std::vector<Structure> up_to_iso() { return mftest::binary_structures_up_to_iso(3); }

std::vector<bool> verdicts(const Structure& m, const std::vector<Formula>& sentences) {
  std::vector<bool> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(evaluate(m, s));
  return out;
}

// ---- 1. Łoś agreement

Outcome los_agreement() {
  const auto reps = up_to_iso();
  auto stream = enumerate_sentences(gen::binary_vocabulary(), 2, 10'000'000);
  if (!stream.complete) return {false, "sentence enumeration incomplete"};
  const auto& sentences = stream.sentences;
  // Product verdicts are memoized per isomorphism class of the quotient.
  std::map<std::vector<std::uint8_t>, std::vector<bool>> by_class;
  std::vector<std::vector<bool>> factor(reps.size());
  for (std::size_t k = 0; k < reps.size(); ++k) factor[k] = verdicts(reps[k], sentences);

  std::size_t products = 0, checks = 0, violations = 0;
  std::string first;
  for (int idx = 1; idx <= 3; ++idx) {
    std::vector<std::size_t> pick(static_cast<std::size_t>(idx), 0);
    while (true) {
      std::vector<Structure> factors;
      for (auto p : pick) factors.push_back(reps[p]);
      for (int j = 0; j < idx; ++j) {
        ReducedProduct prod(factors, FilterOnIndex::principal(idx, j));
        const auto& q = prod.quotient();
        auto key = mftest::iso_key(q);
        auto it = by_class.find(key);
        if (it == by_class.end()) it = by_class.emplace(key, verdicts(q, sentences)).first;
        const auto& fv = factor[pick[static_cast<std::size_t>(j)]];
        if (it->second != fv)
          for (std::size_t s = 0; s < sentences.size(); ++s)
            if (it->second[s] != fv[s] && violations++ == 0) first = to_string(sentences[s]);
        checks += sentences.size();
        ++products;
      }
      int k = idx - 1;
      while (k >= 0 && pick[static_cast<std::size_t>(k)] == reps.size() - 1) pick[static_cast<std::size_t>(k--)] = 0;
      if (k < 0) break;
      ++pick[static_cast<std::size_t>(k)];
    }
  }
  std::ostringstream d;
  d << products << " products, " << sentences.size() << " sentences, " << checks << " comparisons, " << violations
    << " violations";
  if (violations) d << " (first: " << first << ")";
  return {violations == 0, d.str()};
}

// ---- 2. EF solver against sentence agreement

Outcome solver_vs_sentences() {
  const auto all = mftest::all_binary_structures(3);
  std::size_t pairs = 0, mismatches = 0;
  std::string first;
  for (int n = 1; n <= 2; ++n) {
    auto stream = enumerate_sentences(gen::binary_vocabulary(), n, 10'000'000);
    if (!stream.complete) return {false, "sentence enumeration incomplete"};
    std::vector<std::vector<bool>> v;
    for (const auto& m : all) v.push_back(verdicts(m, stream.sentences));
    for (std::size_t x = 0; x < all.size(); ++x)
      for (std::size_t y = 0; y < all.size(); ++y) {
        const bool ii = solve_ef(all[x], all[y], n).winner == Winner::II;
        if (ii != (v[x] == v[y]) && mismatches++ == 0)
          first = "pair " + std::to_string(x) + "," + std::to_string(y) + " at n=" + std::to_string(n);
        ++pairs;
      }
  }
  std::ostringstream d;
  d << pairs << " ordered pairs over " << all.size() << " structures, " << mismatches << " mismatches";
  if (mismatches) d << " (first: " << first << ")";
  return {mismatches == 0, d.str()};
}

// ---- 3. Linear orders

Outcome linear_orders() {
  std::size_t cases = 0, mismatches = 0;
  std::string first;
  for (int a = 1; a <= 9; ++a)
    for (int b = 1; b <= 9; ++b)
      for (int n = 1; n <= 3; ++n) {
        const bool expect = a == b || std::min(a, b) >= (1 << n) - 1;
        const bool ii = solve_ef(make_chain(a), make_chain(b), n, {3, 9}).winner == Winner::II;
        if (ii != expect && mismatches++ == 0)
          first = std::to_string(a) + " vs " + std::to_string(b) + " at n=" + std::to_string(n);
        ++cases;
      }
  std::ostringstream d;
  d << cases << " (a, b, n) cases, " << mismatches << " mismatches";
  if (mismatches) d << " (first: " << first << ")";
  return {mismatches == 0, d.str()};
}

// ---- 4. Δ-embeddings into reduced powers

struct EmbeddingInstance {
  Structure m, n;
  FilterOnIndex d = FilterOnIndex::trivial(1);
  DeltaSet delta;
  RegularityWitness w{{}, 0};
  CoherentFamily f;
};

EmbeddingInstance embedding_instance(std::uint64_t seed) {
  gen::Rng rng(seed);
  EmbeddingInstance x;
  const auto voc = Vocabulary({{"R", 2}, {"P", 1}});
  const int z = gen::uniform(rng, 1, 5), idx = gen::uniform(rng, 1, 4);
  x.m = gen::random_structure(rng, voc, z, 0.4);
  x.n = seed % 2 ? gen::random_extension(rng, x.m, gen::uniform(rng, 0, 2), 0.4)
                 : gen::random_structure(rng, voc, gen::uniform(rng, 1, 6), 0.4);
  x.d = gen::random_proper_filter(rng, idx, 2);
  x.delta = gen::random_delta(rng, voc, gen::uniform(rng, 1, 4), 2, 2);
  x.w = gen::random_regularity_witness(rng, x.d, static_cast<int>(x.delta.size()));
  x.f = gen::random_coherent_family(rng, z, x.d, 3);
  return x;
}

Outcome embeddings() {
  std::size_t accepted = 0, skipped = 0, failures = 0, checked = 0;
  std::string first;
  for (std::uint64_t seed = 0; accepted < 250; ++seed) {
    auto x = embedding_instance(seed);
    if (!check_base_case_precondition(x.m, x.n, x.delta, x.w, x.f).empty()) {
      ++skipped;
      continue;
    }
    ++accepted;
    try {
      auto r = build_embedding(x.m, x.n, x.delta, x.d, x.w, x.f);
      std::vector<Structure> factors(static_cast<std::size_t>(x.d.index_size()), x.n);
      auto rep = verify_delta_embedding(x.m, factors, x.d, r, x.delta, 2);
      checked += rep.checked;
      if (!rep.ok() && failures++ == 0) first = "seed " + std::to_string(seed) + ": " + to_string(rep.violations[0].formula);
    } catch (const Error& e) {
      if (failures++ == 0) first = "seed " + std::to_string(seed) + ": " + e.what();
    }
  }
  std::ostringstream d;
  d << accepted << " instances (" << skipped << " skipped by the precondition), " << checked << " formula/tuple checks, "
    << failures << " failures";
  if (failures) d << " (first: " << first << ")";
  return {failures == 0, d.str()};
}

// ---- 5. Composed strategies on reduced products

struct GameInstance {
  std::vector<Structure> m, n;
  FilterOnIndex d = FilterOnIndex::trivial(1);
  CoherentFamily f;
  std::vector<Strategy> sigma;
};

std::optional<GameInstance> game_instance(std::uint64_t seed) {
  gen::Rng rng(seed);
  const auto voc = gen::binary_vocabulary();
  const int idx = gen::uniform(rng, 1, 3);
  GameInstance g;
  std::vector<int> caps;
  for (int i = 0; i < idx; ++i) {
    auto m = gen::random_structure(rng, voc, gen::uniform(rng, 1, 4));
    auto n = gen::coin(rng, 0.6) ? gen::permuted_copy(rng, m) : gen::random_structure(rng, voc, gen::uniform(rng, 1, 4));
    int best = 0;
    std::optional<Strategy> s;
    for (int r = 1; r <= 3; ++r) {
      auto sol = solve_ef(m, n, r);
      if (sol.winner != Winner::II) break;
      best = r;
      s = sol.strategy;
    }
    if (best == 0) return std::nullopt;
    g.m.push_back(std::move(m));
    g.n.push_back(std::move(n));
    g.sigma.push_back(std::move(*s));
    caps.push_back(best);
  }
  std::vector<int> kernel;
  for (int i = 0; i < idx; ++i)
    if (caps[static_cast<std::size_t>(i)] >= 2 && gen::coin(rng, 0.7)) kernel.push_back(i);
  if (kernel.empty()) {
    for (int i = 0; i < idx; ++i)
      if (caps[static_cast<std::size_t>(i)] >= 2) {
        kernel.push_back(i);
        break;
      }
  }
  if (kernel.empty()) return std::nullopt;
  g.d = FilterOnIndex(idx, {make_index_set(idx, kernel)});
  std::vector<std::vector<std::vector<int>>> sets(2, std::vector<std::vector<int>>(static_cast<std::size_t>(idx)));
  for (int i = 0; i < idx; ++i) {
    const bool in_kernel = std::find(kernel.begin(), kernel.end(), i) != kernel.end();
    if (in_kernel || (caps[static_cast<std::size_t>(i)] >= 2 && gen::coin(rng, 0.5))) sets[1][static_cast<std::size_t>(i)] = {0};
  }
  g.f = CoherentFamily(2, idx, caps, sets);
  return g;
}

Outcome composed_strategies() {
  std::size_t instances = 0, explored = 0, failures = 0;
  std::string first;
  for (std::uint64_t seed = 0; instances < 200; ++seed) {
    auto g = game_instance(seed);
    if (!g) continue;
    ++instances;
    try {
      auto s = compose_strategy(g->m, g->n, g->d, g->f, g->sigma);
      ReducedProduct pm(g->m, g->d), pn(g->n, g->d);
      ProductAdversaryOptions opt;
      opt.hook = [&](const ProductPosition& pos) -> std::optional<std::string> {
        if (!is_good_position(pos, g->f, g->sigma).good) return "position is not good";
        return std::nullopt;
      };
      auto r = exhaustive_adversary_check(s, pm, pn, 2, 50'000'000, opt);
      explored += r.explored;
      if ((!r.ok || !r.complete) && failures++ == 0) first = "seed " + std::to_string(seed) + ": " + r.failure;
    } catch (const Error& e) {
      if (failures++ == 0) first = "seed " + std::to_string(seed) + ": " + e.what();
    }
  }
  std::ostringstream d;
  d << instances << " instances, " << explored << " positions explored, " << failures << " failures";
  if (failures) d << " (first: " << first << ")";
  return {failures == 0, d.str()};
}

// ---- 6 and 7. Square witnesses, derived families, S-families

std::vector<SquareWitness> criterion6_witnesses() {
  std::vector<SquareWitness> out;
  for (int l = 1; l <= 8; ++l) out.push_back(trivial_square_witness(l));
  for (std::uint64_t s = 0; s < 60; ++s) {
    gen::Rng rng(1000 + s);
    out.push_back(gen::random_two_level_witness(rng, gen::uniform(rng, 1, 8), 2, 3));
  }
  return out;
}

struct Pulled {
  CoherentFamily family;
  FilterOnIndex filter;
  RegularityWitness witness;
};

std::vector<Pulled> pulled_families;

Outcome square_pipeline() {
  std::size_t witnesses = 0, levels = 0, tuples = 0, failures = 0;
  std::string first;
  auto fail = [&](const std::string& why) {
    if (failures++ == 0) first = why;
  };
  pulled_families.clear();
  std::uint64_t seed = 0;
  for (const auto& w : criterion6_witnesses()) {
    ++witnesses;
    const std::string tag = "witness " + std::to_string(witnesses - 1);
    auto rep = check_square_witness(w);
    if (!rep.ok()) {
      fail(tag + " fails an axiom");
      continue;
    }
    for (int z = 0; z < w.level_count(); ++z, ++levels)
      if (!levels_tree(w, z).verdict.ok()) fail(tag + " level " + std::to_string(z) + " is not a tree");
    detail::for_each_small_subset(w.order_size(), 4, [&](const std::vector<int>& t) {
      ++tuples;
      int all_pairs = 0;
      for (std::size_t l = 0; l < t.size(); ++l)
        for (std::size_t m = l + 1; m < t.size(); ++m) all_pairs = std::max(all_pairs, xi_level(w, t[l], t[m]));
      if (xi_of_tuple(w, t) != all_pairs) fail(tag + " breaks the ξ max law");
      for (int a = 0; a < w.order_size(); ++a)
        if (matching_positions(w, t, a).size() > 1) fail(tag + " has two matching positions");
      return true;
    });
    auto d = derive_family(w);
    if (!check_coherent(d.family, d.filter, 2).ok()) fail(tag + " derived family is not coherent");
    gen::Rng rng(seed++);
    const int idx = gen::uniform(rng, 1, 4);
    auto dp = gen::random_proper_filter(rng, idx, 2);
    auto ww = gen::random_regularity_witness(rng, dp, std::min<int>(3, static_cast<int>(d.generators.size())));
    auto p = pullback(d.family, d.generators, ww, idx);
    if (!check_coherent(p.family, dp, 2).ok()) fail(tag + " pullback is not coherent");
    pulled_families.push_back({p.family, dp, ww});
  }
  std::ostringstream d;
  d << witnesses << " witnesses, " << levels << " levels, " << tuples << " tuples, " << failures << " failures";
  if (failures) d << " (first: " << first << ")";
  return {failures == 0 && witnesses >= 58, d.str()};
}

Outcome s_families() {
  if (pulled_families.empty()) square_pipeline();
  std::size_t failures = 0, groups = 0;
  std::string first;
  for (std::size_t k = 0; k < pulled_families.size(); ++k) {
    const auto& p = pulled_families[k];
    auto base = p.witness.sets();
    base.push_back(p.filter.kernel());
    auto g = standard_s_groups(p.family, base);
    auto r = derive_s_family(p.family, g.generators, g.groups, g.caps);
    groups += g.groups.size();
    bool ok = r.report.ok();
    for (std::size_t a = 0; a < r.report.max_size.size(); ++a) ok = ok && r.report.max_size[a] <= r.report.derived_bound[a];
    if (!ok && failures++ == 0) first = "instance " + std::to_string(k);
  }
  std::ostringstream d;
  d << pulled_families.size() << " instances, " << groups << " groups, " << failures << " failures";
  if (failures) d << " (first: " << first << ")";
  return {failures == 0 && !pulled_families.empty(), d.str()};
}

// ---- 8. Determinism and round trips

std::string run_capture(const std::string& cmd) {
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return "<popen failed>";
  std::array<char, 4096> buf{};
  while (std::size_t k = std::fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), k);
  const int status = pclose(p);
  return out + "\n<status " + std::to_string(status) + ">";
}

std::string shell_quote(const std::string& s) { return "'" + s + "'"; }

std::size_t cli_determinism(const std::string& cli, std::string& first) {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / ("modelforge-acceptance-" + std::to_string(::getpid()));
  std::size_t mismatches = 0;
  std::array<std::vector<std::string>, 2> runs;
  for (int run = 0; run < 2; ++run) {
    const fs::path dir = root / std::to_string(run);
    fs::create_directories(dir);
    const std::string m = shell_quote(cli), dq = shell_quote(dir.string());
    auto& outs = runs[static_cast<std::size_t>(run)];
    outs.push_back(run_capture(m + " gen-instances --kind pipeline --count 6 --size 5 --seed 42 --out-dir " + dq));
    outs.push_back(run_capture(m + " gen-instances --kind game --count 4 --index-size 2 --seed 42"));
    for (int k = 0; k < 6; ++k) {
      const std::string p = (dir / ("pipeline-" + std::to_string(k))).string() + "/";
      const std::string tmp = (dir / std::to_string(k)).string();
      outs.push_back(run_capture(m + " derive-family --square " + p + "square.json -o " + tmp + "-derived.json; cat " + tmp + "-derived.json"));
      outs.push_back(run_capture(m + " pullback --derived " + tmp + "-derived.json --witness " + p + "pullback_witness.json --filter " + p +
                                 "filter.json -o " + tmp + "-pulled.json; cat " + tmp + "-pulled.json"));
      outs.push_back(run_capture(m + " derive-s --family " + tmp + "-pulled.json --filter " + p + "filter.json --witness " + p +
                                 "pullback_witness.json"));
      outs.push_back(run_capture(m + " build-embedding --m " + p + "m.json --n " + p + "n.json --delta " + p + "delta.json --filter " + p +
                                 "filter.json --witness " + p + "delta_witness.json --family " + tmp + "-pulled.json -o " + tmp + "-emb.json; cat " + tmp + "-emb.json"));
      outs.push_back(run_capture(m + " verify-embedding --m " + p + "m.json --n " + p + "n.json --delta " + p + "delta.json --filter " + p +
                                 "filter.json --embedding " + tmp + "-emb.json"));
      outs.push_back(run_capture(m + " solve-ef --jobs " + std::to_string(run + 1) + " --rounds 2 --m " + p + "m.json --n " + p + "n.json"));
    }
  }
  std::error_code ec;
  fs::remove_all(root, ec);
  // File paths name the run directory; everything else must match byte for byte.
  for (int run = 0; run < 2; ++run) {
    const std::string dir = (root / std::to_string(run)).string();
    for (auto& o : runs[static_cast<std::size_t>(run)])
      for (std::size_t at = o.find(dir); at != std::string::npos; at = o.find(dir, at)) o.replace(at, dir.size(), "<run>");
  }
  for (std::size_t k = 0; k < runs[0].size(); ++k)
    if (runs[0][k] != runs[1][k] && mismatches++ == 0) first = "report " + std::to_string(k);
  for (const auto& o : runs[0])
    if (o.find("<status 0>") == std::string::npos && mismatches++ == 0) first = "a CLI run failed: " + o.substr(0, 200);
  return mismatches;
}

Outcome determinism_and_round_trips(const std::string& cli) {
  std::size_t artifacts = 0, failures = 0;
  std::string first;
  auto fail = [&](const std::string& why) {
    if (failures++ == 0) first = why;
  };
  const auto voc = Vocabulary({{"R", 2}, {"P", 1}});
  for (std::uint64_t seed = 0; seed < 125; ++seed) {
    gen::Rng rng(seed);
    const std::string tag = "seed " + std::to_string(seed);
    // formula
    auto phi = gen::random_formula(rng, voc, 2, 3, 2);
    if (!(parse_formula(to_string(phi), voc) == phi)) fail(tag + " formula " + to_string(phi));
    // structure
    auto m = gen::random_structure(rng, voc, gen::uniform(rng, 1, 5));
    if (!(io::structure_from_json(io::parse_json(io::structure_to_json(m).dump())) == m)) fail(tag + " structure");
    // filter and witness
    auto d = gen::random_proper_filter(rng, gen::uniform(rng, 1, 5));
    auto dj = io::filter_to_json(d);
    if (io::filter_to_json(io::filter_from_json(io::parse_json(dj.dump()))) != dj) fail(tag + " filter");
    auto w = gen::random_regularity_witness(rng, d, 3);
    auto wj = io::witness_to_json(w);
    if (io::witness_to_json(io::witness_from_json(io::parse_json(wj.dump()), d.index_size())) != wj) fail(tag + " witness");
    // family
    auto f = gen::random_coherent_family(rng, gen::uniform(rng, 1, 6), d);
    if (!(io::family_from_json(io::parse_json(io::family_to_json(f).dump())) == f)) fail(tag + " family");
    // square witness
    auto sq = gen::random_two_level_witness(rng, gen::uniform(rng, 1, 8));
    auto sj = io::square_to_json(sq);
    if (io::square_to_json(io::square_from_json(io::parse_json(sj.dump()))) != sj) fail(tag + " square witness");
    // Δ set
    auto delta = gen::random_delta(rng, voc, 3, 2);
    auto ddj = io::delta_to_json(delta);
    if (io::delta_to_json(io::delta_from_json(io::parse_json(ddj.dump()), &voc)) != ddj) fail(tag + " delta");
    // strategy and transcript: a random play of I against a solved strategy
    auto a = gen::random_structure(rng, gen::binary_vocabulary(), gen::uniform(rng, 1, 4));
    auto b = gen::permuted_copy(rng, a);
    const int rounds = gen::uniform(rng, 1, 3);
    auto sol = solve_ef(a, b, rounds);
    if (!sol.strategy) {
      fail(tag + " copy game lost");
      continue;
    }
    if (!(io::strategy_from_json(io::parse_json(io::strategy_to_json(*sol.strategy).dump())) == *sol.strategy)) fail(tag + " strategy");
    GamePosition play;
    for (int r = 0; r < rounds; ++r) {
      const Side side = gen::coin(rng, 0.5) ? Side::M : Side::N;
      const Element mv = gen::uniform(rng, 0, (side == Side::M ? a.size() : b.size()) - 1);
      play.push_back({side, mv, *sol.strategy->reply(play, side, mv)});
    }
    const auto text = io::transcript_to_string(play);
    const auto back = io::transcript_from_string<Element>(text);
    if (back != play || io::transcript_to_string(back) != text) fail(tag + " transcript");
    const auto v1 = replay_transcript(a, b, play, &*sol.strategy), v2 = replay_transcript(a, b, back, &*sol.strategy);
    if (!(v1 == v2) || !v1.ii_wins || !v1.consistent) fail(tag + " replay");
    artifacts += 9;
  }
  std::string cli_first;
  const std::size_t cli_mismatches = cli.empty() ? 1 : cli_determinism(cli, cli_first);
  if (cli.empty()) cli_first = "no CLI path given";
  std::ostringstream d;
  d << artifacts << " artifacts round-tripped with " << failures << " failures; CLI reports differing across runs: "
    << cli_mismatches;
  if (failures) d << " (first: " << first << ")";
  if (cli_mismatches) d << " (" << cli_first << ")";
  return {failures == 0 && cli_mismatches == 0 && artifacts >= 1000, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  std::set<int> only;
  for (int k = 2; k < argc; ++k) only.insert(std::atoi(argv[k]));
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "Łoś agreement on ultrafilters", 120, los_agreement},
      {2, "EF solver matches sentence agreement", 300, solver_vs_sentences},
      {3, "linear-order law for chains", 120, linear_orders},
      {4, "Δ-embeddings verify", 300, embeddings},
      {5, "composed strategies survive exhaustive adversaries", 600, composed_strategies},
      {6, "square-witness pipeline", 300, square_pipeline},
      {7, "S-family box properties", 60, s_families},
      {8, "determinism and round trips", 120, [&] { return determinism_and_round_trips(cli); }},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    const bool in_time = secs < c.limit_s;
    const bool pass = o.pass && in_time;
    failed += pass ? 0 : 1;
    std::printf("criterion %d %s: %s [%.2fs of %.0fs] %s%s\n", c.id, c.name, pass ? "PASS" : "FAIL", secs, c.limit_s,
                o.detail.c_str(), in_time ? "" : " (over time)");
    std::fflush(stdout);
  }
  return failed;
}

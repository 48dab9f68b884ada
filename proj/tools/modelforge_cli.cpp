#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "modelforge/modelforge.hpp"

using namespace modelforge;
using io::json;

namespace {

enum Exit { kOk = 0, kViolation = 1, kInput = 2, kBudget = 3 };

struct Config {
  std::uint64_t seed = 0;
  int budget_depth = 4;
  int budget_size = 8;
  std::size_t budget_quotient = kDefaultProductBudget;
  std::size_t budget_adversary = 10'000'000;
  int b_bound = 2;
  bool strict_paper = false;
  bool pretty = false;
  int jobs = 1;
  std::string out;
};

Config cfg;

void write_text(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path);
  out << text << '\n';
}

int emit(const json& report, int code = kOk) {
  write_text(io::dump(report, cfg.pretty), cfg.out);
  return code;
}

int error_object(const std::string& kind, const std::string& message, int code) {
  json e = {{"error", kind}, {"message", message}, {"exit", code}};
  std::cout << io::dump(e, cfg.pretty) << std::endl;
  return code;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Structure load_structure(const std::string& path) { return io::structure_from_json(io::read_json_file(path)); }

// A list of structures, or an object with a "factors" list.
std::vector<Structure> load_factors(const std::string& path) {
  json j = io::read_json_file(path);
  if (j.is_object() && j.contains("factors")) j = j.at("factors");
  return io::structures_from_json(j);
}

FilterOnIndex load_filter(const std::string& path) { return io::filter_from_json(io::read_json_file(path)); }
CoherentFamily load_family(const std::string& path) {
  json j = io::read_json_file(path);
  if (j.is_object() && j.contains("family")) j = j.at("family");
  return io::family_from_json(j);
}

std::vector<int> parse_ints(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidInput("not an integer list: " + text);
    }
  }
  return out;
}

json condition_json(const ConditionResult& c) {
  return {{"ok", c.ok}, {"counterexample", c.counterexample}, {"detail", c.detail}};
}

json coherence_json(const CoherenceReport& r) {
  return {{"ok", r.ok()},
          {"b_bound", r.b_bound},
          {"bounded", condition_json(r.bounded)},
          {"below", condition_json(r.below)},
          {"covering", condition_json(r.covering)},
          {"coherent", condition_json(r.coherent)}};
}

json type_json(const TupleType& t) {
  json entries = json::array();
  for (const auto& e : t.entries)
    entries.push_back({{"l", e.l}, {"m", e.m}, {"level", e.level}, {"classes", {e.first, e.second}}});
  return {{"length", t.length}, {"entries", entries}};
}

json transcript_json(const GamePosition& rounds) {
  json out = json::array();
  for (const auto& r : rounds) out.push_back({{"side", side_name(r.side)}, {"elem", r.move}, {"reply", r.reply}});
  return out;
}

json transcript_json(const ProductPosition& rounds) {
  json out = json::array();
  for (const auto& r : rounds) out.push_back({{"side", side_name(r.side)}, {"elem", r.move}, {"reply", r.reply}});
  return out;
}

template <typename E>
json adversary_json(const AdversaryResult<E>& r) {
  return {{"ok", r.ok},
          {"complete", r.complete},
          {"explored", r.explored},
          {"total", r.total},
          {"explored_fraction", r.explored_fraction()},
          {"failure", r.failure},
          {"counterexample", transcript_json(r.counterexample)}};
}

template <typename E>
int adversary_exit(const AdversaryResult<E>& r) {
  if (!r.complete && r.counterexample.empty()) return kBudget;
  return r.ok ? kOk : kViolation;
}

SolveBudget solve_budget() { return {cfg.budget_depth, cfg.budget_size}; }

void refuse_strict_reading() {
  if (cfg.strict_paper)
    throw InvalidInput(
        "strict reading refused: Γ_{≥t*} = {t ∈ Γ : t* <_L t} is ill-typed because <_L orders L, not Γ; "
        "drop --strict-paper to use the <_Γ reading");
}

json order_reading() {
  return {{"gamma_upsets", "<_Γ"}, {"text_reading", "<_L"}, {"note", "the written <_L is read as <_Γ; <_L does not order Γ"}};
}

// ---- instance generation

json gen_pipeline(gen::Rng& rng, int size, int index_size, double density) {
  const auto voc = Vocabulary({{"R", 2}, {"P", 1}});
  auto w = gen::random_two_level_witness(rng, size);
  auto derived = derive_family(w);
  auto d = gen::random_proper_filter(rng, index_size, 2);
  auto pw = gen::random_regularity_witness(rng, d, std::min<int>(3, static_cast<int>(derived.generators.size())));
  auto m = gen::random_structure(rng, voc, size, density);
  auto n = gen::random_extension(rng, m, gen::uniform(rng, 0, 2), density);
  auto delta = gen::random_delta(rng, voc, gen::uniform(rng, 1, 4), 2, 2);
  auto dw = gen::random_regularity_witness(rng, d, static_cast<int>(delta.size()));
  return {{"square", io::square_to_json(w)},         {"filter", io::filter_to_json(d)},
          {"pullback_witness", io::witness_to_json(pw)}, {"m", io::structure_to_json(m)},
          {"n", io::structure_to_json(n)},            {"delta", io::delta_to_json(delta)},
          {"delta_witness", io::witness_to_json(dw)}};
}

json gen_game(gen::Rng& rng, int index_size) {
  const auto voc = gen::binary_vocabulary();
  json ms = json::array(), ns = json::array();
  for (int i = 0; i < index_size; ++i) {
    auto m = gen::random_structure(rng, voc, gen::uniform(rng, 1, 3));
    auto n = gen::coin(rng, 0.5) ? gen::permuted_copy(rng, m) : gen::random_structure(rng, voc, gen::uniform(rng, 1, 3));
    ms.push_back(io::structure_to_json(m));
    ns.push_back(io::structure_to_json(n));
  }
  return {{"m_factors", ms}, {"n_factors", ns}};
}

json gen_one(const std::string& kind, gen::Rng& rng, int size, int index_size, double density) {
  const auto voc = gen::binary_vocabulary();
  if (kind == "structure") return io::structure_to_json(gen::random_structure(rng, voc, size, density));
  if (kind == "pair") {
    auto m = gen::random_structure(rng, voc, size, density);
    return {{"m", io::structure_to_json(m)}, {"n", io::structure_to_json(gen::random_extension(rng, m, 1, density))}};
  }
  if (kind == "filter") return io::filter_to_json(gen::random_proper_filter(rng, index_size));
  if (kind == "witness") {
    auto d = gen::random_proper_filter(rng, index_size);
    return {{"filter", io::filter_to_json(d)}, {"witness", io::witness_to_json(gen::random_regularity_witness(rng, d, 3))}};
  }
  if (kind == "square") return io::square_to_json(gen::random_two_level_witness(rng, size));
  if (kind == "family") {
    auto d = gen::random_proper_filter(rng, index_size);
    return {{"filter", io::filter_to_json(d)}, {"family", io::family_to_json(gen::random_coherent_family(rng, size, d))}};
  }
  if (kind == "delta") return io::delta_to_json(gen::random_delta(rng, Vocabulary({{"R", 2}, {"P", 1}}), 3, 2));
  if (kind == "pipeline") return gen_pipeline(rng, size, index_size, density);
  if (kind == "game") return gen_game(rng, index_size);
  throw InvalidInput("unknown instance kind '" + kind + "'");
}

void start_watchdog() {
  const char* ms = std::getenv("MODELFORGE_BUDGET_MS");
  if (!ms || !*ms) return;
  char* end = nullptr;
  const long long limit = std::strtoll(ms, &end, 10);
  if (*end != '\0' || limit <= 0) return;
  std::thread([limit] {
    std::this_thread::sleep_for(std::chrono::milliseconds(limit));
    const std::string msg = json{{"error", "budget"},
                                 {"message", "wall-time budget of " + std::to_string(limit) + " ms exceeded"},
                                 {"exit", kBudget}}.dump();
    std::fputs((msg + "\n").c_str(), stdout);
    std::fflush(stdout);
    std::_Exit(kBudget);
  }).detach();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-scale constructions and checkers for reduced products, coherent families and EF games"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", cfg.seed, "Seed for generated instances")->capture_default_str();
  app.add_option("--budget-depth", cfg.budget_depth, "Largest EF game length the solver accepts")
      ->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--budget-size", cfg.budget_size, "Largest structure size the solver accepts")
      ->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--budget-quotient", cfg.budget_quotient, "Largest number of choice functions in a reduced product")
      ->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--budget-adversary", cfg.budget_adversary, "Largest number of nodes an adversary search visits")
      ->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--b-bound", cfg.b_bound, "Subset bound for coherence condition (iii)")
      ->check(CLI::PositiveNumber)->capture_default_str();
  app.add_flag("--strict-paper", cfg.strict_paper, "Demand the written <_L reading of the up-sets, which is refused as ill-typed");
  app.add_flag("--pretty", cfg.pretty, "Indent JSON reports");
  app.add_option("--jobs", cfg.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("-o,--out", cfg.out, "Write the report here instead of stdout");

  std::function<int()> run;
  std::string m_path, n_path, structure_path, formula_text, assign_text, delta_path, tuple_text, factors_path,
      filter_path, family_path, square_path, witness_path, derived_path, generators_path, groups_path, embedding_path,
      strategy_path, strategy_out, transcript_path, transcript_out, kind = "structure", out_dir;
  std::vector<std::string> sentences;
  int rounds = 2, qr = 2, factor_index = -1, max_length = -1, index = -1, arity = 2, count = 1, size = 4,
      index_size = 3, length = -1;
  double density = 0.5;
  bool all_functions = false;

  auto* eval = app.add_subcommand("eval", "Evaluate a formula in a structure");
  eval->add_option("--structure", structure_path)->required();
  eval->add_option("--formula", formula_text)->required();
  eval->add_option("--assign", assign_text, "Values of x0,x1,... as a comma list");
  eval->callback([&] {
    run = [&] {
      auto m = load_structure(structure_path);
      auto f = parse_formula(formula_text, m.vocabulary());
      auto vals = parse_ints(assign_text);
      const bool v = satisfies(m, f, std::vector<Element>(vals.begin(), vals.end()));
      return emit({{"formula", to_string(f)}, {"assignment", vals}, {"value", v}});
    };
  });

  auto* type = app.add_subcommand("type", "Δ-type of a tuple");
  type->add_option("--structure", structure_path)->required();
  type->add_option("--delta", delta_path)->required();
  type->add_option("--tuple", tuple_text)->required();
  type->callback([&] {
    run = [&] {
      auto m = load_structure(structure_path);
      auto delta = io::delta_from_json(io::read_json_file(delta_path), &m.vocabulary());
      auto t = parse_ints(tuple_text);
      for (int x : t)
        if (x < 0 || x >= m.size()) throw InvalidInput("tuple element " + std::to_string(x) + " outside the universe");
      const Tuple tup(t.begin(), t.end());
      auto ty = full_delta_type(m, delta.formulas(), tup);
      return emit({{"tuple", t}, {"type", to_string(ty)}});
    };
  });

  auto* flatten = app.add_subcommand("flatten", "Rewrite into weakly Δ-existential form");
  flatten->add_option("--formula", formula_text)->required();
  flatten->add_option("--delta", delta_path)->required();
  flatten->callback([&] {
    run = [&] {
      auto delta = io::delta_from_json(io::read_json_file(delta_path));
      auto r = flatten_to_weakly_existential(parse_formula(formula_text), delta);
      if (!r) return emit({{"ok", false}, {"rejection", r.rejection}}, kViolation);
      return emit({{"ok", true}, {"formula", to_string(*r.formula)}});
    };
  });

  auto* reduce = app.add_subcommand("reduce", "Quotient of a product by a filter");
  reduce->add_option("--factors", factors_path)->required();
  reduce->add_option("--filter", filter_path)->required();
  reduce->callback([&] {
    run = [&] {
      ReducedProduct p(load_factors(factors_path), load_filter(filter_path), cfg.budget_quotient);
      if (!p.materialized()) throw BudgetExceeded("reduced product exceeds the quotient budget");
      return emit({{"functions", p.function_count()},
                   {"classes", p.representatives().size()},
                   {"representatives", p.representatives()},
                   {"quotient", io::structure_to_json(p.quotient())}});
    };
  });

  auto* los = app.add_subcommand("los-check", "Compare product and factor verdicts over sentences");
  los->add_option("--factors", factors_path)->required();
  los->add_option("--filter", filter_path)->required();
  los->add_option("--sentence", sentences, "Sentence to check (repeatable); default is the rank-qr enumeration");
  los->add_option("--qr", qr, "Quantifier rank of the enumerated corpus")->capture_default_str();
  los->add_option("--factor-index", factor_index, "Compare against this factor instead of the generating one");
  los->callback([&] {
    run = [&] {
      auto factors = load_factors(factors_path);
      auto d = load_filter(filter_path);
      if (!d.is_ultrafilter()) throw PreconditionFailure("los-check needs an ultrafilter");
      ReducedProduct p(factors, d, cfg.budget_quotient);
      if (!p.materialized()) throw BudgetExceeded("reduced product exceeds the quotient budget");
      const int j = factor_index >= 0 ? factor_index : d.generating_index();
      if (j >= static_cast<int>(factors.size())) throw InvalidInput("factor index out of range");
      std::vector<Formula> corpus;
      for (const auto& s : sentences) corpus.push_back(parse_formula(s, p.vocabulary()));
      if (sentences.empty()) {
        auto stream = enumerate_sentences(p.vocabulary(), qr, cfg.budget_quotient);
        if (!stream.complete) throw BudgetExceeded("sentence enumeration exceeds the budget");
        corpus = std::move(stream.sentences);
      }
      json violations = json::array();
      for (const auto& s : corpus) {
        if (!s.is_sentence()) throw InvalidInput("not a sentence: " + to_string(s));
        const bool pv = evaluate(p.quotient(), s), fv = evaluate(factors[static_cast<std::size_t>(j)], s);
        if (pv != fv) violations.push_back({{"sentence", to_string(s)}, {"product", pv}, {"factor", fv}});
      }
      return emit({{"factor", j}, {"checked", corpus.size()}, {"violations", violations}, {"ok", violations.empty()}},
                  violations.empty() ? kOk : kViolation);
    };
  });

  auto* coherent = app.add_subcommand("check-coherent", "Check conditions (i)-(iv) of a coherent family");
  coherent->add_option("--family", family_path)->required();
  coherent->add_option("--filter", filter_path)->required();
  coherent->callback([&] {
    run = [&] {
      auto r = check_coherent(load_family(family_path), load_filter(filter_path), cfg.b_bound);
      return emit(coherence_json(r), r.ok() ? kOk : kViolation);
    };
  });

  auto* square = app.add_subcommand("check-square", "Check the eight axioms of a square witness");
  square->add_option("--square", square_path)->required();
  square->callback([&] {
    run = [&] {
      auto w = io::square_from_json(io::read_json_file(square_path));
      auto r = check_square_witness(w);
      json axioms = json::object();
      for (std::size_t k = 0; k < 8; ++k)
        axioms[SquareReport::kNames[k]] = {{"ok", r.axioms[k].ok}, {"counterexample", r.axioms[k].counterexample},
                                           {"detail", r.axioms[k].detail}};
      json report = {{"ok", r.ok()}, {"axioms", axioms}};
      if (r.ok()) {
        json levels = json::array();
        bool trees = true;
        for (int z = 0; z < w.level_count(); ++z) {
          auto t = levels_tree(w, z);
          trees = trees && t.verdict.ok();
          levels.push_back({{"level", z}, {"classes", t.classes}, {"tree", t.verdict.ok()},
                            {"counterexample", t.verdict.counterexample}});
        }
        report["levels"] = levels;
        report["ok"] = trees;
      }
      return emit(report, report["ok"].get<bool>() ? kOk : kViolation);
    };
  });

  auto* derive = app.add_subcommand("derive-family", "Coherent family on tuple types of a square witness");
  derive->add_option("--square", square_path)->required();
  derive->add_option("--max-length", max_length, "Longest tuple considered (default: the order size)");
  derive->callback([&] {
    run = [&] {
      refuse_strict_reading();
      auto w = io::square_from_json(io::read_json_file(square_path));
      if (!check_square_witness(w).ok()) throw PreconditionFailure("square witness fails its axioms");
      auto d = derive_family(w, max_length);
      json gamma = json::array();
      for (std::size_t t = 0; t < d.gamma.size(); ++t)
        gamma.push_back({{"type", type_json(d.gamma[t])}, {"realizer", d.realizers[t]}});
      auto rep = check_coherent(d.family, d.filter, cfg.b_bound);
      auto cov = check_upset_coverage(w, d, cfg.b_bound);
      json coverage = json::array();
      for (const auto& c : cov) coverage.push_back({{"a", c.a}, {"B", c.B}, {"type", c.type}, {"u", c.u}});
      return emit({{"gamma", gamma},
                   {"top", d.top},
                   {"generator_types", d.generator_types},
                   {"generators", io::index_sets_to_json(d.generators)},
                   {"filter", io::filter_to_json(d.filter)},
                   {"family", io::family_to_json(d.family)},
                   {"order_reading", order_reading()},
                   {"coherence", coherence_json(rep)},
                   {"pointwise_coverage_exceptions", coverage}},
                  rep.ok() ? kOk : kViolation);
    };
  });

  auto* pull = app.add_subcommand("pullback", "Pull a family on Γ back to the index set");
  pull->add_option("--derived", derived_path, "Output of derive-family")->required();
  pull->add_option("--witness", witness_path)->required();
  pull->add_option("--filter", filter_path, "Filter on the index set; enables the coherence check")->required();
  pull->callback([&] {
    run = [&] {
      const json dj = io::read_json_file(derived_path);
      auto f = io::family_from_json(io::field(dj, "family", "derived family"));
      auto gens = io::index_sets_from_json(io::field(dj, "generators", "derived family"), f.index_size());
      auto d = load_filter(filter_path);
      auto w = io::witness_from_json(io::read_json_file(witness_path), d.index_size());
      if (!w.validate(d).ok()) throw PreconditionFailure("regularity witness does not fit the filter");
      auto p = pullback(f, gens, w, d.index_size());
      auto rep = check_coherent(p.family, d, cfg.b_bound);
      return emit({{"h", p.h}, {"family", io::family_to_json(p.family)}, {"coherence", coherence_json(rep)}},
                  rep.ok() ? kOk : kViolation);
    };
  });

  auto* ds = app.add_subcommand("derive-s", "Derive the S-family and check its box properties");
  ds->add_option("--family", family_path)->required();
  ds->add_option("--filter", filter_path, "Filter whose kernel joins the generators (standard groups)");
  ds->add_option("--witness", witness_path, "Witness sets used as base generators (standard groups)");
  ds->add_option("--groups", groups_path, "Explicit {generators, groups, caps}");
  ds->callback([&] {
    run = [&] {
      auto f = load_family(family_path);
      SGroups g;
      if (!groups_path.empty()) {
        const json j = io::read_json_file(groups_path);
        g.generators = io::index_sets_from_json(io::field(j, "generators", "groups file"), f.index_size());
        g.groups = io::schema("groups file", [&] { return io::field(j, "groups", "groups file").get<std::vector<std::vector<int>>>(); });
        g.caps = io::schema("groups file", [&] { return io::field(j, "caps", "groups file").get<std::vector<int>>(); });
      } else {
        if (filter_path.empty() || witness_path.empty())
          throw InvalidInput("derive-s needs --groups, or --filter and --witness");
        auto d = load_filter(filter_path);
        auto w = io::witness_from_json(io::read_json_file(witness_path), d.index_size());
        auto base = w.sets();
        base.push_back(d.kernel());
        g = standard_s_groups(f, base);
      }
      auto r = derive_s_family(f, g.generators, g.groups, g.caps);
      bool cap_ok = true;
      for (std::size_t a = 0; a < r.report.max_size.size(); ++a)
        cap_ok = cap_ok && r.report.max_size[a] <= r.report.derived_bound[a];
      const bool ok = r.report.ok() && cap_ok;
      return emit({{"ok", ok},
                   {"generators", io::index_sets_to_json(g.generators)},
                   {"groups", g.groups},
                   {"caps", g.caps},
                   {"V", r.family.V},
                   {"increasing", condition_json(r.report.increasing)},
                   {"exhaustive", condition_json(r.report.exhaustive)},
                   {"bounded", condition_json(r.report.bounded)},
                   {"coherent", condition_json(r.report.coherent)},
                   {"order_type", condition_json(r.report.order_type)},
                   {"max_size", r.report.max_size},
                   {"derived_bound", r.report.derived_bound},
                   {"cap_bound", cap_ok}},
                  ok ? kOk : kViolation);
    };
  });

  auto* theta = app.add_subcommand("build-theta", "θ-formulas of the embedding construction");
  theta->add_option("--m", m_path)->required();
  theta->add_option("--delta", delta_path)->required();
  theta->add_option("--witness", witness_path, "Regularity witness with one set per Δ-formula")->required();
  theta->add_option("--family", family_path)->required();
  theta->add_option("--index", index, "Only this coordinate");
  theta->callback([&] {
    run = [&] {
      auto m = load_structure(m_path);
      auto f = load_family(family_path);
      auto delta = io::delta_from_json(io::read_json_file(delta_path), &m.vocabulary());
      auto w = io::witness_from_json(io::read_json_file(witness_path), f.index_size());
      auto parts = delta_partition(delta, w, f.index_size());
      if (index >= f.index_size()) throw InvalidInput("index out of range");
      json out = json::array();
      for (int i = 0; i < f.index_size(); ++i) {
        if (index >= 0 && i != index) continue;
        ThetaLadder ladder(m, f, i, select_formulas(delta, parts[static_cast<std::size_t>(i)]));
        json th = json::array();
        bool flat = true;
        for (int z = 0; z < m.size(); ++z) {
          const Formula& t = ladder.theta(z);
          Formula closed = t;
          for (int v = ladder.m(z); v >= 0; --v) closed = Formula::exists(v, closed);
          flat = flat && static_cast<bool>(flatten_to_weakly_existential(closed, delta));
          th.push_back(to_string(t));
        }
        out.push_back({{"index", i}, {"delta_part", parts[static_cast<std::size_t>(i)]}, {"theta", th},
                       {"closures_flatten", flat}});
      }
      return emit({{"ladders", out}});
    };
  });

  auto* build = app.add_subcommand("build-embedding", "Construct the Δ-embedding of M into N^I/D");
  build->add_option("--m", m_path)->required();
  build->add_option("--n", n_path)->required();
  build->add_option("--delta", delta_path)->required();
  build->add_option("--filter", filter_path)->required();
  build->add_option("--witness", witness_path, "Regularity witness with one set per Δ-formula")->required();
  build->add_option("--family", family_path)->required();
  build->callback([&] {
    run = [&] {
      auto m = load_structure(m_path), n = load_structure(n_path);
      auto d = load_filter(filter_path);
      auto delta = io::delta_from_json(io::read_json_file(delta_path), &m.vocabulary());
      auto w = io::witness_from_json(io::read_json_file(witness_path), d.index_size());
      auto f = load_family(family_path);
      try {
        auto r = build_embedding(m, n, delta, d, w, f, {cfg.b_bound, cfg.jobs});
        return emit({{"f", r.f}});
      } catch (const WitnessNotFound& e) {
        return emit({{"error", "witness-not-found"},
                     {"index", e.index()},
                     {"element", e.element()},
                     {"formula", to_string(e.formula())},
                     {"message", e.what()}},
                    kViolation);
      }
    };
  });

  auto* verify = app.add_subcommand("verify-embedding", "Check that an embedding preserves Δ and its negations");
  verify->add_option("--m", m_path)->required();
  verify->add_option("--n", n_path)->required();
  verify->add_option("--delta", delta_path)->required();
  verify->add_option("--filter", filter_path)->required();
  verify->add_option("--embedding", embedding_path)->required();
  verify->add_option("--arity", arity, "Largest tuple width checked")->capture_default_str();
  verify->callback([&] {
    run = [&] {
      auto m = load_structure(m_path), n = load_structure(n_path);
      auto d = load_filter(filter_path);
      auto delta = io::delta_from_json(io::read_json_file(delta_path), &m.vocabulary());
      EmbeddingResult r;
      r.f = io::schema("embedding", [&] {
        return io::field(io::read_json_file(embedding_path), "f", "embedding").get<std::vector<std::vector<Element>>>();
      });
      for (const auto& row : r.f) {
        if (static_cast<int>(row.size()) != d.index_size()) throw InvalidInput("embedding row has the wrong length");
        for (Element b : row)
          if (b < 0 || b >= n.size()) throw InvalidInput("embedding value outside N");
      }
      std::vector<Structure> factors(static_cast<std::size_t>(d.index_size()), n);
      auto rep = verify_delta_embedding(m, factors, d, r, delta, arity);
      json vs = json::array();
      for (const auto& v : rep.violations)
        vs.push_back({{"formula", to_string(v.formula)}, {"tuple", v.tuple}, {"agreement", members(v.agreement)}});
      return emit({{"ok", rep.ok()}, {"checked", rep.checked}, {"violations", vs}}, rep.ok() ? kOk : kViolation);
    };
  });

  auto* solve = app.add_subcommand("solve-ef", "Decide the EF game of a given length");
  solve->add_option("--m", m_path)->required();
  solve->add_option("--n", n_path)->required();
  solve->add_option("--rounds", rounds)->capture_default_str();
  solve->add_option("--strategy-out", strategy_out, "Save II's winning strategy");
  solve->callback([&] {
    run = [&] {
      auto m = load_structure(m_path), n = load_structure(n_path);
      auto sol = solve_ef(m, n, rounds, solve_budget(), cfg.jobs);
      json report = {{"rounds", rounds}, {"winner", sol.winner == Winner::II ? "II" : "I"}, {"states", sol.states}};
      if (sol.strategy && !strategy_out.empty()) write_text(io::strategy_to_json(*sol.strategy).dump(), strategy_out);
      return emit(report);
    };
  });

  auto* compose = app.add_subcommand("compose-ef", "Compose factor strategies and test the product strategy");
  compose->add_option("--m-factors", m_path)->required();
  compose->add_option("--n-factors", n_path)->required();
  compose->add_option("--filter", filter_path)->required();
  compose->add_option("--family", family_path)->required();
  compose->add_option("--strategies", strategy_path, "JSON list of strategy objects; solved per factor when absent");
  compose->add_option("--length", length, "Game length tested (default: element count of the family)");
  compose->add_flag("--all-functions", all_functions, "Let I range over all choice functions");
  compose->callback([&] {
    run = [&] {
      auto ms = load_factors(m_path), ns = load_factors(n_path);
      auto d = load_filter(filter_path);
      auto f = load_family(family_path);
      if (ms.size() != ns.size() || static_cast<int>(ms.size()) != f.index_size())
        throw InvalidInput("factor counts differ from the family's index set");
      std::vector<Strategy> sigma;
      if (!strategy_path.empty()) {
        for (const auto& s : io::read_json_file(strategy_path)) sigma.push_back(io::strategy_from_json(s));
      } else {
        for (std::size_t i = 0; i < ms.size(); ++i) {
          auto sol = solve_ef(ms[i], ns[i], f.cap(static_cast<int>(i)), solve_budget(), cfg.jobs);
          if (!sol.strategy) throw PreconditionFailure("II has no winning strategy in factor " + std::to_string(i));
          sigma.push_back(*sol.strategy);
        }
      }
      auto composed = compose_strategy(ms, ns, d, f, sigma, cfg.b_bound);
      ReducedProduct pm(ms, d, cfg.budget_quotient), pn(ns, d, cfg.budget_quotient);
      if (!pm.materialized() || !pn.materialized()) throw BudgetExceeded("reduced product exceeds the quotient budget");
      ProductAdversaryOptions opt;
      opt.representatives = !all_functions;
      opt.jobs = cfg.jobs;
      opt.hook = [&](const ProductPosition& pos) -> std::optional<std::string> {
        auto g = is_good_position(pos, f, sigma);
        if (!g.good)
          return "position is not good at round " + std::to_string(g.zeta) + ", coordinate " + std::to_string(g.index);
        return std::nullopt;
      };
      const int len = length >= 0 ? length : f.element_count();
      auto r = exhaustive_adversary_check(composed, pm, pn, len, cfg.budget_adversary, opt);
      json report = adversary_json(r);
      report["length"] = len;
      return emit(report, adversary_exit(r));
    };
  });

  auto* adv = app.add_subcommand("adversary", "Exhaustively attack a strategy file");
  adv->add_option("--m", m_path)->required();
  adv->add_option("--n", n_path)->required();
  adv->add_option("--strategy", strategy_path)->required();
  adv->add_option("--rounds", rounds)->capture_default_str();
  adv->callback([&] {
    run = [&] {
      auto m = load_structure(m_path), n = load_structure(n_path);
      auto s = io::strategy_from_json(io::read_json_file(strategy_path));
      auto r = exhaustive_adversary_check(
          m, n,
          [&](const GamePosition& p, Side side, Element a) {
            auto b = s.reply(p, side, a);
            if (!b) throw PreconditionFailure("strategy has no entry for this position");
            return *b;
          },
          rounds, cfg.budget_adversary, cfg.jobs);
      json report = adversary_json(r);
      report["rounds"] = rounds;
      return emit(report, adversary_exit(r));
    };
  });

  auto* play = app.add_subcommand("play", "Play I against a strategy on stdin, or replay a transcript");
  play->add_option("--m", m_path)->required();
  play->add_option("--n", n_path)->required();
  play->add_option("--strategy", strategy_path, "Strategy file; solved when absent");
  play->add_option("--rounds", rounds)->capture_default_str();
  play->add_option("--replay", transcript_path, "Check a saved transcript instead of playing");
  play->add_option("--transcript-out", transcript_out, "Save the played transcript");
  play->callback([&] {
    run = [&] {
      auto m = load_structure(m_path), n = load_structure(n_path);
      std::optional<Strategy> s;
      if (!strategy_path.empty()) s = io::strategy_from_json(io::read_json_file(strategy_path));
      if (!transcript_path.empty()) {
        auto t = io::transcript_from_string<Element>(read_text(transcript_path));
        auto v = replay_transcript(m, n, t, s ? &*s : nullptr);
        return emit({{"legal", v.legal}, {"consistent", v.consistent}, {"ii_wins", v.ii_wins},
                     {"failed_round", v.failed_round}, {"reason", v.reason}},
                    v.legal && v.consistent && v.ii_wins ? kOk : kViolation);
      }
      if (!s) {
        auto sol = solve_ef(m, n, rounds, solve_budget(), cfg.jobs);
        if (!sol.strategy) throw PreconditionFailure("I wins the " + std::to_string(rounds) + "-round game; II has no strategy to play");
        s = *sol.strategy;
      }
      auto t = play_interactive(std::cin, std::cerr, plain_session(m, n, *s), rounds);
      if (!transcript_out.empty()) {
        std::ofstream out(transcript_out);
        if (!out) throw InvalidInput("cannot write " + transcript_out);
        out << io::transcript_to_string(t);
      }
      auto v = replay_transcript(m, n, t, &*s);
      return emit({{"rounds", t.size()}, {"ii_wins", v.ii_wins}, {"transcript", transcript_json(t)}});
    };
  });

  auto* geni = app.add_subcommand("gen-instances", "Seeded random instances");
  geni->add_option("--kind", kind, "structure|pair|filter|witness|square|family|delta|pipeline|game")->capture_default_str();
  geni->add_option("--count", count)->check(CLI::PositiveNumber)->capture_default_str();
  geni->add_option("--size", size, "Universe or order size")->check(CLI::PositiveNumber)->capture_default_str();
  geni->add_option("--index-size", index_size)->check(CLI::PositiveNumber)->capture_default_str();
  geni->add_option("--density", density, "Probability that a tuple is in a relation")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  geni->add_option("--out-dir", out_dir, "Write one directory (pipeline) or file per instance here");
  geni->callback([&] {
    run = [&] {
      gen::Rng rng(cfg.seed);
      json all = json::array();
      for (int k = 0; k < count; ++k) all.push_back(gen_one(kind, rng, size, index_size, density));
      if (out_dir.empty()) return emit(count == 1 ? all[0] : all);
      namespace fs = std::filesystem;
      json files = json::array();
      for (int k = 0; k < count; ++k) {
        const auto& inst = all[static_cast<std::size_t>(k)];
        if (kind == "pipeline" || kind == "game" || kind == "pair") {
          const fs::path dir = fs::path(out_dir) / (kind + "-" + std::to_string(k));
          fs::create_directories(dir);
          for (auto it = inst.begin(); it != inst.end(); ++it) {
            const auto p = (dir / (it.key() + ".json")).string();
            write_text(io::dump(it.value(), cfg.pretty), p);
            files.push_back(p);
          }
        } else {
          fs::create_directories(out_dir);
          const auto p = (fs::path(out_dir) / (kind + "-" + std::to_string(k) + ".json")).string();
          write_text(io::dump(inst, cfg.pretty), p);
          files.push_back(p);
        }
      }
      return emit({{"kind", kind}, {"count", count}, {"seed", cfg.seed}, {"files", files}});
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return error_object("usage", e.what(), kInput);
  }

  start_watchdog();
  try {
    return run();
  } catch (const BudgetExceeded& e) {
    return error_object("budget", e.what(), kBudget);
  } catch (const ParseError& e) {
    return error_object("parse", e.what(), kInput);
  } catch (const VocabularyError& e) {
    return error_object("vocabulary", e.what(), kInput);
  } catch (const InvalidInput& e) {
    return error_object("input", e.what(), kInput);
  } catch (const PreconditionFailure& e) {
    return error_object("precondition", e.what(), kInput);
  } catch (const Error& e) {
    return error_object("error", e.what(), kInput);
  } catch (const std::filesystem::filesystem_error& e) {
    return error_object("input", e.what(), kInput);
  }
}

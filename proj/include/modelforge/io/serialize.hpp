#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "modelforge/coherent/family.hpp"
#include "modelforge/coherent/square.hpp"
#include "modelforge/errors.hpp"
#include "modelforge/filter/filter.hpp"
#include "modelforge/game/position.hpp"
#include "modelforge/game/solver.hpp"
#include "modelforge/logic/delta.hpp"
#include "modelforge/logic/structure.hpp"
#include "modelforge/logic/syntax.hpp"

namespace modelforge::io {

using json = nlohmann::json;

inline json parse_json(const std::string& text, const std::string& what = "input") {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(what + " is not valid JSON: " + e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str(), path);
}

// Wraps schema errors from the JSON library as input errors.
template <typename F>
auto schema(const std::string& what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw InvalidInput(what + ": " + e.what());
  }
}

inline const json& field(const json& j, const char* key, const std::string& what) {
  if (!j.is_object() || !j.contains(key)) throw InvalidInput(what + " lacks field \"" + key + "\"");
  return j.at(key);
}

// ---- structures

inline json vocabulary_to_json(const Vocabulary& v) {
  json out = json::array();
  for (const auto& s : v.symbols()) out.push_back({{"name", s.name}, {"arity", s.arity}});
  return out;
}

inline Vocabulary vocabulary_from_json(const json& j) {
  return schema("vocabulary", [&] {
    std::vector<Symbol> syms;
    for (const auto& s : j) syms.push_back({s.at("name").get<std::string>(), s.at("arity").get<int>()});
    return Vocabulary(std::move(syms));
  });
}

inline json structure_to_json(const Structure& m) {
  json tables = json::object();
  for (std::size_t s = 0; s < m.vocabulary().size(); ++s) tables[m.vocabulary()[s].name] = m.tuples(s);
  return {{"vocabulary", vocabulary_to_json(m.vocabulary())}, {"universe_size", m.size()}, {"tables", tables}};
}

inline Structure structure_from_json(const json& j) {
  return schema("structure", [&] {
    Structure m(vocabulary_from_json(field(j, "vocabulary", "structure")), field(j, "universe_size", "structure").get<int>());
    const json& tables = j.contains("tables") ? j.at("tables") : json::object();
    for (auto it = tables.begin(); it != tables.end(); ++it) {
      const auto idx = m.vocabulary().index_of(it.key());
      if (!idx) throw VocabularyError("table for unknown symbol '" + it.key() + "'");
      for (const auto& t : it.value()) m.set(*idx, t.get<Tuple>());
    }
    return m;
  });
}

inline std::vector<Structure> structures_from_json(const json& j) {
  if (!j.is_array()) throw InvalidInput("expected a list of structures");
  std::vector<Structure> out;
  for (const auto& s : j) out.push_back(structure_from_json(s));
  return out;
}

// ---- filters and witnesses

inline json index_sets_to_json(const std::vector<IndexSet>& sets) {
  json out = json::array();
  for (const auto& s : sets) out.push_back(members(s));
  return out;
}

inline std::vector<IndexSet> index_sets_from_json(const json& j, int n) {
  return schema("index sets", [&] {
    std::vector<IndexSet> out;
    for (const auto& s : j) out.push_back(make_index_set(n, s.get<std::vector<int>>()));
    return out;
  });
}

inline json filter_to_json(const FilterOnIndex& d) {
  return {{"index_size", d.index_size()}, {"generators", index_sets_to_json(d.generators())}};
}

inline FilterOnIndex filter_from_json(const json& j) {
  const int n = schema("filter", [&] { return field(j, "index_size", "filter").get<int>(); });
  return FilterOnIndex(n, index_sets_from_json(field(j, "generators", "filter"), n));
}

inline json witness_to_json(const RegularityWitness& w) {
  return {{"sets", index_sets_to_json(w.sets())}, {"cap", w.cap()}};
}

inline RegularityWitness witness_from_json(const json& j, int index_size) {
  return RegularityWitness(index_sets_from_json(field(j, "sets", "witness"), index_size),
                           schema("witness", [&] { return field(j, "cap", "witness").get<int>(); }));
}

// ---- coherent families and square witnesses

inline json family_to_json(const CoherentFamily& f) {
  return {{"element_count", f.element_count()}, {"index_size", f.index_size()}, {"caps", f.caps()}, {"sets", f.sets()}};
}

inline CoherentFamily family_from_json(const json& j) {
  return schema("family", [&] {
    return CoherentFamily(field(j, "element_count", "family").get<int>(), field(j, "index_size", "family").get<int>(),
                          field(j, "caps", "family").get<std::vector<int>>(),
                          field(j, "sets", "family").get<std::vector<std::vector<std::vector<int>>>>());
  });
}

// f is a list per level of {"a","b","map":[[x,y],...]} entries.
inline json square_to_json(const SquareWitness& w) {
  std::vector<std::vector<int>> labels = w.class_ids();
  json f = json::array();
  for (const auto& level : w.maps()) {
    json entries = json::array();
    for (const auto& [ab, m] : level) {
      json pairs = json::array();
      for (auto [x, y] : m) pairs.push_back({x, y});
      entries.push_back({{"a", ab.first}, {"b", ab.second}, {"map", pairs}});
    }
    f.push_back(entries);
  }
  return {{"order_size", w.order_size()}, {"level_count", w.level_count()}, {"C", w.ladders()}, {"E", labels}, {"f", f}};
}

// A missing "f" is filled by complete_maps.
inline SquareWitness square_from_json(const json& j) {
  return schema("square witness", [&] {
    const int l = field(j, "order_size", "square witness").get<int>();
    const int c = field(j, "level_count", "square witness").get<int>();
    auto C = field(j, "C", "square witness").get<std::vector<std::vector<std::vector<int>>>>();
    auto E = field(j, "E", "square witness").get<std::vector<std::vector<int>>>();
    std::vector<std::map<std::pair<int, int>, PartialMap>> maps;
    const bool has_f = j.contains("f");
    if (has_f) {
      for (const auto& level : j.at("f")) {
        std::map<std::pair<int, int>, PartialMap> lv;
        for (const auto& e : level) {
          PartialMap m;
          for (const auto& p : e.at("map")) m.emplace(p.at(0).get<int>(), p.at(1).get<int>());
          lv.emplace(std::make_pair(e.at("a").get<int>(), e.at("b").get<int>()), std::move(m));
        }
        maps.push_back(std::move(lv));
      }
    }
    SquareWitness w(l, c, std::move(C), std::move(E), std::move(maps));
    if (!has_f) w.complete_maps();
    return w;
  });
}

// ---- Δ sets

inline json delta_to_json(const DeltaSet& d) {
  json fs = json::array();
  for (const auto& f : d.formulas()) fs.push_back(to_string(f));
  return {{"formulas", fs}, {"max_arity", d.max_arity()}};
}

inline DeltaSet delta_from_json(const json& j, const Vocabulary* voc = nullptr) {
  const auto texts = schema("delta set", [&] { return field(j, "formulas", "delta set").get<std::vector<std::string>>(); });
  const int arity = schema("delta set", [&] { return field(j, "max_arity", "delta set").get<int>(); });
  std::vector<Formula> fs;
  for (const auto& t : texts) fs.push_back(voc ? parse_formula(t, *voc) : parse_formula(t));
  return DeltaSet(std::move(fs), arity);
}

// ---- strategies

inline json relation_to_json(const PartialRelation& pi) {
  json out = json::array();
  for (auto [a, b] : pi) out.push_back({a, b});
  return out;
}

inline json strategy_to_json(const Strategy& s) {
  json entries = json::array();
  for (const auto& [k, reply] : s.table())
    entries.push_back({{"pi", relation_to_json(k.pi)}, {"played", k.played}, {"side", side_name(k.side)}, {"elem", k.move}, {"reply", reply}});
  return {{"format", "modelforge-strategy"}, {"version", 1}, {"scope", s.scope()}, {"m_size", s.m_size()},
          {"n_size", s.n_size()}, {"entries", entries}};
}

inline Strategy strategy_from_json(const json& j) {
  return schema("strategy", [&] {
    if (j.value("format", "") != "modelforge-strategy") throw InvalidInput("not a strategy file");
    if (j.value("version", 0) != 1) throw InvalidInput("unsupported strategy version");
    Strategy s(j.at("m_size").get<int>(), j.at("n_size").get<int>(), j.at("scope").get<int>());
    for (const auto& e : j.at("entries")) {
      PartialRelation pi;
      for (const auto& p : e.at("pi")) pi.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
      std::sort(pi.begin(), pi.end());
      pi.erase(std::unique(pi.begin(), pi.end()), pi.end());
      s.set({pi, e.at("played").get<int>(), parse_side(e.at("side").get<std::string>()), e.at("elem").get<int>()},
            e.at("reply").get<int>());
    }
    return s;
  });
}

// ---- transcripts: one JSON object per line

template <typename E>
std::string transcript_to_string(const std::vector<BasicRound<E>>& rounds) {
  std::string out;
  for (std::size_t k = 0; k < rounds.size(); ++k) {
    const auto& r = rounds[k];
    json line = {{"round", k},
                 {"I", {{"side", side_name(r.side)}, {"elem", r.move}}},
                 {"II", {{"side", side_name(other(r.side))}, {"elem", r.reply}}}};
    out += line.dump() + "\n";
  }
  return out;
}

template <typename E>
std::vector<BasicRound<E>> transcript_from_string(const std::string& text) {
  std::vector<BasicRound<E>> rounds;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string what = "transcript line " + std::to_string(lineno);
    const json j = parse_json(line, what);
    schema(what, [&] {
      if (j.at("round").get<std::size_t>() != rounds.size()) throw InvalidInput(what + ": rounds out of order");
      const Side side = parse_side(j.at("I").at("side").get<std::string>());
      if (parse_side(j.at("II").at("side").get<std::string>()) != other(side))
        throw InvalidInput(what + ": II must answer on the other side");
      rounds.push_back({side, j.at("I").at("elem").get<E>(), j.at("II").at("elem").get<E>()});
      return 0;
    });
  }
  return rounds;
}

inline std::string dump(const json& j, bool pretty) { return pretty ? j.dump(2) : j.dump(); }

}  // namespace modelforge::io

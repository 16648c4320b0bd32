#include "cpswp/dfa.hpp"

#include <bit>

#include "cpswp/error.hpp"
#include "cpswp/parse.hpp"
#include "json.hpp"

namespace cpswp {

StateSet::StateSet(std::size_t n, bool full) : n_(n), words_((n + 63) / 64, 0) {
  if (full) {
    for (std::size_t q = 0; q < n; ++q) insert(q);
  }
}

std::size_t StateSet::count() const {
  std::size_t c = 0;
  for (auto w : words_) c += std::popcount(w);
  return c;
}

std::vector<std::size_t> StateSet::elements() const {
  std::vector<std::size_t> out;
  for (std::size_t q = 0; q < n_; ++q) {
    if (contains(q)) out.push_back(q);
  }
  return out;
}

StateSet StateSet::operator&(const StateSet& o) const {
  StateSet r = *this;
  for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] &= o.words_[i];
  return r;
}

StateSet StateSet::operator|(const StateSet& o) const {
  StateSet r = *this;
  for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] |= o.words_[i];
  return r;
}

StateSet StateSet::complement() const {
  StateSet r(n_, true);
  for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] &= ~words_[i];
  return r;
}

bool StateSet::subset_of(const StateSet& o) const {
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i] & ~o.words_[i]) return false;
  }
  return true;
}

std::optional<std::size_t> TransitionRelation::state_index(const std::string& name) const {
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i] == name) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> TransitionRelation::symbol_index(const std::string& name) const {
  for (std::size_t i = 0; i < alphabet.size(); ++i) {
    if (alphabet[i] == name) return i;
  }
  return std::nullopt;
}

std::optional<std::pair<std::size_t, std::size_t>> TransitionRelation::nondeterministic_pair() const {
  for (std::size_t i = 0; i < edges.size(); ++i) {
    for (std::size_t j = i + 1; j < edges.size(); ++j) {
      const auto& [f1, a1, t1] = edges[i];
      const auto& [f2, a2, t2] = edges[j];
      if (f1 == f2 && a1 == a2 && t1 != t2) return std::make_pair(f1, a1);
    }
  }
  return std::nullopt;
}

StateSet TransitionRelation::pre(std::size_t symbol, const StateSet& s) const {
  StateSet r(states.size());
  for (const auto& [from, a, to] : edges) {
    if (a == symbol && s.contains(to)) r.insert(from);
  }
  return r;
}

TransitionRelation parse_automaton_json(std::string_view text) {
  using nlohmann::json;
  TransitionRelation rel;
  try {
    json j = json::parse(text);
    rel.states = j.at("states").get<std::vector<std::string>>();
    rel.alphabet = j.at("alphabet").get<std::vector<std::string>>();
    if (rel.states.empty()) throw Error("automaton has no states");
    auto state = [&](const json& v) {
      auto i = rel.state_index(v.get<std::string>());
      if (!i) throw Error("unknown state '" + v.get<std::string>() + "'");
      return *i;
    };
    for (const auto& e : j.at("transitions")) {
      auto a = rel.symbol_index(e.at("symbol").get<std::string>());
      if (!a) throw Error("unknown symbol '" + e.at("symbol").get<std::string>() + "'");
      rel.edges.emplace_back(state(e.at("from")), *a, state(e.at("to")));
    }
    rel.initial = state(j.at("initial"));
    for (const auto& f : j.at("finals")) rel.finals.push_back(state(f));
  } catch (const json::exception& e) {
    throw Error(std::string("malformed automaton: ") + e.what());
  }
  return rel;
}

Dfa::Dfa(TransitionRelation rel) : rel_(std::move(rel)) {
  if (auto bad = rel_.nondeterministic_pair()) {
    throw Error("automaton is not deterministic: state '" + rel_.states[bad->first] + "' has several '" +
                rel_.alphabet[bad->second] +
                "'-successors; event modalities only distribute over meets when there is at most one successor");
  }
  delta_.assign(rel_.states.size(), std::vector<std::optional<std::size_t>>(rel_.alphabet.size()));
  for (const auto& [from, a, to] : rel_.edges) delta_[from][a] = to;
}

StateSet Dfa::finals() const {
  StateSet f(size());
  for (auto q : rel_.finals) f.insert(q);
  return f;
}

bool Dfa::all_final() const { return finals() == universe(); }

std::size_t Dfa::symbol(const std::string& name) const {
  auto a = rel_.symbol_index(name);
  if (!a) throw EvalError("event '" + name + "' is not in the automaton alphabet");
  return *a;
}

std::optional<std::size_t> Dfa::step(std::size_t q, std::size_t symbol) const { return delta_[q][symbol]; }

std::optional<std::size_t> Dfa::run(const std::vector<std::string>& word) const {
  std::size_t q = initial();
  for (const auto& a : word) {
    auto s = rel_.symbol_index(a);
    if (!s) return std::nullopt;
    auto next = step(q, *s);
    if (!next) return std::nullopt;
    q = *next;
  }
  return q;
}

std::string Dfa::describe(const StateSet& s) const {
  std::string out = "{";
  bool first = true;
  for (auto q : s.elements()) {
    out += (first ? "" : ", ") + rel_.states[q];
    first = false;
  }
  return out + "}";
}

Dfa load_dfa_file(const std::string& path) { return Dfa(parse_automaton_json(read_text_file(path))); }

StateSet trace_event(const Dfa& dfa, const std::string& a, const StateSet& s) { return dfa.pre(dfa.symbol(a), s); }

StateSet trace_meet(const StateSet& a, const StateSet& b) { return a & b; }

}  // namespace cpswp

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace cpswp {

// Subset of the states 0..n-1.
class StateSet {
 public:
  StateSet() = default;
  explicit StateSet(std::size_t n, bool full = false);

  std::size_t universe_size() const { return n_; }
  bool contains(std::size_t q) const { return (words_[q / 64] >> (q % 64)) & 1u; }
  void insert(std::size_t q) { words_[q / 64] |= std::uint64_t{1} << (q % 64); }
  void erase(std::size_t q) { words_[q / 64] &= ~(std::uint64_t{1} << (q % 64)); }
  std::size_t count() const;
  bool empty() const { return count() == 0; }
  std::vector<std::size_t> elements() const;

  StateSet operator&(const StateSet& o) const;
  StateSet operator|(const StateSet& o) const;
  StateSet complement() const;
  bool subset_of(const StateSet& o) const;

  bool operator==(const StateSet& o) const { return n_ == o.n_ && words_ == o.words_; }
  bool operator!=(const StateSet& o) const { return !(*this == o); }
  bool operator<(const StateSet& o) const { return std::tie(n_, words_) < std::tie(o.n_, o.words_); }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

// A labelled transition system over named states and symbols; possibly
// nondeterministic.
struct TransitionRelation {
  std::vector<std::string> states;
  std::vector<std::string> alphabet;
  std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> edges;  // from, symbol, to
  std::size_t initial = 0;
  std::vector<std::size_t> finals;

  std::optional<std::size_t> state_index(const std::string& name) const;
  std::optional<std::size_t> symbol_index(const std::string& name) const;
  // Some (state, symbol) with two successors, if any.
  std::optional<std::pair<std::size_t, std::size_t>> nondeterministic_pair() const;
  // {q | exists q' in s, q -a-> q'}
  StateSet pre(std::size_t symbol, const StateSet& s) const;
};

// Throws Error on malformed input.
TransitionRelation parse_automaton_json(std::string_view text);

class Dfa {
 public:
  // Throws Error unless every (state, symbol) has at most one successor.
  explicit Dfa(TransitionRelation rel);

  const TransitionRelation& relation() const { return rel_; }
  std::size_t size() const { return rel_.states.size(); }
  std::size_t initial() const { return rel_.initial; }
  StateSet universe() const { return StateSet(size(), true); }
  StateSet finals() const;
  bool all_final() const;
  // Throws EvalError for symbols outside the alphabet.
  std::size_t symbol(const std::string& name) const;
  std::optional<std::size_t> step(std::size_t q, std::size_t symbol) const;
  StateSet pre(std::size_t symbol, const StateSet& s) const { return rel_.pre(symbol, s); }
  // Runs the word from q0; nullopt when it gets stuck.
  std::optional<std::size_t> run(const std::vector<std::string>& word) const;
  std::string describe(const StateSet& s) const;

 private:
  TransitionRelation rel_;
  std::vector<std::vector<std::optional<std::size_t>>> delta_;
};

Dfa load_dfa_file(const std::string& path);

// Predecessor set of s under symbol a.
StateSet trace_event(const Dfa& dfa, const std::string& a, const StateSet& s);
StateSet trace_meet(const StateSet& a, const StateSet& b);

}  // namespace cpswp

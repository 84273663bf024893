// Builds the four-word factorial-tree grammar, enumerates every path and
// prints the exact sentence distribution and per-word frequencies.

#include <iostream>

#include "zipfkit/facgrammar.hpp"

int main() {
  using namespace zipfkit;
  const GrammarSpec grammar = build_grammar(4);

  std::cout << "allocation (rows: words, columns: tree levels)\n";
  for (std::size_t j = 0; j < grammar.M; ++j) {
    std::cout << "  w" << j + 1 << ":";
    for (const auto& a : grammar.alloc[j]) std::cout << ' ' << a;
    std::cout << "   paths " << grammar.target[j] << " of " << factorial(grammar.M) << '\n';
  }

  const auto dist = enumerate_all(grammar);
  std::cout << "\nsentence distribution\n";
  for (const auto& [sentence, p] : dist) {
    std::cout << "  ";
    for (Word w : sentence) std::cout << 'w' << w << ' ';
    std::cout << "  " << p << '\n';
  }

  std::cout << "\nP(sentence contains w_j)\n";
  const auto marginals = word_marginals(dist, grammar.M);
  for (std::size_t j = 0; j < marginals.size(); ++j) std::cout << "  w" << j + 1 << ": " << marginals[j] << '\n';
}

#ifndef DEPREORDER_EMBEDDING_HPP
#define DEPREORDER_EMBEDDING_HPP

#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "depreorder/conll.hpp"

namespace depreorder {

inline const std::string kRootWord = "ROOT";
inline const std::string kRootLabel = "root";

// Marker suffixes on context-only tokens of the dependency-context corpus.
inline const std::string kHeadLabelMark = "<GL>";
inline const std::string kGrandheadMark = "<G>";
inline const std::string kChildLabelMark = "<L>";

struct EmbeddingTable {
  int dim = 0;
  std::vector<std::string> words;  // insertion order, kept stable for saving
  std::unordered_map<std::string, int> index;
  std::vector<std::vector<double>> vectors;

  int size() const { return static_cast<int>(words.size()); }
  const std::vector<double>* find(const std::string& w) const;
  // Inserts or replaces; returns the row id.
  int put(const std::string& w, std::vector<double> v);
};

struct SkipGramConfig {
  int dim = 100;
  int window = 1;
  int negatives = 5;
  int epochs = 5;
  double learning_rate = 0.025;
  int min_count = 1;
  unsigned long long seed = 1;
  int threads = 1;  // > 1: lock-free parallel mode, not deterministic
};

// One 5-token line per dependency arc (head, child):
//   L(head)<GL>  grandhead<G>  head  child  L(child)<L>
// Every token contributes one arc; arcs from the artificial root use the
// ROOT / root sentinels.
std::vector<std::vector<std::string>> gen_dep_context_corpus(
    const std::vector<DepSentence>& sentences);

struct SkipGramModel {
  EmbeddingTable input;   // word vectors; this is the raw embedding table
  EmbeddingTable output;  // context vectors used by negative sampling
};

// Skip-gram with negative sampling over token lines. Single-threaded mode is
// deterministic given cfg.seed and invariant to the input line order: lines
// are processed in canonical sorted order with per-line-content sample keys.
SkipGramModel train_skipgram(const std::vector<std::vector<std::string>>& corpus,
                             const SkipGramConfig& cfg);

// Drops every <GL>/<G>/<L>-marked token, then installs the specials:
// NULL = zero vector, UNK = mean of the surviving word vectors.
EmbeddingTable filter_context_vocab(const EmbeddingTable& raw);

// Uniform entries on [-r, r], r = sqrt(6/dim), keyed per word; specials
// added as in filter_context_vocab.
EmbeddingTable random_table(const std::vector<std::string>& vocab, int dim,
                            unsigned long long seed);

// Text format: first line "V D", then V lines "word v1 ... vD".
void save_embeddings(std::ostream& os, const EmbeddingTable& table);
EmbeddingTable load_embeddings(std::istream& is);

}  // namespace depreorder

#endif  // DEPREORDER_EMBEDDING_HPP

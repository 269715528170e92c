#ifndef DEPREORDER_CONLL_HPP
#define DEPREORDER_CONLL_HPP

#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace depreorder {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Vocabulary sentinels shared across instance files, embeddings and models.
inline const std::string kNull = "NULL";
inline const std::string kUnk = "UNK";

// One token of a dependency-parsed sentence. Indices are 1-based; head 0
// denotes the artificial root.
struct Token {
  int index = 0;
  std::string surface;
  std::string pos;
  int head = 0;
  std::string label;
};

// A validated dependency tree over a token sequence. Immutable after
// construction; children lists are precomputed in surface order.
class DepSentence {
 public:
  // Validates tree-ness (single root, acyclic, connected, contiguous
  // indices) and throws ParseError on violation.
  static DepSentence build(std::vector<Token> tokens);

  int size() const { return static_cast<int>(tokens_.size()); }
  const Token& token(int i) const { return tokens_.at(i - 1); }
  int root_index() const { return root_; }

  // Children of token i in surface order. i may be 0 (artificial root),
  // whose only child is the root token.
  const std::vector<int>& children_of(int i) const { return children_.at(i); }

  // i plus all its descendants, sorted ascending.
  std::vector<int> subtree_span(int i) const;

  bool is_ancestor(int anc, int node) const;

  std::string to_conll() const;

 private:
  std::vector<Token> tokens_;
  std::vector<std::vector<int>> children_;  // children_[0] = {root_}
  int root_ = 0;
};

// A source dependency tree with its target sentence and word alignment.
// Links are 1-based on both sides.
struct AlignedPair {
  DepSentence source;
  std::vector<std::string> target;
  std::set<std::pair<int, int>> links;
};

// Parses blank-line-separated blocks of >= 8 tab-separated columns
// (ID FORM LEMMA CPOS POS FEATS HEAD DEPREL ...). LEMMA/CPOS/FEATS and any
// extra columns are ignored.
std::vector<DepSentence> parse_conll(const std::string& text);

// Parses one "i-j i-j ..." alignment line (0-based in the file) into a
// 1-based link set, bounds-checked against the sentence lengths.
std::set<std::pair<int, int>> parse_alignment(const std::string& line,
                                              int src_len, int tgt_len);

// Whitespace-tokenized lines, e.g. a target-text file.
std::vector<std::vector<std::string>> parse_token_lines(const std::string& text);

std::vector<std::string> split_ws(const std::string& line);

}  // namespace depreorder

#endif  // DEPREORDER_CONLL_HPP

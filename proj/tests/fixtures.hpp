#ifndef DEPREORDER_TESTS_FIXTURES_HPP
#define DEPREORDER_TESTS_FIXTURES_HPP

#include <string>
#include <vector>

#include "depreorder/conll.hpp"
#include "depreorder/util.hpp"

namespace fixtures {

// "ta shuo , muqian shichang shang gongyou chongyu" with the tree used by
// the fixture-based tests: children of shuo@2 are {ta@1, ,@3, chongyu@8},
// children of chongyu@8 are {muqian@4, shang@6, gongyou@7}, shichang@5
// attaches to shang@6.
inline depreorder::DepSentence sample_sentence() {
  using depreorder::Token;
  std::vector<Token> tokens = {
      {1, "ta", "PN", 2, "nsubj"},    {2, "shuo", "VV", 0, "root"},
      {3, ",", "PU", 2, "punct"},     {4, "muqian", "NT", 8, "tmod"},
      {5, "shichang", "NN", 6, "lobj"}, {6, "shang", "LC", 8, "loc"},
      {7, "gongyou", "NN", 8, "nsubj"}, {8, "chongyu", "VA", 2, "ccomp"},
  };
  return depreorder::DepSentence::build(tokens);
}

// Target: "he said , currently there is a glut on the market".
inline depreorder::AlignedPair sample_pair() {
  depreorder::AlignedPair p;
  p.source = sample_sentence();
  p.target = {"he", "said", ",", "currently", "there", "is",
              "a",  "glut", "on", "the",      "market"};
  p.links = {{1, 1}, {2, 2}, {3, 3}, {4, 4}, {5, 11}, {6, 9}, {7, 5}, {7, 6}, {8, 8}};
  return p;
}

// Random tree by attaching each node (in random order) under a node already
// placed; covers non-projective shapes.
inline depreorder::DepSentence random_sentence(depreorder::Rng& rng, int n,
                                               bool with_punct = false) {
  using depreorder::Token;
  std::vector<std::string> pos_tags = {"NN", "VV", "PN", "AD", "LC"};
  std::vector<std::string> labels = {"nsubj", "dobj", "nmod", "advmod", "loc"};
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i + 1;
  for (int i = n - 1; i > 0; --i)
    std::swap(order[i], order[rng.next_below(i + 1)]);

  std::vector<int> head(n + 1, -1);
  std::vector<int> placed;
  head[order[0]] = 0;
  placed.push_back(order[0]);
  for (int k = 1; k < n; ++k) {
    head[order[k]] = placed[rng.next_below(placed.size())];
    placed.push_back(order[k]);
  }

  std::vector<Token> tokens;
  for (int i = 1; i <= n; ++i) {
    Token t;
    t.index = i;
    t.surface = "w" + std::to_string(i);
    bool punct = with_punct && head[i] != 0 && rng.next_below(6) == 0;
    t.pos = punct ? "PU" : pos_tags[rng.next_below(pos_tags.size())];
    t.head = head[i];
    t.label = punct ? "punct" : labels[rng.next_below(labels.size())];
    tokens.push_back(t);
  }
  return depreorder::DepSentence::build(tokens);
}

}  // namespace fixtures

#endif

#include <doctest.h>

#include <algorithm>
#include <map>

#include "depreorder/conll.hpp"
#include "fixtures.hpp"

using namespace depreorder;

TEST_CASE("parse_conll reads the sample sentence") {
  std::string text =
      "1\tta\t_\t_\tPN\t_\t2\tnsubj\n"
      "2\tshuo\t_\t_\tVV\t_\t0\troot\n"
      "3\t,\t_\t_\tPU\t_\t2\tpunct\n"
      "4\tmuqian\t_\t_\tNT\t_\t8\ttmod\n"
      "5\tshichang\t_\t_\tNN\t_\t6\tlobj\n"
      "6\tshang\t_\t_\tLC\t_\t8\tloc\n"
      "7\tgongyou\t_\t_\tNN\t_\t8\tnsubj\n"
      "8\tchongyu\t_\t_\tVA\t_\t2\tccomp\n";
  std::vector<DepSentence> sents = parse_conll(text);
  REQUIRE(sents.size() == 1);
  const DepSentence& s = sents[0];
  CHECK(s.size() == 8);
  CHECK(s.root_index() == 2);
  CHECK(s.token(1).surface == "ta");
  CHECK(s.token(1).pos == "PN");
  CHECK(s.token(1).head == 2);
  CHECK(s.token(1).label == "nsubj");
  CHECK(s.token(8).pos == "VA");
}

TEST_CASE("parse_conll accepts single-token sentences and extra columns") {
  std::vector<DepSentence> sents =
      parse_conll("1\ta\t_\t_\tX\t_\t0\troot\textra\tcols\n");
  REQUIRE(sents.size() == 1);
  CHECK(sents[0].size() == 1);
  CHECK(sents[0].root_index() == 1);
}

TEST_CASE("parse_conll rejects malformed input") {
  CHECK_THROWS_AS(parse_conll("1\ta\t_\t_\tX\t_\t0\n"), ParseError);  // 7 columns
  CHECK_THROWS_AS(parse_conll("x\ta\t_\t_\tX\t_\t0\troot\n"), ParseError);
  // Self-loop at token 3.
  CHECK_THROWS_AS(parse_conll("1\ta\t_\t_\tX\t_\t2\tm\n"
                              "2\tb\t_\t_\tX\t_\t0\troot\n"
                              "3\tc\t_\t_\tX\t_\t3\tm\n"),
                  ParseError);
  // Cycle 1 <-> 2 with a separate root.
  CHECK_THROWS_AS(parse_conll("1\ta\t_\t_\tX\t_\t2\tm\n"
                              "2\tb\t_\t_\tX\t_\t1\tm\n"
                              "3\tc\t_\t_\tX\t_\t0\troot\n"),
                  ParseError);
  // Two roots.
  CHECK_THROWS_AS(parse_conll("1\ta\t_\t_\tX\t_\t0\troot\n"
                              "2\tb\t_\t_\tX\t_\t0\troot\n"),
                  ParseError);
}

TEST_CASE("children_of and subtree_span on the sample tree") {
  DepSentence s = fixtures::sample_sentence();
  CHECK(s.children_of(2) == std::vector<int>{1, 3, 8});
  CHECK(s.children_of(8) == std::vector<int>{4, 6, 7});
  CHECK(s.children_of(1).empty());
  CHECK(s.subtree_span(2) == std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8});
  CHECK(s.subtree_span(8) == std::vector<int>{4, 5, 6, 7, 8});
  CHECK(s.subtree_span(6) == std::vector<int>{5, 6});
  CHECK(s.subtree_span(4) == std::vector<int>{4});
}

TEST_CASE("parse_alignment shifts to 1-based and checks bounds") {
  CHECK(parse_alignment("0-0 1-2", 2, 3) ==
        std::set<std::pair<int, int>>{{1, 1}, {2, 3}});
  CHECK(parse_alignment("", 2, 3).empty());
  CHECK(parse_alignment("0-0 0-0", 1, 1).size() == 1);
  CHECK_THROWS_AS(parse_alignment("5-0", 3, 3), ParseError);
  CHECK_THROWS_AS(parse_alignment("0-7", 3, 3), ParseError);
  CHECK_THROWS_AS(parse_alignment("0x1", 3, 3), ParseError);
}

TEST_CASE("conll round-trip preserves structure") {
  Rng rng(2024);
  for (int trial = 0; trial < 30; ++trial) {
    DepSentence s = fixtures::random_sentence(rng, 1 + (int)rng.next_below(12), true);
    std::vector<DepSentence> back = parse_conll(s.to_conll());
    REQUIRE(back.size() == 1);
    REQUIRE(back[0].size() == s.size());
    for (int i = 1; i <= s.size(); ++i) {
      CHECK(back[0].token(i).surface == s.token(i).surface);
      CHECK(back[0].token(i).pos == s.token(i).pos);
      CHECK(back[0].token(i).head == s.token(i).head);
      CHECK(back[0].token(i).label == s.token(i).label);
    }
  }
}

TEST_CASE("children lists partition the tokens") {
  Rng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    DepSentence s = fixtures::random_sentence(rng, 1 + (int)rng.next_below(15));
    std::map<int, int> seen;
    for (int i = 0; i <= s.size(); ++i)
      for (int c : s.children_of(i)) ++seen[c];
    REQUIRE(seen.size() == (size_t)s.size());
    for (const auto& [tok, count] : seen) CHECK(count == 1);
  }
}

TEST_CASE("subtree spans contain their root and nest or are disjoint") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    DepSentence s = fixtures::random_sentence(rng, 2 + (int)rng.next_below(10));
    std::vector<std::vector<int>> spans;
    for (int i = 1; i <= s.size(); ++i) {
      std::vector<int> span = s.subtree_span(i);
      CHECK(std::find(span.begin(), span.end(), i) != span.end());
      spans.push_back(span);
    }
    for (size_t a = 0; a < spans.size(); ++a) {
      for (size_t b = a + 1; b < spans.size(); ++b) {
        std::vector<int> inter;
        std::set_intersection(spans[a].begin(), spans[a].end(), spans[b].begin(),
                              spans[b].end(), std::back_inserter(inter));
        bool disjoint = inter.empty();
        bool a_in_b = inter.size() == spans[a].size();
        bool b_in_a = inter.size() == spans[b].size();
        CHECK((disjoint || a_in_b || b_in_a));
      }
    }
  }
}

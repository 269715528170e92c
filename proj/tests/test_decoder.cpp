#include <doctest.h>

#include <cmath>
#include <sstream>

#include "decoder_oracle.hpp"
#include "depreorder/decoder.hpp"
#include "fixtures.hpp"

using namespace depreorder;

TEST_CASE("zones split at punctuation") {
  DepSentence s = fixtures::sample_sentence();
  CHECK(zones(s, kDefaultPunctTags) ==
        std::vector<std::pair<int, int>>{{1, 2}, {3, 3}, {4, 8}});
  CHECK(zones(s, {}) == std::vector<std::pair<int, int>>{{1, 8}});

  DepSentence all_punct = DepSentence::build({{1, ",", "PU", 2, "punct"},
                                              {2, ".", "PU", 0, "root"},
                                              {3, "!", "PU", 2, "punct"}});
  CHECK(zones(all_punct, kDefaultPunctTags) ==
        std::vector<std::pair<int, int>>{{1, 1}, {2, 2}, {3, 3}});
}

TEST_CASE("distance-based reordering penalty") {
  CHECK(dbr_penalty(2, 3) == 0);
  CHECK(dbr_penalty(2, 5) == 2);
  CHECK(dbr_penalty(5, 1) == 5);
  CHECK(dbr_penalty(0, 1) == 0);  // first phrase, monotone
}

TEST_CASE("dependency distortion penalty") {
  DepSentence s = fixtures::sample_sentence();
  std::vector<bool> covered(9, false);

  // Nothing covered yet.
  CHECK(ddp_penalty(s, covered, 0, 4, 4) == 0);

  // Cover muqian@4 (inside chongyu's subtree), then jump out to ta@1.
  covered[4] = true;
  CHECK(ddp_penalty(s, covered, 4, 1, 1) == 1);
  // Continuing inside the subtree is free.
  CHECK(ddp_penalty(s, covered, 4, 5, 6) == 0);

  // Monotone left-to-right coverage never pays.
  std::vector<bool> cov(9, false);
  for (int i = 1; i <= 8; ++i) {
    CHECK(ddp_penalty(s, cov, i - 1, i, i) == 0);
    cov[i] = true;
  }
}

TEST_CASE("sparse dependency-swap keys match the feature templates") {
  DepSentence s = fixtures::sample_sentence();

  // chongyu@8 translated first, sibling ta@1 still pending: swapped.
  CHECK(ds_feature_keys(s, 8, 1) ==
        std::vector<std::string>{"sib:ll:nsubj:ccomp:swapped",
                                 "sib:tt:PN:VA:swapped",
                                 "sib:lt:nsubj:VA:swapped",
                                 "sib:tl:PN:ccomp:swapped"});

  // shuo@2 translated, child chongyu@8 pending to the right: in order,
  // the head sits left of the child.
  CHECK(ds_feature_keys(s, 2, 8) ==
        std::vector<std::string>{"hc:ll:root:ccomp:left:in_order",
                                 "hc:tt:VV:VA:left:in_order",
                                 "hc:lt:root:VA:left:in_order",
                                 "hc:tl:VV:ccomp:left:in_order"});

  // The head stays canonical when the child is translated first.
  CHECK(ds_feature_keys(s, 8, 2) ==
        std::vector<std::string>{"hc:ll:root:ccomp:left:swapped",
                                 "hc:tt:VV:VA:left:swapped",
                                 "hc:lt:root:VA:left:swapped",
                                 "hc:tl:VV:ccomp:left:swapped"});

  CHECK_THROWS_AS(ds_feature_keys(s, 1, 5), std::invalid_argument);
  CHECK(!linked_relation(s, 1, 5).has_value());
  CHECK(linked_relation(s, 4, 6) == PairRelation::Sibling);
  CHECK(linked_relation(s, 2, 8) == PairRelation::HeadChild);
}

TEST_CASE("pair queries encode exactly like training rows") {
  DepSentence s = fixtures::sample_sentence();
  // Head-child (2, 1): child on the left.
  CHECK(pair_query(s, 2, 1, PairRelation::HeadChild, kDefaultPunctTags) ==
        std::vector<std::string>{"shuo", "VV", "root", "ta", "PN", "nsubj",
                                 "NULL", "NULL", "NULL", "-1", "0"});
  // Head-child (2, 8): child on the right, comma in between.
  CHECK(pair_query(s, 8, 2, PairRelation::HeadChild, kDefaultPunctTags) ==
        std::vector<std::string>{"shuo", "VV", "root", "NULL", "NULL", "NULL",
                                 "chongyu", "VA", "ccomp", "+2", "1"});
  // Sibling (1, 8) under shuo.
  CHECK(pair_query(s, 8, 1, PairRelation::Sibling, kDefaultPunctTags) ==
        std::vector<std::string>{"ta", "PN", "nsubj", "-1", "chongyu", "VA",
                                 "ccomp", "+2", "shuo", "VV", "1"});
}

TEST_CASE("nr_feature values follow orientation and clamp") {
  DepSentence s = fixtures::sample_sentence();

  // Zero network: yhat = 0.5 for any query and either orientation.
  ReorderNet zero = oracle::tiny_net(Relation::HeadChild, 3);
  for (int k = 0; k < kNumKinds; ++k) zero.tables[k].setZero();
  zero.W1.setZero();
  zero.b1.setZero();
  zero.W2.setZero();
  zero.b2.setZero();
  zero.w_out.setZero();
  zero.b_out = 0;
  std::vector<const ReorderNet*> members = {&zero, &zero};
  auto fwd = nr_feature(members, s, 2, 8, PairRelation::HeadChild, kDefaultPunctTags);
  auto bwd = nr_feature(members, s, 8, 2, PairRelation::HeadChild, kDefaultPunctTags);
  REQUIRE(fwd.size() == 2);
  CHECK(fwd[0] == doctest::Approx(std::log(0.5)).epsilon(1e-12));
  CHECK(bwd[0] == doctest::Approx(std::log(0.5)).epsilon(1e-12));
  CHECK(fwd[0] == fwd[1]);  // identical members, identical values

  // Swap-sure member: ~0 for the swapped orientation, log-clamped against it.
  ReorderNet sure = zero;
  sure.b_out = 60.0;
  std::vector<const ReorderNet*> one = {&sure};
  auto swapped = nr_feature(one, s, 8, 2, PairRelation::HeadChild, kDefaultPunctTags);
  auto in_order = nr_feature(one, s, 2, 8, PairRelation::HeadChild, kDefaultPunctTags);
  CHECK(swapped[0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(in_order[0] == doctest::Approx(std::log(1e-12)).epsilon(1e-6));

  // The per-sentence cache returns the same values.
  NrPredictionCache cache;
  auto c1 = nr_feature(one, s, 2, 8, PairRelation::HeadChild, kDefaultPunctTags, &cache);
  auto c2 = nr_feature(one, s, 8, 2, PairRelation::HeadChild, kDefaultPunctTags, &cache);
  CHECK(c1 == in_order);
  CHECK(c2 == swapped);
  CHECK(cache.probs.size() == 1);
}

TEST_CASE("phrase table loading and lookup") {
  std::istringstream pt(
      "yi ge ||| one ||| -0.3 -0.2 -0.1 0\n"
      "yi ||| a ||| -1 -1 -1 -1\n"
      "yi ||| one ||| -2 -1 -1 -1\n");
  PhraseTable table = PhraseTable::load(pt);
  CHECK(table.size() == 3);
  auto* hits = table.lookup({"yi"});
  REQUIRE(hits);
  CHECK(hits->size() == 2);
  CHECK((*hits)[0].tgt == std::vector<std::string>{"a"});
  // log10 in the file, natural log in memory.
  CHECK((*hits)[0].scores[0] == doctest::Approx(-std::log(10.0)).epsilon(1e-12));
  REQUIRE(table.lookup({"yi", "ge"}));
  CHECK(table.lookup({"ge"}) == nullptr);

  std::istringstream bad("yi ||| one ||| -1 -1 -1\n");  // three scores
  CHECK_THROWS_AS(PhraseTable::load(bad), ParseError);
  std::istringstream long_src("a b c d e f g h ||| x ||| 0 0 0 0\n");
  CHECK_THROWS_AS(PhraseTable::load(long_src), ParseError);
  std::istringstream nan_score("a ||| x ||| nan 0 0 0\n");
  CHECK_THROWS_AS(PhraseTable::load(nan_score), ParseError);
}

namespace {

PhraseTable two_word_table() {
  PhraseTable table;
  PhraseEntry e1{{"s1"}, {"t1"}, {0, 0, 0, 0}};
  PhraseEntry e2{{"s2"}, {"t2"}, {0, 0, 0, 0}};
  table.add(e1);
  table.add(e2);
  return table;
}

DepSentence two_word_sentence() {
  return DepSentence::build(
      {{1, "s1", "NN", 2, "nsubj"}, {2, "s2", "VV", 0, "root"}});
}

// Classifier that says "swap" for every query.
ReorderNet always_swap_net() {
  ReorderNet net = oracle::tiny_net(Relation::HeadChild, 5);
  net.b_out = 50.0;
  net.w_out.setZero();
  return net;
}

}  // namespace

TEST_CASE("a dominant swap-sure classifier forces the swapped order") {
  DepSentence s = two_word_sentence();
  PhraseTable table = two_word_table();
  NgramLm lm = NgramLm::train({{"t1"}, {"t2"}}, 2);
  ReorderNet net = always_swap_net();

  DecoderModels models;
  models.phrases = &table;
  models.lm = &lm;
  models.hc_members.push_back(&net);

  DecoderConfig cfg;
  cfg.weights["nr_hc0"] = 10.0;
  cfg.weights["dbr"] = -0.1;
  cfg.beam_size = 100;
  cfg.distortion_limit = -1;

  DecodeResult r = decode(s, models, cfg);
  CHECK(r.output == std::vector<std::string>{"t2", "t1"});
  // No sparse weights loaded: the ds feature stays at zero.
  for (const auto& [name, value] : r.features)
    if (name == "ds") CHECK(value == 0.0);

  // With the classifier off, the distortion penalty prefers monotone.
  cfg.weights["nr_hc0"] = 0.0;
  CHECK(decode(s, models, cfg).output == std::vector<std::string>{"t1", "t2"});
}

TEST_CASE("with no reordering preferences a monotone derivation is optimal") {
  Rng rng(101);
  for (int trial = 0; trial < 10; ++trial) {
    oracle::World w = oracle::make_world(rng, 5, false);
    for (auto& [name, weight] : w.cfg.weights) weight = 0.0;
    w.cfg.weights["tm0"] = 1.0;
    w.cfg.weights["word_penalty"] = -0.2;
    DecodeResult r = decode(w.sentence, w.models(), w.cfg);
    double mono = oracle::best_score(w, true);
    CHECK(r.total >= mono - 1e-9);
    double best = oracle::best_score(w);
    CHECK(r.total == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("beam search matches exhaustive enumeration on small inputs") {
  Rng rng(1234);
  for (int trial = 0; trial < 25; ++trial) {
    oracle::World w = oracle::make_world(rng, 6, trial % 3 == 0);
    double expect = oracle::best_score(w);
    REQUIRE(std::isfinite(expect));
    DecodeResult r = decode(w.sentence, w.models(), w.cfg);
    CHECK(std::abs(r.total - expect) < 1e-9);
  }
}

TEST_CASE("tight distortion limits either match the oracle or fail loudly") {
  Rng rng(77);
  int failures = 0;
  for (int trial = 0; trial < 15; ++trial) {
    oracle::World w = oracle::make_world(rng, 5, true);
    w.cfg.distortion_limit = (int)rng.next_below(2);
    double expect = oracle::best_score(w);
    if (std::isfinite(expect)) {
      DecodeResult r = decode(w.sentence, w.models(), w.cfg);
      CHECK(std::abs(r.total - expect) < 1e-9);
    } else {
      ++failures;
      CHECK_THROWS_AS(decode(w.sentence, w.models(), w.cfg), DecodeError);
    }
  }
  (void)failures;
}

TEST_CASE("derivations cover each source word exactly once, zones in order") {
  Rng rng(555);
  for (int trial = 0; trial < 20; ++trial) {
    oracle::World w = oracle::make_world(rng, 6, true);
    DecodeResult r = decode(w.sentence, w.models(), w.cfg);
    int n = w.sentence.size();
    std::vector<int> covered(n + 1, 0);
    for (const DerivationStep& step : r.steps)
      for (int i = step.start; i <= step.end; ++i) ++covered[i];
    for (int i = 1; i <= n; ++i) CHECK(covered[i] == 1);

    // Zone sequence is non-interleaved and in source order.
    std::vector<int> zone = oracle::own_zone_ids(w.sentence, w.cfg.punct_tags);
    int max_zone_done = -1;
    std::vector<bool> cov(n + 1, false);
    for (const DerivationStep& step : r.steps) {
      CHECK(zone[step.start] == zone[step.end]);
      CHECK(zone[step.start] >= max_zone_done);
      for (int i = step.start; i <= step.end; ++i) cov[i] = true;
      while (true) {
        // Track the highest fully covered zone prefix.
        int next = max_zone_done + 1;
        bool complete = true;
        bool exists = false;
        for (int i = 1; i <= n; ++i) {
          if (zone[i] == next) {
            exists = true;
            if (!cov[i]) complete = false;
          }
        }
        if (exists && complete)
          max_zone_done = next;
        else
          break;
      }
    }
  }
}

TEST_CASE("reported features add up to the reported total") {
  Rng rng(888);
  for (int trial = 0; trial < 10; ++trial) {
    oracle::World w = oracle::make_world(rng, 6, true);
    DecodeResult r = decode(w.sentence, w.models(), w.cfg);
    double total = 0;
    for (const auto& [name, value] : r.features) {
      auto it = w.cfg.weights.find(name);
      if (it != w.cfg.weights.end()) total += it->second * value;
    }
    CHECK(std::abs(total - r.total) < 1e-9);

    // Independent re-scoring of the returned derivation.
    std::vector<oracle::OracleStep> steps;
    std::vector<PhraseEntry> owned;
    owned.reserve(r.steps.size());
    for (const DerivationStep& step : r.steps) {
      PhraseEntry e;
      std::vector<std::string> src;
      for (int i = step.start; i <= step.end; ++i)
        src.push_back(w.sentence.token(i).surface);
      e.src = src;
      e.tgt = step.tgt;
      e.scores = step.scores;
      owned.push_back(e);
    }
    for (size_t i = 0; i < owned.size(); ++i)
      steps.push_back({r.steps[i].start, r.steps[i].end, &owned[i]});
    CHECK(std::abs(oracle::score_derivation(w, steps) - r.total) < 1e-9);
  }
}

TEST_CASE("raising a swap-confident weight never favors monotone") {
  // Pairwise derivation comparison: score(swapped) - score(monotone) is
  // non-decreasing in the nr weight when the classifier is swap-sure.
  DepSentence s = two_word_sentence();
  PhraseTable table = two_word_table();
  NgramLm lm = NgramLm::train({{"t1", "t2"}}, 2);
  ReorderNet net = always_swap_net();

  oracle::World w;
  w.sentence = s;
  w.table = two_word_table();
  w.lm = lm;
  w.hc_nets.push_back(net);
  w.cfg.distortion_limit = -1;
  w.cfg.beam_size = 100;
  w.cfg.weights["lm"] = 1.0;
  w.cfg.weights["dbr"] = -1.0;

  PhraseEntry mono1{{"s1"}, {"t1"}, {0, 0, 0, 0}};
  PhraseEntry mono2{{"s2"}, {"t2"}, {0, 0, 0, 0}};
  std::vector<oracle::OracleStep> monotone = {{1, 1, &mono1}, {2, 2, &mono2}};
  std::vector<oracle::OracleStep> swapped = {{2, 2, &mono2}, {1, 1, &mono1}};

  double prev_gap = -1e100;
  for (double weight : {0.0, 0.5, 1.0, 2.0, 8.0}) {
    w.cfg.weights["nr_hc0"] = weight;
    double gap = oracle::score_derivation(w, swapped) -
                 oracle::score_derivation(w, monotone);
    CHECK(gap >= prev_gap);
    prev_gap = gap;
  }
}

TEST_CASE("unknown weight names are rejected, OOV words pass through") {
  DepSentence s = two_word_sentence();
  PhraseTable table;  // empty: both words are OOV
  NgramLm lm = NgramLm::train({{"t1"}}, 2);
  DecoderModels models;
  models.phrases = &table;
  models.lm = &lm;
  DecoderConfig cfg;
  cfg.weights["lm"] = 1.0;
  DecodeResult r = decode(s, models, cfg);
  CHECK(r.output == std::vector<std::string>{"s1", "s2"});

  cfg.weights["no_such_feature"] = 1.0;
  CHECK_THROWS_AS(decode(s, models, cfg), std::invalid_argument);
}

TEST_CASE("weight and sparse-weight files parse") {
  std::istringstream ws("lm = 0.5\n# comment\ndbr = -1  # trailing\n\n");
  auto weights = load_weights(ws);
  CHECK(weights.at("lm") == 0.5);
  CHECK(weights.at("dbr") == -1.0);
  std::istringstream bad("lm 0.5\n");
  CHECK_THROWS_AS(load_weights(bad), ParseError);

  std::istringstream ds("hc:ll:root:ccomp:left:in_order\t0.25\n");
  auto dsw = load_ds_weights(ds);
  CHECK(dsw.at("hc:ll:root:ccomp:left:in_order") == 0.25);
  std::istringstream ds_bad("no-tab-here 1.0\n");
  CHECK_THROWS_AS(load_ds_weights(ds_bad), ParseError);
}

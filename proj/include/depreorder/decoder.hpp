#ifndef DEPREORDER_DECODER_HPP
#define DEPREORDER_DECODER_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "depreorder/classifier.hpp"
#include "depreorder/conll.hpp"
#include "depreorder/lm.hpp"
#include "depreorder/phrase_table.hpp"

namespace depreorder {

struct DecodeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Maximal punctuation-free spans plus singleton spans for each punctuation
// token, in source order. Reordering never crosses a zone boundary and zones
// are translated strictly left to right.
std::vector<std::pair<int, int>> zones(const DepSentence& s,
                                       const std::set<std::string>& punct_tags);

// |start(new) - end(prev) - 1|; prev_end is 0 before the first phrase.
int dbr_penalty(int prev_end, int new_start);

// 1 if the smallest not-yet-finished subtree around the last covered word
// does not contain the new span, else 0. covered is 1-based with index 0
// unused; last_covered 0 means nothing is covered yet.
int ddp_penalty(const DepSentence& s, const std::vector<bool>& covered,
                int last_covered, int new_start, int new_end);

// Word-pair orientation when x is translated and x_prime is still pending:
// the output emits x before x_prime, so the pair is swapped exactly when
// x_prime precedes x in the source.
inline bool orientation_swapped(int x, int x_prime) { return x_prime < x; }

enum class PairRelation { HeadChild, Sibling };

// Classifies the link between two distinct source words; nullopt when they
// are not linked as head-child or siblings.
std::optional<PairRelation> linked_relation(const DepSentence& s, int a, int b);

// The four sparse dependency-swap keys for a linked pair; throws on an
// unlinked pair.
std::vector<std::string> ds_feature_keys(const DepSentence& s, int x, int x_prime);

// Slot values for querying a reordering classifier on a linked pair, encoded
// exactly like a training row (head-child fills the side the child occupies;
// sibling puts the lower position on the left).
std::vector<std::string> pair_query(const DepSentence& s, int x, int x_prime,
                                    PairRelation rel,
                                    const std::set<std::string>& punct_tags);

// Per-sentence prediction cache: the query for a pair does not depend on the
// hypothesis, only the orientation applied to it does.
struct NrPredictionCache {
  std::unordered_map<std::uint64_t, std::vector<double>> probs;
};

// One value per ensemble member for the pair (x translated, x_prime
// pending): log yhat when the orientation is swapped, log (1 - yhat)
// otherwise, clamped at log 1e-12.
std::vector<double> nr_feature(const std::vector<const ReorderNet*>& members,
                               const DepSentence& s, int x, int x_prime,
                               PairRelation rel,
                               const std::set<std::string>& punct_tags,
                               NrPredictionCache* cache = nullptr);

struct DecoderModels {
  const PhraseTable* phrases = nullptr;
  const NgramLm* lm = nullptr;
  std::map<std::string, double> ds_weights;
  std::vector<const ReorderNet*> hc_members;
  std::vector<const ReorderNet*> sib_members;
};

struct DecoderConfig {
  std::map<std::string, double> weights;  // by feature name; missing = 0
  int distortion_limit = 14;              // < 0: unlimited
  int beam_size = 100;
  std::set<std::string> punct_tags = kDefaultPunctTags;
};

// Feature order of DecodeResult::features: tm0..tm3, lm, word_penalty,
// phrase_penalty, dbr, ddp, ds, nr_hc<i>..., nr_sib<i>...
std::vector<std::string> feature_names(int hc_members, int sib_members);

struct DerivationStep {
  int start = 0, end = 0;  // source span, 1-based inclusive
  std::vector<std::string> tgt;
  std::array<double, 4> scores{};  // translation scores of the phrase used
};

struct DecodeResult {
  std::vector<std::string> output;
  std::vector<DerivationStep> steps;
  std::vector<std::pair<std::string, double>> features;
  double total = 0.0;
};

// Beam-search decoding with stacks by covered-word count, hypothesis
// recombination on (coverage, last span end, LM state), and histogram
// pruning. Throws DecodeError when no complete hypothesis exists.
DecodeResult decode(const DepSentence& s, const DecoderModels& models,
                    const DecoderConfig& cfg);

// Reads "name = value" lines; '#' starts a comment.
std::map<std::string, double> load_weights(std::istream& is);
// Reads "key<TAB>weight" lines.
std::map<std::string, double> load_ds_weights(std::istream& is);

}  // namespace depreorder

#endif  // DEPREORDER_DECODER_HPP

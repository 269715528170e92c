#include "depreorder/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <unordered_map>

#include "depreorder/util.hpp"

namespace depreorder {

namespace {
constexpr double kProbFloor = 1e-12;
constexpr double kPassThroughScore = -13.815510557964274;  // ln(1e-6)
}  // namespace

std::vector<std::pair<int, int>> zones(const DepSentence& s,
                                       const std::set<std::string>& punct_tags) {
  std::vector<std::pair<int, int>> out;
  int open = 0;  // start of a pending non-punct zone, 0 = none
  for (int i = 1; i <= s.size(); ++i) {
    if (punct_tags.count(s.token(i).pos)) {
      if (open) {
        out.emplace_back(open, i - 1);
        open = 0;
      }
      out.emplace_back(i, i);
    } else if (!open) {
      open = i;
    }
  }
  if (open) out.emplace_back(open, s.size());
  return out;
}

int dbr_penalty(int prev_end, int new_start) {
  return std::abs(new_start - prev_end - 1);
}

int ddp_penalty(const DepSentence& s, const std::vector<bool>& covered,
                int last_covered, int new_start, int new_end) {
  if (last_covered == 0) return 0;
  int node = last_covered;
  while (node != 0) {
    std::vector<int> span = s.subtree_span(node);
    bool complete = true;
    for (int i : span) {
      if (!covered[i]) {
        complete = false;
        break;
      }
    }
    if (!complete) {
      // Smallest unfinished subtree around the last covered word; leaving it
      // is an interruption.
      std::vector<bool> in_span(s.size() + 1, false);
      for (int i : span) in_span[i] = true;
      for (int i = new_start; i <= new_end; ++i)
        if (!in_span[i]) return 1;
      return 0;
    }
    node = s.token(node).head;
  }
  return 0;
}

std::optional<PairRelation> linked_relation(const DepSentence& s, int a, int b) {
  if (a == b) return std::nullopt;
  if (s.token(a).head == b || s.token(b).head == a) return PairRelation::HeadChild;
  if (s.token(a).head != 0 && s.token(a).head == s.token(b).head)
    return PairRelation::Sibling;
  return std::nullopt;
}

std::vector<std::string> ds_feature_keys(const DepSentence& s, int x, int x_prime) {
  auto rel = linked_relation(s, x, x_prime);
  if (!rel)
    throw std::invalid_argument("tokens " + std::to_string(x) + " and " +
                                std::to_string(x_prime) + " are not linked");
  const char* o = orientation_swapped(x, x_prime) ? "swapped" : "in_order";
  std::vector<std::string> keys;
  if (*rel == PairRelation::HeadChild) {
    int h = s.token(x).head == x_prime ? x_prime : x;
    int c = h == x ? x_prime : x;
    const char* p = h < c ? "left" : "right";
    const Token& th = s.token(h);
    const Token& tc = s.token(c);
    std::string tail = std::string(":") + p + ":" + o;
    keys.push_back("hc:ll:" + th.label + ":" + tc.label + tail);
    keys.push_back("hc:tt:" + th.pos + ":" + tc.pos + tail);
    keys.push_back("hc:lt:" + th.label + ":" + tc.pos + tail);
    keys.push_back("hc:tl:" + th.pos + ":" + tc.label + tail);
  } else {
    int l = std::min(x, x_prime), r = std::max(x, x_prime);
    const Token& tl = s.token(l);
    const Token& tr = s.token(r);
    std::string tail = std::string(":") + o;
    keys.push_back("sib:ll:" + tl.label + ":" + tr.label + tail);
    keys.push_back("sib:tt:" + tl.pos + ":" + tr.pos + tail);
    keys.push_back("sib:lt:" + tl.label + ":" + tr.pos + tail);
    keys.push_back("sib:tl:" + tl.pos + ":" + tr.label + tail);
  }
  return keys;
}

std::vector<std::string> pair_query(const DepSentence& s, int x, int x_prime,
                                    PairRelation rel,
                                    const std::set<std::string>& punct_tags) {
  if (rel == PairRelation::HeadChild) {
    int h = s.token(x).head == x_prime ? x_prime : x;
    int c = h == x ? x_prime : x;
    const Token& th = s.token(h);
    const Token& tc = s.token(c);
    std::string dist = distance_string(signed_distance(s, h, c));
    std::string punct = punct_between(s, h, h, c, punct_tags) ? "1" : "0";
    if (c < h)
      return {th.surface, th.pos, th.label, tc.surface, tc.pos, tc.label,
              kNull,      kNull,  kNull,    dist,       punct};
    return {th.surface, th.pos, th.label, kNull, kNull, kNull,
            tc.surface, tc.pos, tc.label, dist,  punct};
  }
  int l = std::min(x, x_prime), r = std::max(x, x_prime);
  int h = s.token(l).head;
  const Token& tl = s.token(l);
  const Token& tr = s.token(r);
  const Token& th = s.token(h);
  return {tl.surface, tl.pos, tl.label, distance_string(signed_distance(s, h, l)),
          tr.surface, tr.pos, tr.label, distance_string(signed_distance(s, h, r)),
          th.surface, th.pos, punct_between(s, h, l, r, punct_tags) ? "1" : "0"};
}

namespace {

const std::vector<double>& cached_predictions(
    const DepSentence& s, int a, int b, PairRelation rel,
    const std::vector<const ReorderNet*>& members,
    const std::set<std::string>& punct_tags, NrPredictionCache& cache) {
  std::uint64_t key = (static_cast<std::uint64_t>(std::min(a, b)) << 32) |
                      static_cast<std::uint64_t>(std::max(a, b)) << 1 |
                      (rel == PairRelation::Sibling ? 1 : 0);
  auto it = cache.probs.find(key);
  if (it != cache.probs.end()) return it->second;
  std::vector<std::string> query = pair_query(s, a, b, rel, punct_tags);
  std::vector<double> yhat(members.size());
  for (size_t m = 0; m < members.size(); ++m)
    yhat[m] = predict_swap(*members[m], query);
  return cache.probs.emplace(key, std::move(yhat)).first->second;
}

}  // namespace

std::vector<double> nr_feature(const std::vector<const ReorderNet*>& members,
                               const DepSentence& s, int x, int x_prime,
                               PairRelation rel,
                               const std::set<std::string>& punct_tags,
                               NrPredictionCache* cache) {
  NrPredictionCache local;
  const std::vector<double>& yhat = cached_predictions(
      s, x, x_prime, rel, members, punct_tags, cache ? *cache : local);
  bool swapped = orientation_swapped(x, x_prime);
  std::vector<double> values(members.size());
  for (size_t m = 0; m < members.size(); ++m) {
    double p = swapped ? yhat[m] : 1.0 - yhat[m];
    values[m] = std::log(std::max(p, kProbFloor));
  }
  return values;
}

std::vector<std::string> feature_names(int hc_members, int sib_members) {
  std::vector<std::string> names = {"tm0", "tm1",          "tm2",
                                    "tm3", "lm",           "word_penalty",
                                    "phrase_penalty",      "dbr",
                                    "ddp", "ds"};
  for (int i = 0; i < hc_members; ++i) names.push_back("nr_hc" + std::to_string(i));
  for (int i = 0; i < sib_members; ++i) names.push_back("nr_sib" + std::to_string(i));
  return names;
}

namespace {

struct Hyp {
  std::vector<std::uint64_t> cov;
  int count = 0;
  int last_start = 0, last_end = 0;
  NgramLm::State lm_state;
  std::vector<double> feat;
  double total = 0.0;
  int parent = -1;
  const PhraseEntry* entry = nullptr;
};

bool covered(const std::vector<std::uint64_t>& cov, int i) {
  return (cov[(i - 1) / 64] >> ((i - 1) % 64)) & 1;
}

void set_covered(std::vector<std::uint64_t>& cov, int i) {
  cov[(i - 1) / 64] |= std::uint64_t(1) << ((i - 1) % 64);
}

struct KeyHash {
  size_t operator()(const std::vector<std::uint64_t>& v) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint64_t x : v) {
      h ^= x;
      h *= 0x100000001b3ULL;
    }
    return static_cast<size_t>(h);
  }
};

std::vector<std::uint64_t> recomb_key(const Hyp& h) {
  std::vector<std::uint64_t> key = h.cov;
  key.push_back(static_cast<std::uint64_t>(h.last_end));
  for (int id : h.lm_state.ids) key.push_back(static_cast<std::uint64_t>(id) + 3);
  return key;
}

}  // namespace

DecodeResult decode(const DepSentence& s, const DecoderModels& models,
                    const DecoderConfig& cfg) {
  if (!models.phrases || !models.lm)
    throw std::invalid_argument("decoder needs a phrase table and a language model");
  if (cfg.beam_size < 1) throw std::invalid_argument("beam size must be >= 1");
  const int n = s.size();
  const int words = static_cast<int>((n + 63) / 64);

  const std::vector<std::string> names =
      feature_names(static_cast<int>(models.hc_members.size()),
                    static_cast<int>(models.sib_members.size()));
  const int nfeat = static_cast<int>(names.size());
  std::vector<double> weights(nfeat, 0.0);
  for (int f = 0; f < nfeat; ++f) {
    auto it = cfg.weights.find(names[f]);
    if (it != cfg.weights.end()) weights[f] = it->second;
  }
  for (const auto& [name, w] : cfg.weights) {
    if (std::find(names.begin(), names.end(), name) == names.end())
      throw std::invalid_argument("unknown feature weight '" + name + "'");
  }
  enum { F_TM0 = 0, F_LM = 4, F_WP = 5, F_PP = 6, F_DBR = 7, F_DDP = 8, F_DS = 9 };
  const int f_nr_hc = 10;
  const int f_nr_sib = f_nr_hc + static_cast<int>(models.hc_members.size());

  // Pass-through entries keep OOV words translatable.
  std::vector<PhraseEntry> passthrough;
  for (int i = 1; i <= n; ++i) {
    std::vector<std::string> one{s.token(i).surface};
    if (!models.phrases->lookup(one)) {
      PhraseEntry e;
      e.src = one;
      e.tgt = one;
      e.scores = {kPassThroughScore, kPassThroughScore, kPassThroughScore,
                  kPassThroughScore};
      passthrough.push_back(std::move(e));
    }
  }
  std::unordered_map<std::string, std::vector<PhraseEntry>> pass_index;
  for (const PhraseEntry& e : passthrough) pass_index[e.src[0]].push_back(e);

  const std::vector<std::pair<int, int>> zs = zones(s, cfg.punct_tags);
  std::vector<int> zone_of(n + 1, 0);
  for (size_t z = 0; z < zs.size(); ++z)
    for (int i = zs[z].first; i <= zs[z].second; ++i) zone_of[i] = static_cast<int>(z);

  std::vector<bool> is_punct(n + 1, false);
  for (int i = 1; i <= n; ++i)
    is_punct[i] = cfg.punct_tags.count(s.token(i).pos) > 0;

  // Linked partners of each word, used when firing DS/NR.
  std::vector<std::vector<std::pair<int, PairRelation>>> partners(n + 1);
  for (int i = 1; i <= n; ++i) {
    if (is_punct[i]) continue;
    int h = s.token(i).head;
    if (h != 0 && !is_punct[h]) {
      partners[i].emplace_back(h, PairRelation::HeadChild);
      partners[h].emplace_back(i, PairRelation::HeadChild);
    }
  }
  for (int h = 1; h <= n; ++h) {
    const std::vector<int>& kids = s.children_of(h);
    for (size_t a = 0; a < kids.size(); ++a) {
      if (is_punct[kids[a]]) continue;
      for (size_t b = a + 1; b < kids.size(); ++b) {
        if (is_punct[kids[b]]) continue;
        partners[kids[a]].emplace_back(kids[b], PairRelation::Sibling);
        partners[kids[b]].emplace_back(kids[a], PairRelation::Sibling);
      }
    }
  }

  NrPredictionCache cache;
  std::vector<Hyp> arena;
  std::vector<std::vector<int>> stacks(n + 1);
  std::vector<std::unordered_map<std::vector<std::uint64_t>, int, KeyHash>> seen(n + 1);

  Hyp init;
  init.cov.assign(words, 0);
  init.lm_state = models.lm->begin();
  init.feat.assign(nfeat, 0.0);
  arena.push_back(init);
  stacks[0].push_back(0);

  auto push_hyp = [&](Hyp&& h, int level_to) {
    std::vector<std::uint64_t> key = recomb_key(h);
    auto& index = seen[level_to];
    auto it = index.find(key);
    if (it == index.end()) {
      arena.push_back(std::move(h));
      stacks[level_to].push_back(static_cast<int>(arena.size() - 1));
      index.emplace(std::move(key), static_cast<int>(stacks[level_to].size() - 1));
    } else if (h.total > arena[stacks[level_to][it->second]].total) {
      arena.push_back(std::move(h));
      stacks[level_to][it->second] = static_cast<int>(arena.size() - 1);
    }
  };

  for (int level = 0; level < n; ++level) {
    std::vector<int>& stack = stacks[level];
    if (static_cast<int>(stack.size()) > cfg.beam_size) {
      std::stable_sort(stack.begin(), stack.end(), [&](int a, int b) {
        return arena[a].total > arena[b].total;
      });
      stack.resize(cfg.beam_size);
    }
    for (size_t hi_idx = 0; hi_idx < stack.size(); ++hi_idx) {
      const int hyp_id = stack[hi_idx];
      // push_hyp may reallocate the arena, so expand from a copy.
      const Hyp hyp = arena[hyp_id];
      std::vector<bool> cov_before(n + 1, false);
      for (int i = 1; i <= n; ++i) cov_before[i] = covered(hyp.cov, i);
      for (int start = 1; start <= n; ++start) {
        if (cov_before[start]) continue;
        // Zone order: everything left of this zone must already be covered.
        int z = zone_of[start];
        bool zone_ok = true;
        for (int i = 1; i < zs[z].first; ++i) {
          if (!cov_before[i]) {
            zone_ok = false;
            break;
          }
        }
        if (!zone_ok) continue;
        if (cfg.distortion_limit >= 0 &&
            dbr_penalty(hyp.last_end, start) > cfg.distortion_limit)
          continue;
        int max_end = std::min(zs[z].second, start + kMaxPhraseLen - 1);
        std::vector<std::string> src;
        for (int end = start; end <= max_end; ++end) {
          if (cov_before[end]) break;
          src.push_back(s.token(end).surface);
          const std::vector<PhraseEntry>* options = models.phrases->lookup(src);
          if (!options && src.size() == 1) {
            auto it = pass_index.find(src[0]);
            if (it != pass_index.end()) options = &it->second;
          }
          if (!options) continue;

          // Span-level feature deltas shared by all phrase options.
          int dbr = dbr_penalty(hyp.last_end, start);
          int ddp = ddp_penalty(s, cov_before, hyp.last_end, start, end);

          std::vector<std::pair<int, double>> fired;  // (feature index, delta)
          double ds_delta = 0.0;
          for (int x = start; x <= end; ++x) {
            if (is_punct[x]) continue;
            for (const auto& [xp, rel] : partners[x]) {
              if (xp >= start && xp <= end) continue;
              if (cov_before[xp]) continue;
              for (const std::string& key : ds_feature_keys(s, x, xp)) {
                auto it = models.ds_weights.find(key);
                if (it != models.ds_weights.end()) ds_delta += it->second;
              }
              const auto& members = rel == PairRelation::HeadChild
                                        ? models.hc_members
                                        : models.sib_members;
              if (!members.empty()) {
                std::vector<double> values =
                    nr_feature(members, s, x, xp, rel, cfg.punct_tags, &cache);
                int base = rel == PairRelation::HeadChild ? f_nr_hc : f_nr_sib;
                for (size_t m = 0; m < members.size(); ++m)
                  fired.emplace_back(base + static_cast<int>(m), values[m]);
              }
            }
          }

          for (const PhraseEntry& entry : *options) {
            Hyp next;
            next.cov = hyp.cov;
            for (int i = start; i <= end; ++i) set_covered(next.cov, i);
            next.count = hyp.count + (end - start + 1);
            next.last_start = start;
            next.last_end = end;
            next.feat = hyp.feat;
            for (int f = 0; f < 4; ++f) next.feat[F_TM0 + f] += entry.scores[f];
            next.lm_state = hyp.lm_state;
            double lm_delta = 0.0;
            for (const std::string& w : entry.tgt) {
              int wid = models.lm->word_id(w);
              lm_delta += models.lm->log_prob_id(next.lm_state, wid);
              next.lm_state = models.lm->advance_id(next.lm_state, wid);
            }
            next.feat[F_WP] += static_cast<double>(entry.tgt.size());
            next.feat[F_PP] += 1.0;
            next.feat[F_DBR] += dbr;
            next.feat[F_DDP] += ddp;
            next.feat[F_DS] += ds_delta;
            for (const auto& [f, delta] : fired) next.feat[f] += delta;
            if (next.count == n) lm_delta += models.lm->end_log_prob(next.lm_state);
            next.feat[F_LM] += lm_delta;
            next.total = 0.0;
            for (int f = 0; f < nfeat; ++f) next.total += weights[f] * next.feat[f];
            next.parent = hyp_id;
            next.entry = &entry;
            push_hyp(std::move(next), next.count);
          }
        }
      }
    }
  }

  const std::vector<int>& final_stack = stacks[n];
  if (final_stack.empty()) {
    std::string head;
    for (int i = 1; i <= std::min(n, 5); ++i) {
      if (i > 1) head += ' ';
      head += s.token(i).surface;
    }
    throw DecodeError("no complete hypothesis for sentence '" + head +
                      (n > 5 ? " ..." : "") + "' (distortion limit too tight?)");
  }
  int best = final_stack[0];
  for (int id : final_stack)
    if (arena[id].total > arena[best].total) best = id;

  DecodeResult result;
  result.total = arena[best].total;
  for (int f = 0; f < nfeat; ++f)
    result.features.emplace_back(names[f], arena[best].feat[f]);
  for (int id = best; arena[id].parent >= 0; id = arena[id].parent) {
    DerivationStep step;
    step.start = arena[id].last_start;
    step.end = arena[id].last_end;
    step.tgt = arena[id].entry->tgt;
    step.scores = arena[id].entry->scores;
    result.steps.push_back(std::move(step));
  }
  std::reverse(result.steps.begin(), result.steps.end());
  for (const DerivationStep& step : result.steps)
    result.output.insert(result.output.end(), step.tgt.begin(), step.tgt.end());
  return result;
}

std::map<std::string, double> load_weights(std::istream& is) {
  std::map<std::string, double> weights;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::vector<std::string> toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks.size() != 3 || toks[1] != "=")
      throw ParseError("weights line " + std::to_string(line_no) +
                       ": expected 'name = value'");
    try {
      weights[toks[0]] = std::stod(toks[2]);
    } catch (const std::exception&) {
      throw ParseError("weights line " + std::to_string(line_no) + ": bad value '" +
                       toks[2] + "'");
    }
  }
  return weights;
}

std::map<std::string, double> load_ds_weights(std::istream& is) {
  std::map<std::string, double> weights;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError("sparse weight line " + std::to_string(line_no) +
                       ": expected 'key<TAB>weight'");
    try {
      weights[line.substr(0, tab)] = std::stod(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw ParseError("sparse weight line " + std::to_string(line_no) +
                       ": bad weight");
    }
  }
  return weights;
}

}  // namespace depreorder

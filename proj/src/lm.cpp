#include "depreorder/lm.hpp"

#include <cmath>
#include <stdexcept>

#include "depreorder/util.hpp"

namespace depreorder {

namespace {
constexpr int kBosId = 0;
constexpr int kEosId = 1;
constexpr int kUnkId = 2;
constexpr double kSmooth = 0.1;
}  // namespace

size_t NgramLm::VecHash::operator()(const std::vector<int>& v) const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (int x : v) {
    h ^= static_cast<std::uint64_t>(x) + 0x9e3779b9ULL;
    h *= 0x100000001b3ULL;
  }
  return static_cast<size_t>(h);
}

NgramLm NgramLm::train(const std::vector<std::vector<std::string>>& corpus, int order) {
  if (order < 1) throw std::invalid_argument("LM order must be >= 1");
  NgramLm lm;
  lm.order_ = order;
  lm.words_ = {kBos, kEos, kUnkWord};
  lm.index_ = {{kBos, kBosId}, {kEos, kEosId}, {kUnkWord, kUnkId}};
  lm.grams_.resize(order);
  lm.ctx_.resize(order);

  for (const auto& sentence : corpus) {
    std::vector<int> padded(order - 1, kBosId);
    for (const std::string& w : sentence) {
      auto it = lm.index_.find(w);
      int id;
      if (it == lm.index_.end()) {
        id = static_cast<int>(lm.words_.size());
        lm.words_.push_back(w);
        lm.index_.emplace(w, id);
      } else {
        id = it->second;
      }
      padded.push_back(id);
    }
    padded.push_back(kEosId);
    // Count k-grams ending at every predicted position (never at <s>).
    for (size_t pos = order - 1; pos < padded.size(); ++pos) {
      for (int k = 1; k <= order; ++k) {
        if (pos + 1 < static_cast<size_t>(k)) break;
        std::vector<int> gram(padded.begin() + (pos + 1 - k), padded.begin() + pos + 1);
        ++lm.grams_[k - 1][gram];
        gram.pop_back();
        ++lm.ctx_[k - 1][gram];
      }
    }
  }
  return lm;
}

NgramLm::State NgramLm::begin() const {
  return State{std::vector<int>(order_ - 1, kBosId)};
}

int NgramLm::word_id(const std::string& w) const {
  auto it = index_.find(w);
  return it == index_.end() ? kUnkId : it->second;
}

double NgramLm::prob_id(const State& state, int wid) const {
  // Prediction vocabulary excludes <s>.
  double p = 1.0 / (words_.size() - 1);
  int max_ctx = std::min(order_ - 1, static_cast<int>(state.ids.size()));
  for (int k = 1; k <= max_ctx + 1 && k <= order_; ++k) {
    std::vector<int> ctx(state.ids.end() - (k - 1), state.ids.end());
    auto cit = ctx_[k - 1].find(ctx);
    long long ctx_count = cit == ctx_[k - 1].end() ? 0 : cit->second;
    ctx.push_back(wid);
    auto git = grams_[k - 1].find(ctx);
    long long gram_count = git == grams_[k - 1].end() ? 0 : git->second;
    p = (gram_count + kSmooth * p) / (ctx_count + kSmooth);
  }
  return p;
}

double NgramLm::log_prob_id(const State& state, int wid) const {
  return std::log(prob_id(state, wid));
}

double NgramLm::log_prob(const State& state, const std::string& w) const {
  return log_prob_id(state, word_id(w));
}

NgramLm::State NgramLm::advance_id(const State& state, int wid) const {
  State next = state;
  next.ids.push_back(wid);
  if (static_cast<int>(next.ids.size()) > order_ - 1)
    next.ids.erase(next.ids.begin(),
                   next.ids.end() - (order_ - 1 > 0 ? order_ - 1 : 0));
  return next;
}

NgramLm::State NgramLm::advance(const State& state, const std::string& w) const {
  return advance_id(state, word_id(w));
}

double NgramLm::end_log_prob(const State& state) const {
  return log_prob_id(state, kEosId);
}

double NgramLm::sentence_log_prob(const std::vector<std::string>& words) const {
  State state = begin();
  double total = 0.0;
  for (const std::string& w : words) {
    int wid = word_id(w);
    total += log_prob_id(state, wid);
    state = advance_id(state, wid);
  }
  return total + end_log_prob(state);
}

std::vector<std::string> NgramLm::prediction_vocab() const {
  return std::vector<std::string>(words_.begin() + 1, words_.end());
}

}  // namespace depreorder

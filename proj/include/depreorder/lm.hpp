#ifndef DEPREORDER_LM_HPP
#define DEPREORDER_LM_HPP

#include <string>
#include <unordered_map>
#include <vector>

namespace depreorder {

// Count-based n-gram model with interpolated additive smoothing over a
// uniform base: p_k(w|ctx) = (c(ctx.w) + 0.1 p_{k-1}(w|ctx')) / (c(ctx) + 0.1).
// Probabilities are normalized over the prediction vocabulary (training
// words, </s> and <unk>; <s> is never predicted).
class NgramLm {
 public:
  static constexpr const char* kBos = "<s>";
  static constexpr const char* kEos = "</s>";
  static constexpr const char* kUnkWord = "<unk>";

  static NgramLm train(const std::vector<std::vector<std::string>>& corpus, int order);

  int order() const { return order_; }

  struct State {
    std::vector<int> ids;  // up to order-1 most recent words, oldest first
    bool operator==(const State&) const = default;
  };

  State begin() const;
  int word_id(const std::string& w) const;  // <unk> id when unseen
  double log_prob_id(const State& state, int wid) const;  // natural log
  double log_prob(const State& state, const std::string& w) const;
  State advance_id(const State& state, int wid) const;
  State advance(const State& state, const std::string& w) const;
  double end_log_prob(const State& state) const;

  // log p(w1..wn </s> | <s>), the value the lm feature accumulates for a
  // complete translation.
  double sentence_log_prob(const std::vector<std::string>& words) const;

  // Words a state can continue with: training words, </s>, <unk>.
  std::vector<std::string> prediction_vocab() const;

 private:
  struct VecHash {
    size_t operator()(const std::vector<int>& v) const;
  };

  double prob_id(const State& state, int wid) const;

  int order_ = 1;
  std::vector<std::string> words_;  // id -> word; 0=<s>, 1=</s>, 2=<unk>
  std::unordered_map<std::string, int> index_;
  // grams_[k]: counts of (k+1)-grams; ctx_[k]: total continuations of the
  // corresponding k-token context.
  std::vector<std::unordered_map<std::vector<int>, long long, VecHash>> grams_;
  std::vector<std::unordered_map<std::vector<int>, long long, VecHash>> ctx_;
};

}  // namespace depreorder

#endif  // DEPREORDER_LM_HPP

#include "depreorder/bleu.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <stdexcept>

namespace depreorder {

namespace {

std::string lower(const std::string& s) {
  std::string out = s;
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

using NgramCounts = std::map<std::vector<std::string>, long long>;

NgramCounts count_ngrams(const std::vector<std::string>& words, int n) {
  NgramCounts counts;
  for (size_t i = 0; i + n <= words.size(); ++i)
    ++counts[std::vector<std::string>(words.begin() + i, words.begin() + i + n)];
  return counts;
}

}  // namespace

double bleu(const std::vector<std::vector<std::string>>& hypotheses,
            const std::vector<std::vector<std::vector<std::string>>>& references,
            int max_n, bool case_insensitive) {
  if (hypotheses.empty()) throw std::invalid_argument("empty hypothesis set");
  if (hypotheses.size() != references.size())
    throw std::invalid_argument("hypothesis/reference segment count mismatch");
  if (max_n < 1) throw std::invalid_argument("max_n must be >= 1");

  std::vector<long long> matched(max_n, 0), total(max_n, 0);
  long long hyp_len = 0, ref_len = 0;

  for (size_t seg = 0; seg < hypotheses.size(); ++seg) {
    if (references[seg].empty())
      throw std::invalid_argument("segment " + std::to_string(seg + 1) +
                                  " has no references");
    std::vector<std::string> hyp = hypotheses[seg];
    std::vector<std::vector<std::string>> refs = references[seg];
    if (case_insensitive) {
      for (std::string& w : hyp) w = lower(w);
      for (auto& ref : refs)
        for (std::string& w : ref) w = lower(w);
    }

    hyp_len += static_cast<long long>(hyp.size());
    size_t shortest = refs[0].size();
    for (const auto& ref : refs) shortest = std::min(shortest, ref.size());
    ref_len += static_cast<long long>(shortest);

    for (int n = 1; n <= max_n; ++n) {
      NgramCounts hyp_counts = count_ngrams(hyp, n);
      NgramCounts clip;
      for (const auto& ref : refs) {
        for (const auto& [gram, count] : count_ngrams(ref, n)) {
          auto it = clip.find(gram);
          if (it == clip.end())
            clip.emplace(gram, count);
          else
            it->second = std::max(it->second, count);
        }
      }
      for (const auto& [gram, count] : hyp_counts) {
        total[n - 1] += count;
        auto it = clip.find(gram);
        if (it != clip.end()) matched[n - 1] += std::min(count, it->second);
      }
    }
  }

  double log_precision = 0.0;
  for (int n = 0; n < max_n; ++n) {
    if (matched[n] == 0 || total[n] == 0) return 0.0;
    log_precision += std::log(static_cast<double>(matched[n]) / total[n]);
  }
  log_precision /= max_n;

  double bp = hyp_len < ref_len && hyp_len > 0
                  ? std::exp(1.0 - static_cast<double>(ref_len) / hyp_len)
                  : 1.0;
  return bp * std::exp(log_precision);
}

}  // namespace depreorder

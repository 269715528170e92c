#ifndef DEPREORDER_PHRASE_TABLE_HPP
#define DEPREORDER_PHRASE_TABLE_HPP

#include <array>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace depreorder {

constexpr int kMaxPhraseLen = 7;

struct PhraseEntry {
  std::vector<std::string> src;  // 1..7 tokens
  std::vector<std::string> tgt;
  std::array<double, 4> scores{};  // natural log (file stores log10)
};

// Exact-match source phrase lookup over "src ||| tgt ||| s1 s2 s3 s4" lines.
class PhraseTable {
 public:
  static PhraseTable load(std::istream& is);

  void add(PhraseEntry entry);
  const std::vector<PhraseEntry>* lookup(const std::vector<std::string>& src) const;
  size_t size() const { return count_; }

  static std::string key_of(const std::vector<std::string>& src);

 private:
  std::unordered_map<std::string, std::vector<PhraseEntry>> entries_;
  size_t count_ = 0;
};

}  // namespace depreorder

#endif  // DEPREORDER_PHRASE_TABLE_HPP

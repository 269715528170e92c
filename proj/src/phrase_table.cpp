#include "depreorder/phrase_table.hpp"

#include <cmath>
#include <istream>
#include <sstream>
#include <stdexcept>

#include "depreorder/conll.hpp"

namespace depreorder {

namespace {
const double kLn10 = std::log(10.0);

std::vector<std::string> split_on_bars(const std::string& line) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    size_t pos = line.find("|||", start);
    if (pos == std::string::npos) {
      parts.push_back(line.substr(start));
      break;
    }
    parts.push_back(line.substr(start, pos - start));
    start = pos + 3;
  }
  return parts;
}
}  // namespace

std::string PhraseTable::key_of(const std::vector<std::string>& src) {
  std::string key;
  for (size_t i = 0; i < src.size(); ++i) {
    if (i) key += '\x1f';
    key += src[i];
  }
  return key;
}

void PhraseTable::add(PhraseEntry entry) {
  if (entry.src.empty() || entry.src.size() > kMaxPhraseLen)
    throw ParseError("source phrase length must be 1.." +
                     std::to_string(kMaxPhraseLen));
  entries_[key_of(entry.src)].push_back(std::move(entry));
  ++count_;
}

const std::vector<PhraseEntry>* PhraseTable::lookup(
    const std::vector<std::string>& src) const {
  auto it = entries_.find(key_of(src));
  return it == entries_.end() ? nullptr : &it->second;
}

PhraseTable PhraseTable::load(std::istream& is) {
  PhraseTable table;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> parts = split_on_bars(line);
    if (parts.size() != 3)
      throw ParseError("phrase table line " + std::to_string(line_no) +
                       ": expected 'src ||| tgt ||| scores'");
    PhraseEntry entry;
    entry.src = split_ws(parts[0]);
    entry.tgt = split_ws(parts[1]);
    std::vector<std::string> score_toks = split_ws(parts[2]);
    if (score_toks.size() != 4)
      throw ParseError("phrase table line " + std::to_string(line_no) +
                       ": expected 4 scores, got " + std::to_string(score_toks.size()));
    for (int i = 0; i < 4; ++i) {
      try {
        size_t pos = 0;
        double s = std::stod(score_toks[i], &pos);
        if (pos != score_toks[i].size() || !std::isfinite(s)) throw std::invalid_argument("");
        entry.scores[i] = s * kLn10;
      } catch (const std::exception&) {
        throw ParseError("phrase table line " + std::to_string(line_no) +
                         ": bad score '" + score_toks[i] + "'");
      }
    }
    try {
      table.add(std::move(entry));
    } catch (const ParseError& e) {
      throw ParseError("phrase table line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return table;
}

}  // namespace depreorder

#include "depreorder/conll.hpp"

#include <algorithm>
#include <sstream>

namespace depreorder {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream iss(line);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

static std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t pos = line.find('\t', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

DepSentence DepSentence::build(std::vector<Token> tokens) {
  const int n = static_cast<int>(tokens.size());
  if (n == 0) throw ParseError("empty sentence");
  for (int i = 0; i < n; ++i) {
    const Token& t = tokens[i];
    if (t.index != i + 1)
      throw ParseError("token indices not contiguous at position " +
                       std::to_string(i + 1));
    if (t.surface.empty())
      throw ParseError("empty surface form at token " + std::to_string(t.index));
    if (t.head < 0 || t.head > n)
      throw ParseError("head out of range at token " + std::to_string(t.index));
    if (t.head == t.index)
      throw ParseError("token " + std::to_string(t.index) + " is its own head");
  }

  DepSentence s;
  s.tokens_ = std::move(tokens);
  s.children_.assign(n + 1, {});
  s.root_ = 0;
  for (const Token& t : s.tokens_) {
    if (t.head == 0) {
      if (s.root_ != 0)
        throw ParseError("multiple roots (tokens " + std::to_string(s.root_) +
                         " and " + std::to_string(t.index) + ")");
      s.root_ = t.index;
    }
    s.children_[t.head].push_back(t.index);
  }
  if (s.root_ == 0) throw ParseError("no root token");

  // Acyclicity + connectivity: every token must reach the root by head links.
  for (int i = 1; i <= n; ++i) {
    int cur = i, steps = 0;
    while (cur != 0) {
      cur = s.tokens_[cur - 1].head;
      if (++steps > n)
        throw ParseError("head cycle involving token " + std::to_string(i));
    }
  }
  return s;
}

std::vector<int> DepSentence::subtree_span(int i) const {
  std::vector<int> span;
  std::vector<int> stack{i};
  while (!stack.empty()) {
    int cur = stack.back();
    stack.pop_back();
    span.push_back(cur);
    for (int c : children_.at(cur)) stack.push_back(c);
  }
  std::sort(span.begin(), span.end());
  return span;
}

bool DepSentence::is_ancestor(int anc, int node) const {
  int cur = node;
  while (cur != 0) {
    if (cur == anc) return true;
    cur = tokens_[cur - 1].head;
  }
  return anc == 0;
}

std::string DepSentence::to_conll() const {
  std::ostringstream os;
  for (const Token& t : tokens_) {
    os << t.index << "\t" << t.surface << "\t_\t_\t" << t.pos << "\t_\t"
       << t.head << "\t" << t.label << "\n";
  }
  return os.str();
}

static bool parse_int(const std::string& s, int* out) {
  if (s.empty()) return false;
  size_t pos = 0;
  try {
    *out = std::stoi(s, &pos);
  } catch (const std::exception&) {
    return false;
  }
  return pos == s.size();
}

std::vector<DepSentence> parse_conll(const std::string& text) {
  std::vector<DepSentence> sentences;
  std::vector<Token> block;
  int line_no = 0;
  int block_start = 0;

  auto flush = [&]() {
    if (block.empty()) return;
    try {
      sentences.push_back(DepSentence::build(std::move(block)));
    } catch (const ParseError& e) {
      throw ParseError("sentence " + std::to_string(sentences.size() + 1) +
                       " (starting at line " + std::to_string(block_start) +
                       "): " + e.what());
    }
    block.clear();
  };

  std::istringstream iss(text);
  std::string line;
  while (std::getline(iss, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    if (block.empty()) block_start = line_no;
    std::vector<std::string> cols = split_tabs(line);
    if (cols.size() < 8)
      throw ParseError("line " + std::to_string(line_no) + ": expected >= 8 columns, got " +
                       std::to_string(cols.size()));
    Token t;
    if (!parse_int(cols[0], &t.index))
      throw ParseError("line " + std::to_string(line_no) + ": bad token id '" + cols[0] + "'");
    t.surface = cols[1];
    t.pos = cols[4];
    if (!parse_int(cols[6], &t.head))
      throw ParseError("line " + std::to_string(line_no) + ": bad head '" + cols[6] + "'");
    t.label = cols[7];
    block.push_back(std::move(t));
  }
  flush();
  return sentences;
}

std::set<std::pair<int, int>> parse_alignment(const std::string& line,
                                              int src_len, int tgt_len) {
  std::set<std::pair<int, int>> links;
  for (const std::string& tok : split_ws(line)) {
    size_t dash = tok.find('-');
    int i = -1, j = -1;
    if (dash == std::string::npos || !parse_int(tok.substr(0, dash), &i) ||
        !parse_int(tok.substr(dash + 1), &j))
      throw ParseError("bad alignment pair '" + tok + "'");
    if (i < 0 || i >= src_len || j < 0 || j >= tgt_len)
      throw ParseError("alignment pair '" + tok + "' out of range for lengths " +
                       std::to_string(src_len) + "x" + std::to_string(tgt_len));
    links.emplace(i + 1, j + 1);
  }
  return links;
}

std::vector<std::vector<std::string>> parse_token_lines(const std::string& text) {
  std::vector<std::vector<std::string>> out;
  std::istringstream iss(text);
  std::string line;
  while (std::getline(iss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(split_ws(line));
  }
  return out;
}

}  // namespace depreorder

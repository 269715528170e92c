#include "depreorder/extract.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>

namespace depreorder {

int signed_distance(const DepSentence& s, int head, int child) {
  const std::vector<int>& kids = s.children_of(head);
  if (std::find(kids.begin(), kids.end(), child) == kids.end())
    throw std::invalid_argument("token " + std::to_string(child) +
                                " is not a dependent of " + std::to_string(head));
  int lo = std::min(head, child), hi = std::max(head, child);
  bool between = false;
  for (int k : kids) {
    if (k > lo && k < hi) {
      between = true;
      break;
    }
  }
  int mag = between ? 2 : 1;
  return child < head ? -mag : mag;
}

bool punct_between(const DepSentence& s, int head, int a, int b,
                   const std::set<std::string>& punct_tags) {
  int lo = std::min(a, b), hi = std::max(a, b);
  for (int k : s.children_of(head)) {
    if (k > lo && k < hi && punct_tags.count(s.token(k).pos)) return true;
  }
  return false;
}

std::optional<int> target_order_label(const AlignedPair& p, int i, int j) {
  int ri = -1, rj = -1;
  for (const auto& [src, tgt] : p.links) {
    if (src == i && (ri < 0 || tgt < ri)) ri = tgt;
    if (src == j && (rj < 0 || tgt < rj)) rj = tgt;
  }
  if (ri < 0 || rj < 0 || ri == rj) return std::nullopt;
  return rj < ri ? 1 : 0;
}

static WordTriple triple_of(const DepSentence& s, int i) {
  const Token& t = s.token(i);
  return {t.surface, t.pos, t.label};
}

std::vector<HeadChildInstance> extract_head_child(
    const AlignedPair& p, const std::set<std::string>& punct_tags) {
  const DepSentence& s = p.source;
  std::vector<HeadChildInstance> out;
  for (int h = 1; h <= s.size(); ++h) {
    if (punct_tags.count(s.token(h).pos)) continue;
    for (int c : s.children_of(h)) {
      if (punct_tags.count(s.token(c).pos)) continue;
      auto label = target_order_label(p, std::min(h, c), std::max(h, c));
      if (!label) continue;
      HeadChildInstance inst;
      inst.head = triple_of(s, h);
      if (c < h)
        inst.child_left = triple_of(s, c);
      else
        inst.child_right = triple_of(s, c);
      inst.dist = signed_distance(s, h, c);
      inst.punct = punct_between(s, h, h, c, punct_tags);
      inst.label = *label;
      out.push_back(std::move(inst));
    }
  }
  return out;
}

std::vector<SiblingInstance> extract_sibling(
    const AlignedPair& p, const std::set<std::string>& punct_tags) {
  const DepSentence& s = p.source;
  std::vector<SiblingInstance> out;
  for (int h = 1; h <= s.size(); ++h) {
    const std::vector<int>& kids = s.children_of(h);
    for (size_t a = 0; a < kids.size(); ++a) {
      if (punct_tags.count(s.token(kids[a]).pos)) continue;
      for (size_t b = a + 1; b < kids.size(); ++b) {
        if (punct_tags.count(s.token(kids[b]).pos)) continue;
        int l = kids[a], r = kids[b];  // children are in surface order
        auto label = target_order_label(p, l, r);
        if (!label) continue;
        SiblingInstance inst;
        inst.left = triple_of(s, l);
        inst.left_dist = signed_distance(s, h, l);
        inst.right = triple_of(s, r);
        inst.right_dist = signed_distance(s, h, r);
        inst.head_word = s.token(h).surface;
        inst.head_pos = s.token(h).pos;
        inst.punct = punct_between(s, h, l, r, punct_tags);
        inst.label = *label;
        out.push_back(std::move(inst));
      }
    }
  }
  return out;
}

std::string distance_string(int dist) {
  switch (dist) {
    case -2: return "-2";
    case -1: return "-1";
    case 1: return "+1";
    case 2: return "+2";
  }
  throw std::invalid_argument("bad distance category " + std::to_string(dist));
}

int parse_distance(const std::string& s) {
  if (s == "-2") return -2;
  if (s == "-1") return -1;
  if (s == "+1" || s == "1") return 1;
  if (s == "+2" || s == "2") return 2;
  throw ParseError("bad distance field '" + s + "'");
}

InstanceRow to_row(const HeadChildInstance& inst) {
  InstanceRow row;
  row.values = {inst.head.word,        inst.head.pos,        inst.head.label,
                inst.child_left.word,  inst.child_left.pos,  inst.child_left.label,
                inst.child_right.word, inst.child_right.pos, inst.child_right.label,
                distance_string(inst.dist), inst.punct ? "1" : "0"};
  row.label = inst.label;
  return row;
}

InstanceRow to_row(const SiblingInstance& inst) {
  InstanceRow row;
  row.values = {inst.left.word,  inst.left.pos,  inst.left.label,
                distance_string(inst.left_dist),
                inst.right.word, inst.right.pos, inst.right.label,
                distance_string(inst.right_dist),
                inst.head_word,  inst.head_pos,  inst.punct ? "1" : "0"};
  row.label = inst.label;
  return row;
}

static void write_row(std::ostream& os, const InstanceRow& row) {
  for (const std::string& v : row.values) os << v << '\t';
  os << row.label << '\n';
}

void write_instances(std::ostream& os, const std::vector<HeadChildInstance>& rows) {
  os << kHeadChildHeader << '\n';
  for (const auto& r : rows) write_row(os, to_row(r));
}

void write_instances(std::ostream& os, const std::vector<SiblingInstance>& rows) {
  os << kSiblingHeader << '\n';
  for (const auto& r : rows) write_row(os, to_row(r));
}

InstanceFile read_instances(std::istream& is) {
  InstanceFile file;
  std::string line;
  if (!std::getline(is, line)) throw ParseError("empty instance file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeadChildHeader && line != kSiblingHeader)
    throw ParseError("unknown relation header '" + line + "'");
  file.relation = line;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
      size_t pos = line.find('\t', start);
      if (pos == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, pos - start));
      start = pos + 1;
    }
    if (fields.size() != 12)
      throw ParseError("instance line " + std::to_string(line_no) +
                       ": expected 12 fields, got " + std::to_string(fields.size()));
    InstanceRow row;
    row.values.assign(fields.begin(), fields.end() - 1);
    const std::string& lab = fields.back();
    if (lab != "0" && lab != "1")
      throw ParseError("instance line " + std::to_string(line_no) +
                       ": bad label '" + lab + "'");
    row.label = lab == "1" ? 1 : 0;
    file.rows.push_back(std::move(row));
  }
  return file;
}

}  // namespace depreorder

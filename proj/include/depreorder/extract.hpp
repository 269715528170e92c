#ifndef DEPREORDER_EXTRACT_HPP
#define DEPREORDER_EXTRACT_HPP

#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "depreorder/conll.hpp"

namespace depreorder {

inline const std::set<std::string> kDefaultPunctTags = {"PU"};

// (word, POS, dependency label) of one source token, or the NULL slot.
struct WordTriple {
  std::string word = kNull;
  std::string pos = kNull;
  std::string label = kNull;
  bool is_null() const { return word == kNull && pos == kNull && label == kNull; }
};

// A head-child training row: the child occupies exactly one of the two
// side slots, chosen by its surface position relative to the head.
struct HeadChildInstance {
  WordTriple head;
  WordTriple child_left;
  WordTriple child_right;
  int dist = 0;     // signed distance category, one of {-2,-1,+1,+2}
  bool punct = false;
  int label = 0;    // 1 = swapped, 0 = in order
};

// A sibling training row: two children of a common head, lower source
// position first.
struct SiblingInstance {
  WordTriple left;
  int left_dist = 0;
  WordTriple right;
  int right_dist = 0;
  std::string head_word;
  std::string head_pos;
  bool punct = false;
  int label = 0;
};

// Signed distance category between a head and one of its children:
// sign = side of the child, magnitude 2 iff another child of the same head
// lies strictly between them. Throws std::invalid_argument if child is not
// a dependent of head.
int signed_distance(const DepSentence& s, int head, int child);

// True iff some child of `head` with a POS tag in punct_tags lies strictly
// between positions a and b.
bool punct_between(const DepSentence& s, int head, int a, int b,
                   const std::set<std::string>& punct_tags);

// Order label for source positions i < j from the target positions of their
// aligned words (representative position = minimum aligned index).
// nullopt = skip: a word is unaligned or both share a representative.
std::optional<int> target_order_label(const AlignedPair& p, int i, int j);

std::vector<HeadChildInstance> extract_head_child(
    const AlignedPair& p, const std::set<std::string>& punct_tags = kDefaultPunctTags);

std::vector<SiblingInstance> extract_sibling(
    const AlignedPair& p, const std::set<std::string>& punct_tags = kDefaultPunctTags);

// Canonical rendering of a distance category ("-2", "-1", "+1", "+2").
std::string distance_string(int dist);
int parse_distance(const std::string& s);

// Instance files: a header line naming the relation type, then one row per
// line with 12 tab-separated fields in schema order.
inline const std::string kHeadChildHeader = "head-child";
inline const std::string kSiblingHeader = "sibling";

void write_instances(std::ostream& os, const std::vector<HeadChildInstance>& rows);
void write_instances(std::ostream& os, const std::vector<SiblingInstance>& rows);

// A parsed instance row in slot order (see classifier.hpp), label last.
struct InstanceRow {
  std::vector<std::string> values;
  int label = 0;
};

struct InstanceFile {
  std::string relation;  // kHeadChildHeader or kSiblingHeader
  std::vector<InstanceRow> rows;
};

InstanceFile read_instances(std::istream& is);

InstanceRow to_row(const HeadChildInstance& inst);
InstanceRow to_row(const SiblingInstance& inst);

}  // namespace depreorder

#endif  // DEPREORDER_EXTRACT_HPP

#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "depreorder/bleu.hpp"
#include "depreorder/util.hpp"

using namespace depreorder;

namespace {
std::vector<std::string> words(const char* text) {
  std::vector<std::string> out;
  std::string cur;
  for (const char* p = text;; ++p) {
    if (*p == ' ' || *p == '\0') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
      if (*p == '\0') break;
    } else {
      cur += *p;
    }
  }
  return out;
}
}  // namespace

TEST_CASE("identical hypothesis scores 1") {
  auto h = words("the cat sat on the mat");
  CHECK(bleu({h}, {{h}}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("all precisions 1 with a longer reference leaves only the brevity penalty") {
  auto h = words("a b c d");
  auto r = words("a b c d e");
  double expect = std::exp(1.0 - 5.0 / 4.0);
  CHECK(bleu({h}, {{r}}) == doctest::Approx(expect).epsilon(1e-9));
  CHECK(bleu({h}, {{r}}) == doctest::Approx(0.7788).epsilon(1e-4));
}

TEST_CASE("a missing 4-gram zeroes the score") {
  auto h = words("a b c x");
  auto r = words("a b c d");
  CHECK(bleu({h}, {{r}}) == 0.0);
}

TEST_CASE("case folds unless asked not to") {
  auto h = words("The CAT");
  auto r = words("the cat");
  CHECK(bleu({h}, {{r}}, 2) == doctest::Approx(1.0));
  CHECK(bleu({h}, {{r}}, 2, false) == 0.0);
}

TEST_CASE("corpus BLEU is invariant to segment order") {
  auto h1 = words("a b c d");
  auto h2 = words("x y z w q");
  auto r1 = words("a b e d");
  auto r2 = words("x y z p q r");
  double fwd = bleu({h1, h2}, {{r1}, {r2}}, 2);
  double rev = bleu({h2, h1}, {{r2}, {r1}}, 2);
  CHECK(fwd == doctest::Approx(rev).epsilon(1e-12));
}

TEST_CASE("duplicated references change nothing") {
  auto h = words("a b c d");
  auto r = words("a b c d e");
  CHECK(bleu({h}, {{r}}) == doctest::Approx(bleu({h}, {{r, r}})).epsilon(1e-12));
}

TEST_CASE("brevity penalty uses the shortest reference") {
  // Against a single long reference, the penalty applies.
  auto h = words("a b c d e");
  auto r_long = words("a b c d e f g h");
  CHECK(bleu({h}, {{r_long}}) == doctest::Approx(std::exp(1.0 - 8.0 / 5.0)).epsilon(1e-9));
  // Adding a 2-word reference makes the shortest length 2 < 5, so the
  // penalty vanishes; a closest-length rule would still penalize via 6.
  auto r6 = words("a b c d e f");
  auto r2 = words("x y");
  CHECK(bleu({h}, {{r6, r2}}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("degenerate inputs are rejected") {
  CHECK_THROWS_AS(bleu({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(bleu({words("a")}, {{}}), std::invalid_argument);
  CHECK_THROWS_AS(bleu({words("a")}, {}), std::invalid_argument);
}

#ifndef DEPREORDER_BLEU_HPP
#define DEPREORDER_BLEU_HPP

#include <string>
#include <vector>

namespace depreorder {

// Corpus-level BLEU: geometric mean of clipped n-gram precisions for
// n = 1..max_n times the brevity penalty exp(min(0, 1 - r/c)), where r sums
// the shortest reference length per segment. No smoothing; any zero
// precision gives 0. Throws std::invalid_argument on an empty corpus or a
// segment without references.
double bleu(const std::vector<std::vector<std::string>>& hypotheses,
            const std::vector<std::vector<std::vector<std::string>>>& references,
            int max_n = 4, bool case_insensitive = true);

}  // namespace depreorder

#endif  // DEPREORDER_BLEU_HPP

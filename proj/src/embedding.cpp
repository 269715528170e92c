#include "depreorder/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "depreorder/util.hpp"

namespace depreorder {

const std::vector<double>* EmbeddingTable::find(const std::string& w) const {
  auto it = index.find(w);
  return it == index.end() ? nullptr : &vectors[it->second];
}

int EmbeddingTable::put(const std::string& w, std::vector<double> v) {
  auto it = index.find(w);
  if (it != index.end()) {
    vectors[it->second] = std::move(v);
    return it->second;
  }
  int id = static_cast<int>(words.size());
  words.push_back(w);
  index.emplace(w, id);
  vectors.push_back(std::move(v));
  return id;
}

std::vector<std::vector<std::string>> gen_dep_context_corpus(
    const std::vector<DepSentence>& sentences) {
  std::vector<std::vector<std::string>> corpus;
  for (const DepSentence& s : sentences) {
    for (int c = 1; c <= s.size(); ++c) {
      int h = s.token(c).head;
      std::string head_word = h == 0 ? kRootWord : s.token(h).surface;
      std::string head_label = h == 0 ? kRootLabel : s.token(h).label;
      int g = h == 0 ? 0 : s.token(h).head;
      std::string grand_word = g == 0 ? kRootWord : s.token(g).surface;
      corpus.push_back({head_label + kHeadLabelMark, grand_word + kGrandheadMark,
                        head_word, s.token(c).surface,
                        s.token(c).label + kChildLabelMark});
    }
  }
  return corpus;
}

namespace {

struct Vocab {
  std::vector<std::string> words;  // sorted by (count desc, word asc)
  std::vector<long long> counts;
  std::unordered_map<std::string, int> index;
};

Vocab build_vocab(const std::vector<std::vector<std::string>>& corpus, int min_count) {
  std::map<std::string, long long> counts;
  for (const auto& line : corpus)
    for (const auto& tok : line) ++counts[tok];
  std::vector<std::pair<std::string, long long>> items(counts.begin(), counts.end());
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocab v;
  for (auto& [word, count] : items) {
    if (count < min_count) continue;
    v.index.emplace(word, static_cast<int>(v.words.size()));
    v.words.push_back(word);
    v.counts.push_back(count);
  }
  return v;
}

std::vector<double> noise_cdf(const Vocab& v) {
  std::vector<double> cdf(v.words.size());
  double total = 0;
  for (size_t i = 0; i < v.counts.size(); ++i)
    total += std::pow(static_cast<double>(v.counts[i]), 0.75);
  double acc = 0;
  for (size_t i = 0; i < v.counts.size(); ++i) {
    acc += std::pow(static_cast<double>(v.counts[i]), 0.75) / total;
    cdf[i] = acc;
  }
  if (!cdf.empty()) cdf.back() = 1.0;
  return cdf;
}

int draw(const std::vector<double>& cdf, Rng& rng) {
  double u = rng.next_double();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) --it;
  return static_cast<int>(it - cdf.begin());
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Word vectors are initialized from a stream keyed by the word itself, so
// vocabulary order does not affect initial values.
std::vector<double> init_word_vector(const std::string& word, int dim,
                                     unsigned long long seed) {
  Rng rng(splitmix64(seed) ^ fnv1a(word));
  std::vector<double> v(dim);
  double r = 0.5 / dim;
  for (double& x : v) x = rng.uniform(-r, r);
  return v;
}

struct TrainShared {
  const Vocab* vocab;
  const std::vector<double>* cdf;
  const SkipGramConfig* cfg;
  std::vector<std::vector<double>>* in;
  std::vector<std::vector<double>>* out;
};

void train_lines(const TrainShared& sh,
                 const std::vector<std::vector<int>>& lines,
                 const std::vector<std::uint64_t>& line_keys, int epoch) {
  const SkipGramConfig& cfg = *sh.cfg;
  const int dim = cfg.dim;
  std::vector<double> grad(dim);
  for (size_t li = 0; li < lines.size(); ++li) {
    const std::vector<int>& line = lines[li];
    Rng rng(splitmix64(cfg.seed) ^ splitmix64(line_keys[li] + 0x9e37 * (epoch + 1)));
    for (int t = 0; t < static_cast<int>(line.size()); ++t) {
      for (int d = -cfg.window; d <= cfg.window; ++d) {
        if (d == 0) continue;
        int c = t + d;
        if (c < 0 || c >= static_cast<int>(line.size())) continue;
        std::vector<double>& v = (*sh.in)[line[t]];
        std::fill(grad.begin(), grad.end(), 0.0);
        for (int k = -1; k < cfg.negatives; ++k) {
          int target;
          double label;
          if (k < 0) {
            target = line[c];
            label = 1.0;
          } else {
            target = draw(*sh.cdf, rng);
            if (target == line[c]) continue;
            label = 0.0;
          }
          std::vector<double>& u = (*sh.out)[target];
          double dot = 0;
          for (int i = 0; i < dim; ++i) dot += u[i] * v[i];
          double g = sigmoid(dot) - label;
          for (int i = 0; i < dim; ++i) {
            grad[i] += g * u[i];
            u[i] -= cfg.learning_rate * g * v[i];
          }
        }
        for (int i = 0; i < dim; ++i) v[i] -= cfg.learning_rate * grad[i];
      }
    }
  }
}

}  // namespace

SkipGramModel train_skipgram(const std::vector<std::vector<std::string>>& corpus,
                             const SkipGramConfig& cfg) {
  if (cfg.dim < 1 || cfg.window < 1 || cfg.negatives < 1)
    throw std::invalid_argument("bad skip-gram config");
  Vocab vocab = build_vocab(corpus, cfg.min_count);
  if (vocab.words.empty())
    throw std::runtime_error("empty vocabulary after min-count filtering");

  // Lines with out-of-vocabulary tokens removed; windows apply to what is left.
  std::vector<std::vector<int>> lines;
  std::vector<std::uint64_t> line_keys;
  for (const auto& raw : corpus) {
    std::vector<int> ids;
    std::uint64_t key = 0xcbf29ce484222325ULL;
    for (const auto& tok : raw) {
      auto it = vocab.index.find(tok);
      if (it == vocab.index.end()) continue;
      ids.push_back(it->second);
      key = fnv1a(tok, fnv1a("\x1f", key));
    }
    if (ids.size() < 2) continue;
    lines.push_back(std::move(ids));
    line_keys.push_back(key);
  }

  // Lines are processed in canonical order and negative draws are keyed by
  // line content, so the result does not depend on the input line order.
  {
    std::vector<size_t> perm(lines.size());
    for (size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::sort(perm.begin(), perm.end(),
              [&](size_t a, size_t b) { return lines[a] < lines[b]; });
    std::vector<std::vector<int>> sorted_lines(lines.size());
    std::vector<std::uint64_t> sorted_keys(lines.size());
    for (size_t i = 0; i < perm.size(); ++i) {
      sorted_lines[i] = std::move(lines[perm[i]]);
      sorted_keys[i] = line_keys[perm[i]];
    }
    lines = std::move(sorted_lines);
    line_keys = std::move(sorted_keys);
  }

  std::vector<std::vector<double>> in(vocab.words.size());
  std::vector<std::vector<double>> out(vocab.words.size(),
                                       std::vector<double>(cfg.dim, 0.0));
  for (size_t i = 0; i < vocab.words.size(); ++i)
    in[i] = init_word_vector(vocab.words[i], cfg.dim, cfg.seed);

  std::vector<double> cdf = noise_cdf(vocab);
  TrainShared sh{&vocab, &cdf, &cfg, &in, &out};

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.threads <= 1) {
      train_lines(sh, lines, line_keys, epoch);
    } else {
      // Hogwild over line shards; concurrent unsynchronized updates make this
      // mode non-deterministic.
      std::vector<std::thread> workers;
      size_t shard = (lines.size() + cfg.threads - 1) / cfg.threads;
      for (int w = 0; w < cfg.threads; ++w) {
        size_t lo = std::min(lines.size(), w * shard);
        size_t hi = std::min(lines.size(), lo + shard);
        if (lo >= hi) break;
        workers.emplace_back([&, lo, hi]() {
          std::vector<std::vector<int>> slice(lines.begin() + lo, lines.begin() + hi);
          std::vector<std::uint64_t> keys(line_keys.begin() + lo, line_keys.begin() + hi);
          train_lines(sh, slice, keys, epoch);
        });
      }
      for (auto& t : workers) t.join();
    }
  }

  SkipGramModel model;
  model.input.dim = cfg.dim;
  model.output.dim = cfg.dim;
  for (size_t i = 0; i < vocab.words.size(); ++i) {
    model.input.put(vocab.words[i], in[i]);
    model.output.put(vocab.words[i], out[i]);
  }
  return model;
}

static bool is_marked(const std::string& w) {
  auto ends_with = [&](const std::string& suf) {
    return w.size() >= suf.size() && w.compare(w.size() - suf.size(), suf.size(), suf) == 0;
  };
  return ends_with(kHeadLabelMark) || ends_with(kGrandheadMark) || ends_with(kChildLabelMark);
}

static void add_specials(EmbeddingTable& table) {
  std::vector<double> centroid(table.dim, 0.0);
  long long n = 0;
  for (size_t i = 0; i < table.words.size(); ++i) {
    if (table.words[i] == kNull || table.words[i] == kUnk) continue;
    for (int d = 0; d < table.dim; ++d) centroid[d] += table.vectors[i][d];
    ++n;
  }
  if (n > 0)
    for (double& x : centroid) x /= static_cast<double>(n);
  table.put(kNull, std::vector<double>(table.dim, 0.0));
  table.put(kUnk, std::move(centroid));
}

EmbeddingTable filter_context_vocab(const EmbeddingTable& raw) {
  EmbeddingTable table;
  table.dim = raw.dim;
  for (size_t i = 0; i < raw.words.size(); ++i) {
    if (is_marked(raw.words[i])) continue;
    table.put(raw.words[i], raw.vectors[i]);
  }
  add_specials(table);
  return table;
}

EmbeddingTable random_table(const std::vector<std::string>& vocab, int dim,
                            unsigned long long seed) {
  EmbeddingTable table;
  table.dim = dim;
  double r = std::sqrt(6.0 / dim);
  for (const std::string& w : vocab) {
    Rng rng(splitmix64(seed ^ 0x5bd1e995ULL) ^ fnv1a(w));
    std::vector<double> v(dim);
    for (double& x : v) x = rng.uniform(-r, r);
    table.put(w, std::move(v));
  }
  add_specials(table);
  return table;
}

void save_embeddings(std::ostream& os, const EmbeddingTable& table) {
  os << table.size() << ' ' << table.dim << '\n';
  for (size_t i = 0; i < table.words.size(); ++i) {
    os << table.words[i];
    for (double x : table.vectors[i]) os << ' ' << fmt_double(x);
    os << '\n';
  }
}

EmbeddingTable load_embeddings(std::istream& is) {
  int v = 0, d = 0;
  if (!(is >> v >> d) || v < 0 || d < 1)
    throw ParseError("bad embedding file header");
  EmbeddingTable table;
  table.dim = d;
  for (int i = 0; i < v; ++i) {
    std::string word;
    if (!(is >> word))
      throw ParseError("embedding file truncated at entry " + std::to_string(i + 1));
    std::vector<double> vec(d);
    for (int k = 0; k < d; ++k) {
      if (!(is >> vec[k]))
        throw ParseError("embedding dimension mismatch for word '" + word + "'");
    }
    table.put(word, std::move(vec));
  }
  return table;
}

}  // namespace depreorder

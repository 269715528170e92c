#include "depreorder/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace depreorder {

namespace {
constexpr double kClamp = 1e-12;

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double clamp_prob(double p) {
  return std::min(1.0 - kClamp, std::max(kClamp, p));
}
}  // namespace

std::string relation_name(Relation r) {
  return r == Relation::HeadChild ? kHeadChildHeader : kSiblingHeader;
}

Relation relation_from_name(const std::string& name) {
  if (name == kHeadChildHeader) return Relation::HeadChild;
  if (name == kSiblingHeader) return Relation::Sibling;
  throw std::invalid_argument("unknown relation '" + name + "'");
}

const FeatureSpec& FeatureSpec::head_child() {
  static const FeatureSpec spec{
      Relation::HeadChild,
      {{"head_word", SlotKind::Word},    {"head_pos", SlotKind::Pos},
       {"head_label", SlotKind::Label},  {"left_word", SlotKind::Word},
       {"left_pos", SlotKind::Pos},      {"left_label", SlotKind::Label},
       {"right_word", SlotKind::Word},   {"right_pos", SlotKind::Pos},
       {"right_label", SlotKind::Label}, {"distance", SlotKind::Distance},
       {"punct", SlotKind::Boolean}}};
  return spec;
}

const FeatureSpec& FeatureSpec::sibling() {
  static const FeatureSpec spec{
      Relation::Sibling,
      {{"left_word", SlotKind::Word},   {"left_pos", SlotKind::Pos},
       {"left_label", SlotKind::Label}, {"left_dist", SlotKind::Distance},
       {"right_word", SlotKind::Word},  {"right_pos", SlotKind::Pos},
       {"right_label", SlotKind::Label},{"right_dist", SlotKind::Distance},
       {"head_word", SlotKind::Word},   {"head_pos", SlotKind::Pos},
       {"punct", SlotKind::Boolean}}};
  return spec;
}

const FeatureSpec& FeatureSpec::of(Relation r) {
  return r == Relation::HeadChild ? head_child() : sibling();
}

int VocabTable::add(const std::string& item) {
  auto it = index.find(item);
  if (it != index.end()) return it->second;
  int id = static_cast<int>(items.size());
  items.push_back(item);
  index.emplace(item, id);
  return id;
}

int VocabTable::lookup(const std::string& item) const {
  auto it = index.find(item);
  if (it != index.end()) return it->second;
  if (unk >= 0) return unk;
  throw std::invalid_argument("value '" + item + "' not in closed vocabulary");
}

std::vector<int> encode(const ReorderNet& net, const std::vector<std::string>& values) {
  if (values.size() != net.spec.slots.size())
    throw std::invalid_argument("expected " + std::to_string(net.spec.slots.size()) +
                                " slot values, got " + std::to_string(values.size()));
  std::vector<int> ids(values.size());
  for (size_t s = 0; s < values.size(); ++s)
    ids[s] = net.vocabs[kind_index(net.spec.slots[s].second)].lookup(values[s]);
  return ids;
}

namespace {

Eigen::VectorXd input_vector(const ReorderNet& net, const std::vector<int>& ids) {
  Eigen::VectorXd e(net.input_dim());
  for (size_t s = 0; s < ids.size(); ++s) {
    const RowMatrix& table = net.tables[kind_index(net.spec.slots[s].second)];
    e.segment(s * net.emb_dim, net.emb_dim) = table.row(ids[s]).transpose();
  }
  return e;
}

double forward_on(const ReorderNet& net, const Eigen::VectorXd& e) {
  Eigen::VectorXd h1 = (net.W1 * e + net.b1).cwiseMax(0.0);
  Eigen::VectorXd h2 = (net.W2 * h1 + net.b2).cwiseMax(0.0);
  return sigmoid(net.w_out.dot(h2) + net.b_out);
}

}  // namespace

double forward(const ReorderNet& net, const std::vector<int>& ids) {
  return forward_on(net, input_vector(net, ids));
}

double forward_train(const ReorderNet& net, const std::vector<int>& ids, Rng& rng) {
  Eigen::VectorXd e = input_vector(net, ids);
  double p = net.dropout_rate;
  if (p > 0.0) {
    double scale = 1.0 / (1.0 - p);
    for (int i = 0; i < e.size(); ++i)
      e[i] = rng.next_double() < p ? 0.0 : e[i] * scale;
  }
  return forward_on(net, e);
}

double predict_swap(const ReorderNet& net, const std::vector<std::string>& values) {
  return forward(net, encode(net, values));
}

namespace {

struct BatchPass {
  Eigen::MatrixXd E;       // masked input, input_dim x B
  Eigen::MatrixXd H1p, H2p;
  Eigen::MatrixXd H1, H2;
  Eigen::RowVectorXd yhat;
};

BatchPass forward_batch(const ReorderNet& net, const EncodedBatch& batch,
                        const DropoutMasks* masks) {
  const int B = static_cast<int>(batch.ids.size());
  BatchPass p;
  p.E.resize(net.input_dim(), B);
  for (int c = 0; c < B; ++c) p.E.col(c) = input_vector(net, batch.ids[c]);
  if (masks) {
    double scale = net.dropout_rate > 0 ? 1.0 / (1.0 - net.dropout_rate) : 1.0;
    for (int c = 0; c < B; ++c) {
      const std::vector<double>& m = (*masks)[c];
      for (int i = 0; i < p.E.rows(); ++i) p.E(i, c) *= m[i] * scale;
    }
  }
  p.H1p = net.W1 * p.E;
  p.H1p.colwise() += net.b1;
  p.H1 = p.H1p.cwiseMax(0.0);
  p.H2p = net.W2 * p.H1;
  p.H2p.colwise() += net.b2;
  p.H2 = p.H2p.cwiseMax(0.0);
  Eigen::RowVectorXd z = net.w_out.transpose() * p.H2;
  z.array() += net.b_out;
  p.yhat = z.unaryExpr([](double v) { return sigmoid(v); });
  return p;
}

double loss_of(const Eigen::RowVectorXd& yhat, const std::vector<double>& labels) {
  double total = 0.0;
  for (int i = 0; i < yhat.size(); ++i) {
    // The clamp would silently absorb a NaN prediction; keep it visible.
    if (std::isnan(yhat[i])) return std::numeric_limits<double>::quiet_NaN();
    double p = clamp_prob(yhat[i]);
    total += labels[i] > 0.5 ? -std::log(p) : -std::log(1.0 - p);
  }
  return total / yhat.size();
}

}  // namespace

double batch_loss(const ReorderNet& net, const EncodedBatch& batch,
                  const DropoutMasks* masks) {
  if (batch.ids.empty()) throw std::invalid_argument("empty batch");
  BatchPass p = forward_batch(net, batch, masks);
  return loss_of(p.yhat, batch.labels);
}

Gradients batch_grad(const ReorderNet& net, const EncodedBatch& batch,
                     const DropoutMasks* masks) {
  if (batch.ids.empty()) throw std::invalid_argument("empty batch");
  const int B = static_cast<int>(batch.ids.size());
  BatchPass p = forward_batch(net, batch, masks);

  Eigen::RowVectorXd dz(B);
  for (int i = 0; i < B; ++i) dz[i] = (p.yhat[i] - batch.labels[i]) / B;

  Gradients g;
  g.w_out = p.H2 * dz.transpose();
  g.b_out = dz.sum();

  Eigen::MatrixXd D2 = (net.w_out * dz).cwiseProduct(
      p.H2p.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; }));
  g.W2.noalias() = D2 * p.H1.transpose();
  g.b2 = D2.rowwise().sum();

  Eigen::MatrixXd D1 = (net.W2.transpose() * D2).cwiseProduct(
      p.H1p.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; }));
  g.W1.noalias() = D1 * p.E.transpose();
  g.b1 = D1.rowwise().sum();

  Eigen::MatrixXd GE = net.W1.transpose() * D1;  // input_dim x B
  double scale = masks && net.dropout_rate > 0 ? 1.0 / (1.0 - net.dropout_rate) : 1.0;
  const int dim = net.emb_dim;
  for (int c = 0; c < B; ++c) {
    for (size_t s = 0; s < batch.ids[c].size(); ++s) {
      int kind = kind_index(net.spec.slots[s].second);
      auto [it, inserted] = g.tables[kind].try_emplace(batch.ids[c][s],
                                                       Eigen::VectorXd::Zero(dim));
      Eigen::VectorXd seg = GE.col(c).segment(s * dim, dim);
      if (masks) {
        const std::vector<double>& m = (*masks)[c];
        for (int i = 0; i < dim; ++i) seg[i] *= m[s * dim + i] * scale;
      }
      it->second += seg;
    }
  }
  return g;
}

namespace {

std::vector<double> random_row(SlotKind kind, const std::string& item, int dim,
                               double range, unsigned long long seed) {
  Rng rng(splitmix64(seed + 17 * (kind_index(kind) + 1)) ^ fnv1a(item));
  std::vector<double> v(dim);
  for (double& x : v) x = rng.uniform(-range, range);
  return v;
}

// Deterministic vocabularies from the training rows: open kinds get NULL and
// UNK; word vocabulary is frequency-capped.
std::array<VocabTable, kNumKinds> build_vocabs(const FeatureSpec& spec,
                                               const std::vector<InstanceRow>& rows,
                                               int vocab_limit) {
  std::map<std::string, long long> word_counts;
  std::map<std::string, int> pos_set, label_set;
  for (const InstanceRow& row : rows) {
    for (size_t s = 0; s < spec.slots.size(); ++s) {
      const std::string& v = row.values[s];
      switch (spec.slots[s].second) {
        case SlotKind::Word:
          if (v != kNull && v != kUnk) ++word_counts[v];
          break;
        case SlotKind::Pos:
          if (v != kNull && v != kUnk) pos_set[v] = 1;
          break;
        case SlotKind::Label:
          if (v != kNull && v != kUnk) label_set[v] = 1;
          break;
        default:
          break;
      }
    }
  }

  std::array<VocabTable, kNumKinds> vocabs;

  std::vector<std::pair<std::string, long long>> words(word_counts.begin(),
                                                       word_counts.end());
  std::sort(words.begin(), words.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  VocabTable& wv = vocabs[kind_index(SlotKind::Word)];
  for (const auto& [w, c] : words) {
    if (static_cast<int>(wv.items.size()) >= vocab_limit) break;
    wv.add(w);
  }
  wv.add(kNull);
  wv.unk = wv.add(kUnk);

  VocabTable& pv = vocabs[kind_index(SlotKind::Pos)];
  for (const auto& [t, _] : pos_set) pv.add(t);
  pv.add(kNull);
  pv.unk = pv.add(kUnk);

  VocabTable& lv = vocabs[kind_index(SlotKind::Label)];
  for (const auto& [t, _] : label_set) lv.add(t);
  lv.add(kNull);
  lv.unk = lv.add(kUnk);

  VocabTable& dv = vocabs[kind_index(SlotKind::Distance)];
  for (const char* d : {"-2", "-1", "+1", "+2"}) dv.add(d);
  dv.add(kNull);

  VocabTable& bv = vocabs[kind_index(SlotKind::Boolean)];
  bv.add("0");
  bv.add("1");
  return vocabs;
}

void init_net(ReorderNet& net, const TrainConfig& cfg, const EmbeddingTable* word_init) {
  const int dim = net.emb_dim;
  double emb_range = std::sqrt(6.0 / dim);
  for (int k = 0; k < kNumKinds; ++k) {
    const VocabTable& vocab = net.vocabs[k];
    RowMatrix& table = net.tables[k];
    table.resize(static_cast<int>(vocab.items.size()), dim);
    for (size_t i = 0; i < vocab.items.size(); ++i) {
      const std::string& item = vocab.items[i];
      if (k == kind_index(SlotKind::Word) && word_init) {
        const std::vector<double>* v = word_init->find(item);
        if (!v && item != kNull) v = word_init->find(kUnk);
        if (v) {
          for (int d = 0; d < dim; ++d) table(i, d) = (*v)[d];
          continue;
        }
      }
      if (item == kNull) {
        table.row(i).setZero();
        continue;
      }
      std::vector<double> v = random_row(static_cast<SlotKind>(k), item, dim,
                                         emb_range, cfg.seed);
      for (int d = 0; d < dim; ++d) table(i, d) = v[d];
    }
  }

  Rng rng(splitmix64(cfg.seed) ^ 0xa5a5a5a5ULL);
  auto init_matrix = [&](Eigen::MatrixXd& m, int rows, int cols) {
    double r = std::sqrt(6.0 / (rows + cols));
    m.resize(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform(-r, r);
  };
  init_matrix(net.W1, net.hidden1, net.input_dim());
  net.b1 = Eigen::VectorXd::Zero(net.hidden1);
  init_matrix(net.W2, net.hidden2, net.hidden1);
  net.b2 = Eigen::VectorXd::Zero(net.hidden2);
  double r = std::sqrt(6.0 / (net.hidden2 + 1));
  net.w_out.resize(net.hidden2);
  for (int i = 0; i < net.hidden2; ++i) net.w_out[i] = rng.uniform(-r, r);
  net.b_out = 0.0;
}

EncodedBatch encode_rows(const ReorderNet& net, const std::vector<InstanceRow>& rows) {
  EncodedBatch batch;
  batch.ids.reserve(rows.size());
  batch.labels.reserve(rows.size());
  for (const InstanceRow& row : rows) {
    batch.ids.push_back(encode(net, row.values));
    batch.labels.push_back(row.label);
  }
  return batch;
}

void apply_update(ReorderNet& net, const Gradients& g, double lr) {
  for (int k = 0; k < kNumKinds; ++k)
    for (const auto& [row, vec] : g.tables[k])
      net.tables[k].row(row) -= lr * vec.transpose();
  net.W1 -= lr * g.W1;
  net.b1 -= lr * g.b1;
  net.W2 -= lr * g.W2;
  net.b2 -= lr * g.b2;
  net.w_out -= lr * g.w_out;
  net.b_out -= lr * g.b_out;
}

double eval_loss(const ReorderNet& net, const EncodedBatch& all) {
  // Evaluate in slices to bound the activation matrices.
  const int B = static_cast<int>(all.ids.size());
  const int chunk = 512;
  double total = 0.0;
  for (int lo = 0; lo < B; lo += chunk) {
    int hi = std::min(B, lo + chunk);
    EncodedBatch slice;
    slice.ids.assign(all.ids.begin() + lo, all.ids.begin() + hi);
    slice.labels.assign(all.labels.begin() + lo, all.labels.begin() + hi);
    total += batch_loss(net, slice) * (hi - lo);
  }
  return total / B;
}

}  // namespace

ReorderNet train_classifier(Relation relation,
                            const std::vector<InstanceRow>& train_rows,
                            const std::vector<InstanceRow>& heldout_rows,
                            const NetConfig& dims, const TrainConfig& cfg,
                            const EmbeddingTable* word_init) {
  if (train_rows.empty() || heldout_rows.empty())
    throw std::invalid_argument("training and held-out sets must be nonempty");
  if (cfg.dropout < 0.0 || cfg.dropout >= 1.0)
    throw std::invalid_argument("dropout must be in [0, 1)");
  if (cfg.batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  if (word_init && word_init->dim != dims.emb_dim)
    throw std::invalid_argument("embedding dimension " + std::to_string(word_init->dim) +
                                " does not match configured " + std::to_string(dims.emb_dim));

  ReorderNet net;
  net.spec = FeatureSpec::of(relation);
  net.emb_dim = dims.emb_dim;
  net.hidden1 = dims.hidden1;
  net.hidden2 = dims.hidden2;
  net.dropout_rate = cfg.dropout;
  net.vocabs = build_vocabs(net.spec, train_rows, cfg.vocab_limit);
  init_net(net, cfg, word_init);

  EncodedBatch train = encode_rows(net, train_rows);
  EncodedBatch heldout = encode_rows(net, heldout_rows);
  const int n = static_cast<int>(train.ids.size());
  const int in_dim = net.input_dim();

  ReorderNet best = net;
  double best_loss = eval_loss(net, heldout);

  Rng rng(splitmix64(cfg.seed) ^ 0x7f4a7c15ULL);
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<std::vector<int>> batches;
    if (cfg.epoch_batches > 0) {
      for (int b = 0; b < cfg.epoch_batches; ++b) {
        std::vector<int> idx(cfg.batch_size);
        for (int& i : idx) i = static_cast<int>(rng.next_below(n));
        batches.push_back(std::move(idx));
      }
    } else {
      for (int i = n - 1; i > 0; --i)
        std::swap(order[i], order[rng.next_below(i + 1)]);
      for (int lo = 0; lo < n; lo += cfg.batch_size) {
        int hi = std::min(n, lo + cfg.batch_size);
        batches.emplace_back(order.begin() + lo, order.begin() + hi);
      }
    }

    for (const std::vector<int>& idx : batches) {
      EncodedBatch batch;
      batch.ids.reserve(idx.size());
      batch.labels.reserve(idx.size());
      for (int i : idx) {
        batch.ids.push_back(train.ids[i]);
        batch.labels.push_back(train.labels[i]);
      }
      DropoutMasks masks;
      const DropoutMasks* mask_ptr = nullptr;
      if (cfg.dropout > 0.0) {
        masks.resize(batch.ids.size());
        for (auto& m : masks) {
          m.resize(in_dim);
          for (int i = 0; i < in_dim; ++i)
            m[i] = rng.next_double() < cfg.dropout ? 0.0 : 1.0;
        }
        mask_ptr = &masks;
      }
      Gradients g = batch_grad(net, batch, mask_ptr);
      apply_update(net, g, cfg.learning_rate);
    }

    double hl = eval_loss(net, heldout);
    if (std::isnan(hl))
      throw std::runtime_error("held-out loss is NaN after epoch " +
                               std::to_string(epoch + 1));
    if (hl < best_loss) {
      best_loss = hl;
      best = net;
    }
  }
  return best;
}

std::vector<ReorderNet> train_ensemble(Relation relation,
                                       const std::vector<InstanceRow>& train_rows,
                                       const std::vector<InstanceRow>& heldout_rows,
                                       const NetConfig& dims, const TrainConfig& cfg,
                                       int n, const EmbeddingTable* word_init,
                                       bool parallel) {
  if (n < 1) throw std::invalid_argument("ensemble size must be >= 1");
  std::vector<ReorderNet> members(n);
  auto train_member = [&](int k) {
    TrainConfig member_cfg = cfg;
    member_cfg.seed = cfg.seed + static_cast<unsigned long long>(k);
    return train_classifier(relation, train_rows, heldout_rows, dims, member_cfg,
                            word_init);
  };
  if (parallel && n > 1) {
    std::vector<std::future<ReorderNet>> futures;
    for (int k = 0; k < n; ++k)
      futures.push_back(std::async(std::launch::async, train_member, k));
    for (int k = 0; k < n; ++k) members[k] = futures[k].get();
  } else {
    for (int k = 0; k < n; ++k) members[k] = train_member(k);
  }
  return members;
}

double heldout_loss(const ReorderNet& net, const std::vector<InstanceRow>& rows) {
  return eval_loss(net, encode_rows(net, rows));
}

double heldout_accuracy(const ReorderNet& net, const std::vector<InstanceRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("empty evaluation set");
  int correct = 0;
  for (const InstanceRow& row : rows) {
    double p = predict_swap(net, row.values);
    if ((p >= 0.5 ? 1 : 0) == row.label) ++correct;
  }
  return static_cast<double>(correct) / rows.size();
}

namespace {

const char* kind_name(SlotKind k) {
  switch (k) {
    case SlotKind::Word: return "word";
    case SlotKind::Pos: return "pos";
    case SlotKind::Label: return "label";
    case SlotKind::Distance: return "distance";
    case SlotKind::Boolean: return "boolean";
  }
  return "?";
}

SlotKind kind_from_name(const std::string& s) {
  if (s == "word") return SlotKind::Word;
  if (s == "pos") return SlotKind::Pos;
  if (s == "label") return SlotKind::Label;
  if (s == "distance") return SlotKind::Distance;
  if (s == "boolean") return SlotKind::Boolean;
  throw ParseError("unknown slot kind '" + s + "'");
}

void write_matrix(std::ostream& os, const Eigen::Ref<const Eigen::MatrixXd>& m) {
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j) os << ' ';
      os << fmt_double(m(i, j));
    }
    os << '\n';
  }
}

void read_matrix(std::istream& is, Eigen::MatrixXd& m, int rows, int cols,
                 const std::string& what) {
  m.resize(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      if (!(is >> m(i, j))) throw ParseError("model file truncated in " + what);
}

}  // namespace

void save_model(std::ostream& os, const ReorderNet& net) {
  os << "reorder-net 1\n";
  os << "relation " << relation_name(net.spec.relation) << '\n';
  os << "dims " << net.emb_dim << ' ' << net.hidden1 << ' ' << net.hidden2 << '\n';
  os << "dropout " << fmt_double(net.dropout_rate) << '\n';
  os << "slots " << net.spec.slots.size() << '\n';
  for (const auto& [name, kind] : net.spec.slots)
    os << name << ' ' << kind_name(kind) << '\n';
  for (int k = 0; k < kNumKinds; ++k) {
    const VocabTable& vocab = net.vocabs[k];
    os << "table " << kind_name(static_cast<SlotKind>(k)) << ' '
       << vocab.items.size() << ' ' << vocab.unk << '\n';
    for (size_t i = 0; i < vocab.items.size(); ++i) {
      os << vocab.items[i];
      for (int d = 0; d < net.emb_dim; ++d)
        os << ' ' << fmt_double(net.tables[k](i, d));
      os << '\n';
    }
  }
  os << "W1\n";
  write_matrix(os, net.W1);
  os << "b1\n";
  write_matrix(os, net.b1.transpose());
  os << "W2\n";
  write_matrix(os, net.W2);
  os << "b2\n";
  write_matrix(os, net.b2.transpose());
  os << "w_out\n";
  write_matrix(os, net.w_out.transpose());
  os << "b_out " << fmt_double(net.b_out) << '\n';
}

ReorderNet load_model(std::istream& is) {
  std::string magic;
  int version = 0;
  if (!(is >> magic >> version) || magic != "reorder-net")
    throw ParseError("not a reorder-net model file");
  if (version != 1)
    throw ParseError("unsupported model version " + std::to_string(version));

  ReorderNet net;
  std::string key, rel;
  if (!(is >> key >> rel) || key != "relation") throw ParseError("bad model header");
  net.spec = FeatureSpec::of(relation_from_name(rel));
  if (!(is >> key >> net.emb_dim >> net.hidden1 >> net.hidden2) || key != "dims")
    throw ParseError("bad model dims");
  if (!(is >> key >> net.dropout_rate) || key != "dropout")
    throw ParseError("bad model dropout");
  size_t n_slots = 0;
  if (!(is >> key >> n_slots) || key != "slots") throw ParseError("bad model slots");
  if (n_slots != net.spec.slots.size())
    throw ParseError("slot count mismatch for relation " + rel);
  for (size_t s = 0; s < n_slots; ++s) {
    std::string name, kind;
    if (!(is >> name >> kind)) throw ParseError("model file truncated in slots");
    if (name != net.spec.slots[s].first ||
        kind_from_name(kind) != net.spec.slots[s].second)
      throw ParseError("slot " + std::to_string(s) + " mismatch: " + name);
  }
  for (int k = 0; k < kNumKinds; ++k) {
    std::string kind;
    size_t count = 0;
    int unk = -1;
    if (!(is >> key >> kind >> count >> unk) || key != "table" ||
        kind_from_name(kind) != static_cast<SlotKind>(k))
      throw ParseError("bad table section for kind index " + std::to_string(k));
    VocabTable& vocab = net.vocabs[k];
    vocab.unk = unk;
    net.tables[k].resize(static_cast<int>(count), net.emb_dim);
    std::string line;
    std::getline(is, line);  // end of the header line
    // Whole-line rows keep an empty vocabulary item readable.
    for (size_t i = 0; i < count; ++i) {
      if (!std::getline(is, line))
        throw ParseError("model file truncated in table " + kind);
      size_t cut = line.find(' ');
      if (cut == std::string::npos)
        throw ParseError("bad table row in " + kind);
      vocab.add(line.substr(0, cut));
      std::istringstream row(line.substr(cut + 1));
      for (int d = 0; d < net.emb_dim; ++d)
        if (!(row >> net.tables[k](i, d)))
          throw ParseError("short table row in " + kind);
    }
  }
  auto expect = [&](const char* name) {
    if (!(is >> key) || key != name)
      throw ParseError(std::string("expected section ") + name);
  };
  Eigen::MatrixXd m;
  expect("W1");
  read_matrix(is, net.W1, net.hidden1, net.emb_dim * static_cast<int>(n_slots), "W1");
  expect("b1");
  read_matrix(is, m, 1, net.hidden1, "b1");
  net.b1 = m.row(0).transpose();
  expect("W2");
  read_matrix(is, net.W2, net.hidden2, net.hidden1, "W2");
  expect("b2");
  read_matrix(is, m, 1, net.hidden2, "b2");
  net.b2 = m.row(0).transpose();
  expect("w_out");
  read_matrix(is, m, 1, net.hidden2, "w_out");
  net.w_out = m.row(0).transpose();
  expect("b_out");
  if (!(is >> net.b_out)) throw ParseError("model file truncated at b_out");
  return net;
}

}  // namespace depreorder

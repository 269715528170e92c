#ifndef DEPREORDER_CLASSIFIER_HPP
#define DEPREORDER_CLASSIFIER_HPP

#include <Eigen/Dense>
#include <array>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "depreorder/embedding.hpp"
#include "depreorder/extract.hpp"
#include "depreorder/util.hpp"

namespace depreorder {

enum class Relation { HeadChild, Sibling };
enum class SlotKind { Word, Pos, Label, Distance, Boolean };
constexpr int kNumKinds = 5;
constexpr int kind_index(SlotKind k) { return static_cast<int>(k); }

std::string relation_name(Relation r);
Relation relation_from_name(const std::string& name);

// Fixed slot layout of one classifier input; serialized with the model.
struct FeatureSpec {
  Relation relation = Relation::HeadChild;
  std::vector<std::pair<std::string, SlotKind>> slots;

  static const FeatureSpec& head_child();
  static const FeatureSpec& sibling();
  static const FeatureSpec& of(Relation r);
};

struct VocabTable {
  std::vector<std::string> items;
  std::unordered_map<std::string, int> index;
  int unk = -1;  // -1: no UNK fallback (distance, boolean)

  int add(const std::string& item);
  // UNK fallback for open vocabularies; throws for closed ones.
  int lookup(const std::string& item) const;
};

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Feed-forward binary reordering classifier: per-kind embedding lookups,
// two relu hidden layers, sigmoid output.
struct ReorderNet {
  FeatureSpec spec;
  int emb_dim = 100;
  int hidden1 = 200;
  int hidden2 = 100;
  double dropout_rate = 0.5;

  std::array<VocabTable, kNumKinds> vocabs;
  std::array<RowMatrix, kNumKinds> tables;  // rows follow vocab items
  Eigen::MatrixXd W1, W2;
  Eigen::VectorXd b1, b2, w_out;
  double b_out = 0.0;

  int input_dim() const { return emb_dim * static_cast<int>(spec.slots.size()); }
};

struct TrainConfig {
  int epochs = 100;
  int batch_size = 128;
  // 0: one shuffled pass over the data per epoch; > 0: exactly this many
  // sampled batches per epoch.
  int epoch_batches = 0;
  double learning_rate = 0.05;
  double dropout = 0.5;
  unsigned long long seed = 1;
  int vocab_limit = 100000;
};

struct NetConfig {
  int emb_dim = 100;
  int hidden1 = 200;
  int hidden2 = 100;
};

// Slot values -> per-kind vocabulary ids. Out-of-vocabulary words, POS tags
// and labels map to UNK; throws on a slot-count mismatch or an invalid
// closed-vocabulary value.
std::vector<int> encode(const ReorderNet& net, const std::vector<std::string>& values);

// Eval-mode prediction probability for "swapped", in (0, 1).
double forward(const ReorderNet& net, const std::vector<int>& ids);
double predict_swap(const ReorderNet& net, const std::vector<std::string>& values);

// Train-mode forward: input embeddings masked by iid Bernoulli(1 - dropout)
// and scaled by 1/(1 - dropout).
double forward_train(const ReorderNet& net, const std::vector<int>& ids, Rng& rng);

struct EncodedBatch {
  std::vector<std::vector<int>> ids;
  std::vector<double> labels;  // 0 or 1
};

// Per-instance input masks (0/1 per input component, unscaled); nullptr
// means no dropout.
using DropoutMasks = std::vector<std::vector<double>>;

// Mean cross-entropy over the batch, predictions clamped to
// [1e-12, 1 - 1e-12] before the logs.
double batch_loss(const ReorderNet& net, const EncodedBatch& batch,
                  const DropoutMasks* masks = nullptr);

struct Gradients {
  std::array<std::unordered_map<int, Eigen::VectorXd>, kNumKinds> tables;
  Eigen::MatrixXd W1, W2;
  Eigen::VectorXd b1, b2, w_out;
  double b_out = 0.0;
};

// Analytic gradient of batch_loss with the same masks. Embedding gradients
// carry entries only for rows that occur in the batch.
Gradients batch_grad(const ReorderNet& net, const EncodedBatch& batch,
                     const DropoutMasks* masks = nullptr);

// Builds vocabularies and initial parameters, then runs mini-batch SGD for
// cfg.epochs, keeping the parameter snapshot with the lowest held-out
// cross-entropy. word_init, when given, seeds the word lookup table (its
// dimension must equal dims.emb_dim). Deterministic for a fixed seed.
ReorderNet train_classifier(Relation relation,
                            const std::vector<InstanceRow>& train_rows,
                            const std::vector<InstanceRow>& heldout_rows,
                            const NetConfig& dims, const TrainConfig& cfg,
                            const EmbeddingTable* word_init = nullptr);

// Member k trains with seed cfg.seed + k; members are independent and may
// run concurrently.
std::vector<ReorderNet> train_ensemble(Relation relation,
                                       const std::vector<InstanceRow>& train_rows,
                                       const std::vector<InstanceRow>& heldout_rows,
                                       const NetConfig& dims, const TrainConfig& cfg,
                                       int n, const EmbeddingTable* word_init = nullptr,
                                       bool parallel = true);

double heldout_loss(const ReorderNet& net, const std::vector<InstanceRow>& rows);
double heldout_accuracy(const ReorderNet& net, const std::vector<InstanceRow>& rows);

void save_model(std::ostream& os, const ReorderNet& net);
ReorderNet load_model(std::istream& is);

}  // namespace depreorder

#endif  // DEPREORDER_CLASSIFIER_HPP

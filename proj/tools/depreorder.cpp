#include <CLI11.hpp>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "depreorder/bleu.hpp"
#include "depreorder/classifier.hpp"
#include "depreorder/conll.hpp"
#include "depreorder/decoder.hpp"
#include "depreorder/embedding.hpp"
#include "depreorder/extract.hpp"
#include "depreorder/lm.hpp"
#include "depreorder/phrase_table.hpp"
#include "depreorder/util.hpp"

using namespace depreorder;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return buf.str();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  return os;
}

std::vector<AlignedPair> load_aligned_corpus(const std::string& parse_path,
                                             const std::string& target_path,
                                             const std::string& align_path) {
  std::vector<DepSentence> parses = parse_conll(read_file(parse_path));
  std::vector<std::vector<std::string>> targets =
      parse_token_lines(read_file(target_path));
  std::istringstream align_lines(read_file(align_path));

  std::vector<std::string> aligns;
  std::string line;
  while (std::getline(align_lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    aligns.push_back(line);
  }
  if (parses.size() != targets.size() || parses.size() != aligns.size())
    throw std::runtime_error("file lengths differ: " + std::to_string(parses.size()) +
                             " parses, " + std::to_string(targets.size()) +
                             " target lines, " + std::to_string(aligns.size()) +
                             " alignment lines");
  std::vector<AlignedPair> pairs;
  pairs.reserve(parses.size());
  for (size_t i = 0; i < parses.size(); ++i) {
    AlignedPair p;
    p.source = std::move(parses[i]);
    p.target = std::move(targets[i]);
    try {
      p.links = parse_alignment(aligns[i], p.source.size(),
                                static_cast<int>(p.target.size()));
    } catch (const ParseError& e) {
      throw std::runtime_error("alignment line " + std::to_string(i + 1) + ": " +
                               e.what());
    }
    pairs.push_back(std::move(p));
  }
  return pairs;
}

std::set<std::string> tag_set(const std::vector<std::string>& tags) {
  return tags.empty() ? kDefaultPunctTags
                      : std::set<std::string>(tags.begin(), tags.end());
}

int run_extract(const std::string& parses, const std::string& target,
                const std::string& align, const std::string& relation,
                const std::vector<std::string>& punct_tags, const std::string& out) {
  std::vector<AlignedPair> pairs = load_aligned_corpus(parses, target, align);
  std::set<std::string> tags = tag_set(punct_tags);
  std::ofstream os = open_out(out);
  if (relation == kHeadChildHeader) {
    std::vector<HeadChildInstance> rows;
    for (const AlignedPair& p : pairs) {
      auto extracted = extract_head_child(p, tags);
      rows.insert(rows.end(), extracted.begin(), extracted.end());
    }
    write_instances(os, rows);
    std::cerr << "extracted " << rows.size() << " head-child instances\n";
  } else {
    std::vector<SiblingInstance> rows;
    for (const AlignedPair& p : pairs) {
      auto extracted = extract_sibling(p, tags);
      rows.insert(rows.end(), extracted.begin(), extracted.end());
    }
    write_instances(os, rows);
    std::cerr << "extracted " << rows.size() << " sibling instances\n";
  }
  return 0;
}

int run_dep_corpus(const std::string& parses, const std::string& out) {
  std::vector<DepSentence> sentences = parse_conll(read_file(parses));
  auto corpus = gen_dep_context_corpus(sentences);
  std::ofstream os = open_out(out);
  for (const auto& line : corpus) {
    for (size_t i = 0; i < line.size(); ++i) {
      if (i) os << ' ';
      os << line[i];
    }
    os << '\n';
  }
  std::cerr << "wrote " << corpus.size() << " context lines\n";
  return 0;
}

int run_embed(const std::string& corpus_path, const std::string& out,
              const std::string& mode, const SkipGramConfig& cfg) {
  auto corpus = parse_token_lines(read_file(corpus_path));
  EmbeddingTable table;
  if (mode == "random") {
    // Vocabulary from the corpus, same min-count rule as training.
    std::map<std::string, long long> counts;
    for (const auto& line : corpus)
      for (const auto& tok : line) ++counts[tok];
    std::vector<std::string> vocab;
    for (const auto& [w, c] : counts)
      if (c >= cfg.min_count) vocab.push_back(w);
    EmbeddingTable raw = random_table(vocab, cfg.dim, cfg.seed);
    table = filter_context_vocab(raw);
  } else {
    SkipGramModel model = train_skipgram(corpus, cfg);
    table = filter_context_vocab(model.input);
  }
  std::ofstream os = open_out(out);
  save_embeddings(os, table);
  std::cerr << "saved " << table.size() << " vectors of dimension " << table.dim
            << '\n';
  return 0;
}

int run_train(const std::string& instances, const std::string& heldout,
              const std::string& out_prefix, const std::string& embeddings,
              int ensemble, const NetConfig& dims, const TrainConfig& cfg,
              bool serial) {
  std::ifstream train_is(instances);
  if (!train_is) throw std::runtime_error("cannot open " + instances);
  InstanceFile train_file = read_instances(train_is);
  std::ifstream held_is(heldout);
  if (!held_is) throw std::runtime_error("cannot open " + heldout);
  InstanceFile held_file = read_instances(held_is);
  if (train_file.relation != held_file.relation)
    throw std::runtime_error("relation mismatch between training and held-out files");
  Relation relation = relation_from_name(train_file.relation);

  EmbeddingTable emb;
  const EmbeddingTable* emb_ptr = nullptr;
  if (!embeddings.empty()) {
    std::ifstream es(embeddings);
    if (!es) throw std::runtime_error("cannot open " + embeddings);
    emb = load_embeddings(es);
    emb_ptr = &emb;
  }

  std::vector<ReorderNet> members =
      train_ensemble(relation, train_file.rows, held_file.rows, dims, cfg, ensemble,
                     emb_ptr, !serial);
  for (size_t k = 0; k < members.size(); ++k) {
    std::string path = out_prefix + "." + std::to_string(k);
    std::ofstream os = open_out(path);
    save_model(os, members[k]);
    std::cerr << "member " << k << ": held-out loss "
              << heldout_loss(members[k], held_file.rows) << ", accuracy "
              << heldout_accuracy(members[k], held_file.rows) << " -> " << path
              << '\n';
  }
  return 0;
}

int run_predict(const std::vector<std::string>& model_paths,
                const std::string& instances, const std::string& out) {
  std::vector<ReorderNet> models;
  for (const std::string& path : model_paths) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    models.push_back(load_model(is));
  }
  std::ifstream is(instances);
  if (!is) throw std::runtime_error("cannot open " + instances);
  InstanceFile file = read_instances(is);
  for (const ReorderNet& net : models) {
    if (relation_name(net.spec.relation) != file.relation)
      throw std::runtime_error("model relation does not match instance file");
  }

  std::ostream* os = &std::cout;
  std::ofstream fos;
  if (!out.empty()) {
    fos = open_out(out);
    os = &fos;
  }
  int correct = 0;
  for (const InstanceRow& row : file.rows) {
    double mean = 0.0;
    for (size_t m = 0; m < models.size(); ++m) {
      double p = predict_swap(models[m], row.values);
      mean += p;
      if (m) *os << ' ';
      *os << fmt_double(p);
    }
    *os << '\n';
    mean /= static_cast<double>(models.size());
    if ((mean >= 0.5 ? 1 : 0) == row.label) ++correct;
  }
  if (!file.rows.empty())
    std::cerr << "accuracy " << static_cast<double>(correct) / file.rows.size()
              << " over " << file.rows.size() << " instances\n";
  return 0;
}

void write_trace(std::ostream& os, int sent_no, const DecodeResult& result) {
  os << "sent " << sent_no << '\n';
  for (const DerivationStep& step : result.steps) {
    os << "step " << step.start << ' ' << step.end;
    for (int i = 0; i < 4; ++i) os << ' ' << fmt_double(step.scores[i]);
    os << " |||";
    for (const std::string& w : step.tgt) os << ' ' << w;
    os << '\n';
  }
  for (const auto& [name, value] : result.features)
    os << "feat " << name << ' ' << fmt_double(value) << '\n';
  os << "total " << fmt_double(result.total) << '\n';
  os << "end\n";
}

int run_decode(const std::string& parses, const std::string& phrase_table,
               const std::string& lm_corpus, int lm_order,
               const std::string& weights_path, const std::string& ds_weights_path,
               const std::vector<std::string>& hc_paths,
               const std::vector<std::string>& sib_paths, int beam,
               int distortion_limit, const std::vector<std::string>& punct_tags,
               const std::string& out, const std::string& trace_path, int threads) {
  std::vector<DepSentence> sentences = parse_conll(read_file(parses));

  std::ifstream pt_is(phrase_table);
  if (!pt_is) throw std::runtime_error("cannot open " + phrase_table);
  PhraseTable table = PhraseTable::load(pt_is);

  NgramLm lm = NgramLm::train(parse_token_lines(read_file(lm_corpus)), lm_order);

  std::ifstream w_is(weights_path);
  if (!w_is) throw std::runtime_error("cannot open " + weights_path);

  DecoderConfig cfg;
  cfg.weights = load_weights(w_is);
  cfg.beam_size = beam;
  cfg.distortion_limit = distortion_limit;
  cfg.punct_tags = tag_set(punct_tags);

  DecoderModels models;
  models.phrases = &table;
  models.lm = &lm;
  if (!ds_weights_path.empty()) {
    std::ifstream ds_is(ds_weights_path);
    if (!ds_is) throw std::runtime_error("cannot open " + ds_weights_path);
    models.ds_weights = load_ds_weights(ds_is);
  }
  std::vector<ReorderNet> hc_models, sib_models;
  for (const std::string& path : hc_paths) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    hc_models.push_back(load_model(is));
    if (hc_models.back().spec.relation != Relation::HeadChild)
      throw std::runtime_error(path + " is not a head-child model");
  }
  for (const std::string& path : sib_paths) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    sib_models.push_back(load_model(is));
    if (sib_models.back().spec.relation != Relation::Sibling)
      throw std::runtime_error(path + " is not a sibling model");
  }
  for (const ReorderNet& net : hc_models) models.hc_members.push_back(&net);
  for (const ReorderNet& net : sib_models) models.sib_members.push_back(&net);

  std::vector<DecodeResult> results(sentences.size());
  auto decode_range = [&](size_t lo, size_t hi) {
    for (size_t i = lo; i < hi; ++i) {
      try {
        results[i] = decode(sentences[i], models, cfg);
      } catch (const DecodeError& e) {
        throw std::runtime_error("sentence " + std::to_string(i + 1) + ": " + e.what());
      }
    }
  };
  if (threads <= 1 || sentences.size() < 2) {
    decode_range(0, sentences.size());
  } else {
    size_t shard = (sentences.size() + threads - 1) / threads;
    std::vector<std::future<void>> futures;
    for (int t = 0; t < threads; ++t) {
      size_t lo = std::min(sentences.size(), t * shard);
      size_t hi = std::min(sentences.size(), lo + shard);
      if (lo >= hi) break;
      futures.push_back(std::async(std::launch::async, decode_range, lo, hi));
    }
    for (auto& f : futures) f.get();
  }

  std::ofstream os = open_out(out);
  for (const DecodeResult& r : results) {
    for (size_t i = 0; i < r.output.size(); ++i) {
      if (i) os << ' ';
      os << r.output[i];
    }
    os << '\n';
  }
  if (!trace_path.empty()) {
    std::ofstream ts = open_out(trace_path);
    for (size_t i = 0; i < results.size(); ++i)
      write_trace(ts, static_cast<int>(i + 1), results[i]);
  }
  return 0;
}

int run_eval(const std::string& hyp_path, const std::vector<std::string>& ref_paths,
             int max_n, bool cased) {
  auto hyps = parse_token_lines(read_file(hyp_path));
  std::vector<std::vector<std::vector<std::string>>> refs(hyps.size());
  for (const std::string& path : ref_paths) {
    auto lines = parse_token_lines(read_file(path));
    if (lines.size() != hyps.size())
      throw std::runtime_error(path + ": " + std::to_string(lines.size()) +
                               " lines, expected " + std::to_string(hyps.size()));
    for (size_t i = 0; i < lines.size(); ++i) refs[i].push_back(std::move(lines[i]));
  }
  double score = bleu(hyps, refs, max_n, !cased);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "BLEU = %.2f\n", 100.0 * score);
  std::cout << buf;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dependency-based neural reordering toolkit"};
  app.require_subcommand(1);

  // extract
  auto* extract = app.add_subcommand("extract", "Extract reordering training instances");
  std::string parses, target, align, relation, out;
  std::vector<std::string> punct_tags;
  extract->add_option("--parses", parses, "CoNLL-style source parse file")->required();
  extract->add_option("--target", target, "tokenized target text, one sentence per line")->required();
  extract->add_option("--align", align, "alignment file, 0-based i-j pairs per line")->required();
  extract->add_option("--relation", relation, "head-child or sibling")
      ->required()
      ->check(CLI::IsMember({kHeadChildHeader, kSiblingHeader}));
  extract->add_option("--punct-tag", punct_tags, "punctuation POS tag (default PU)");
  extract->add_option("--out", out, "output instance file")->required();

  // dep-corpus
  auto* depc = app.add_subcommand("dep-corpus", "Emit dependency-context lines for embedding training");
  std::string dc_parses, dc_out;
  depc->add_option("--parses", dc_parses, "CoNLL-style parse file")->required();
  depc->add_option("--out", dc_out, "output corpus file")->required();

  // embed
  auto* embed = app.add_subcommand("embed", "Train word embeddings");
  std::string em_corpus, em_out, em_mode = "sgns";
  SkipGramConfig em_cfg;
  embed->add_option("--corpus", em_corpus, "token-line corpus")->required();
  embed->add_option("--out", em_out, "output embedding file")->required();
  embed->add_option("--mode", em_mode, "sgns or random")
      ->check(CLI::IsMember({"sgns", "random"}));
  embed->add_option("--dim", em_cfg.dim, "vector dimension");
  embed->add_option("--window", em_cfg.window, "context half-width");
  embed->add_option("--negatives", em_cfg.negatives, "negative samples per positive");
  embed->add_option("--epochs", em_cfg.epochs, "training epochs");
  embed->add_option("--learning-rate", em_cfg.learning_rate, "SGD step size");
  embed->add_option("--min-count", em_cfg.min_count, "vocabulary count cutoff");
  embed->add_option("--seed", em_cfg.seed, "random seed");
  embed->add_option("--threads", em_cfg.threads, "training threads (>1 is not deterministic)");

  // train
  auto* train = app.add_subcommand("train", "Train reordering classifiers");
  std::string tr_instances, tr_heldout, tr_out, tr_embeddings;
  int tr_ensemble = 1;
  bool tr_serial = false;
  NetConfig tr_dims;
  TrainConfig tr_cfg;
  train->add_option("--instances", tr_instances, "training instance file")->required();
  train->add_option("--heldout", tr_heldout, "held-out instance file")->required();
  train->add_option("--out", tr_out, "model path prefix (writes PREFIX.k)")->required();
  train->add_option("--embeddings", tr_embeddings, "word embedding file for initialization");
  train->add_option("--ensemble", tr_ensemble, "number of ensemble members")
      ->check(CLI::PositiveNumber);
  train->add_option("--dim", tr_dims.emb_dim, "embedding dimension");
  train->add_option("--hidden1", tr_dims.hidden1, "lower hidden layer size");
  train->add_option("--hidden2", tr_dims.hidden2, "upper hidden layer size");
  train->add_option("--epochs", tr_cfg.epochs, "training epochs");
  train->add_option("--batch-size", tr_cfg.batch_size, "mini-batch size");
  train->add_option("--epoch-batches", tr_cfg.epoch_batches,
                    "sampled batches per epoch (0: one shuffled pass)");
  train->add_option("--learning-rate", tr_cfg.learning_rate, "SGD step size");
  train->add_option("--dropout", tr_cfg.dropout, "input dropout rate");
  train->add_option("--seed", tr_cfg.seed, "random seed");
  train->add_option("--vocab-limit", tr_cfg.vocab_limit, "word vocabulary cap");
  train->add_flag("--serial", tr_serial, "train ensemble members sequentially");

  // predict
  auto* predict = app.add_subcommand("predict", "Score instances with trained models");
  std::vector<std::string> pr_models;
  std::string pr_instances, pr_out;
  predict->add_option("--model", pr_models, "model file (repeatable)")->required();
  predict->add_option("--instances", pr_instances, "instance file")->required();
  predict->add_option("--out", pr_out, "output file (default stdout)");

  // decode
  auto* decode_cmd = app.add_subcommand("decode", "Translate parsed sentences");
  std::string de_parses, de_pt, de_lm, de_weights, de_ds, de_out, de_trace;
  std::vector<std::string> de_hc, de_sib, de_punct;
  int de_order = 3, de_beam = 100, de_limit = 14, de_threads = 1;
  decode_cmd->add_option("--parses", de_parses, "CoNLL-style input parse file")->required();
  decode_cmd->add_option("--phrase-table", de_pt, "phrase table file")->required();
  decode_cmd->add_option("--lm-corpus", de_lm, "target-side corpus for the n-gram LM")->required();
  decode_cmd->add_option("--lm-order", de_order, "LM order");
  decode_cmd->add_option("--weights", de_weights, "feature weight file")->required();
  decode_cmd->add_option("--ds-weights", de_ds, "sparse dependency-swap weight file");
  decode_cmd->add_option("--hc-model", de_hc, "head-child model file (repeatable)");
  decode_cmd->add_option("--sib-model", de_sib, "sibling model file (repeatable)");
  decode_cmd->add_option("--beam", de_beam, "stack size for histogram pruning");
  decode_cmd->add_option("--distortion-limit", de_limit, "max jump distance (<0: unlimited)");
  decode_cmd->add_option("--punct-tag", de_punct, "punctuation POS tag (default PU)");
  decode_cmd->add_option("--out", de_out, "output translation file")->required();
  decode_cmd->add_option("--trace", de_trace, "per-feature score dump file");
  decode_cmd->add_option("--threads", de_threads, "sentences decoded in parallel");

  // eval
  auto* eval = app.add_subcommand("eval", "Corpus BLEU with shortest-reference brevity penalty");
  std::string ev_hyp;
  std::vector<std::string> ev_refs;
  int ev_max_n = 4;
  bool ev_cased = false;
  eval->add_option("--hyp", ev_hyp, "hypothesis file")->required();
  eval->add_option("--ref", ev_refs, "reference file (repeatable)")->required();
  eval->add_option("--max-n", ev_max_n, "highest n-gram order");
  eval->add_flag("--cased", ev_cased, "case-sensitive scoring");

  CLI11_PARSE(app, argc, argv);

  try {
    if (extract->parsed())
      return run_extract(parses, target, align, relation, punct_tags, out);
    if (depc->parsed()) return run_dep_corpus(dc_parses, dc_out);
    if (embed->parsed()) return run_embed(em_corpus, em_out, em_mode, em_cfg);
    if (train->parsed())
      return run_train(tr_instances, tr_heldout, tr_out, tr_embeddings, tr_ensemble,
                       tr_dims, tr_cfg, tr_serial);
    if (predict->parsed()) return run_predict(pr_models, pr_instances, pr_out);
    if (decode_cmd->parsed())
      return run_decode(de_parses, de_pt, de_lm, de_order, de_weights, de_ds, de_hc,
                        de_sib, de_beam, de_limit, de_punct, de_out, de_trace,
                        de_threads);
    if (eval->parsed()) return run_eval(ev_hyp, ev_refs, ev_max_n, ev_cased);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

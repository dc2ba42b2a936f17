#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mp/baselines.hpp"
#include "mp/checkpoint.hpp"
#include "mp/data.hpp"
#include "mp/embedding.hpp"
#include "mp/errors.hpp"
#include "mp/model.hpp"
#include "mp/pgm.hpp"
#include "mp/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw mp::IoError("cannot create directory '" + dir + "': " + ec.message());
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw mp::IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw mp::IoError("failed writing '" + path + "'");
}

void report_line_issues(const mp::LoadReport& rep, const std::string& path) {
  for (std::size_t i = 0; i < rep.issues.size() && i < 5; ++i) {
    std::cerr << "warning: " << path << " line " << rep.issues[i].line << ": "
              << rep.issues[i].reason << "\n";
  }
  if (rep.issues.size() > 5) {
    std::cerr << "warning: " << path << ": " << (rep.issues.size() - 5)
              << " more malformed lines skipped\n";
  }
}

void report_encode_issues(const mp::EncodeReport& rep, const std::string& what) {
  if (rep.dropped > 0) {
    std::cerr << "warning: dropped " << rep.dropped << " " << what
              << " pair(s) with no usable tokens\n";
  }
}

std::array<double, 2> softmax2(const std::array<double, 2>& scores) {
  double m = std::max(scores[0], scores[1]);
  double e0 = std::exp(scores[0] - m), e1 = std::exp(scores[1] - m);
  return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

std::string metrics_line(const std::string& name, const mp::MetricsReport& r) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << name << ": accuracy " << r.accuracy << "% f1 "
     << r.f1 << "%";
  if (r.threshold) os << " (threshold " << std::setprecision(6) << *r.threshold << ")";
  os << " [tp " << r.tp << " fp " << r.fp << " tn " << r.tn << " fn " << r.fn << "]";
  return os.str();
}

mp::Sentence encode_text(const std::string& text, const mp::Vocabulary& vocab,
                         std::size_t max_len) {
  auto tokens = mp::truncate_tokens(mp::tokenize(text), max_len);
  if (tokens.empty()) throw mp::InputError("no usable tokens in text: '" + text + "'");
  return mp::encode(vocab, std::move(tokens));
}

struct TrainOpts {
  std::string data;
  std::string val_data;
  std::string schema = "generic";
  std::string out_dir = "out";
  std::string op = "dot";
  double train_frac = 0.8, val_frac = 0.1, test_frac = 0.1;
  std::size_t max_len = 32;
  std::size_t min_count = 1;
  mp::ModelConfig model;
  mp::TrainConfig trainer;
  std::size_t grid = 10;
};

int run_train(TrainOpts& o, const std::string& resolved_config) {
  o.model.op = mp::parse_match_operator(o.op);
  o.model.grid_rows = o.grid;
  o.model.grid_cols = o.grid;
  o.model.validate();
  o.trainer.validate();
  ensure_dir(o.out_dir);
  write_text(o.out_dir + "/resolved_config.ini", resolved_config);

  mp::TsvSchema schema = mp::parse_tsv_schema(o.schema);
  mp::LoadReport load_rep;
  std::vector<mp::RawPair> raws = mp::load_pairs_tsv(o.data, schema, &load_rep);
  report_line_issues(load_rep, o.data);
  if (raws.empty()) throw mp::InputError("no pairs loaded from '" + o.data + "'");

  std::vector<mp::RawPair> train_raw, val_raw, test_raw;
  if (!o.val_data.empty()) {
    train_raw = std::move(raws);
    mp::LoadReport val_rep;
    val_raw = mp::load_pairs_tsv(o.val_data, schema, &val_rep);
    report_line_issues(val_rep, o.val_data);
  } else {
    auto splits = mp::split_dataset(raws, {o.train_frac, o.val_frac, o.test_frac},
                                    o.trainer.seed);
    train_raw = std::move(splits.train);
    val_raw = std::move(splits.val);
    test_raw = std::move(splits.test);
    mp::write_pairs_tsv(o.out_dir + "/train.tsv", train_raw);
    mp::write_pairs_tsv(o.out_dir + "/val.tsv", val_raw);
    mp::write_pairs_tsv(o.out_dir + "/test.tsv", test_raw);
  }

  mp::Vocabulary vocab = mp::build_vocab(mp::tokenized_texts(train_raw, o.max_len), o.min_count);
  std::cout << "vocabulary: " << vocab.size() << " tokens (train pairs " << train_raw.size()
            << ", val pairs " << val_raw.size() << ")\n";

  mp::EncodeReport enc_train, enc_val;
  std::vector<mp::TextPair> train_set = mp::encode_dataset(train_raw, vocab, o.max_len, &enc_train);
  std::vector<mp::TextPair> val_set = mp::encode_dataset(val_raw, vocab, o.max_len, &enc_val);
  report_encode_issues(enc_train, "training");
  report_encode_issues(enc_val, "validation");

  std::ofstream history(o.out_dir + "/history.tsv", std::ios::trunc);
  if (!history) throw mp::IoError("cannot open '" + o.out_dir + "/history.tsv' for writing");
  history << "epoch\ttrain_loss\tval_accuracy\tval_f1\tseconds\n";

  auto on_epoch = [&](const mp::EpochRecord& rec) {
    std::ostringstream os;
    os << std::fixed << "epoch " << rec.epoch << ": loss " << std::setprecision(6)
       << rec.train_loss << " val_acc " << std::setprecision(2) << rec.val_accuracy << "% val_f1 "
       << rec.val_f1 << "% (" << std::setprecision(1) << rec.seconds << "s)";
    std::cout << os.str() << std::endl;
    history << rec.epoch << '\t' << std::setprecision(17) << rec.train_loss << '\t'
            << rec.val_accuracy << '\t' << rec.val_f1 << '\t' << rec.seconds << '\n';
    history.flush();
  };

  mp::TrainResult result = mp::train(train_set, val_set, o.model, o.trainer, vocab, on_epoch);
  std::cout << "best epoch " << result.best_epoch << " with val accuracy " << std::fixed
            << std::setprecision(2) << result.best_val_accuracy << "%"
            << (result.stopped_early ? " (stopped early)" : "") << "\n";

  mp::Checkpoint ckpt{o.model, vocab, std::move(result.best_params)};
  std::string ckpt_path = o.out_dir + "/checkpoint.bin";
  mp::save_checkpoint(ckpt_path, ckpt);
  std::cout << "wrote " << ckpt_path << "\n";

  if (!test_raw.empty()) {
    mp::EncodeReport enc_test;
    std::vector<mp::TextPair> test_set = mp::encode_dataset(test_raw, vocab, o.max_len, &enc_test);
    report_encode_issues(enc_test, "test");
    if (!test_set.empty()) {
      std::vector<int> labels;
      for (const auto& p : test_set) labels.push_back(p.label);
      mp::MetricsReport m =
          mp::accuracy_f1(labels, mp::predict_all(test_set, ckpt.params, ckpt.config));
      std::cout << metrics_line("test", m) << "\n";
    }
  }
  return 0;
}

struct EvalOpts {
  std::string checkpoint;
  std::string data;
  std::string baseline_train;
  std::string schema = "generic";
  std::string out_dir;
  std::size_t max_len = 32;
  bool with_baselines = false;
  std::size_t emb_norms = 0;
  bool export_embeddings = false;
};

int run_eval(EvalOpts& o) {
  mp::Checkpoint ckpt = mp::load_checkpoint(o.checkpoint);
  mp::TsvSchema schema = mp::parse_tsv_schema(o.schema);

  mp::LoadReport load_rep;
  std::vector<mp::RawPair> raws = mp::load_pairs_tsv(o.data, schema, &load_rep);
  report_line_issues(load_rep, o.data);
  mp::EncodeReport enc_rep;
  std::vector<mp::TextPair> pairs = mp::encode_dataset(raws, ckpt.vocab, o.max_len, &enc_rep);
  report_encode_issues(enc_rep, "evaluation");
  if (pairs.empty()) throw mp::InputError("no evaluable pairs in '" + o.data + "'");

  std::vector<int> labels;
  labels.reserve(pairs.size());
  for (const auto& p : pairs) labels.push_back(p.label);
  std::vector<int> preds = mp::predict_all(pairs, ckpt.params, ckpt.config);
  mp::MetricsReport model_metrics = mp::accuracy_f1(labels, preds);

  std::vector<std::string> lines;
  lines.push_back(metrics_line("model", model_metrics));

  if (o.with_baselines) {
    lines.push_back(metrics_line("all-positive",
                                 mp::accuracy_f1(labels, mp::all_positive_predict(labels.size()))));

    std::vector<mp::TextPair> train_pairs;
    if (!o.baseline_train.empty()) {
      mp::LoadReport tr;
      auto train_raws = mp::load_pairs_tsv(o.baseline_train, schema, &tr);
      report_line_issues(tr, o.baseline_train);
      mp::EncodeReport te;
      train_pairs = mp::encode_dataset(train_raws, ckpt.vocab, o.max_len, &te);
    }
    std::vector<mp::TextPair> fit_docs = pairs;
    fit_docs.insert(fit_docs.end(), train_pairs.begin(), train_pairs.end());
    mp::TfIdfModel tfidf = mp::tfidf_fit(fit_docs);

    const std::vector<mp::TextPair>& thr_pairs = train_pairs.empty() ? pairs : train_pairs;
    std::vector<double> thr_scores;
    std::vector<int> thr_labels;
    for (const auto& p : thr_pairs) {
      thr_scores.push_back(mp::tfidf_score(tfidf, p.a, p.b));
      thr_labels.push_back(p.label);
    }
    mp::ThresholdResult thr = mp::select_threshold(thr_scores, thr_labels);

    std::vector<int> tfidf_preds;
    tfidf_preds.reserve(pairs.size());
    for (const auto& p : pairs) {
      tfidf_preds.push_back(mp::tfidf_score(tfidf, p.a, p.b) >= thr.threshold ? 1 : 0);
    }
    mp::MetricsReport tm = mp::accuracy_f1(labels, tfidf_preds);
    tm.threshold = thr.threshold;
    lines.push_back(metrics_line("tf-idf", tm));
  }

  if (o.emb_norms > 0) {
    if (!ckpt.params.embeddings) {
      std::cerr << "note: this model has no embedding table; skipping norm report\n";
    } else {
      mp::NormReport nr = mp::embedding_norms(*ckpt.params.embeddings, ckpt.vocab, o.emb_norms);
      std::ostringstream os;
      os << std::fixed << std::setprecision(4) << "largest norms:";
      for (const auto& e : nr.top) os << " " << e.token << "=" << e.norm;
      lines.push_back(os.str());
      os.str("");
      os << std::fixed << std::setprecision(4) << "smallest norms:";
      for (const auto& e : nr.bottom) os << " " << e.token << "=" << e.norm;
      lines.push_back(os.str());
    }
  }

  for (const auto& l : lines) std::cout << l << "\n";

  if (!o.out_dir.empty()) {
    ensure_dir(o.out_dir);
    std::ostringstream metrics_text;
    for (const auto& l : lines) metrics_text << l << "\n";
    write_text(o.out_dir + "/metrics.txt", metrics_text.str());

    std::ofstream pred_out(o.out_dir + "/predictions.tsv", std::ios::trunc);
    if (!pred_out) throw mp::IoError("cannot open predictions file in '" + o.out_dir + "'");
    pred_out << "index\tlabel\tprediction\tp0\tp1\n";
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      auto probs = softmax2(mp::forward_scores(pairs[i], ckpt.params, ckpt.config));
      pred_out << i << '\t' << labels[i] << '\t' << preds[i] << '\t' << std::setprecision(6)
               << std::fixed << probs[0] << '\t' << probs[1] << '\n';
    }
    if (o.export_embeddings) {
      if (!ckpt.params.embeddings) {
        throw mp::ConfigError("this model has no embedding table to export");
      }
      mp::write_embeddings_tsv(o.out_dir + "/embeddings.tsv", *ckpt.params.embeddings,
                               ckpt.vocab);
    }
  } else if (o.export_embeddings) {
    throw mp::ConfigError("--export-embeddings requires --out-dir");
  }
  return 0;
}

struct PredictOpts {
  std::string checkpoint;
  std::string text_a, text_b;
  std::size_t max_len = 32;
};

int run_predict(PredictOpts& o) {
  mp::Checkpoint ckpt = mp::load_checkpoint(o.checkpoint);
  mp::TextPair pair;
  pair.a = encode_text(o.text_a, ckpt.vocab, o.max_len);
  pair.b = encode_text(o.text_b, ckpt.vocab, o.max_len);
  auto scores = mp::forward_scores(pair, ckpt.params, ckpt.config);
  auto probs = softmax2(scores);
  int label = scores[1] >= scores[0] ? 1 : 0;
  std::cout << std::fixed << std::setprecision(6) << "label=" << label << " p0=" << probs[0]
            << " p1=" << probs[1] << "\n";
  return 0;
}

struct VisualizeOpts {
  std::string checkpoint;
  std::string text_a, text_b;
  std::string out_dir = "out";
  std::size_t max_len = 32;
};

int run_visualize(VisualizeOpts& o) {
  mp::Checkpoint ckpt = mp::load_checkpoint(o.checkpoint);
  ensure_dir(o.out_dir);

  mp::TextPair pair;
  pair.a = encode_text(o.text_a, ckpt.vocab, o.max_len);
  pair.b = encode_text(o.text_b, ckpt.vocab, o.max_len);
  mp::ForwardCache cache =
      mp::model_forward(pair, ckpt.params, ckpt.config, /*training=*/false, nullptr);

  json manifest;
  manifest["pair"] = {{"a", o.text_a}, {"b", o.text_b}};
  manifest["images"] = json::array();
  auto export_plane = [&](const mp::Tensor& plane, const std::string& name,
                          const std::string& kind) {
    mp::ScaleRange range;
    mp::GrayImage img = mp::to_gray(plane, &range);
    mp::write_pgm(o.out_dir + "/" + name, img);
    manifest["images"].push_back({{"file", name},
                                  {"kind", kind},
                                  {"height", img.height},
                                  {"width", img.width},
                                  {"lo", range.lo},
                                  {"hi", range.hi},
                                  {"degenerate", range.degenerate}});
  };

  export_plane(mp::channel_plane(cache.m, 0), "matching.pgm", "matching-matrix");
  for (std::size_t k = 0; k < ckpt.config.conv1_maps; ++k) {
    export_plane(mp::kernel_plane(ckpt.params.conv1.kernels, k, 0),
                 "conv1_kernel_" + std::to_string(k) + ".pgm", "kernel");
    export_plane(mp::channel_plane(cache.a1, k), "conv1_map_" + std::to_string(k) + ".pgm",
                 "feature-map");
  }
  for (std::size_t k = 0; k < ckpt.config.conv2_maps; ++k) {
    for (std::size_t c = 0; c < ckpt.config.conv1_maps; ++c) {
      export_plane(mp::kernel_plane(ckpt.params.conv2.kernels, k, c),
                   "conv2_kernel_" + std::to_string(k) + "_" + std::to_string(c) + ".pgm",
                   "kernel");
    }
    export_plane(mp::channel_plane(cache.a2, k), "conv2_map_" + std::to_string(k) + ".pgm",
                 "feature-map");
  }
  write_text(o.out_dir + "/manifest.json", manifest.dump(2) + "\n");
  std::cout << "wrote " << manifest["images"].size() << " images and manifest.json to "
            << o.out_dir << "\n";
  return 0;
}

struct GenDataOpts {
  std::string out;
  mp::CitationConfig cfg;
};

int run_gen_data(GenDataOpts& o) {
  mp::SyntheticCorpus corpus = mp::generate_citation_corpus(o.cfg);
  mp::write_pairs_tsv(o.out, corpus.pairs);
  std::size_t pos = 0;
  for (const auto& p : corpus.pairs) pos += static_cast<std::size_t>(p.label);
  std::cout << "wrote " << corpus.pairs.size() << " pairs to " << o.out << " (label 1: " << pos
            << ", label 0: " << (corpus.pairs.size() - pos) << ")\n"
            << "planted " << corpus.topic_tokens.size() << " topic tokens across "
            << o.cfg.n_topics << " topics and " << corpus.filler_tokens.size()
            << " filler tokens\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MatchPyramid text matcher: similarity-image convolutional pair classifier"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "Read options from an INI file (sections per subcommand)");

  TrainOpts train_opts;
  CLI::App* train_cmd = app.add_subcommand("train", "Train a model and save the best checkpoint");
  train_cmd->add_option("--data", train_opts.data, "Labeled pairs TSV")
      ->required()
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--schema", train_opts.schema, "TSV layout: generic|msrp");
  train_cmd->add_option("--val-data", train_opts.val_data,
                        "Validation TSV (otherwise --data is split)")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--train-frac", train_opts.train_frac, "Training fraction of --data");
  train_cmd->add_option("--val-frac", train_opts.val_frac, "Validation fraction");
  train_cmd->add_option("--test-frac", train_opts.test_frac, "Test fraction");
  train_cmd->add_option("--op", train_opts.op, "Matching operator: indicator|cosine|dot");
  train_cmd->add_option("--embedding-dim", train_opts.model.embedding_dim, "Embedding size");
  train_cmd->add_option("--conv1-maps", train_opts.model.conv1_maps, "First conv feature maps");
  train_cmd->add_option("--conv1-kernel", train_opts.model.conv1_kernel, "First conv kernel");
  train_cmd->add_option("--conv2-maps", train_opts.model.conv2_maps, "Second conv feature maps");
  train_cmd->add_option("--conv2-kernel", train_opts.model.conv2_kernel, "Second conv kernel");
  train_cmd->add_option("--grid", train_opts.grid, "Dynamic pooling grid size");
  train_cmd->add_option("--pool2", train_opts.model.pool2, "Fixed pooling window");
  train_cmd->add_option("--hidden", train_opts.model.mlp_hidden, "Hidden layer width");
  train_cmd->add_option("--dropout", train_opts.model.dropout_rate, "Dropout rate");
  train_cmd->add_option("--max-len", train_opts.max_len, "Keep the first N tokens (0 = all)");
  train_cmd->add_option("--min-count", train_opts.min_count, "Vocabulary frequency cutoff");
  train_cmd->add_option("--batch-size", train_opts.trainer.batch_size, "Minibatch size");
  train_cmd->add_option("--lr", train_opts.trainer.learning_rate, "Learning rate");
  train_cmd->add_option("--adagrad-eps", train_opts.trainer.adagrad_epsilon,
                        "Adagrad denominator epsilon");
  train_cmd->add_option("--epochs", train_opts.trainer.max_epochs, "Maximum epochs");
  train_cmd->add_option("--patience", train_opts.trainer.patience,
                        "Early-stop patience (epochs without a new best)");
  train_cmd->add_option("--seed", train_opts.trainer.seed, "Random seed");
  train_cmd->add_option("--workers", train_opts.trainer.workers, "Gradient worker threads");
  train_cmd->add_option("--out-dir", train_opts.out_dir, "Output directory")
      ->envname("MP_OUT_DIR");

  EvalOpts eval_opts;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on a labeled TSV");
  eval_cmd->add_option("--checkpoint", eval_opts.checkpoint, "Model checkpoint")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--data", eval_opts.data, "Labeled pairs TSV")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--schema", eval_opts.schema, "TSV layout: generic|msrp");
  eval_cmd->add_option("--max-len", eval_opts.max_len, "Keep the first N tokens (0 = all)");
  eval_cmd->add_flag("--with-baselines", eval_opts.with_baselines,
                     "Also score all-positive and tf-idf baselines");
  eval_cmd->add_option("--baseline-train", eval_opts.baseline_train,
                       "Training TSV for baseline threshold fitting")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--emb-norms", eval_opts.emb_norms,
                       "Print the K largest and smallest embedding norms");
  eval_cmd->add_flag("--export-embeddings", eval_opts.export_embeddings,
                     "Write embeddings.tsv to the output directory");
  eval_cmd->add_option("--out-dir", eval_opts.out_dir,
                       "Write metrics.txt and predictions.tsv here")
      ->envname("MP_OUT_DIR");

  PredictOpts predict_opts;
  CLI::App* predict_cmd = app.add_subcommand("predict", "Classify a single pair of texts");
  predict_cmd->add_option("--checkpoint", predict_opts.checkpoint, "Model checkpoint")
      ->required()
      ->check(CLI::ExistingFile);
  predict_cmd->add_option("--a", predict_opts.text_a, "First text")->required();
  predict_cmd->add_option("--b", predict_opts.text_b, "Second text")->required();
  predict_cmd->add_option("--max-len", predict_opts.max_len, "Keep the first N tokens (0 = all)");

  VisualizeOpts vis_opts;
  CLI::App* vis_cmd =
      app.add_subcommand("visualize", "Export matching matrix, kernels, and feature maps as PGM");
  vis_cmd->add_option("--checkpoint", vis_opts.checkpoint, "Model checkpoint")
      ->required()
      ->check(CLI::ExistingFile);
  vis_cmd->add_option("--a", vis_opts.text_a, "First text")->required();
  vis_cmd->add_option("--b", vis_opts.text_b, "Second text")->required();
  vis_cmd->add_option("--max-len", vis_opts.max_len, "Keep the first N tokens (0 = all)");
  vis_cmd->add_option("--out-dir", vis_opts.out_dir, "Output directory")->envname("MP_OUT_DIR");

  GenDataOpts gen_opts;
  CLI::App* gen_cmd = app.add_subcommand("gen-data", "Generate a synthetic matching corpus");
  gen_cmd->add_option("--out", gen_opts.out, "Output TSV path")->required();
  gen_cmd->add_option("--positives", gen_opts.cfg.n_positive, "Number of positive pairs");
  gen_cmd->add_option("--neg-per-pos", gen_opts.cfg.neg_per_pos, "Negatives per positive");
  gen_cmd->add_option("--topics", gen_opts.cfg.n_topics, "Number of planted topics");
  gen_cmd->add_option("--topic-pool", gen_opts.cfg.topic_pool, "Words per topic");
  gen_cmd->add_option("--fillers", gen_opts.cfg.n_fillers, "Shared filler vocabulary size");
  gen_cmd->add_option("--len-min", gen_opts.cfg.len_min, "Minimum sentence length");
  gen_cmd->add_option("--len-max", gen_opts.cfg.len_max, "Maximum sentence length");
  gen_cmd->add_option("--topic-prob", gen_opts.cfg.topic_prob,
                      "Chance a position draws a topic word");
  gen_cmd->add_option("--copy-prob", gen_opts.cfg.copy_prob,
                      "Chance a positive pair shares a copied chunk");
  gen_cmd->add_option("--seed", gen_opts.cfg.seed, "Random seed");

  try {
    app.parse(argc, argv);
    if (train_cmd->parsed()) return run_train(train_opts, app.config_to_str(true, true));
    if (eval_cmd->parsed()) return run_eval(eval_opts);
    if (predict_cmd->parsed()) return run_predict(predict_opts);
    if (vis_cmd->parsed()) return run_visualize(vis_opts);
    if (gen_cmd->parsed()) return run_gen_data(gen_opts);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const mp::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mp::SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

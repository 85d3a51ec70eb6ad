// tbsa — command-line front end for the target-based sentiment tagger.
//
// Commands: train, eval, tag, convert, gradcheck, sweep, ablation.
// Exit status: 0 success, 1 usage error, 2 data error, 3 numerical failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tbsa/corpus.hpp"
#include "tbsa/error.hpp"
#include "tbsa/evaluator.hpp"
#include "tbsa/model.hpp"
#include "tbsa/tags.hpp"
#include "tbsa/trainer.hpp"
#include "../src/json_util.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

// --- shared option plumbing -------------------------------------------------

struct ModelFlags {
  tbsa::ModelConfig cfg;
  bool no_bg = false, no_sc = false, no_oe = false, freeze_transition = false;

  tbsa::ModelConfig resolve() const {
    tbsa::ModelConfig c = cfg;
    c.use_bg = !no_bg;
    c.use_sc = !no_sc;
    c.use_oe = !no_oe;
    c.transition_trainable = !freeze_transition;
    c.validate();
    return c;
  }
};

void add_model_options(CLI::App* cmd, ModelFlags& f) {
  cmd->add_option("--embedding-dim", f.cfg.embedding_dim, "word vector width")
      ->capture_default_str();
  cmd->add_option("--boundary-hidden", f.cfg.boundary_hidden,
                  "boundary BiLSTM width (both directions; even)")
      ->capture_default_str();
  cmd->add_option("--unified-hidden", f.cfg.unified_hidden,
                  "unified BiLSTM width (both directions; even)")
      ->capture_default_str();
  cmd->add_option("--epsilon", f.cfg.epsilon, "boundary-guidance mix cap, in [0,1]")
      ->capture_default_str();
  cmd->add_option("--window", f.cfg.window, "opinion-word proximity window")
      ->capture_default_str();
  cmd->add_option("--dropout", f.cfg.dropout, "dropout rate, in [0,1)")->capture_default_str();
  cmd->add_option("--seed", f.cfg.seed, "master seed")->capture_default_str();
  cmd->add_flag("--no-bg", f.no_bg, "disable the boundary-guidance mix");
  cmd->add_flag("--no-sc", f.no_sc, "disable the sentiment-consistency gate");
  cmd->add_flag("--no-oe", f.no_oe, "disable the opinion-word auxiliary head");
  cmd->add_flag("--freeze-transition", f.freeze_transition,
                "keep the boundary-to-unified transition matrix at its initial value");
}

void add_train_options(CLI::App* cmd, tbsa::TrainConfig& t) {
  cmd->add_option("--epochs", t.epochs, "training epochs")->capture_default_str();
  cmd->add_option("--lr", t.lr0, "initial learning rate")->capture_default_str();
  cmd->add_option("--decay", t.decay, "learning-rate decay per epoch")->capture_default_str();
  cmd->add_option("--beta1", t.beta1, "Adam first-moment decay")->capture_default_str();
  cmd->add_option("--beta2", t.beta2, "Adam second-moment decay")->capture_default_str();
  cmd->add_option("--batch-size", t.batch_size, "sentences per optimizer step")
      ->capture_default_str();
  cmd->add_option("--clip-norm", t.clip_norm, "max gradient norm; 0 disables clipping")
      ->capture_default_str();
}

void add_config_file(CLI::App* cmd) {
  cmd->set_config("--config", "", "read options from a key=value file (flags override it)");
}

json run_config_json(const tbsa::ModelConfig& m, const tbsa::TrainConfig* t) {
  json j{{"model", tbsa::to_json(m)}};
  if (t != nullptr) j["train"] = tbsa::to_json(*t);
  return j;
}

// Every command echoes its resolved configuration so a run is reproducible
// from the artifact alone; stderr keeps stdout clean for data output.
void echo_config(const json& j) { std::cerr << "config " << j.dump() << "\n"; }

std::vector<tbsa::Sentence> load_dev(std::vector<tbsa::Sentence>& train_set,
                                     const std::string& dev_path, double dev_fraction,
                                     std::uint64_t seed) {
  if (!dev_path.empty()) return tbsa::load_conll(dev_path);
  auto [rest, dev] = tbsa::split_dev(std::move(train_set), dev_fraction,
                                     tbsa::derive_seed(seed, 6));
  train_set = std::move(rest);
  return dev;
}

tbsa::OpinionLexicon load_lexicon_checked(const std::string& path, const tbsa::ModelConfig& cfg) {
  if (path.empty()) {
    if (cfg.use_oe) {
      throw CLI::ValidationError("--lexicon",
                                 "the opinion head needs an opinion lexicon (or pass --no-oe)");
    }
    return {};
  }
  return tbsa::load_lexicon(path);
}

std::ostream& open_sink(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw tbsa::DataError("cannot open output file: " + path);
  return file;
}

std::string format_spans(const std::vector<tbsa::TargetSpan>& spans) {
  if (spans.empty()) return "-";
  std::string out;
  for (const auto& sp : spans) {
    if (!out.empty()) out += " ";
    out += std::to_string(sp.start) + ":" + std::to_string(sp.end);
    if (sp.sentiment) out += ":" + tbsa::to_string(*sp.sentiment);
  }
  return out;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> toks;
  std::string t;
  while (in >> t) toks.push_back(t);
  return toks;
}

// --- train -------------------------------------------------------------------

struct TrainArgs {
  std::string train_path, dev_path, embeddings, lexicon, out, history;
  double dev_fraction = 0.1;
  ModelFlags model;
  tbsa::TrainConfig tcfg;
};

int run_train(const TrainArgs& a) {
  tbsa::ModelConfig cfg = a.model.resolve();
  a.tcfg.validate();
  auto train_set = tbsa::load_conll(a.train_path);
  auto dev_set = load_dev(train_set, a.dev_path, a.dev_fraction, cfg.seed);
  auto lexicon = load_lexicon_checked(a.lexicon, cfg);

  auto vocab = tbsa::Vocabulary::from_sentences(train_set, dev_set);
  auto table = tbsa::load_embeddings(a.embeddings, vocab, cfg.embedding_dim,
                                     tbsa::derive_seed(cfg.seed, 1));
  tbsa::Model model = tbsa::make_model(cfg, table);

  echo_config(run_config_json(cfg, &a.tcfg));
  tbsa::TrainHistory history = tbsa::train(model, train_set, dev_set, lexicon, a.tcfg);

  tbsa::save_model(model, a.out);
  const std::string history_path = a.history.empty() ? a.out + ".history.jsonl" : a.history;
  tbsa::write_history_jsonl(history, cfg, a.tcfg, history_path);

  const auto& best = history.epochs.at(history.best_epoch);
  std::cout << "trained " << history.epochs.size() << " epochs on " << train_set.size()
            << " sentences (dev " << dev_set.size() << ")\n"
            << "best epoch " << best.epoch << ": dev P=" << best.dev_precision
            << " R=" << best.dev_recall << " F1=" << best.dev_f1 << "\n"
            << "checkpoint: " << a.out << "\nhistory: " << history_path << "\n";
  return kExitOk;
}

// --- eval --------------------------------------------------------------------

struct EvalArgs {
  std::string model, test, dataset, report;
};

int run_eval(const EvalArgs& a) {
  tbsa::Model model = tbsa::load_model(a.model);
  auto test_set = tbsa::load_conll(a.test);
  const std::string name = a.dataset.empty() ? a.test : a.dataset;
  echo_config(run_config_json(model.config, nullptr));

  tbsa::CorpusEval ev = tbsa::evaluate_corpus(model, test_set);

  auto row = [](const char* label, const tbsa::PRF& p) {
    std::ostringstream os;
    os << label << "  P=" << p.precision << " R=" << p.recall << " F1=" << p.f1 << "  (tp="
       << p.tp << " pred=" << p.n_pred << " gold=" << p.n_gold << ")";
    return os.str();
  };
  std::cout << "dataset: " << name << " (" << test_set.size() << " sentences)\n"
            << row("unified ", ev.unified) << "\n"
            << row("boundary", ev.boundary) << "\n";

  if (!a.report.empty()) {
    std::ofstream out(a.report);
    if (!out) throw tbsa::DataError("cannot open output file: " + a.report);
    auto record = [&](const char* task, const tbsa::PRF& p) {
      json rec{{"dataset", name},          {"task", task},
               {"precision", p.precision}, {"recall", p.recall},
               {"f1", p.f1},               {"tp", p.tp},
               {"n_pred", p.n_pred},       {"n_gold", p.n_gold},
               {"config", tbsa::to_json(model.config)}};
      out << rec.dump() << "\n";
    };
    record("unified", ev.unified);
    record("boundary", ev.boundary);
    std::cout << "report: " << a.report << "\n";
  }
  return kExitOk;
}

// --- tag ---------------------------------------------------------------------

struct TagArgs {
  std::string model, input, output;
};

int run_tag(const TagArgs& a) {
  tbsa::Model model = tbsa::load_model(a.model);
  echo_config(run_config_json(model.config, nullptr));

  std::ifstream in_file;
  std::istream& in = (a.input.empty() || a.input == "-") ? std::cin : in_file;
  if (&in == &in_file) {
    in_file.open(a.input);
    if (!in_file) throw tbsa::DataError("cannot open input file: " + a.input);
  }
  std::ofstream out_file;
  std::ostream& out = open_sink(a.output, out_file);

  // One pre-tokenized sentence per line; output stays line-aligned.
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto tokens = split_ws(line);
    if (tokens.empty()) {
      out << "\n";
      continue;
    }
    tbsa::Prediction pred = tbsa::predict(model, tokens);
    for (std::size_t i = 0; i < pred.unified.size(); ++i) {
      if (i) out << " ";
      out << tbsa::to_string(pred.unified[i]);
    }
    out << "\t" << format_spans(pred.spans) << "\n";
  }
  return kExitOk;
}

// --- convert -----------------------------------------------------------------

struct ConvertArgs {
  std::string input, output;
  std::string from = "conll", to = "spans";
  std::string scheme = "unified";
};

json span_to_json(const tbsa::TargetSpan& sp) {
  json j{{"start", sp.start}, {"end", sp.end}};
  if (sp.sentiment) j["sentiment"] = tbsa::to_string(*sp.sentiment);
  return j;
}

std::vector<tbsa::Sentence> read_span_records(std::istream& in) {
  std::vector<tbsa::Sentence> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw tbsa::DataError("line " + std::to_string(lineno) + ": bad record: " + e.what());
    }
    try {
      tbsa::Sentence s;
      s.id = j.value("id", "s" + std::to_string(out.size() + 1));
      s.tokens = j.at("tokens").get<std::vector<std::string>>();
      for (const auto& sj : j.value("spans", json::array())) {
        tbsa::TargetSpan sp(sj.at("start").get<std::size_t>(), sj.at("end").get<std::size_t>());
        if (sj.contains("sentiment")) {
          sp.sentiment = tbsa::parse_sentiment(sj.at("sentiment").get<std::string>());
        }
        s.spans.push_back(sp);
      }
      tbsa::validate_spans(s.tokens.size(), s.spans, /*require_sentiment=*/false);
      out.push_back(std::move(s));
    } catch (const json::exception& e) {
      throw tbsa::DataError("line " + std::to_string(lineno) + ": bad record: " + e.what());
    }
  }
  return out;
}

int run_convert(const ConvertArgs& a) {
  std::vector<tbsa::Sentence> sentences;
  if (a.from == "conll") {
    sentences = tbsa::load_conll(a.input);
  } else if (a.from == "spans") {
    std::ifstream in(a.input);
    if (!in) throw tbsa::DataError("cannot open input file: " + a.input);
    sentences = read_span_records(in);
  } else {
    throw CLI::ValidationError("--from", "expected 'conll' or 'spans'");
  }

  std::ofstream out_file;
  std::ostream& out = open_sink(a.output, out_file);
  if (a.to == "conll") {
    out << tbsa::convert_spans_to_conll(sentences, tbsa::parse_scheme(a.scheme));
  } else if (a.to == "spans") {
    for (const auto& s : sentences) {
      json spans = json::array();
      for (const auto& sp : s.spans) spans.push_back(span_to_json(sp));
      out << json{{"id", s.id}, {"tokens", s.tokens}, {"spans", spans}}.dump() << "\n";
    }
  } else {
    throw CLI::ValidationError("--to", "expected 'conll' or 'spans'");
  }
  return kExitOk;
}

// --- gradcheck -----------------------------------------------------------------

struct GradcheckArgs {
  std::size_t dims = 4;
  std::size_t tokens = 6;
  double tol = 1e-4;
  ModelFlags model;
};

int run_gradcheck(const GradcheckArgs& a) {
  tbsa::ModelConfig cfg = a.model.resolve();
  cfg.embedding_dim = a.dims;
  cfg.boundary_hidden = a.dims + (a.dims % 2);
  cfg.unified_hidden = a.dims + (a.dims % 2);
  cfg.validate();
  if (a.tokens < 2) throw CLI::ValidationError("--tokens", "need at least 2 tokens");

  // A fixed probe sentence with a multi-token and a single-token target.
  tbsa::Sentence s;
  s.id = "probe";
  for (std::size_t i = 0; i < a.tokens; ++i) s.tokens.push_back("t" + std::to_string(i));
  s.spans.emplace_back(0, std::min<std::size_t>(1, a.tokens - 1), tbsa::Sentiment::Pos);
  s.spans.emplace_back(a.tokens - 1, a.tokens - 1, tbsa::Sentiment::Neg);
  tbsa::OpinionLexicon lexicon;
  lexicon.words.insert("t" + std::to_string(a.tokens / 2));

  auto vocab = tbsa::Vocabulary::from_sentences({s});
  auto table = tbsa::load_embeddings("", vocab, cfg.embedding_dim, tbsa::derive_seed(cfg.seed, 1));
  tbsa::Model model = tbsa::make_model(cfg, table);
  echo_config(run_config_json(cfg, nullptr));

  tbsa::GradCheckReport report = tbsa::grad_check(model, s, lexicon, a.tol);
  for (const auto& g : report.groups) {
    std::cout << "  " << g.name << ": max rel err " << g.max_rel_error << "\n";
  }
  std::cout << "gradient check: max rel err " << report.max_rel_error << " vs tolerance "
            << report.tolerance << " -> " << (report.pass ? "pass" : "FAIL") << "\n";
  return report.pass ? kExitOk : kExitNumeric;
}

// --- sweep ---------------------------------------------------------------------

struct SweepArgs {
  std::string train_path, dev_path, embeddings, lexicon, out;
  double dev_fraction = 0.1;
  std::vector<double> epsilons{0.0, 0.3, 0.4, 0.5, 0.6, 0.7, 1.0};
  std::vector<std::size_t> windows{1, 2, 3, 4, 5};
  ModelFlags model;
  tbsa::TrainConfig tcfg;
};

int run_sweep(const SweepArgs& a) {
  tbsa::ModelConfig cfg = a.model.resolve();
  a.tcfg.validate();
  auto train_set = tbsa::load_conll(a.train_path);
  auto dev_set = load_dev(train_set, a.dev_path, a.dev_fraction, cfg.seed);
  auto lexicon = load_lexicon_checked(a.lexicon, cfg);
  auto vocab = tbsa::Vocabulary::from_sentences(train_set, dev_set);
  auto table = tbsa::load_embeddings(a.embeddings, vocab, cfg.embedding_dim,
                                     tbsa::derive_seed(cfg.seed, 1));
  echo_config(run_config_json(cfg, &a.tcfg));

  auto points = tbsa::sweep(train_set, dev_set, lexicon, table, cfg, a.tcfg, a.epsilons,
                            a.windows);

  std::ofstream out_file;
  std::ostream& out = open_sink(a.out, out_file);
  for (const auto& p : points) {
    json rec{{"epsilon", p.epsilon},
             {"window", p.window},
             {"dev_f1", p.dev_f1},
             {"config", run_config_json(cfg, &a.tcfg)}};
    out << rec.dump() << "\n";
  }
  std::cerr << points.size() << " grid points\n";
  return kExitOk;
}

// --- ablation --------------------------------------------------------------------

struct AblationArgs {
  std::string train_path, dev_path, test_path, embeddings, lexicon, out;
  double dev_fraction = 0.1;
  ModelFlags model;
  tbsa::TrainConfig tcfg;
};

int run_ablation(const AblationArgs& a) {
  tbsa::ModelConfig cfg = a.model.resolve();
  a.tcfg.validate();
  auto train_set = tbsa::load_conll(a.train_path);
  auto dev_set = load_dev(train_set, a.dev_path, a.dev_fraction, cfg.seed);
  auto test_set = tbsa::load_conll(a.test_path);
  auto lexicon = load_lexicon_checked(a.lexicon, cfg);
  auto vocab = tbsa::Vocabulary::from_sentences(train_set, dev_set);
  auto table = tbsa::load_embeddings(a.embeddings, vocab, cfg.embedding_dim,
                                     tbsa::derive_seed(cfg.seed, 1));
  echo_config(run_config_json(cfg, &a.tcfg));

  auto rows = tbsa::ablation_table(train_set, dev_set, test_set, lexicon, table, cfg, a.tcfg);

  std::ofstream out_file;
  std::ostream* records = nullptr;
  if (!a.out.empty()) {
    records = &open_sink(a.out, out_file);
  }
  std::cout << "variant        dev F1    test P    test R    test F1\n";
  for (const auto& r : rows) {
    std::ostringstream line;
    line.setf(std::ios::fixed);
    line.precision(4);
    line << r.name;
    for (std::size_t i = r.name.size(); i < 15; ++i) line << ' ';
    line << r.dev_f1 << "    " << r.test.precision << "    " << r.test.recall << "    "
         << r.test.f1;
    std::cout << line.str() << "\n";
    if (records != nullptr) {
      json rec{{"variant", r.name},
               {"dev_f1", r.dev_f1},
               {"test_precision", r.test.precision},
               {"test_recall", r.test.recall},
               {"test_f1", r.test.f1},
               {"config", run_config_json(r.config, &a.tcfg)}};
      *records << rec.dump() << "\n";
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Target-based sentiment tagger: span extraction with sentiment polarity"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "train a model and write a checkpoint");
  add_config_file(train_cmd);
  train_cmd->add_option("--train", train_args.train_path, "training corpus (CoNLL)")
      ->required()
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--dev", train_args.dev_path, "development corpus (CoNLL)")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--dev-fraction", train_args.dev_fraction,
                        "fraction of --train held out when --dev is absent")
      ->capture_default_str();
  train_cmd->add_option("--embeddings", train_args.embeddings, "pre-trained word vectors")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--lexicon", train_args.lexicon, "opinion-word list")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--out", train_args.out, "checkpoint path")->required();
  train_cmd->add_option("--history", train_args.history,
                        "history path (default: <out>.history.jsonl)");
  add_model_options(train_cmd, train_args.model);
  add_train_options(train_cmd, train_args.tcfg);

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "score a checkpoint on a labeled corpus");
  add_config_file(eval_cmd);
  eval_cmd->add_option("--model", eval_args.model, "checkpoint path")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--test", eval_args.test, "labeled corpus (CoNLL)")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--dataset", eval_args.dataset, "dataset name for the report");
  eval_cmd->add_option("--report", eval_args.report, "write line-delimited records here");

  TagArgs tag_args;
  auto* tag_cmd = app.add_subcommand("tag", "tag pre-tokenized sentences (one per line)");
  add_config_file(tag_cmd);
  tag_cmd->add_option("--model", tag_args.model, "checkpoint path")
      ->required()
      ->check(CLI::ExistingFile);
  tag_cmd->add_option("--input", tag_args.input, "input file; '-' for stdin")
      ->capture_default_str();
  tag_cmd->add_option("--output", tag_args.output, "output file; '-' for stdout");

  ConvertArgs convert_args;
  auto* convert_cmd = app.add_subcommand("convert", "convert between corpus formats");
  add_config_file(convert_cmd);
  convert_cmd->add_option("--input", convert_args.input, "input file")
      ->required()
      ->check(CLI::ExistingFile);
  convert_cmd->add_option("--output", convert_args.output, "output file; '-' for stdout");
  convert_cmd->add_option("--from", convert_args.from, "input format: conll | spans")
      ->capture_default_str();
  convert_cmd->add_option("--to", convert_args.to, "output format: conll | spans")
      ->capture_default_str();
  convert_cmd
      ->add_option("--scheme", convert_args.scheme,
                   "tag scheme for CoNLL output: unified | boundary | joint")
      ->capture_default_str();

  GradcheckArgs gradcheck_args;
  auto* gradcheck_cmd =
      app.add_subcommand("gradcheck", "compare analytic gradients with finite differences");
  add_config_file(gradcheck_cmd);
  gradcheck_cmd->add_option("--dims", gradcheck_args.dims, "model width for the probe")
      ->capture_default_str();
  gradcheck_cmd->add_option("--tokens", gradcheck_args.tokens, "probe sentence length")
      ->capture_default_str();
  gradcheck_cmd->add_option("--tol", gradcheck_args.tol, "max relative error accepted")
      ->capture_default_str();
  add_model_options(gradcheck_cmd, gradcheck_args.model);

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "grid over epsilon and the opinion window");
  add_config_file(sweep_cmd);
  sweep_cmd->add_option("--train", sweep_args.train_path, "training corpus (CoNLL)")
      ->required()
      ->check(CLI::ExistingFile);
  sweep_cmd->add_option("--dev", sweep_args.dev_path, "development corpus (CoNLL)")
      ->check(CLI::ExistingFile);
  sweep_cmd->add_option("--dev-fraction", sweep_args.dev_fraction,
                        "fraction of --train held out when --dev is absent")
      ->capture_default_str();
  sweep_cmd->add_option("--embeddings", sweep_args.embeddings, "pre-trained word vectors")
      ->check(CLI::ExistingFile);
  sweep_cmd->add_option("--lexicon", sweep_args.lexicon, "opinion-word list")
      ->check(CLI::ExistingFile);
  sweep_cmd->add_option("--epsilons", sweep_args.epsilons, "epsilon grid values")
      ->delimiter(',');
  sweep_cmd->add_option("--windows", sweep_args.windows, "window grid values")->delimiter(',');
  sweep_cmd->add_option("--out", sweep_args.out, "records file; '-' for stdout");
  add_model_options(sweep_cmd, sweep_args.model);
  add_train_options(sweep_cmd, sweep_args.tcfg);

  AblationArgs ablation_args;
  auto* ablation_cmd =
      app.add_subcommand("ablation", "train base/+bg/+bg+sc/+bg+oe/full and score them");
  add_config_file(ablation_cmd);
  ablation_cmd->add_option("--train", ablation_args.train_path, "training corpus (CoNLL)")
      ->required()
      ->check(CLI::ExistingFile);
  ablation_cmd->add_option("--dev", ablation_args.dev_path, "development corpus (CoNLL)")
      ->check(CLI::ExistingFile);
  ablation_cmd->add_option("--dev-fraction", ablation_args.dev_fraction,
                           "fraction of --train held out when --dev is absent")
      ->capture_default_str();
  ablation_cmd->add_option("--test", ablation_args.test_path, "test corpus (CoNLL)")
      ->required()
      ->check(CLI::ExistingFile);
  ablation_cmd->add_option("--embeddings", ablation_args.embeddings, "pre-trained word vectors")
      ->check(CLI::ExistingFile);
  ablation_cmd->add_option("--lexicon", ablation_args.lexicon, "opinion-word list")
      ->check(CLI::ExistingFile);
  ablation_cmd->add_option("--out", ablation_args.out, "records file");
  add_model_options(ablation_cmd, ablation_args.model);
  add_train_options(ablation_cmd, ablation_args.tcfg);

  try {
    app.parse(argc, argv);
    if (*train_cmd) return run_train(train_args);
    if (*eval_cmd) return run_eval(eval_args);
    if (*tag_cmd) return run_tag(tag_args);
    if (*convert_cmd) return run_convert(convert_args);
    if (*gradcheck_cmd) return run_gradcheck(gradcheck_args);
    if (*sweep_cmd) return run_sweep(sweep_args);
    if (*ablation_cmd) return run_ablation(ablation_args);
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const tbsa::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const tbsa::NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

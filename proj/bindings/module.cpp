// Python bindings for the target-based sentiment tagger.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include "tbsa/corpus.hpp"
#include "tbsa/error.hpp"
#include "tbsa/evaluator.hpp"
#include "tbsa/model.hpp"
#include "tbsa/tags.hpp"
#include "tbsa/tensor.hpp"
#include "tbsa/trainer.hpp"

namespace py = pybind11;
using namespace tbsa;

namespace {

std::string span_repr(const TargetSpan& sp) {
  std::ostringstream os;
  os << "TargetSpan(" << sp.start << ", " << sp.end;
  if (sp.sentiment) os << ", " << to_string(*sp.sentiment);
  os << ")";
  return os.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Target-based sentiment analysis: joint span extraction and polarity tagging";

  py::register_exception<DataError>(m, "DataError");
  py::register_exception<NumericError>(m, "NumericError");

  // --- tags ---------------------------------------------------------------
  py::enum_<Sentiment>(m, "Sentiment")
      .value("POS", Sentiment::Pos)
      .value("NEG", Sentiment::Neg)
      .value("NEU", Sentiment::Neu);

  py::enum_<BoundaryTag>(m, "BoundaryTag")
      .value("B", BoundaryTag::B)
      .value("I", BoundaryTag::I)
      .value("E", BoundaryTag::E)
      .value("S", BoundaryTag::S)
      .value("O", BoundaryTag::O);

  py::enum_<UnifiedTag>(m, "UnifiedTag")
      .value("B_POS", UnifiedTag::BPos)
      .value("I_POS", UnifiedTag::IPos)
      .value("E_POS", UnifiedTag::EPos)
      .value("S_POS", UnifiedTag::SPos)
      .value("B_NEG", UnifiedTag::BNeg)
      .value("I_NEG", UnifiedTag::INeg)
      .value("E_NEG", UnifiedTag::ENeg)
      .value("S_NEG", UnifiedTag::SNeg)
      .value("B_NEU", UnifiedTag::BNeu)
      .value("I_NEU", UnifiedTag::INeu)
      .value("E_NEU", UnifiedTag::ENeu)
      .value("S_NEU", UnifiedTag::SNeu)
      .value("O", UnifiedTag::O);

  py::class_<TargetSpan>(m, "TargetSpan")
      .def(py::init<std::size_t, std::size_t>(), py::arg("start"), py::arg("end"))
      .def(py::init<std::size_t, std::size_t, Sentiment>(), py::arg("start"), py::arg("end"),
           py::arg("sentiment"))
      .def_readwrite("start", &TargetSpan::start)
      .def_readwrite("end", &TargetSpan::end)
      .def_readwrite("sentiment", &TargetSpan::sentiment)
      .def("__eq__", [](const TargetSpan& a, const TargetSpan& b) { return a == b; })
      .def("__repr__", &span_repr);

  m.def("unified_tag_name", [](UnifiedTag t) { return to_string(t); });
  m.def("boundary_tag_name", [](BoundaryTag t) { return to_string(t); });
  m.def("sentiment_name", [](Sentiment s) { return to_string(s); });
  m.def("parse_unified_tag", &parse_unified_tag, py::arg("name"));
  m.def("parse_boundary_tag", &parse_boundary_tag, py::arg("name"));
  m.def("parse_sentiment", &parse_sentiment, py::arg("name"));
  m.def("make_unified", &make_unified, py::arg("boundary"), py::arg("sentiment"));
  m.def("boundary_of", &boundary_of, py::arg("tag"));
  m.def("sentiment_of", &sentiment_of, py::arg("tag"));

  m.def("encode_unified", &encode_unified, py::arg("length"), py::arg("spans"),
        "Spans -> unified tag sequence; rejects invalid or overlapping spans.");
  m.def("decode_unified", &decode_unified, py::arg("tags"),
        "Unified tags -> spans; total over ill-formed sequences (lenient reading).");
  m.def("encode_boundary", &encode_boundary, py::arg("length"), py::arg("spans"));
  m.def("decode_boundary", &decode_boundary, py::arg("tags"));

  // --- corpus ---------------------------------------------------------------
  py::class_<Sentence>(m, "Sentence")
      .def(py::init<>())
      .def(py::init([](std::string id, std::vector<std::string> tokens,
                       std::vector<TargetSpan> spans) {
             Sentence s;
             s.id = std::move(id);
             s.tokens = std::move(tokens);
             s.spans = std::move(spans);
             return s;
           }),
           py::arg("id"), py::arg("tokens"), py::arg("spans"))
      .def_readwrite("id", &Sentence::id)
      .def_readwrite("tokens", &Sentence::tokens)
      .def_readwrite("spans", &Sentence::spans);

  py::class_<Vocabulary>(m, "Vocabulary")
      .def(py::init<>())
      .def("add", &Vocabulary::add, py::arg("token"))
      .def("lookup", &Vocabulary::lookup, py::arg("token"))
      .def("contains", &Vocabulary::contains, py::arg("token"))
      .def("__len__", &Vocabulary::size)
      .def_property_readonly("tokens", &Vocabulary::tokens)
      .def_static("from_sentences", &Vocabulary::from_sentences, py::arg("a"),
                  py::arg("b") = std::vector<Sentence>{});

  py::class_<OpinionLexicon>(m, "OpinionLexicon")
      .def(py::init<>())
      .def(py::init([](const std::vector<std::string>& words) {
             OpinionLexicon lx;
             for (const auto& w : words) lx.words.insert(ascii_lower(w));
             return lx;
           }),
           py::arg("words"))
      .def("contains", &OpinionLexicon::contains, py::arg("token"))
      .def("__len__", [](const OpinionLexicon& lx) { return lx.words.size(); });

  py::class_<EmbeddingTable>(m, "EmbeddingTable")
      .def_readonly("vocab", &EmbeddingTable::vocab)
      .def_property_readonly("dim",
                             [](const EmbeddingTable& t) { return t.vectors.cols(); });

  m.def(
      "parse_conll",
      [](const std::string& text) {
        std::istringstream in(text);
        return parse_conll(in);
      },
      py::arg("text"), "Parse a CoNLL corpus given as a string.");
  m.def("load_conll", &load_conll, py::arg("path"));
  m.def(
      "to_conll",
      [](const std::vector<Sentence>& sentences, const std::string& scheme) {
        return convert_spans_to_conll(sentences, parse_scheme(scheme));
      },
      py::arg("sentences"), py::arg("scheme") = "unified");
  m.def(
      "parse_lexicon",
      [](const std::string& text) {
        std::istringstream in(text);
        return parse_lexicon(in);
      },
      py::arg("text"));
  m.def("load_lexicon", &load_lexicon, py::arg("path"));
  m.def("oe_labels", &generate_oe_labels, py::arg("sentence"), py::arg("lexicon"),
        py::arg("window"),
        "Distant opinion-presence labels: 1 iff a lexicon word sits within the window.");
  m.def("load_embeddings", &load_embeddings, py::arg("path"), py::arg("vocab"), py::arg("dim"),
        py::arg("seed"),
        "Read vectors for vocab words (empty path: all random) with seeded OOV draws.");
  m.def(
      "split_dev",
      [](std::vector<Sentence> sentences, double fraction, std::uint64_t seed) {
        return split_dev(std::move(sentences), fraction, seed);
      },
      py::arg("sentences"), py::arg("fraction"), py::arg("seed"),
      "Seeded shuffle; returns (train, dev).");
  m.def("derive_seed", &derive_seed, py::arg("seed"), py::arg("salt"));

  // --- configs ----------------------------------------------------------------
  py::class_<ModelConfig>(m, "ModelConfig")
      .def(py::init<>())
      .def_readwrite("embedding_dim", &ModelConfig::embedding_dim)
      .def_readwrite("boundary_hidden", &ModelConfig::boundary_hidden)
      .def_readwrite("unified_hidden", &ModelConfig::unified_hidden)
      .def_readwrite("epsilon", &ModelConfig::epsilon)
      .def_readwrite("window", &ModelConfig::window)
      .def_readwrite("dropout", &ModelConfig::dropout)
      .def_readwrite("use_bg", &ModelConfig::use_bg)
      .def_readwrite("use_sc", &ModelConfig::use_sc)
      .def_readwrite("use_oe", &ModelConfig::use_oe)
      .def_readwrite("transition_trainable", &ModelConfig::transition_trainable)
      .def_readwrite("seed", &ModelConfig::seed)
      .def("validate", &ModelConfig::validate);

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("lr0", &TrainConfig::lr0)
      .def_readwrite("beta1", &TrainConfig::beta1)
      .def_readwrite("beta2", &TrainConfig::beta2)
      .def_readwrite("decay", &TrainConfig::decay)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("clip_norm", &TrainConfig::clip_norm)
      .def("validate", &TrainConfig::validate);

  // --- model ------------------------------------------------------------------
  py::class_<Prediction>(m, "Prediction")
      .def_readonly("unified", &Prediction::unified)
      .def_readonly("boundary", &Prediction::boundary)
      .def_readonly("spans", &Prediction::spans)
      .def_readonly("boundary_spans", &Prediction::boundary_spans)
      .def_property_readonly("tags", [](const Prediction& p) {
        std::vector<std::string> out;
        out.reserve(p.unified.size());
        for (UnifiedTag t : p.unified) out.push_back(to_string(t));
        return out;
      });

  py::class_<Model>(m, "Model")
      .def_readonly("config", &Model::config)
      .def_readonly("vocab", &Model::vocab)
      .def("predict",
           [](const Model& model, const std::vector<std::string>& tokens) {
             return predict(model, tokens);
           },
           py::arg("tokens"))
      .def("save", [](const Model& model, const std::string& path) { save_model(model, path); },
           py::arg("path"));

  m.def("make_model", &make_model, py::arg("config"), py::arg("embeddings"));
  m.def("load_model", &load_model, py::arg("path"));

  // --- training and evaluation --------------------------------------------------
  py::class_<EpochRecord>(m, "EpochRecord")
      .def_readonly("epoch", &EpochRecord::epoch)
      .def_readonly("loss_boundary", &EpochRecord::loss_boundary)
      .def_readonly("loss_unified", &EpochRecord::loss_unified)
      .def_readonly("loss_opinion", &EpochRecord::loss_opinion)
      .def_readonly("dev_precision", &EpochRecord::dev_precision)
      .def_readonly("dev_recall", &EpochRecord::dev_recall)
      .def_readonly("dev_f1", &EpochRecord::dev_f1)
      .def_readonly("lr", &EpochRecord::lr);

  py::class_<TrainHistory>(m, "TrainHistory")
      .def_readonly("epochs", &TrainHistory::epochs)
      .def_readonly("best_epoch", &TrainHistory::best_epoch);

  m.def("train", &train, py::arg("model"), py::arg("train_set"), py::arg("dev_set"),
        py::arg("lexicon"), py::arg("config"),
        "Train in place; leaves the best-dev-F1 epoch's parameters in the model.");
  m.def("write_history_jsonl", &write_history_jsonl, py::arg("history"), py::arg("model_config"),
        py::arg("train_config"), py::arg("path"));

  py::class_<PRF>(m, "PRF")
      .def(py::init<>())
      .def_readwrite("tp", &PRF::tp)
      .def_readwrite("n_pred", &PRF::n_pred)
      .def_readwrite("n_gold", &PRF::n_gold)
      .def_readonly("precision", &PRF::precision)
      .def_readonly("recall", &PRF::recall)
      .def_readonly("f1", &PRF::f1)
      .def("finalize", &PRF::finalize)
      .def("__repr__", [](const PRF& p) {
        std::ostringstream os;
        os << "PRF(precision=" << p.precision << ", recall=" << p.recall << ", f1=" << p.f1
           << ")";
        return os.str();
      });

  py::class_<CorpusEval>(m, "CorpusEval")
      .def_readonly("unified", &CorpusEval::unified)
      .def_readonly("boundary", &CorpusEval::boundary);

  m.def("exact_match", &exact_match, py::arg("gold"), py::arg("pred"),
        "Micro exact-match counts for one sentence's spans.");
  m.def("evaluate_corpus", &evaluate_corpus, py::arg("model"), py::arg("sentences"));

  // --- gradient checking -----------------------------------------------------------
  py::class_<GradCheckGroup>(m, "GradCheckGroup")
      .def_readonly("name", &GradCheckGroup::name)
      .def_readonly("max_rel_error", &GradCheckGroup::max_rel_error);

  py::class_<GradCheckReport>(m, "GradCheckReport")
      .def_readonly("groups", &GradCheckReport::groups)
      .def_readonly("max_rel_error", &GradCheckReport::max_rel_error)
      .def_readonly("tolerance", &GradCheckReport::tolerance)
      .def_readonly("pass_", &GradCheckReport::pass)
      .def("__bool__", [](const GradCheckReport& r) { return r.pass; });

  m.def("grad_check", &grad_check, py::arg("model"), py::arg("sentence"), py::arg("lexicon"),
        py::arg("tolerance") = 1e-4,
        "Compare analytic gradients against central finite differences.");
}

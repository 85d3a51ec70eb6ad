#include "tbsa/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "tbsa/error.hpp"
#include "tbsa/rng.hpp"

namespace tbsa {
namespace {

constexpr const char* kUnkToken = "<unk>";

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream iss(s);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

bool parse_double(const std::string& s, double& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e;
}

bool is_integer(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

[[noreturn]] void fail_line(std::size_t line, const std::string& what) {
  throw DataError("line " + std::to_string(line) + ": " + what);
}

}  // namespace

std::string ascii_lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

Vocabulary::Vocabulary() { add(kUnkToken); }

std::size_t Vocabulary::add(const std::string& token) {
  auto [it, inserted] = index_.emplace(token, tokens_.size());
  if (inserted) tokens_.push_back(token);
  return it->second;
}

std::size_t Vocabulary::lookup(const std::string& token) const {
  auto it = index_.find(token);
  if (it != index_.end()) return it->second;
  it = index_.find(ascii_lower(token));
  if (it != index_.end()) return it->second;
  return kUnkIndex;
}

bool Vocabulary::contains(const std::string& token) const { return index_.count(token) != 0; }

Vocabulary Vocabulary::from_sentences(const std::vector<Sentence>& a,
                                      const std::vector<Sentence>& b) {
  Vocabulary v;
  for (const auto* part : {&a, &b}) {
    for (const Sentence& s : *part) {
      for (const std::string& tok : s.tokens) v.add(tok);
    }
  }
  return v;
}

std::vector<Sentence> parse_conll(std::istream& in) {
  std::vector<Sentence> out;
  std::vector<std::string> tokens;
  std::vector<UnifiedTag> tags;
  std::string line;
  std::size_t lineno = 0;

  auto flush = [&] {
    if (tokens.empty()) return;
    Sentence s;
    s.id = "s" + std::to_string(out.size() + 1);
    s.tokens = std::move(tokens);
    s.spans = decode_unified(tags);
    out.push_back(std::move(s));
    tokens.clear();
    tags.clear();
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) {
      flush();
      continue;
    }
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      fail_line(lineno, "expected exactly two tab-separated columns");
    }
    std::string tok = line.substr(0, tab);
    std::string tag = trim(line.substr(tab + 1));
    if (tok.empty()) fail_line(lineno, "empty token");
    try {
      tags.push_back(parse_unified_tag(tag));
    } catch (const DataError& e) {
      fail_line(lineno, e.what());
    }
    tokens.push_back(std::move(tok));
  }
  flush();
  return out;
}

std::vector<Sentence> load_conll(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file: " + path);
  return parse_conll(in);
}

Scheme parse_scheme(const std::string& name) {
  if (name == "unified") return Scheme::Unified;
  if (name == "boundary") return Scheme::Boundary;
  if (name == "joint") return Scheme::Joint;
  throw DataError("unknown scheme: " + name + " (expected unified, boundary, or joint)");
}

std::string convert_spans_to_conll(const std::vector<Sentence>& sentences, Scheme scheme) {
  std::ostringstream out;
  bool first = true;
  for (const Sentence& s : sentences) {
    if (!first) out << '\n';  // blank line separates sentences; no trailing separator
    first = false;
    if (scheme != Scheme::Boundary) {
      for (const TargetSpan& sp : s.spans) {
        if (!sp.sentiment) {
          throw DataError("sentence " + s.id + ": span without sentiment cannot be converted");
        }
      }
    }
    switch (scheme) {
      case Scheme::Unified: {
        auto tags = encode_unified(s.tokens.size(), s.spans);
        for (std::size_t t = 0; t < s.tokens.size(); ++t) {
          out << s.tokens[t] << '\t' << to_string(tags[t]) << '\n';
        }
        break;
      }
      case Scheme::Boundary: {
        auto tags = encode_boundary(s.tokens.size(), s.spans);
        for (std::size_t t = 0; t < s.tokens.size(); ++t) {
          out << s.tokens[t] << '\t' << to_string(tags[t]) << '\n';
        }
        break;
      }
      case Scheme::Joint: {
        auto tags = encode_boundary(s.tokens.size(), s.spans);
        std::vector<std::string> senti(s.tokens.size(), "O");
        for (const TargetSpan& sp : s.spans) {
          for (std::size_t t = sp.start; t <= sp.end; ++t) senti[t] = to_string(*sp.sentiment);
        }
        for (std::size_t t = 0; t < s.tokens.size(); ++t) {
          out << s.tokens[t] << '\t' << to_string(tags[t]) << '\t' << senti[t] << '\n';
        }
        break;
      }
    }
  }
  return out.str();
}

std::vector<int> generate_oe_labels(const Sentence& sentence, const OpinionLexicon& lexicon,
                                    std::size_t s) {
  if (s < 1) throw std::invalid_argument("window size must be >= 1");
  const std::size_t n = sentence.tokens.size();
  std::vector<int> hit(n, 0), labels(n, 0);
  for (std::size_t t = 0; t < n; ++t) hit[t] = lexicon.contains(sentence.tokens[t]) ? 1 : 0;
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t lo = t >= s ? t - s : 0;
    const std::size_t hi = std::min(n - 1, t + s);
    for (std::size_t u = lo; u <= hi; ++u) {
      if (u != t && hit[u]) {
        labels[t] = 1;
        break;
      }
    }
  }
  return labels;
}

OpinionLexicon parse_lexicon(std::istream& in) {
  OpinionLexicon lex;
  std::string line;
  while (std::getline(in, line)) {
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::string word = trim(line);
    if (!word.empty()) lex.words.insert(ascii_lower(word));
  }
  return lex;
}

OpinionLexicon load_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon file: " + path);
  return parse_lexicon(in);
}

EmbeddingTable read_embeddings(std::istream& in, const Vocabulary& vocab, std::size_t d,
                               std::uint64_t seed) {
  if (d == 0) throw std::invalid_argument("embedding dimension must be >= 1");
  std::unordered_map<std::string, std::vector<double>> file_vecs;
  // case-insensitive fallback, first occurrence wins (mirrors Vocabulary::lookup)
  std::unordered_map<std::string, const std::vector<double>*> lower_vecs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split_ws(line);
    if (lineno == 1 && fields.size() == 2 && is_integer(fields[0]) && is_integer(fields[1]) &&
        d != 1) {
      continue;  // vocab-size/dimension header
    }
    if (fields.size() < d + 1) fail_line(lineno, "expected token plus " + std::to_string(d) +
                                                     " values, got " +
                                                     std::to_string(fields.size()) + " fields");
    // values are the last d fields; anything before is the token (some
    // published embedding files contain tokens with internal spaces)
    std::vector<double> vec(d);
    for (std::size_t j = 0; j < d; ++j) {
      if (!parse_double(fields[fields.size() - d + j], vec[j])) {
        fail_line(lineno, "bad number: " + fields[fields.size() - d + j]);
      }
    }
    std::string tok = fields[0];
    for (std::size_t j = 1; j < fields.size() - d; ++j) tok += " " + fields[j];
    auto [it, inserted] = file_vecs.emplace(std::move(tok), std::move(vec));
    if (inserted) lower_vecs.emplace(ascii_lower(it->first), &it->second);
  }

  EmbeddingTable table;
  table.vocab = vocab;
  table.vectors = Tensor::matrix(vocab.size(), d);
  Rng rng(seed);
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    const std::string& tok = vocab.tokens()[i];
    const std::vector<double>* vec = nullptr;
    if (auto it = file_vecs.find(tok); it != file_vecs.end()) {
      vec = &it->second;
    } else if (auto lit = lower_vecs.find(ascii_lower(tok)); lit != lower_vecs.end()) {
      vec = lit->second;
    }
    if (vec) {
      for (std::size_t j = 0; j < d; ++j) table.vectors.at(i, j) = (*vec)[j];
    } else {
      for (std::size_t j = 0; j < d; ++j) {
        table.vectors.at(i, j) = rng.uniform(-table.oov_range, table.oov_range);
      }
    }
  }
  return table;
}

EmbeddingTable load_embeddings(const std::string& path, const Vocabulary& vocab, std::size_t d,
                               std::uint64_t seed) {
  if (path.empty()) {
    std::istringstream empty;
    return read_embeddings(empty, vocab, d, seed);
  }
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embedding file: " + path);
  return read_embeddings(in, vocab, d, seed);
}

std::pair<std::vector<Sentence>, std::vector<Sentence>> split_dev(std::vector<Sentence> train,
                                                                  double fraction,
                                                                  std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw std::invalid_argument("dev fraction must be in (0, 1)");
  }
  if (train.size() < 2) throw DataError("need at least 2 sentences to split off a dev set");
  Rng rng(seed);
  rng.shuffle(train);
  const auto k = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(train.size())));
  std::vector<Sentence> dev(train.begin(), train.begin() + static_cast<std::ptrdiff_t>(k));
  train.erase(train.begin(), train.begin() + static_cast<std::ptrdiff_t>(k));
  return {std::move(train), std::move(dev)};
}

std::array<std::size_t, kNumSentiments> count_spans_by_sentiment(
    const std::vector<Sentence>& sentences) {
  std::array<std::size_t, kNumSentiments> counts{};
  for (const Sentence& s : sentences) {
    for (const TargetSpan& sp : s.spans) {
      if (sp.sentiment) ++counts[static_cast<std::size_t>(*sp.sentiment)];
    }
  }
  return counts;
}

}  // namespace tbsa

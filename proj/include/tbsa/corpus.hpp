#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "tbsa/tags.hpp"
#include "tbsa/tensor.hpp"

namespace tbsa {

struct Sentence {
  std::string id;
  std::vector<std::string> tokens;
  std::vector<TargetSpan> spans;
};

// ASCII-only lowercasing; corpora and lexicon entries are English.
std::string ascii_lower(std::string s);

// Token -> index map. Index 0 is the unknown-word entry; lookup tries the
// exact surface form, then its lowercase form, then falls back to unknown.
class Vocabulary {
 public:
  static constexpr std::size_t kUnkIndex = 0;

  Vocabulary();

  std::size_t add(const std::string& token);  // idempotent
  std::size_t lookup(const std::string& token) const;
  bool contains(const std::string& token) const;
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  static Vocabulary from_sentences(const std::vector<Sentence>& a,
                                   const std::vector<Sentence>& b = {});

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> tokens_;
};

struct EmbeddingTable {
  Vocabulary vocab;
  Tensor vectors;  // |V| x d
  double oov_range = 0.25;
};

struct OpinionLexicon {
  std::unordered_set<std::string> words;  // stored lowercase

  bool contains(const std::string& token) const {
    return words.count(ascii_lower(token)) != 0;
  }
};

struct Dataset {
  std::string name;
  std::vector<Sentence> train, dev, test;
};

// Two-column format: `token<TAB>unified-tag`, one blank line between
// sentences. Sentence ids are assigned s1, s2, ... in file order.
std::vector<Sentence> parse_conll(std::istream& in);
std::vector<Sentence> load_conll(const std::string& path);

enum class Scheme { Unified, Boundary, Joint };

Scheme parse_scheme(const std::string& name);

// Inverse of parse_conll for Scheme::Unified. Joint emits three columns:
// token, boundary tag, and POS/NEG/NEU/O copied across each span.
std::string convert_spans_to_conll(const std::vector<Sentence>& sentences, Scheme scheme);

// Distant supervision for opinion-word presence: token t gets label 1 iff
// some other token within s positions on either side is in the lexicon.
std::vector<int> generate_oe_labels(const Sentence& sentence, const OpinionLexicon& lexicon,
                                    std::size_t s);

OpinionLexicon parse_lexicon(std::istream& in);
OpinionLexicon load_lexicon(const std::string& path);

// Vectors come from the file where available (exact match, then lowercase);
// everything else, including the whole table when path is empty, is drawn
// i.i.d. from U(-0.25, 0.25) with the given seed, in vocabulary order.
EmbeddingTable load_embeddings(const std::string& path, const Vocabulary& vocab, std::size_t d,
                               std::uint64_t seed);
EmbeddingTable read_embeddings(std::istream& in, const Vocabulary& vocab, std::size_t d,
                               std::uint64_t seed);

// Seeded shuffle; the first ceil(fraction*n) sentences become dev.
std::pair<std::vector<Sentence>, std::vector<Sentence>> split_dev(std::vector<Sentence> train,
                                                                  double fraction,
                                                                  std::uint64_t seed);

// Span tallies indexed by Sentiment (POS, NEG, NEU).
std::array<std::size_t, kNumSentiments> count_spans_by_sentiment(
    const std::vector<Sentence>& sentences);

}  // namespace tbsa

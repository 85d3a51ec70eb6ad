#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "tbsa/corpus.hpp"
#include "tbsa/error.hpp"
#include "tbsa/rng.hpp"
#include "tbsa/tags.hpp"

using namespace tbsa;

namespace {

std::vector<Sentence> parse(const std::string& text) {
  std::istringstream in(text);
  return parse_conll(in);
}

}  // namespace

TEST_CASE("conll parsing: tokens, ids, decoded spans") {
  auto sents = parse(
      "the\tO\n"
      "battery\tB-POS\n"
      "life\tE-POS\n"
      "rocks\tO\n"
      "\n"
      "bad\tO\n"
      "mouse\tS-NEG\n");
  REQUIRE(sents.size() == 2);
  CHECK(sents[0].id == "s1");
  CHECK(sents[1].id == "s2");
  CHECK(sents[0].tokens == std::vector<std::string>{"the", "battery", "life", "rocks"});
  CHECK(sents[0].spans == std::vector<TargetSpan>{{1, 2, Sentiment::Pos}});
  CHECK(sents[1].spans == std::vector<TargetSpan>{{1, 1, Sentiment::Neg}});
}

TEST_CASE("conll parsing tolerates CRLF and a missing final blank line") {
  auto sents = parse("a\tO\r\nb\tS-NEU\r\n\r\nc\tO");
  REQUIRE(sents.size() == 2);
  CHECK(sents[0].tokens == std::vector<std::string>{"a", "b"});
  CHECK(sents[1].tokens == std::vector<std::string>{"c"});
}

TEST_CASE("conll parsing reports the offending line") {
  // three columns
  CHECK_THROWS_WITH_AS(parse("a\tO\tO\n"), doctest::Contains("line 1"), DataError);
  // no tab
  CHECK_THROWS_AS(parse("a O\n"), DataError);
  // bad tag name on line 2
  CHECK_THROWS_WITH_AS(parse("a\tO\nb\tB-GOOD\n"), doctest::Contains("line 2"), DataError);
  // empty token
  CHECK_THROWS_AS(parse("\tO\n"), DataError);
}

TEST_CASE("converting spans back to conll inverts parsing") {
  const std::string text =
      "the\tO\n"
      "battery\tB-POS\n"
      "life\tE-POS\n"
      "\n"
      "screen\tS-NEU\n"
      "and\tO\n"
      "hard\tB-NEG\n"
      "disk\tI-NEG\n"
      "drive\tE-NEG\n";
  auto sents = parse(text);
  CHECK(convert_spans_to_conll(sents, Scheme::Unified) == text);

  // parse-of-convert is the identity on sentences as well
  auto again = parse(convert_spans_to_conll(sents, Scheme::Unified));
  REQUIRE(again.size() == sents.size());
  for (std::size_t i = 0; i < sents.size(); ++i) {
    CHECK(again[i].tokens == sents[i].tokens);
    CHECK(again[i].spans == sents[i].spans);
  }
}

TEST_CASE("joint and boundary output schemes") {
  auto sents = parse(
      "nice\tO\n"
      "key\tB-POS\n"
      "board\tE-POS\n"
      "case\tS-NEU\n"
      "\n");
  CHECK(convert_spans_to_conll(sents, Scheme::Joint) ==
        "nice\tO\tO\n"
        "key\tB\tPOS\n"
        "board\tE\tPOS\n"
        "case\tS\tNEU\n");
  CHECK(convert_spans_to_conll(sents, Scheme::Boundary) ==
        "nice\tO\n"
        "key\tB\n"
        "board\tE\n"
        "case\tS\n");

  // boundary-only spans cannot be written in a sentiment-bearing scheme
  Sentence bare;
  bare.id = "x";
  bare.tokens = {"a", "b"};
  bare.spans = {{0, 1}};
  CHECK_THROWS_AS(convert_spans_to_conll({bare}, Scheme::Unified), DataError);
  CHECK_THROWS_AS(convert_spans_to_conll({bare}, Scheme::Joint), DataError);
  CHECK_NOTHROW(convert_spans_to_conll({bare}, Scheme::Boundary));

  CHECK(parse_scheme("unified") == Scheme::Unified);
  CHECK_THROWS_AS(parse_scheme("bogus"), DataError);
}

TEST_CASE("vocabulary: unknown entry, idempotent add, case-fallback lookup") {
  Vocabulary v;
  CHECK(v.size() == 1);  // the unknown-word entry
  const std::size_t apple = v.add("Apple");
  CHECK(v.add("Apple") == apple);
  CHECK(v.lookup("Apple") == apple);
  const std::size_t lower = v.add("apple");
  CHECK(lower != apple);
  CHECK(v.lookup("apple") == lower);
  CHECK(v.lookup("APPLE") == lower);  // exact miss, lowercase fallback hits "apple"
  CHECK(v.lookup("never-seen") == Vocabulary::kUnkIndex);

  Vocabulary w;
  w.add("Great");
  // the fallback lowercases the query, not the stored entries
  CHECK(w.lookup("great") == Vocabulary::kUnkIndex);
  w.add("great");
  CHECK(w.lookup("GREAT") == w.lookup("great"));
}

TEST_CASE("vocabulary built from sentences keeps first-seen order") {
  auto sents = parse("b\tO\na\tO\nb\tO\n\nc\tO\n");
  Vocabulary v = Vocabulary::from_sentences(sents);
  CHECK(v.tokens() == std::vector<std::string>{"<unk>", "b", "a", "c"});
}

TEST_CASE("opinion labels mark neighbors of lexicon words, not the word itself") {
  Sentence s;
  s.tokens = {"a", "b", "c", "d", "e", "f", "g"};
  OpinionLexicon lex;
  lex.words = {"d"};
  CHECK(generate_oe_labels(s, lex, 2) == std::vector<int>{0, 1, 1, 0, 1, 1, 0});
  CHECK(generate_oe_labels(s, lex, 1) == std::vector<int>{0, 0, 1, 0, 1, 0, 0});

  // two adjacent lexicon words label each other
  Sentence t;
  t.tokens = {"x", "d", "d", "y"};
  CHECK(generate_oe_labels(t, lex, 1) == std::vector<int>{1, 1, 1, 1});

  // matching is case-insensitive
  Sentence u;
  u.tokens = {"D", "z"};
  CHECK(generate_oe_labels(u, lex, 3) == std::vector<int>{0, 1});

  CHECK_THROWS_AS(generate_oe_labels(s, lex, 0), std::invalid_argument);
}

TEST_CASE("lexicon parsing: comments, blanks, lowercasing") {
  std::istringstream in(
      "# opinion words\n"
      "Great\n"
      "\n"
      "  terrible  # inline comment\n"
      "ok\n");
  OpinionLexicon lex = parse_lexicon(in);
  CHECK(lex.words.size() == 3);
  CHECK(lex.contains("great"));
  CHECK(lex.contains("GREAT"));
  CHECK(lex.contains("terrible"));
  CHECK(lex.contains("ok"));
  CHECK(!lex.contains("#"));
}

TEST_CASE("embedding files: header, lookup order, token with spaces") {
  Vocabulary v;
  v.add("hello");
  v.add("world");
  v.add("new york");
  v.add("missing");

  std::istringstream in(
      "4 3\n"
      "hello 1 2 3\n"
      "World 4 5 6\n"
      "new york 7 8 9\n"
      "hello 0 0 0\n");  // duplicate: first occurrence wins
  EmbeddingTable t = read_embeddings(in, v, 3, 99);
  const std::size_t hello = v.lookup("hello");
  CHECK(t.vectors.at(hello, 0) == 1.0);
  CHECK(t.vectors.at(hello, 2) == 3.0);
  // "World" reaches vocab entry "world" through the lowercase fallback
  const std::size_t world = v.lookup("world");
  CHECK(t.vectors.at(world, 0) == 4.0);
  const std::size_t ny = v.lookup("new york");
  CHECK(t.vectors.at(ny, 1) == 8.0);
  // the absent token gets a seeded draw within the OOV range
  const std::size_t missing = v.lookup("missing");
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(std::abs(t.vectors.at(missing, j)) <= 0.25);
  }

  // identical seed reproduces identical OOV rows
  std::istringstream in2(
      "4 3\n"
      "hello 1 2 3\n"
      "World 4 5 6\n"
      "new york 7 8 9\n"
      "hello 0 0 0\n");
  EmbeddingTable t2 = read_embeddings(in2, v, 3, 99);
  CHECK(t.vectors == t2.vectors);
}

TEST_CASE("embedding files without a header and with bad rows") {
  Vocabulary v;
  v.add("a");
  {
    std::istringstream in("a 0.5 -0.5\n");
    EmbeddingTable t = read_embeddings(in, v, 2, 1);
    CHECK(t.vectors.at(v.lookup("a"), 0) == 0.5);
  }
  {
    std::istringstream in("a 0.5\n");  // too few values for d=2
    CHECK_THROWS_WITH_AS(read_embeddings(in, v, 2, 1), doctest::Contains("line 1"), DataError);
  }
  {
    std::istringstream in("a x y\n");
    CHECK_THROWS_AS(read_embeddings(in, v, 2, 1), DataError);
  }
  // empty path: every row drawn from the seeded range
  EmbeddingTable t = load_embeddings("", v, 4, 7);
  CHECK(t.vectors.rows() == v.size());
  for (std::size_t i = 0; i < t.vectors.size(); ++i) CHECK(std::abs(t.vectors[i]) <= 0.25);
}

TEST_CASE("dev split is a seeded partition") {
  auto sents = parse(
      "a\tO\n\nb\tO\n\nc\tO\n\nd\tO\n\ne\tO\n\nf\tO\n\ng\tO\n\nh\tO\n\ni\tO\n\nj\tO\n");
  REQUIRE(sents.size() == 10);
  auto [train1, dev1] = split_dev(sents, 0.2, 5);
  auto [train2, dev2] = split_dev(sents, 0.2, 5);
  CHECK(dev1.size() == 2);  // ceil(0.2 * 10)
  CHECK(train1.size() == 8);
  REQUIRE(dev1.size() == dev2.size());
  for (std::size_t i = 0; i < dev1.size(); ++i) CHECK(dev1[i].tokens == dev2[i].tokens);

  // every sentence lands on exactly one side
  std::vector<std::string> all;
  for (const auto& s : train1) all.push_back(s.tokens[0]);
  for (const auto& s : dev1) all.push_back(s.tokens[0]);
  std::sort(all.begin(), all.end());
  CHECK(all == std::vector<std::string>{"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"});

  auto [t3, d3] = split_dev(sents, 0.31, 5);
  CHECK(d3.size() == 4);  // ceil(3.1)

  CHECK_THROWS_AS(split_dev({sents[0]}, 0.5, 1), DataError);
  CHECK_THROWS_AS(split_dev(sents, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(split_dev(sents, 1.0, 1), std::invalid_argument);
}

TEST_CASE("span tallies by sentiment") {
  auto sents = parse(
      "a\tS-POS\nb\tS-NEG\n\nc\tB-POS\nd\tE-POS\ne\tS-NEU\n");
  auto counts = count_spans_by_sentiment(sents);
  CHECK(counts[static_cast<int>(Sentiment::Pos)] == 2);
  CHECK(counts[static_cast<int>(Sentiment::Neg)] == 1);
  CHECK(counts[static_cast<int>(Sentiment::Neu)] == 1);
}

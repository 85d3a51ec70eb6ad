#include "tbsa/tags.hpp"

#include <algorithm>
#include <cmath>

#include "tbsa/error.hpp"

namespace tbsa {

namespace {

const std::array<std::string, kNumBoundaryTags> kBoundaryNames = {"B", "I", "E", "S", "O"};
const std::array<std::string, kNumSentiments> kSentimentNames = {"POS", "NEG", "NEU"};
const std::array<std::string, kNumUnifiedTags> kUnifiedNames = {
    "B-POS", "I-POS", "E-POS", "S-POS",
    "B-NEG", "I-NEG", "E-NEG", "S-NEG",
    "B-NEU", "I-NEU", "E-NEU", "S-NEU",
    "O"};

std::string span_str(const TargetSpan& s) {
  std::string out = "(" + std::to_string(s.start) + "," + std::to_string(s.end);
  if (s.sentiment) out += "," + to_string(*s.sentiment);
  return out + ")";
}

}  // namespace

const std::string& to_string(BoundaryTag t) { return kBoundaryNames[static_cast<int>(t)]; }
const std::string& to_string(UnifiedTag t) { return kUnifiedNames[static_cast<int>(t)]; }
const std::string& to_string(Sentiment s) { return kSentimentNames[static_cast<int>(s)]; }

BoundaryTag parse_boundary_tag(const std::string& name) {
  for (std::size_t i = 0; i < kBoundaryNames.size(); ++i) {
    if (kBoundaryNames[i] == name) return static_cast<BoundaryTag>(i);
  }
  throw DataError("unknown boundary tag '" + name + "'");
}

UnifiedTag parse_unified_tag(const std::string& name) {
  for (std::size_t i = 0; i < kUnifiedNames.size(); ++i) {
    if (kUnifiedNames[i] == name) return static_cast<UnifiedTag>(i);
  }
  throw DataError("unknown unified tag '" + name + "'");
}

Sentiment parse_sentiment(const std::string& name) {
  for (std::size_t i = 0; i < kSentimentNames.size(); ++i) {
    if (kSentimentNames[i] == name) return static_cast<Sentiment>(i);
  }
  throw DataError("unknown sentiment '" + name + "'");
}

UnifiedTag make_unified(BoundaryTag b, Sentiment s) {
  if (b == BoundaryTag::O) throw std::invalid_argument("make_unified: O carries no sentiment");
  return static_cast<UnifiedTag>(static_cast<int>(s) * 4 + static_cast<int>(b));
}

BoundaryTag boundary_of(UnifiedTag t) {
  if (t == UnifiedTag::O) return BoundaryTag::O;
  return static_cast<BoundaryTag>(static_cast<int>(t) % 4);
}

std::optional<Sentiment> sentiment_of(UnifiedTag t) {
  if (t == UnifiedTag::O) return std::nullopt;
  return static_cast<Sentiment>(static_cast<int>(t) / 4);
}

void validate_spans(std::size_t len, const std::vector<TargetSpan>& spans,
                    bool require_sentiment) {
  for (const TargetSpan& s : spans) {
    if (s.start > s.end || s.end >= len) {
      throw DataError("span " + span_str(s) + " out of range for length " + std::to_string(len));
    }
    if (require_sentiment && !s.sentiment) {
      throw DataError("span " + span_str(s) + " is missing a sentiment");
    }
  }
  std::vector<TargetSpan> sorted = spans;
  std::sort(sorted.begin(), sorted.end(),
            [](const TargetSpan& a, const TargetSpan& b) { return a.start < b.start; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].start <= sorted[i - 1].end) {
      throw DataError("span " + span_str(sorted[i]) + " overlaps span " + span_str(sorted[i - 1]));
    }
  }
}

std::vector<BoundaryTag> encode_boundary(std::size_t len, const std::vector<TargetSpan>& spans) {
  validate_spans(len, spans, /*require_sentiment=*/false);
  std::vector<BoundaryTag> tags(len, BoundaryTag::O);
  for (const TargetSpan& s : spans) {
    if (s.start == s.end) {
      tags[s.start] = BoundaryTag::S;
    } else {
      tags[s.start] = BoundaryTag::B;
      for (std::size_t t = s.start + 1; t < s.end; ++t) tags[t] = BoundaryTag::I;
      tags[s.end] = BoundaryTag::E;
    }
  }
  return tags;
}

std::vector<UnifiedTag> encode_unified(std::size_t len, const std::vector<TargetSpan>& spans) {
  validate_spans(len, spans, /*require_sentiment=*/true);
  std::vector<UnifiedTag> tags(len, UnifiedTag::O);
  for (const TargetSpan& s : spans) {
    const Sentiment pol = *s.sentiment;
    if (s.start == s.end) {
      tags[s.start] = make_unified(BoundaryTag::S, pol);
    } else {
      tags[s.start] = make_unified(BoundaryTag::B, pol);
      for (std::size_t t = s.start + 1; t < s.end; ++t) tags[t] = make_unified(BoundaryTag::I, pol);
      tags[s.end] = make_unified(BoundaryTag::E, pol);
    }
  }
  return tags;
}

namespace {

// Shared lenient decoder over (boundary, sentiment) pairs; sentiments may be
// absent (boundary-only decoding).
class SpanBuilder {
 public:
  void open(std::size_t t, std::optional<Sentiment> pol) {
    open_ = true;
    start_ = t;
    sentiments_.clear();
    if (pol) sentiments_.push_back(*pol);
  }

  void extend(std::optional<Sentiment> pol) {
    if (pol) sentiments_.push_back(*pol);
  }

  void close(std::size_t end, std::vector<TargetSpan>& out) {
    TargetSpan span(start_, end);
    if (!sentiments_.empty()) span.sentiment = majority();
    out.push_back(span);
    open_ = false;
  }

  bool open_span() const { return open_; }

 private:
  // Majority vote; ties go to the sentiment whose first occurrence in the
  // span is earliest.
  Sentiment majority() const {
    std::array<std::size_t, kNumSentiments> count{}, first{};
    first.fill(sentiments_.size());
    for (std::size_t i = 0; i < sentiments_.size(); ++i) {
      const int s = static_cast<int>(sentiments_[i]);
      ++count[s];
      first[s] = std::min(first[s], i);
    }
    int best = 0;
    for (int s = 1; s < static_cast<int>(kNumSentiments); ++s) {
      if (count[s] > count[best] || (count[s] == count[best] && first[s] < first[best])) best = s;
    }
    return static_cast<Sentiment>(best);
  }

  bool open_ = false;
  std::size_t start_ = 0;
  std::vector<Sentiment> sentiments_;
};

std::vector<TargetSpan> decode_lenient(
    const std::vector<std::pair<BoundaryTag, std::optional<Sentiment>>>& tags) {
  std::vector<TargetSpan> out;
  SpanBuilder span;
  for (std::size_t t = 0; t < tags.size(); ++t) {
    const auto& [b, pol] = tags[t];
    switch (b) {
      case BoundaryTag::O:
        if (span.open_span()) span.close(t - 1, out);
        break;
      case BoundaryTag::B:
        if (span.open_span()) span.close(t - 1, out);
        span.open(t, pol);
        break;
      case BoundaryTag::I:
        if (span.open_span()) {
          span.extend(pol);
        } else {
          span.open(t, pol);
        }
        break;
      case BoundaryTag::E:
        if (span.open_span()) {
          span.extend(pol);
        } else {
          span.open(t, pol);
        }
        span.close(t, out);
        break;
      case BoundaryTag::S:
        if (span.open_span()) span.close(t - 1, out);
        span.open(t, pol);
        span.close(t, out);
        break;
    }
  }
  if (span.open_span()) span.close(tags.size() - 1, out);
  return out;
}

}  // namespace

std::vector<TargetSpan> decode_unified(const std::vector<UnifiedTag>& tags) {
  std::vector<std::pair<BoundaryTag, std::optional<Sentiment>>> pairs;
  pairs.reserve(tags.size());
  for (UnifiedTag t : tags) pairs.emplace_back(boundary_of(t), sentiment_of(t));
  return decode_lenient(pairs);
}

std::vector<TargetSpan> decode_boundary(const std::vector<BoundaryTag>& tags) {
  std::vector<std::pair<BoundaryTag, std::optional<Sentiment>>> pairs;
  pairs.reserve(tags.size());
  for (BoundaryTag t : tags) pairs.emplace_back(t, std::nullopt);
  return decode_lenient(pairs);
}

const std::array<std::array<bool, kNumUnifiedTags>, kNumBoundaryTags>& TransitionMatrix::mask() {
  static const auto m = [] {
    std::array<std::array<bool, kNumUnifiedTags>, kNumBoundaryTags> out{};
    for (int b = 0; b < 4; ++b) {          // B, I, E, S rows
      for (int s = 0; s < 3; ++s) out[b][s * 4 + b] = true;
    }
    out[4][12] = true;                     // O row
    return out;
  }();
  return m;
}

Tensor TransitionMatrix::mask_tensor() {
  const auto& m = mask();
  Tensor out = Tensor::matrix(kNumBoundaryTags, kNumUnifiedTags);
  for (std::size_t i = 0; i < kNumBoundaryTags; ++i) {
    for (std::size_t j = 0; j < kNumUnifiedTags; ++j) out.at(i, j) = m[i][j] ? 1.0 : 0.0;
  }
  return out;
}

TransitionMatrix TransitionMatrix::initial(bool trainable) {
  TransitionMatrix tm;
  tm.logits = Tensor::matrix(kNumBoundaryTags, kNumUnifiedTags);
  tm.trainable = trainable;
  return tm;
}

Tensor TransitionMatrix::realized() const {
  const auto& m = mask();
  Tensor out = Tensor::matrix(kNumBoundaryTags, kNumUnifiedTags);
  for (std::size_t i = 0; i < kNumBoundaryTags; ++i) {
    double mx = -HUGE_VAL;
    for (std::size_t j = 0; j < kNumUnifiedTags; ++j) {
      if (m[i][j]) mx = std::max(mx, logits.at(i, j));
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < kNumUnifiedTags; ++j) {
      if (m[i][j]) sum += std::exp(logits.at(i, j) - mx);
    }
    for (std::size_t j = 0; j < kNumUnifiedTags; ++j) {
      out.at(i, j) = m[i][j] ? std::exp(logits.at(i, j) - mx) / sum : 0.0;
    }
  }
  return out;
}

}  // namespace tbsa

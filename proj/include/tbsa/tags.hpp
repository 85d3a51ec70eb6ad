#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tbsa/tensor.hpp"

namespace tbsa {

// Boundary scheme: BIOES span positions, no sentiment.
enum class BoundaryTag : int { B = 0, I = 1, E = 2, S = 3, O = 4 };

enum class Sentiment : int { Pos = 0, Neg = 1, Neu = 2 };

// Unified scheme: boundary position fused with sentiment, plus O.
// Index layout is fixed (serialization and the transition matrix depend
// on it): B-POS,I-POS,E-POS,S-POS, B-NEG..S-NEG, B-NEU..S-NEU, O.
enum class UnifiedTag : int {
  BPos = 0, IPos = 1, EPos = 2, SPos = 3,
  BNeg = 4, INeg = 5, ENeg = 6, SNeg = 7,
  BNeu = 8, INeu = 9, ENeu = 10, SNeu = 11,
  O = 12,
};

inline constexpr std::size_t kNumBoundaryTags = 5;
inline constexpr std::size_t kNumUnifiedTags = 13;
inline constexpr std::size_t kNumSentiments = 3;

// A (start, end, sentiment) annotation on a token sequence; indices are
// 0-based and inclusive. Sentiment is absent for boundary-only spans.
struct TargetSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::optional<Sentiment> sentiment;

  TargetSpan() = default;
  TargetSpan(std::size_t s, std::size_t e) : start(s), end(e) {}
  TargetSpan(std::size_t s, std::size_t e, Sentiment pol) : start(s), end(e), sentiment(pol) {}

  bool operator==(const TargetSpan&) const = default;
};

// --- tag names (the exact serialized strings) ---
const std::string& to_string(BoundaryTag t);
const std::string& to_string(UnifiedTag t);
const std::string& to_string(Sentiment s);
BoundaryTag parse_boundary_tag(const std::string& name);
UnifiedTag parse_unified_tag(const std::string& name);
Sentiment parse_sentiment(const std::string& name);

// --- tag decomposition ---
UnifiedTag make_unified(BoundaryTag b, Sentiment s);  // b must not be O
BoundaryTag boundary_of(UnifiedTag t);                // O -> O
std::optional<Sentiment> sentiment_of(UnifiedTag t);  // O -> nullopt

// Throws DataError naming the offending span on out-of-range indices,
// overlap, or (when required) missing sentiment.
void validate_spans(std::size_t len, const std::vector<TargetSpan>& spans,
                    bool require_sentiment);

// --- span <-> tag sequence conversion ---
std::vector<BoundaryTag> encode_boundary(std::size_t len, const std::vector<TargetSpan>& spans);
std::vector<UnifiedTag> encode_unified(std::size_t len, const std::vector<TargetSpan>& spans);

// Lenient left-to-right decoding; total over arbitrary (possibly ill-formed)
// tag sequences. A span opens at B or at a bare I/E/S; it closes at E
// (inclusive), at S, O or B (before the closer), or at end of sequence.
// Span sentiment is the majority vote over its tokens, ties broken by the
// earliest token bearing a tied sentiment.
std::vector<TargetSpan> decode_unified(const std::vector<UnifiedTag>& tags);
std::vector<TargetSpan> decode_boundary(const std::vector<BoundaryTag>& tags);

// The constrained boundary->unified transition structure: row i is a
// probability distribution supported on the unified tags coherent with
// boundary tag i. Off-support entries are structurally zero for every
// parameter value; the realized matrix is a masked per-row softmax of the
// logits, so rows always sum to 1.
class TransitionMatrix {
 public:
  Tensor logits;  // 5x13; entries outside the mask are never read
  bool trainable = true;

  static const std::array<std::array<bool, kNumUnifiedTags>, kNumBoundaryTags>& mask();

  // Same mask as a 5x13 tensor of 0/1, for the differentiable row softmax.
  static Tensor mask_tensor();

  // Zero logits: every row uniform over its valid set (row B = 1/3 on B-*,
  // row O = one-hot at O).
  static TransitionMatrix initial(bool trainable = true);

  Tensor realized() const;
};

}  // namespace tbsa

#ifndef DELIB_SEGMENTATION_HPP_
#define DELIB_SEGMENTATION_HPP_

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "delib/csv.hpp"
#include "delib/error.hpp"
#include "delib/providers.hpp"
#include "delib/text.hpp"
#include "delib/types.hpp"
#include "delib/vector_ops.hpp"

namespace delib {

inline constexpr std::size_t kDefaultWindowSize = 3;

struct SentenceSpan {
  std::size_t statement_seq = 0;
  std::size_t sent_index = 0;
  std::size_t start_char = 0;  // byte offsets, end exclusive
  std::size_t end_char = 0;

  bool operator==(const SentenceSpan &) const = default;
};

struct WindowCandidate {
  std::size_t statement_seq = 0;
  std::size_t first_sent = 0;
  std::size_t last_sent = 0;  // inclusive
  std::string speaker_id;
  std::string text;
  ClassifierVerdict verdict;
};

struct ArgumentUnit {
  std::string id;
  std::string event_id;
  std::size_t statement_seq = 0;
  std::string speaker_id;
  std::size_t first_sent = 0;
  std::size_t last_sent = 0;
  std::string text;
  double confidence = 0.0;
  std::optional<std::string> topic;
  std::optional<Stance> stance;
  std::optional<Embedding> embedding;
  std::size_t arg_seq = 0;

  bool operator==(const ArgumentUnit &) const = default;
};

/// Audit record for one window: its original verdict and whether it
/// survived overlap resolution.
struct WindowOutcome {
  std::size_t statement_seq = 0;
  std::size_t first_sent = 0;
  std::size_t last_sent = 0;
  ArgumentLabel label = ArgumentLabel::NoArgument;
  double confidence = 0.0;
  bool survived = false;

  bool operator==(const WindowOutcome &) const = default;
};

namespace detail {

inline bool is_abbreviation(std::string_view word) {
  static constexpr std::array<std::string_view, 22> kAbbrev = {
      "Mr.", "Mrs.", "Ms.",  "Dr.",  "U.S.", "D.C.", "etc.", "vs.",  "e.g.", "i.e.", "Sen.",
      "Rep.", "Jr.", "Sr.", "Prof.", "Gov.", "Hon.", "Gen.", "Lt.", "Col.", "Rev.", "St."};
  for (auto a : kAbbrev)
    if (word.size() == a.size() &&
        std::equal(word.begin(), word.end(), a.begin(), [](char x, char y) {
          return std::tolower(static_cast<unsigned char>(x)) ==
                 std::tolower(static_cast<unsigned char>(y));
        }))
      return true;
  return false;
}

// Length in bytes of a closing quote/bracket at `i`, 0 if none.
inline std::size_t closer_at(std::string_view s, std::size_t i) {
  char c = s[i];
  if (c == '"' || c == '\'' || c == ')' || c == ']') return 1;
  if (s.substr(i, 3) == "\xE2\x80\x9D" || s.substr(i, 3) == "\xE2\x80\x99") return 3;
  return 0;
}

inline bool opens_sentence(std::string_view s, std::size_t i) {
  auto c = static_cast<unsigned char>(s[i]);
  if (std::isupper(c) || std::isdigit(c) || c == '"' || c == '\'') return true;
  return s.substr(i, 3) == "\xE2\x80\x9C" || s.substr(i, 3) == "\xE2\x80\x98";
}

}  // namespace detail

/// Splits on '.', '!' or '?' (plus any trailing terminators and closing
/// quotes) when followed by whitespace and then an uppercase letter, digit,
/// or opening quote. A period ending a known abbreviation never splits.
/// Spans are trimmed; trailing unterminated text forms the last sentence.
inline std::vector<SentenceSpan> split_sentences(std::string_view s, std::size_t statement_seq = 0) {
  std::vector<SentenceSpan> out;
  const std::size_t n = s.size();
  std::size_t start = 0;
  while (start < n && text::is_space(s[start])) ++start;

  auto emit = [&](std::size_t b, std::size_t e) {
    while (e > b && text::is_space(s[e - 1])) --e;
    if (e > b) out.push_back({statement_seq, out.size(), b, e});
  };

  std::size_t i = start;
  while (i < n) {
    char c = s[i];
    if (c != '.' && c != '!' && c != '?') {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < n) {
      if (s[j] == '.' || s[j] == '!' || s[j] == '?') {
        ++j;
      } else if (auto w = detail::closer_at(s, j)) {
        j += w;
      } else {
        break;
      }
    }
    if (j >= n || !text::is_space(s[j])) {
      i = j;
      continue;
    }
    std::size_t k = j;
    while (k < n && text::is_space(s[k])) ++k;
    if (k >= n || !detail::opens_sentence(s, k)) {
      i = k;
      continue;
    }
    if (c == '.' && j == i + 1) {
      std::size_t w = i;
      while (w > start && !text::is_space(s[w - 1])) --w;
      while (w < i && (s[w] == '"' || s[w] == '\'' || s[w] == '(' || s[w] == '[')) ++w;
      if (detail::is_abbreviation(s.substr(w, i + 1 - w))) {
        i = k;
        continue;
      }
    }
    emit(start, j);
    start = k;
    i = k;
  }
  emit(start, n);
  return out;
}

/// Builds the k-sentence windows of a statement (step one sentence). A
/// statement shorter than k yields a single whole-statement window. Windows
/// are returned unclassified.
inline std::vector<WindowCandidate> build_windows(const Statement &st, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::PreconditionViolation, "window size k must be >= 1");
  auto spans = split_sentences(st.text, st.seq_index);
  std::vector<WindowCandidate> out;
  if (spans.empty()) return out;
  const std::size_t s = spans.size();
  const std::size_t width = std::min(k, s);
  for (std::size_t first = 0; first + width <= s; ++first) {
    const std::size_t last = first + width - 1;
    WindowCandidate w;
    w.statement_seq = st.seq_index;
    w.first_sent = first;
    w.last_sent = last;
    w.speaker_id = st.speaker_id;
    w.text = std::string(
        std::string_view(st.text).substr(spans[first].start_char,
                                          spans[last].end_char - spans[first].start_char));
    out.push_back(std::move(w));
  }
  return out;
}

inline void classify_windows(std::vector<WindowCandidate> &windows, const ArgumentModel &classifier) {
  std::vector<std::string> texts;
  texts.reserve(windows.size());
  for (const auto &w : windows) texts.push_back(w.text);
  auto verdicts = classifier.classify_batch(texts);
  if (verdicts.size() != windows.size())
    throw Error(ErrorCode::RemoteProtocol, "classifier returned wrong number of verdicts");
  for (std::size_t i = 0; i < windows.size(); ++i) windows[i].verdict = verdicts[i];
}

inline std::vector<WindowCandidate> window_statement(const Statement &st, std::size_t k,
                                                     const ArgumentModel &classifier) {
  auto windows = build_windows(st, k);
  classify_windows(windows, classifier);
  return windows;
}

struct Resolution {
  std::vector<ArgumentUnit> units;
  std::vector<WindowOutcome> outcomes;  // parallel to the input candidates
};

inline bool is_argument(const ClassifierVerdict &v) {
  return v.label == ArgumentLabel::Argument && v.confidence > kArgumentThreshold;
}

/// Greedy highest-confidence-first selection within each statement: the
/// best remaining Argument window survives and every overlapping Argument
/// window is demoted. Equal confidence goes to the earlier window.
inline Resolution resolve_overlaps(std::string_view event_id,
                                   const std::vector<WindowCandidate> &candidates) {
  Resolution res;
  res.outcomes.reserve(candidates.size());
  for (const auto &c : candidates)
    res.outcomes.push_back(
        {c.statement_seq, c.first_sent, c.last_sent, c.verdict.label, c.verdict.confidence, false});

  std::map<std::size_t, std::vector<std::size_t>> by_statement;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (is_argument(candidates[i].verdict)) by_statement[candidates[i].statement_seq].push_back(i);

  std::vector<std::size_t> selected;
  for (auto &[seq, idx] : by_statement) {
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      const auto &x = candidates[a];
      const auto &y = candidates[b];
      if (x.verdict.confidence != y.verdict.confidence)
        return x.verdict.confidence > y.verdict.confidence;
      if (x.first_sent != y.first_sent) return x.first_sent < y.first_sent;
      if (x.last_sent != y.last_sent) return x.last_sent < y.last_sent;
      return a < b;
    });
    std::vector<bool> demoted(idx.size(), false);
    for (std::size_t p = 0; p < idx.size(); ++p) {
      if (demoted[p]) continue;
      const auto &win = candidates[idx[p]];
      selected.push_back(idx[p]);
      res.outcomes[idx[p]].survived = true;
      for (std::size_t q = p + 1; q < idx.size(); ++q) {
        const auto &other = candidates[idx[q]];
        if (other.first_sent <= win.last_sent && win.first_sent <= other.last_sent) demoted[q] = true;
      }
    }
  }

  std::sort(selected.begin(), selected.end(), [&](std::size_t a, std::size_t b) {
    const auto &x = candidates[a];
    const auto &y = candidates[b];
    if (x.statement_seq != y.statement_seq) return x.statement_seq < y.statement_seq;
    return x.first_sent < y.first_sent;
  });
  res.units.reserve(selected.size());
  for (auto i : selected) {
    const auto &c = candidates[i];
    ArgumentUnit u;
    u.event_id = std::string(event_id);
    u.statement_seq = c.statement_seq;
    u.speaker_id = c.speaker_id;
    u.first_sent = c.first_sent;
    u.last_sent = c.last_sent;
    u.text = c.text;
    u.confidence = c.verdict.confidence;
    u.arg_seq = res.units.size();
    u.id = "s" + std::to_string(c.statement_seq) + ".w" + std::to_string(c.first_sent) + "-" +
           std::to_string(c.last_sent);
    res.units.push_back(std::move(u));
  }
  return res;
}

struct SegmentationResult {
  std::vector<ArgumentUnit> units;
  std::vector<WindowOutcome> windows;
};

/// Windows and classifies every statement, resolves overlaps, then enriches
/// the surviving units with topic, stance and embedding. Texts with no
/// content words get no topic and no stance.
inline SegmentationResult segment_event(const DiscourseEvent &ev, std::size_t k,
                                        const Providers &providers) {
  std::vector<WindowCandidate> windows;
  for (const auto &st : ev.statements) {
    auto w = build_windows(st, k);
    windows.insert(windows.end(), std::make_move_iterator(w.begin()),
                   std::make_move_iterator(w.end()));
  }
  if (!windows.empty()) classify_windows(windows, *providers.classifier);

  auto res = resolve_overlaps(ev.id, windows);
  SegmentationResult out;
  out.windows = std::move(res.outcomes);
  out.units = std::move(res.units);
  if (out.units.empty()) return out;

  for (auto &u : out.units) {
    try {
      u.topic = providers.classifier->extract_topic(u.text);
    } catch (const Error &e) {
      if (e.code() != ErrorCode::DegenerateText) throw;
    }
    if (u.topic) u.stance = providers.classifier->classify_stance(u.text, *u.topic).stance;
  }

  std::vector<std::string> texts;
  texts.reserve(out.units.size());
  for (const auto &u : out.units) texts.push_back(u.text);
  auto vecs = providers.embedder->embed_batch(texts);
  if (vecs.size() != out.units.size())
    throw Error(ErrorCode::RemoteProtocol, "embedder returned wrong number of vectors");
  for (std::size_t i = 0; i < vecs.size(); ++i) out.units[i].embedding = std::move(vecs[i]);
  return out;
}

/// CSV: statement_seq,first_sent,last_sent,label,confidence,survived
inline std::string windows_csv(const std::vector<WindowOutcome> &windows) {
  std::string out;
  csv::append_row(out, {"statement_seq", "first_sent", "last_sent", "label", "confidence", "survived"});
  for (const auto &w : windows) {
    char conf[32];
    std::snprintf(conf, sizeof conf, "%.17g", w.confidence);
    csv::append_row(out, {std::to_string(w.statement_seq), std::to_string(w.first_sent),
                          std::to_string(w.last_sent), std::string(to_string(w.label)), conf,
                          w.survived ? "true" : "false"});
  }
  return out;
}

}  // namespace delib

#endif  // DELIB_SEGMENTATION_HPP_

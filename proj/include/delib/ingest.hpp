#ifndef DELIB_INGEST_HPP_
#define DELIB_INGEST_HPP_

#include <algorithm>
#include <charconv>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "delib/csv.hpp"
#include "delib/digest.hpp"
#include "delib/error.hpp"
#include "delib/text.hpp"
#include "delib/types.hpp"
#include "json.hpp"

namespace delib {

namespace detail {

inline std::string row_prefix(std::size_t row) {
  return "row " + std::to_string(row) + ": ";
}

inline std::optional<bool> parse_bool(std::string_view raw) {
  auto s = text::to_lower(text::trim(raw));
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  return std::nullopt;
}

inline std::optional<std::int64_t> parse_int(std::string_view raw) {
  auto s = text::trim(raw);
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<std::string> optional_cell(std::string_view raw) {
  auto t = text::trim(raw);
  if (t.empty()) return std::nullopt;
  return std::string(t);
}

inline void check_encoding(std::string_view bytes) {
  if (!text::valid_utf8(bytes))
    throw Error(ErrorCode::InvalidEncoding, "input is not valid UTF-8");
}

}  // namespace detail

/// Parses a transcript CSV (header row required). Required columns:
/// speaker, text. Optional: timestamp, role, party, state, majority, title.
/// Header names are matched case-insensitively after trimming. Row numbers in
/// errors count physical CSV records with the header as row 1.
inline DiscourseEvent parse_transcript_csv(std::string_view bytes) {
  detail::check_encoding(bytes);
  if (text::trim(bytes).empty()) throw Error(ErrorCode::EmptyFile, "no content");

  auto records = csv::parse(bytes);
  if (records.empty()) throw Error(ErrorCode::EmptyFile, "no header row");

  std::unordered_map<std::string, std::size_t> col;
  const auto &header = records.front().fields;
  for (std::size_t i = 0; i < header.size(); ++i)
    col.try_emplace(text::to_lower(text::trim(header[i])), i);

  for (const char *required : {"speaker", "text"})
    if (!col.count(required)) throw Error(ErrorCode::MissingColumn, required);
  if (records.size() == 1) throw Error(ErrorCode::EmptyFile, "header row but no statements");

  auto find = [&](const char *name) -> std::optional<std::size_t> {
    auto it = col.find(name);
    if (it == col.end()) return std::nullopt;
    return it->second;
  };
  const auto c_speaker = *find("speaker");
  const auto c_text = *find("text");
  const auto c_ts = find("timestamp");
  const auto c_role = find("role");
  const auto c_party = find("party");
  const auto c_state = find("state");
  const auto c_major = find("majority");
  const auto c_title = find("title");

  DiscourseEvent ev;
  ev.venue = Venue::legislative;
  ev.statements.reserve(records.size() - 1);

  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto &rec = records[r];
    const auto &f = rec.fields;
    if (f.size() != header.size())
      throw Error(ErrorCode::MalformedRow,
                  detail::row_prefix(rec.row) + "expected " +
                      std::to_string(header.size()) + " fields, found " +
                      std::to_string(f.size()));

    Statement st;
    st.seq_index = ev.statements.size();
    st.speaker_id = std::string(text::trim(f[c_speaker]));
    if (st.speaker_id.empty())
      throw Error(ErrorCode::MalformedRow, detail::row_prefix(rec.row) + "empty speaker");
    if (text::trim(f[c_text]).empty())
      throw Error(ErrorCode::MalformedRow, detail::row_prefix(rec.row) + "empty text");
    st.text = f[c_text];

    if (c_ts && !text::trim(f[*c_ts]).empty()) {
      st.timestamp = detail::parse_int(f[*c_ts]);
      if (!st.timestamp)
        throw Error(ErrorCode::MalformedRow,
                    detail::row_prefix(rec.row) + "timestamp '" + f[*c_ts] +
                        "' is not an integer");
    }
    if (c_role && !text::trim(f[*c_role]).empty()) {
      st.role = role_from_string(text::to_lower(text::trim(f[*c_role])));
      if (!st.role)
        throw Error(ErrorCode::MalformedRow,
                    detail::row_prefix(rec.row) + "unknown role '" + f[*c_role] + "'");
    }
    if (c_party) st.party = detail::optional_cell(f[*c_party]);
    if (c_state) st.state = detail::optional_cell(f[*c_state]);
    if (c_major && !text::trim(f[*c_major]).empty()) {
      st.majority = detail::parse_bool(f[*c_major]);
      if (!st.majority)
        throw Error(ErrorCode::MalformedRow,
                    detail::row_prefix(rec.row) + "majority '" + f[*c_major] +
                        "' is not a boolean");
    }
    if (c_title && ev.title.empty()) ev.title = std::string(text::trim(f[*c_title]));
    ev.statements.push_back(std::move(st));
  }

  ev.id = sha256_hex(bytes);
  ev.speakers = aggregate_speakers(ev.statements);
  return ev;
}

namespace detail {

struct FlatComment {
  std::int64_t created = 0;
  std::size_t order = 0;
  Statement statement;
};

inline void flatten_comments(const nlohmann::json &arr, const std::string &path,
                             std::vector<FlatComment> &out) {
  if (!arr.is_array())
    throw Error(ErrorCode::MalformedDocument, path + " is not an array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto &c = arr[i];
    const auto where = path + "[" + std::to_string(i) + "]";
    if (!c.is_object())
      throw Error(ErrorCode::MalformedDocument, where + " is not an object");
    auto author = c.find("author");
    auto body = c.find("body");
    auto created = c.find("created_utc");
    if (author == c.end() || !author->is_string())
      throw Error(ErrorCode::MalformedDocument, where + ".author missing or not a string");
    if (body == c.end() || !body->is_string())
      throw Error(ErrorCode::MalformedDocument, where + ".body missing or not a string");
    if (created == c.end() || !created->is_number())
      throw Error(ErrorCode::MalformedDocument, where + ".created_utc missing or not a number");

    FlatComment fc;
    fc.created = created->is_number_float()
                     ? static_cast<std::int64_t>(created->get<double>())
                     : created->get<std::int64_t>();
    fc.order = out.size();
    fc.statement.speaker_id = std::string(text::trim(author->get<std::string>()));
    fc.statement.text = body->get<std::string>();
    fc.statement.timestamp = fc.created;
    if (fc.statement.speaker_id.empty())
      throw Error(ErrorCode::MalformedDocument, where + ".author is empty");
    if (text::trim(fc.statement.text).empty())
      throw Error(ErrorCode::MalformedDocument, where + ".body is empty");
    out.push_back(std::move(fc));

    if (auto replies = c.find("replies"); replies != c.end() && !replies->is_null())
      flatten_comments(*replies, where + ".replies", out);
  }
}

}  // namespace detail

/// Parses a thread export: {"title": str, "comments": [...]}. Comments may
/// nest through a `replies` array or reference each other through
/// `parent_id`; either way nesting is dropped and the comments are ordered by
/// created_utc, ties kept in document (pre-order) order.
inline DiscourseEvent parse_thread_json(std::string_view bytes) {
  detail::check_encoding(bytes);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::MalformedDocument, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::MalformedDocument, "top level is not an object");
  auto title = doc.find("title");
  if (title == doc.end() || !title->is_string())
    throw Error(ErrorCode::MalformedDocument, "title missing or not a string");
  auto comments = doc.find("comments");
  if (comments == doc.end()) throw Error(ErrorCode::MalformedDocument, "comments missing");

  std::vector<detail::FlatComment> flat;
  detail::flatten_comments(*comments, "comments", flat);
  if (flat.empty()) throw Error(ErrorCode::EmptyThread, "thread has no comments");

  std::stable_sort(flat.begin(), flat.end(),
                   [](const auto &a, const auto &b) { return a.created < b.created; });

  DiscourseEvent ev;
  ev.title = title->get<std::string>();
  ev.venue = Venue::forum;
  if (auto topic = doc.find("topic"); topic != doc.end() && topic->is_string())
    ev.topic = topic->get<std::string>();
  ev.statements.reserve(flat.size());
  for (auto &fc : flat) {
    fc.statement.seq_index = ev.statements.size();
    ev.statements.push_back(std::move(fc.statement));
  }
  ev.id = sha256_hex(bytes);
  ev.speakers = aggregate_speakers(ev.statements);
  return ev;
}

/// Canonical transcript CSV: speaker,text,timestamp,role,party,state,majority
/// followed by title, which is filled on the first row only. Absent optional
/// values become empty cells.
inline std::string export_event_csv(const DiscourseEvent &ev) {
  std::string out;
  out.reserve(ev.statements.size() * 96);
  csv::append_row(out, {"speaker", "text", "timestamp", "role", "party", "state", "majority", "title"});
  for (const auto &s : ev.statements) {
    csv::append_row(out, {s.speaker_id, s.text,
                          s.timestamp ? std::to_string(*s.timestamp) : std::string(),
                          s.role ? std::string(to_string(*s.role)) : std::string(),
                          s.party.value_or(""), s.state.value_or(""),
                          s.majority ? (*s.majority ? "true" : "false") : "",
                          s.seq_index == 0 ? ev.title : std::string()});
  }
  return out;
}

enum class InputFormat { transcript_csv, thread_json };

inline std::optional<InputFormat> input_format_from_string(std::string_view s) {
  if (s == "transcript-csv") return InputFormat::transcript_csv;
  if (s == "thread-json") return InputFormat::thread_json;
  return std::nullopt;
}

inline DiscourseEvent parse_event(std::string_view bytes, InputFormat fmt) {
  return fmt == InputFormat::transcript_csv ? parse_transcript_csv(bytes)
                                            : parse_thread_json(bytes);
}

}  // namespace delib

#endif  // DELIB_INGEST_HPP_

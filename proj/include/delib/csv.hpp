#ifndef DELIB_CSV_HPP_
#define DELIB_CSV_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "delib/error.hpp"

namespace delib::csv {

struct Record {
  std::size_t row = 0;  // 1-based physical record number, header = 1
  std::vector<std::string> fields;
};

/// RFC-4180 reader. Accepts LF or CRLF line endings, quoted fields with
/// embedded separators/newlines and doubled quotes. A leading UTF-8 BOM is
/// skipped. Blank lines are ignored.
inline std::vector<Record> parse(std::string_view in) {
  if (in.size() >= 3 && in.substr(0, 3) == "\xEF\xBB\xBF") in.remove_prefix(3);

  std::vector<Record> out;
  Record cur;
  std::string field;
  std::size_t row = 1;
  std::size_t i = 0;
  const std::size_t n = in.size();
  bool any_in_record = false;

  auto end_field = [&] {
    cur.fields.push_back(std::move(field));
    field.clear();
  };
  auto end_record = [&] {
    end_field();
    bool blank = cur.fields.size() == 1 && cur.fields[0].empty() && !any_in_record;
    if (!blank) {
      cur.row = row;
      out.push_back(std::move(cur));
    }
    cur = Record{};
    any_in_record = false;
    ++row;
  };

  while (i < n) {
    char c = in[i];
    if (c == '"' && field.empty()) {
      // quoted field
      any_in_record = true;
      ++i;
      bool closed = false;
      while (i < n) {
        if (in[i] == '"') {
          if (i + 1 < n && in[i + 1] == '"') {
            field.push_back('"');
            i += 2;
          } else {
            ++i;
            closed = true;
            break;
          }
        } else {
          field.push_back(in[i++]);
        }
      }
      if (!closed)
        throw Error(ErrorCode::MalformedRow,
                    "row " + std::to_string(row) + ": unterminated quoted field");
      if (i < n && in[i] != ',' && in[i] != '\n' && in[i] != '\r')
        throw Error(ErrorCode::MalformedRow,
                    "row " + std::to_string(row) + ": text after closing quote");
      continue;
    }
    if (c == ',') {
      any_in_record = true;
      end_field();
      ++i;
    } else if (c == '\r') {
      ++i;
      if (i < n && in[i] == '\n') ++i;
      end_record();
    } else if (c == '\n') {
      ++i;
      end_record();
    } else {
      any_in_record = true;
      field.push_back(c);
      ++i;
    }
  }
  if (any_in_record || !field.empty() || !cur.fields.empty()) end_record();
  return out;
}

inline void append_field(std::string &out, std::string_view field) {
  bool quote = field.find_first_of(",\"\r\n") != std::string_view::npos ||
               (!field.empty() && (field.front() == ' ' || field.back() == ' '));
  if (!quote) {
    out.append(field);
    return;
  }
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
}

/// Appends one CRLF-terminated record.
inline void append_row(std::string &out, const std::vector<std::string> &fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    append_field(out, fields[i]);
  }
  out.append("\r\n");
}

}  // namespace delib::csv

#endif  // DELIB_CSV_HPP_

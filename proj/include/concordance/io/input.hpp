#pragma once

// Text input: `group,value` CSV files, pre-ranked label sequences with
// parenthesised tie groups, and comma-separated option lists.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "concordance/error.hpp"
#include "concordance/ranking.hpp"

namespace concordance::io {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline bool parse_double(std::string_view text, double& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end && std::isfinite(out);
}

/// Reads `group,value` records. Blank lines are skipped; the header is required.
inline std::vector<Record> read_csv(std::istream& in) {
  std::vector<Record> records;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    view = trim(view);
    if (view.empty()) continue;
    const auto fields = split(view, ',');
    if (!header_seen) {
      if (fields.size() != 2 || fields[0] != "group" || fields[1] != "value")
        fail(ErrorKind::parse, "line " + std::to_string(line_no) + ": expected header 'group,value'");
      header_seen = true;
      continue;
    }
    if (fields.size() != 2)
      fail(ErrorKind::parse, "line " + std::to_string(line_no) + ": expected 2 fields, found " +
                                 std::to_string(fields.size()));
    if (fields[0].empty()) fail(ErrorKind::parse, "line " + std::to_string(line_no) + ": empty group label");
    Record r;
    r.group = std::string(fields[0]);
    if (!parse_double(fields[1], r.value))
      fail(ErrorKind::parse, "line " + std::to_string(line_no) + ": value '" + std::string(fields[1]) +
                                 "' is not a finite number");
    records.push_back(std::move(r));
  }
  if (records.empty()) fail(ErrorKind::empty_input, "input contains no records");
  return records;
}

/// Parses "a a (a c) b": whitespace-separated labels, parentheses mark a
/// tie-block. Groups are indexed in sorted label order.
inline LabeledSample parse_pre_ranked(std::string_view text) {
  std::vector<std::vector<std::string>> blocks;
  std::vector<std::string> open;
  bool in_group = false;
  std::string token;

  auto flush = [&] {
    if (token.empty()) return;
    if (in_group) {
      open.push_back(token);
    } else {
      blocks.push_back({token});
    }
    token.clear();
  };
  for (char c : text) {
    if (c == '(') {
      flush();
      if (in_group) fail(ErrorKind::parse, "pre-ranked input: nested '('");
      in_group = true;
    } else if (c == ')') {
      flush();
      if (!in_group) fail(ErrorKind::parse, "pre-ranked input: ')' without '('");
      if (open.empty()) fail(ErrorKind::parse, "pre-ranked input: empty tie group");
      blocks.push_back(std::move(open));
      open.clear();
      in_group = false;
    } else if (std::isspace(static_cast<unsigned char>(c)) || c == '|' || c == ',') {
      flush();
    } else {
      token += c;
    }
  }
  flush();
  if (in_group) fail(ErrorKind::parse, "pre-ranked input: unclosed '('");
  if (blocks.empty()) fail(ErrorKind::empty_input, "pre-ranked input contains no labels");

  std::set<std::string> names;
  for (const auto& b : blocks) names.insert(b.begin(), b.end());
  LabeledSample out;
  out.group_names.assign(names.begin(), names.end());
  std::map<std::string, GroupIndex> index_of;
  for (std::size_t i = 0; i < out.group_names.size(); ++i) index_of[out.group_names[i]] = static_cast<GroupIndex>(i);

  std::vector<std::vector<GroupIndex>> indexed;
  std::vector<std::int64_t> counts(names.size(), 0);
  for (const auto& b : blocks) {
    std::vector<GroupIndex> block;
    for (const auto& name : b) {
      block.push_back(index_of[name]);
      ++counts[index_of[name]];
    }
    std::sort(block.begin(), block.end());
    indexed.push_back(std::move(block));
  }
  out.sizes = GroupSizes(std::move(counts));
  out.arrangement = Arrangement(indexed);
  return out;
}

inline LabeledSample read_pre_ranked(std::istream& in) {
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_pre_ranked(buffer.str());
}

/// "10,5,3" -> GroupSizes.
inline GroupSizes parse_sizes(std::string_view text) {
  std::vector<std::int64_t> sizes;
  for (auto field : split(text, ',')) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size() || v < 1)
      fail(ErrorKind::configuration, "sizes must be comma-separated positive integers, got '" + std::string(text) + "'");
    sizes.push_back(v);
  }
  return GroupSizes(std::move(sizes));
}

/// "0.10,0.05" -> {0.10, 0.05}; empty text -> the conventional 0.10, 0.05, 0.01.
inline std::vector<double> parse_alphas(std::string_view text) {
  if (trim(text).empty()) return {0.10, 0.05, 0.01};
  std::vector<double> out;
  for (auto field : split(text, ',')) {
    double v = 0;
    if (!parse_double(field, v) || v <= 0.0 || v >= 1.0)
      fail(ErrorKind::configuration, "significance levels must be numbers in (0, 1), got '" + std::string(field) + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace concordance::io

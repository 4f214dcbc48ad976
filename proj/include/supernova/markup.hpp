#pragma once

#include <cctype>
#include <string>
#include <string_view>

#include "supernova/strings.hpp"

namespace supernova::corpus {

struct StripResult {
  std::string text;
  bool unbalanced = false;  // template/table braces did not close
};

namespace detail {

inline bool iequal_at(std::string_view s, size_t pos, std::string_view needle) {
  if (pos + needle.size() > s.size()) return false;
  for (size_t i = 0; i < needle.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[pos + i])) !=
        std::tolower(static_cast<unsigned char>(needle[i])))
      return false;
  }
  return true;
}

inline std::string remove_comments(std::string_view s) {
  std::string out;
  size_t i = 0;
  while (i < s.size()) {
    if (iequal_at(s, i, "<!--")) {
      size_t end = s.find("-->", i + 4);
      i = (end == std::string_view::npos) ? s.size() : end + 3;
    } else {
      out.push_back(s[i++]);
    }
  }
  return out;
}

// <ref ...>...</ref> and self-closing <ref ... /> vanish with their contents.
inline std::string remove_refs(std::string_view s) {
  std::string out;
  size_t i = 0;
  while (i < s.size()) {
    if (iequal_at(s, i, "<ref")) {
      size_t gt = s.find('>', i);
      if (gt == std::string_view::npos) break;  // unterminated tag: drop tail
      if (s[gt - 1] == '/') {
        i = gt + 1;
        continue;
      }
      size_t close = i;
      bool found = false;
      for (size_t j = gt + 1; j + 6 <= s.size(); ++j) {
        if (iequal_at(s, j, "</ref>")) {
          close = j + 6;
          found = true;
          break;
        }
      }
      i = found ? close : s.size();
    } else {
      out.push_back(s[i++]);
    }
  }
  return out;
}

// Nesting-aware removal of {{...}} and {|...|} blocks.
inline std::string remove_braced(std::string_view s, std::string_view open, std::string_view close,
                                 bool& unbalanced) {
  std::string out;
  size_t i = 0;
  int depth = 0;
  size_t first_open = std::string_view::npos;
  while (i < s.size()) {
    if (i + open.size() <= s.size() && s.substr(i, open.size()) == open) {
      if (depth == 0) first_open = i;
      ++depth;
      i += open.size();
    } else if (i + close.size() <= s.size() && s.substr(i, close.size()) == close) {
      if (depth > 0) {
        --depth;
      } else {
        unbalanced = true;  // stray closer, dropped
      }
      i += close.size();
    } else {
      if (depth == 0) out.push_back(s[i]);
      ++i;
    }
  }
  if (depth > 0) {
    unbalanced = true;  // unclosed block swallows the rest of the input
    (void)first_open;
  }
  return out;
}

// [[File:...]] / [[Image:...]] with bracket-nested captions.
inline std::string remove_file_links(std::string_view s) {
  std::string out;
  size_t i = 0;
  while (i < s.size()) {
    if (i + 2 <= s.size() && s.substr(i, 2) == "[[" &&
        (iequal_at(s, i + 2, "File:") || iequal_at(s, i + 2, "Image:"))) {
      int depth = 1;
      size_t j = i + 2;
      while (j < s.size() && depth > 0) {
        if (j + 2 <= s.size() && s.substr(j, 2) == "[[") {
          depth++;
          j += 2;
        } else if (j + 2 <= s.size() && s.substr(j, 2) == "]]") {
          depth--;
          j += 2;
        } else {
          ++j;
        }
      }
      i = j;
    } else {
      out.push_back(s[i++]);
    }
  }
  return out;
}

// [[target|display]] -> display, [[target]] -> target.
inline std::string resolve_links(std::string_view s) {
  std::string out;
  size_t i = 0;
  while (i < s.size()) {
    if (i + 2 <= s.size() && s.substr(i, 2) == "[[") {
      int depth = 1;
      size_t j = i + 2;
      size_t pipe = std::string_view::npos;
      while (j < s.size() && depth > 0) {
        if (j + 2 <= s.size() && s.substr(j, 2) == "[[") {
          depth++;
          j += 2;
        } else if (j + 2 <= s.size() && s.substr(j, 2) == "]]") {
          depth--;
          j += 2;
        } else {
          if (s[j] == '|' && depth == 1 && pipe == std::string_view::npos) pipe = j;
          ++j;
        }
      }
      size_t inner_end = (depth == 0) ? j - 2 : s.size();
      size_t inner_start = i + 2;
      std::string_view inner = (pipe != std::string_view::npos)
                                   ? s.substr(pipe + 1, inner_end - pipe - 1)
                                   : s.substr(inner_start, inner_end - inner_start);
      out.append(resolve_links(inner));
      i = j;
    } else {
      out.push_back(s[i++]);
    }
  }
  return out;
}

// [http://url label] -> label, [http://url] -> "".
inline std::string resolve_external_links(std::string_view s) {
  std::string out;
  size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '[' &&
        (iequal_at(s, i + 1, "http://") || iequal_at(s, i + 1, "https://") ||
         iequal_at(s, i + 1, "ftp://") || iequal_at(s, i + 1, "//"))) {
      size_t end = s.find(']', i);
      if (end == std::string_view::npos) {
        out.push_back(s[i++]);
        continue;
      }
      std::string_view body = s.substr(i + 1, end - i - 1);
      size_t sp = body.find(' ');
      if (sp != std::string_view::npos) out.append(body.substr(sp + 1));
      i = end + 1;
    } else {
      out.push_back(s[i++]);
    }
  }
  return out;
}

inline std::string remove_quote_markers(std::string_view s) {
  std::string out;
  size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '\'' && i + 1 < s.size() && s[i + 1] == '\'') {
      size_t run = 0;
      while (i + run < s.size() && s[i + run] == '\'') ++run;
      // runs of 2+ apostrophes are emphasis markers; a lone one is prose
      if (run >= 2) {
        i += run;
        continue;
      }
    }
    out.push_back(s[i++]);
  }
  return out;
}

// Strips html-ish tags but keeps their contents (<ref> handled earlier).
inline std::string remove_tags(std::string_view s) {
  std::string out;
  size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '<' && i + 1 < s.size() &&
        (std::isalpha(static_cast<unsigned char>(s[i + 1])) || s[i + 1] == '/')) {
      size_t end = s.find('>', i);
      if (end != std::string_view::npos && end - i <= 80) {
        if (iequal_at(s, i, "<br")) out.push_back(' ');
        i = end + 1;
        continue;
      }
    }
    out.push_back(s[i++]);
  }
  return out;
}

inline std::string strip_heading_markers(std::string_view s) {
  std::string out;
  for (const auto& raw : str::split_lines(s)) {
    std::string line = str::trim(raw);
    if (line.size() >= 2 && line.front() == '=' && line.back() == '=') {
      size_t b = 0, e = line.size();
      while (b < e && line[b] == '=') ++b;
      while (e > b && line[e - 1] == '=') --e;
      line = str::trim(line.substr(b, e - b));
    }
    out += line;
    out.push_back('\n');
  }
  if (!out.empty()) out.pop_back();
  return out;
}

inline std::string tidy_whitespace(std::string_view s) {
  std::string out;
  int blank_run = 0;
  for (const auto& raw : str::split_lines(s)) {
    std::string line = str::collapse_whitespace(raw);
    if (line.empty()) {
      ++blank_run;
      continue;
    }
    if (!out.empty()) out.append(blank_run > 0 ? "\n\n" : "\n");
    blank_run = 0;
    out += line;
  }
  return out;
}

}  // namespace detail

// Turns raw wikitext into plain prose. Best effort on malformed input: an
// unclosed template swallows the remainder and sets `unbalanced`.
inline StripResult strip_markup(std::string_view wikitext) {
  StripResult r;
  std::string s = detail::remove_comments(wikitext);
  s = detail::remove_refs(s);
  s = detail::remove_braced(s, "{{", "}}", r.unbalanced);
  s = detail::remove_braced(s, "{|", "|}", r.unbalanced);
  s = detail::remove_file_links(s);
  s = detail::resolve_links(s);
  s = detail::resolve_external_links(s);
  s = detail::remove_tags(s);
  s = detail::remove_quote_markers(s);
  s = detail::strip_heading_markers(s);
  r.text = detail::tidy_whitespace(s);
  return r;
}

}  // namespace supernova::corpus

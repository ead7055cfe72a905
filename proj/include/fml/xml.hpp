#pragma once

// Minimal XML reader/writer covering the subset the FML dialect needs:
// declaration, comments, nested elements, attributes, character data, and
// the five predefined entities plus numeric references. No DTDs, no
// namespaces handling beyond treating prefixes as part of the name.

#include <cctype>
#include <charconv>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fml::xml {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Element {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;  // document order
  std::vector<Element> children;
  std::string text;  // concatenated character data directly inside this element

  const std::string* attr(std::string_view key) const {
    for (const auto& [k, v] : attributes)
      if (k == key) return &v;
    return nullptr;
  }

  /// Case-insensitive attribute lookup (the corpus mixes `domainLeft` and
  /// `domainleft`).
  const std::string* attr_ci(std::string_view key) const {
    auto lower_eq = [](std::string_view a, std::string_view b) {
      if (a.size() != b.size()) return false;
      for (std::size_t i = 0; i < a.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i])))
          return false;
      return true;
    };
    for (const auto& [k, v] : attributes)
      if (lower_eq(k, key)) return &v;
    return nullptr;
  }
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Element parse_document() {
    skip_bom();
    skip_misc();
    if (eof()) throw ParseError("empty document");
    Element root = parse_element();
    skip_misc();
    if (!eof()) throw ParseError("trailing content after root element");
    return root;
  }

 private:
  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  char get() { return text_[pos_++]; }

  bool starts_with(std::string_view s) const {
    return text_.substr(pos_, s.size()) == s;
  }

  void expect(char c) {
    if (eof() || peek() != c)
      throw ParseError(std::string("expected '") + c + "' at offset " +
                       std::to_string(pos_));
    ++pos_;
  }

  void skip_bom() {
    if (starts_with("\xEF\xBB\xBF")) pos_ += 3;
  }

  void skip_ws() {
    while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }

  // Whitespace, the XML declaration, processing instructions, comments.
  void skip_misc() {
    for (;;) {
      skip_ws();
      if (starts_with("<?")) {
        const auto end = text_.find("?>", pos_);
        if (end == std::string_view::npos) throw ParseError("unterminated declaration");
        pos_ = end + 2;
      } else if (starts_with("<!--")) {
        const auto end = text_.find("-->", pos_ + 4);
        if (end == std::string_view::npos) throw ParseError("unterminated comment");
        pos_ = end + 3;
      } else {
        return;
      }
    }
  }

  static bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
           c == '.' || c == ':';
  }

  std::string parse_name() {
    const std::size_t start = pos_;
    while (!eof() && is_name_char(peek())) ++pos_;
    if (pos_ == start) throw ParseError("expected a name at offset " + std::to_string(pos_));
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string decode_entities(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] != '&') {
        out.push_back(raw[i]);
        continue;
      }
      const auto end = raw.find(';', i);
      if (end == std::string_view::npos) throw ParseError("unterminated entity reference");
      const std::string_view ent = raw.substr(i + 1, end - i - 1);
      if (ent == "amp") out.push_back('&');
      else if (ent == "lt") out.push_back('<');
      else if (ent == "gt") out.push_back('>');
      else if (ent == "quot") out.push_back('"');
      else if (ent == "apos") out.push_back('\'');
      else if (!ent.empty() && ent[0] == '#') {
        int code = 0;
        const bool hex = ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X');
        const char* first = ent.data() + (hex ? 2 : 1);
        const char* last = ent.data() + ent.size();
        auto [p, ec] = std::from_chars(first, last, code, hex ? 16 : 10);
        if (ec != std::errc() || p != last || code <= 0 || code > 0x10FFFF)
          throw ParseError("bad numeric character reference");
        append_utf8(out, static_cast<unsigned>(code));
      } else {
        throw ParseError("unknown entity '&" + std::string(ent) + ";'");
      }
      i = end;
    }
    return out;
  }

  static void append_utf8(std::string& out, unsigned cp) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }

  std::string parse_attr_value() {
    if (eof() || (peek() != '"' && peek() != '\''))
      throw ParseError("expected quoted attribute value at offset " + std::to_string(pos_));
    const char quote = get();
    const std::size_t start = pos_;
    while (!eof() && peek() != quote) {
      if (peek() == '<') throw ParseError("'<' in attribute value");
      ++pos_;
    }
    if (eof()) throw ParseError("unterminated attribute value");
    const std::string_view raw = text_.substr(start, pos_ - start);
    ++pos_;  // closing quote
    return decode_entities(raw);
  }

  Element parse_element() {
    expect('<');
    Element el;
    el.name = parse_name();
    for (;;) {
      skip_ws();
      if (eof()) throw ParseError("unterminated start tag for <" + el.name + ">");
      if (peek() == '/') {
        ++pos_;
        expect('>');
        return el;  // self-closing
      }
      if (peek() == '>') {
        ++pos_;
        break;
      }
      std::string key = parse_name();
      skip_ws();
      expect('=');
      skip_ws();
      std::string value = parse_attr_value();
      for (const auto& [k, v] : el.attributes)
        if (k == key) throw ParseError("duplicate attribute '" + key + "'");
      el.attributes.emplace_back(std::move(key), std::move(value));
    }

    // Content: character data, comments, child elements, end tag.
    for (;;) {
      if (eof()) throw ParseError("missing end tag for <" + el.name + ">");
      if (starts_with("<!--")) {
        const auto end = text_.find("-->", pos_ + 4);
        if (end == std::string_view::npos) throw ParseError("unterminated comment");
        pos_ = end + 3;
        continue;
      }
      if (starts_with("</")) {
        pos_ += 2;
        const std::string name = parse_name();
        if (name != el.name)
          throw ParseError("mismatched end tag </" + name + "> for <" + el.name + ">");
        skip_ws();
        expect('>');
        return el;
      }
      if (peek() == '<') {
        el.children.push_back(parse_element());
        continue;
      }
      const std::size_t start = pos_;
      while (!eof() && peek() != '<') ++pos_;
      el.text += decode_entities(text_.substr(start, pos_ - start));
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

inline Element parse(std::string_view text) { return Parser(text).parse_document(); }

inline void escape_into(std::string& out, std::string_view s, bool in_attribute) {
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"':
        if (in_attribute) { out += "&quot;"; break; }
        [[fallthrough]];
      default: out.push_back(c);
    }
  }
}

/// Shortest decimal form that parses back to the same double.
inline std::string format_number(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

inline double parse_number(std::string_view s, const std::string& context) {
  // Trim surrounding whitespace; attribute values in the corpus carry stray spaces.
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  double out = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ParseError("not a number in " + context + ": '" + std::string(s) + "'");
  return out;
}

/// Streaming writer producing two-space-indented canonical output.
class Writer {
 public:
  Writer() { out_ = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"; }

  void open(std::string_view name,
            const std::vector<std::pair<std::string, std::string>>& attrs,
            bool self_close = false) {
    indent();
    out_ += '<';
    out_ += name;
    for (const auto& [k, v] : attrs) {
      out_ += ' ';
      out_ += k;
      out_ += "=\"";
      escape_into(out_, v, true);
      out_ += '"';
    }
    if (self_close) {
      out_ += "/>\n";
    } else {
      out_ += ">\n";
      ++depth_;
    }
  }

  void close(std::string_view name) {
    --depth_;
    indent();
    out_ += "</";
    out_ += name;
    out_ += ">\n";
  }

  void leaf_text(std::string_view name, std::string_view text) {
    indent();
    out_ += '<';
    out_ += name;
    out_ += '>';
    escape_into(out_, text, false);
    out_ += "</";
    out_ += name;
    out_ += ">\n";
  }

  const std::string& str() const { return out_; }

 private:
  void indent() { out_.append(static_cast<std::size_t>(depth_) * 2, ' '); }

  std::string out_;
  int depth_ = 0;
};

}  // namespace fml::xml

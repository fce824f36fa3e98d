#include "xml_lite.hpp"

#include <stdexcept>

namespace gpcref {

namespace {

struct Parser {
  std::string_view text;
  std::size_t pos = 0;

  [[noreturn]] void oops(const std::string& what) const {
    throw std::runtime_error("xml: " + what + " at offset " +
                             std::to_string(pos));
  }

  bool eof() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }

  bool starts_with(std::string_view s) const {
    return text.substr(pos, s.size()) == s;
  }

  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\n' ||
                      peek() == '\r'))
      ++pos;
  }

  std::string name_token() {
    const std::size_t start = pos;
    while (!eof()) {
      const char c = peek();
      if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
          (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.')
        ++pos;
      else
        break;
    }
    if (pos == start) oops("expected a name");
    return std::string(text.substr(start, pos - start));
  }

  std::string decode_entities(std::string_view raw) {
    std::string out;
    std::size_t i = 0;
    while (i < raw.size()) {
      if (raw[i] != '&') {
        out.push_back(raw[i++]);
        continue;
      }
      const std::size_t semi = raw.find(';', i);
      if (semi == std::string_view::npos) oops("unterminated entity");
      const std::string_view entity = raw.substr(i + 1, semi - i - 1);
      if (entity == "amp")
        out.push_back('&');
      else if (entity == "lt")
        out.push_back('<');
      else if (entity == "gt")
        out.push_back('>');
      else if (entity == "quot")
        out.push_back('"');
      else if (entity == "apos")
        out.push_back('\'');
      else
        oops("unknown entity '" + std::string(entity) + "'");
      i = semi + 1;
    }
    return out;
  }

  XmlNode element() {
    if (eof() || peek() != '<') oops("expected '<'");
    ++pos;
    XmlNode node;
    node.name = name_token();

    while (true) {
      skip_ws();
      if (eof()) oops("unterminated tag");
      if (peek() == '/') {
        ++pos;
        if (eof() || peek() != '>') oops("bad self-closing tag");
        ++pos;
        return node;  // <name/>
      }
      if (peek() == '>') {
        ++pos;
        break;
      }
      // attribute
      std::string key = name_token();
      skip_ws();
      if (eof() || peek() != '=') oops("attribute lacks '='");
      ++pos;
      skip_ws();
      if (eof() || (peek() != '"' && peek() != '\'')) oops("unquoted value");
      const char quote = peek();
      ++pos;
      const std::size_t start = pos;
      while (!eof() && peek() != quote) ++pos;
      if (eof()) oops("unterminated attribute value");
      node.attrs.emplace_back(std::move(key),
                              decode_entities(text.substr(start, pos - start)));
      ++pos;
    }

    // content
    while (true) {
      if (eof()) oops("unterminated element <" + node.name + ">");
      if (peek() == '<') {
        if (starts_with("</")) {
          pos += 2;
          const std::string closing = name_token();
          if (closing != node.name)
            oops("</" + closing + "> closes <" + node.name + ">");
          skip_ws();
          if (eof() || peek() != '>') oops("bad closing tag");
          ++pos;
          return node;
        }
        node.children.push_back(element());
      } else {
        const std::size_t start = pos;
        while (!eof() && peek() != '<') ++pos;
        node.text += decode_entities(text.substr(start, pos - start));
      }
    }
  }
};

}  // namespace

const XmlNode* XmlNode::child(std::string_view tag) const {
  for (const XmlNode& node : children)
    if (node.name == tag) return &node;
  return nullptr;
}

std::string XmlNode::attr(std::string_view key) const {
  for (const auto& [k, v] : attrs)
    if (k == key) return v;
  return "";
}

XmlNode parse_xml(std::string_view text) {
  Parser p{text};
  p.skip_ws();
  if (p.starts_with("<?")) {  // prolog
    const std::size_t end = text.find("?>", p.pos);
    if (end == std::string_view::npos) p.oops("unterminated prolog");
    p.pos = end + 2;
  }
  p.skip_ws();
  XmlNode root = p.element();
  p.skip_ws();
  if (!p.eof()) p.oops("trailing content after the root element");
  return root;
}

}  // namespace gpcref

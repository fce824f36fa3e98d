#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Minimal XML reader for round-trip tests: elements, attributes, text and
// the five standard entities. No namespaces, CDATA or doctypes. Throws
// std::runtime_error on malformed input.

namespace gpcref {

struct XmlNode {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attrs;
  std::vector<XmlNode> children;
  std::string text;  // concatenated character data directly inside this node

  const XmlNode* child(std::string_view tag) const;
  std::string attr(std::string_view key) const;  // "" when absent
};

XmlNode parse_xml(std::string_view text);

}  // namespace gpcref

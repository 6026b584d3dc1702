#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace barsample::xml {

// Minimal element tree. Character data is kept per element (concatenated,
// whitespace-only runs dropped); comments and processing instructions are not
// retained. Enough for the MEI subset the score model reads and writes.
struct Node {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<Node> children;
  std::string text;

  const std::string* attribute(std::string_view key) const;
  void set_attribute(std::string_view key, std::string value);
  bool erase_attribute(std::string_view key);

  Node& add_child(std::string child_name);
};

// Throws ParseError with line/column on malformed input or when the document
// has no root element.
Node parse(std::string_view document);

// Serialises with an XML declaration and two-space indentation.
std::string serialize(const Node& root);

}  // namespace barsample::xml

#include "barsample/xml.hpp"

#include <expat.h>

#include <algorithm>
#include <memory>
#include <sstream>

#include "barsample/error.hpp"

namespace barsample::xml {

const std::string* Node::attribute(std::string_view key) const {
  for (const auto& [k, v] : attributes)
    if (k == key) return &v;
  return nullptr;
}

void Node::set_attribute(std::string_view key, std::string value) {
  for (auto& [k, v] : attributes) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  attributes.emplace_back(std::string(key), std::move(value));
}

bool Node::erase_attribute(std::string_view key) {
  const auto it = std::find_if(attributes.begin(), attributes.end(),
                               [&](const auto& kv) { return kv.first == key; });
  if (it == attributes.end()) return false;
  attributes.erase(it);
  return true;
}

Node& Node::add_child(std::string child_name) {
  children.push_back(Node{std::move(child_name), {}, {}, {}});
  return children.back();
}

namespace {

struct Builder {
  Node root;
  bool has_root = false;
  // Path of child indices from root to the currently open element. Indices
  // (not pointers) because children vectors reallocate as they grow.
  std::vector<std::size_t> open;

  Node& current() {
    Node* n = &root;
    for (std::size_t i : open) n = &n->children[i];
    return *n;
  }
};

void XMLCALL on_start(void* data, const XML_Char* name, const XML_Char** attrs) {
  auto* b = static_cast<Builder*>(data);
  Node node{name, {}, {}, {}};
  for (std::size_t i = 0; attrs[i] != nullptr; i += 2) node.attributes.emplace_back(attrs[i], attrs[i + 1]);
  if (!b->has_root) {
    b->root = std::move(node);
    b->has_root = true;
    return;
  }
  Node& parent = b->current();
  parent.children.push_back(std::move(node));
  b->open.push_back(parent.children.size() - 1);
}

void XMLCALL on_end(void* data, const XML_Char*) {
  auto* b = static_cast<Builder*>(data);
  if (!b->open.empty()) b->open.pop_back();
}

void XMLCALL on_text(void* data, const XML_Char* s, int len) {
  auto* b = static_cast<Builder*>(data);
  if (!b->has_root) return;
  b->current().text.append(s, static_cast<std::size_t>(len));
}

void trim_text(Node& n) {
  const auto first = n.text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) {
    n.text.clear();
  } else {
    const auto last = n.text.find_last_not_of(" \t\r\n");
    n.text = n.text.substr(first, last - first + 1);
  }
  for (auto& c : n.children) trim_text(c);
}

void escape_into(std::string& out, std::string_view s, bool attribute) {
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"':
        if (attribute) {
          out += "&quot;";
          break;
        }
        [[fallthrough]];
      default: out += c;
    }
  }
}

void write(std::string& out, const Node& n, int depth) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  out += '<';
  out += n.name;
  for (const auto& [k, v] : n.attributes) {
    out += ' ';
    out += k;
    out += "=\"";
    escape_into(out, v, true);
    out += '"';
  }
  if (n.children.empty() && n.text.empty()) {
    out += "/>\n";
    return;
  }
  out += '>';
  if (n.children.empty()) {
    escape_into(out, n.text, false);
  } else {
    out += '\n';
    if (!n.text.empty()) {
      out.append(static_cast<std::size_t>(depth + 1) * 2, ' ');
      escape_into(out, n.text, false);
      out += '\n';
    }
    for (const auto& c : n.children) write(out, c, depth + 1);
    out.append(static_cast<std::size_t>(depth) * 2, ' ');
  }
  out += "</";
  out += n.name;
  out += ">\n";
}

}  // namespace

Node parse(std::string_view document) {
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(
      XML_ParserCreate("UTF-8"), &XML_ParserFree);
  if (!parser) throw ParseError("cannot allocate XML parser");

  Builder builder;
  XML_SetUserData(parser.get(), &builder);
  XML_SetElementHandler(parser.get(), on_start, on_end);
  XML_SetCharacterDataHandler(parser.get(), on_text);

  if (XML_Parse(parser.get(), document.data(), static_cast<int>(document.size()), XML_TRUE) ==
      XML_STATUS_ERROR) {
    std::ostringstream msg;
    msg << "XML error at line " << XML_GetCurrentLineNumber(parser.get()) << ", column "
        << XML_GetCurrentColumnNumber(parser.get()) << ": "
        << XML_ErrorString(XML_GetErrorCode(parser.get()));
    throw ParseError(msg.str());
  }
  if (!builder.has_root) throw ParseError("document has no root element");
  trim_text(builder.root);
  return std::move(builder.root);
}

std::string serialize(const Node& root) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  write(out, root, 0);
  return out;
}

}  // namespace barsample::xml

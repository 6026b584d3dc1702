#include "barsample/xml.hpp"

#include <gtest/gtest.h>

#include "barsample/error.hpp"

namespace barsample {
namespace {

TEST(XmlTest, ParsesNestedElementsAttributesAndText) {
  const auto root = xml::parse(R"(<a x="1"><b y="&lt;2&gt;"/><c>  hi  </c></a>)");
  EXPECT_EQ(root.name, "a");
  ASSERT_EQ(root.children.size(), 2u);
  EXPECT_EQ(*root.attribute("x"), "1");
  EXPECT_EQ(*root.children[0].attribute("y"), "<2>");
  EXPECT_EQ(root.children[1].text, "hi");
  EXPECT_EQ(root.attribute("missing"), nullptr);
}

TEST(XmlTest, MalformedInputThrowsParseErrorWithLocation) {
  try {
    xml::parse("<a><b></a>");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
  }
  EXPECT_THROW(xml::parse(""), ParseError);
}

TEST(XmlTest, SerializeRoundTripsEscapedContent) {
  xml::Node root{"r", {{"q", "a\"b&c"}}, {}, {}};
  root.add_child("t").text = "x < y & z";
  const auto again = xml::parse(xml::serialize(root));
  EXPECT_EQ(*again.attribute("q"), "a\"b&c");
  EXPECT_EQ(again.children.at(0).text, "x < y & z");
}

TEST(XmlTest, AttributeEditing) {
  xml::Node n{"n", {}, {}, {}};
  n.set_attribute("k", "1");
  n.set_attribute("k", "2");
  EXPECT_EQ(n.attributes.size(), 1u);
  EXPECT_EQ(*n.attribute("k"), "2");
  EXPECT_TRUE(n.erase_attribute("k"));
  EXPECT_FALSE(n.erase_attribute("k"));
}

}  // namespace
}  // namespace barsample

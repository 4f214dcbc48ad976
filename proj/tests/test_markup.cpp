#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "supernova/markup.hpp"

using namespace supernova;
using corpus::strip_markup;

TEST_CASE("piped links keep the display text") {
  CHECK(strip_markup("[[Paris|the capital]]").text == "the capital");
  CHECK(strip_markup("[[Paris]]").text == "Paris");
  CHECK(strip_markup("see [[Battle of Hastings|the battle]] in 1066").text ==
        "see the battle in 1066");
}

TEST_CASE("templates vanish, including nested ones") {
  CHECK(strip_markup("{{Infobox person|name=X}}Born in Y.").text == "Born in Y.");
  CHECK(strip_markup("A{{outer|{{inner}}from}}B").text == "AB");
  auto r = strip_markup("{{cite book|title={{lang|fr|Les Mots}}}}text");
  CHECK(r.text == "text");
  CHECK_FALSE(r.unbalanced);
}

TEST_CASE("quote markers are removed") {
  CHECK(strip_markup("'''Bold''' claim").text == "Bold claim");
  CHECK(strip_markup("''italic'' words").text == "italic words");
  CHECK(strip_markup("'''''both''''' kinds").text == "both kinds");
  // a lone apostrophe is prose
  CHECK(strip_markup("Earth's crust").text == "Earth's crust");
}

TEST_CASE("references and comments vanish with their contents") {
  CHECK(strip_markup("fact<ref>Some citation</ref> stands").text == "fact stands");
  CHECK(strip_markup("fact<ref name=\"a\"/> stands").text == "fact stands");
  CHECK(strip_markup("a<!-- hidden -->b").text == "ab");
}

TEST_CASE("file links vanish even with nested link captions") {
  CHECK(strip_markup("[[File:Foo.jpg|thumb|A [[caption]] here]]text").text == "text");
  CHECK(strip_markup("[[Image:Bar.png|right]]more").text == "more");
}

TEST_CASE("external links keep labels") {
  CHECK(strip_markup("[http://example.com label text] tail").text == "label text tail");
  CHECK(strip_markup("[http://example.com] tail").text == "tail");
  CHECK(strip_markup("[sic] stays").text == "[sic] stays");
}

TEST_CASE("headings and whitespace are tidied") {
  auto r = strip_markup("== History ==\nIt began.\n\n\n\nLater.");
  CHECK(r.text == "History\nIt began.\n\nLater.");
}

TEST_CASE("unbalanced braces strip to the end and set the flag") {
  auto r = strip_markup("keep {{never closed and more text");
  CHECK(r.text == "keep");
  CHECK(r.unbalanced);
  auto r2 = strip_markup("stray }} closer");
  CHECK(r2.unbalanced);
  CHECK(r2.text.find("{{") == std::string::npos);
}

TEST_CASE("stripped output carries no markup tokens") {
  const char* sample =
      "{{Infobox battle|name=Test}}'''The battle''' of [[Somewhere|somewhere]] "
      "<ref>cite</ref> was fought.<!-- note --> [[File:Map.png|thumb|[[map]]]] "
      "It ended in == Aftermath == victory.";
  auto r = strip_markup(sample);
  CHECK(r.text.find("[[") == std::string::npos);
  CHECK(r.text.find("{{") == std::string::npos);
  CHECK(r.text.find("'''") == std::string::npos);
  CHECK(r.text.find("<ref") == std::string::npos);
}

TEST_CASE("strip_markup is idempotent") {
  std::mt19937 rng(1234);
  const std::vector<std::string> pieces = {
      "plain text ",   "[[A|B]]",      "{{tmpl|x=1}}",   "'''b'''",  "''i''",
      "<ref>r</ref>",  "<!--c-->",     "[[File:x.jpg]]", "== h ==\n", "{{a{{b}}c}}",
      "[[link]]",      "word. ",       "{| table |}",    "\n\n",     "{{unclosed",
  };
  for (int trial = 0; trial < 200; ++trial) {
    std::string doc;
    int n = 1 + static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) doc += pieces[rng() % pieces.size()];
    std::string once = strip_markup(doc).text;
    std::string twice = strip_markup(once).text;
    REQUIRE(once == twice);
  }
}

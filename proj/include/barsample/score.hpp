#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "barsample/xml.hpp"

namespace barsample {

using MeasureNumber = std::int64_t;

// Element kinds counted as musical elements. Configured at runtime; the
// default is beam, note, rest, artic, tempo, dynam, dir, slur, chord, accid, tie.
class Whitelist {
 public:
  static Whitelist defaults();
  // One kind per line; blank lines and '#' comments ignored.
  static Whitelist from_text(std::string_view text);
  static Whitelist load(const std::filesystem::path& path);

  explicit Whitelist(std::set<std::string> kinds) : kinds_(std::move(kinds)) {}

  bool contains(std::string_view kind) const { return kinds_.find(std::string(kind)) != kinds_.end(); }
  const std::set<std::string>& kinds() const { return kinds_; }

 private:
  std::set<std::string> kinds_;
};

struct NotationElement {
  std::string kind;
  // Source attributes minus xml:id. @startid/@endid are rewritten to in-score
  // anchors ("m<measure>.s<staff>.<ordinal>"); events inside a beam carry a
  // derived "beam-pos" of i/m/t.
  std::map<std::string, std::string> attributes;

  friend bool operator==(const NotationElement&, const NotationElement&) = default;
};

// Elements of one staff in document order. Staff 0 collects measure-level
// control events that name no staff.
struct Staff {
  int number = 0;
  std::vector<NotationElement> elements;
};

struct Measure {
  MeasureNumber number = 0;
  std::vector<Staff> staves;  // ascending staff number

  // Concatenation of the staves' sequences in staff order.
  std::vector<NotationElement> elements() const;
  std::size_t element_count() const;
  const Staff* staff(int n) const;
};

class Score {
 public:
  const std::string& edition_id() const { return edition_id_; }
  const std::vector<Measure>& measures() const { return measures_; }
  const Measure* find(MeasureNumber number) const;
  bool contains(MeasureNumber number) const { return find(number) != nullptr; }
  std::vector<MeasureNumber> measure_numbers() const;

  // Retained source tree: header (scoreDef, staffDef, clef/key/meter) plus the
  // measures, used to emit self-contained subdocuments.
  const xml::Node& document() const { return *document_; }
  const Whitelist& whitelist() const { return whitelist_; }

 private:
  friend Score score_from_document(xml::Node, std::string, const Whitelist&);

  Score(std::string id, std::shared_ptr<const xml::Node> doc, Whitelist wl)
      : edition_id_(std::move(id)), document_(std::move(doc)), whitelist_(std::move(wl)) {}

  std::string edition_id_;
  std::vector<Measure> measures_;
  std::map<MeasureNumber, std::size_t> index_;
  std::shared_ptr<const xml::Node> document_;
  Whitelist whitelist_;
};

// Builds the measure model from an already-parsed tree.
// Throws DuplicateMeasureError, AttributeError.
Score score_from_document(xml::Node document, std::string edition_id, const Whitelist& whitelist);

// Throws ParseError (malformed XML), DuplicateMeasureError, AttributeError.
Score parse_score(std::string_view xml_document, const Whitelist& whitelist,
                  std::string edition_id = {});

// Reads a file; the edition id defaults to the file stem.
Score load_score(const std::filesystem::path& path, const Whitelist& whitelist,
                 std::string edition_id = {});

std::string emit(const Score& score);

struct MeasureCensus {
  std::map<MeasureNumber, std::int64_t> counts;
  std::int64_t total = 0;

  std::size_t size() const { return counts.size(); }
  bool empty() const { return counts.empty(); }
};

MeasureCensus measure_census(const Score& score);

// Element count per kind across the whole score.
std::map<std::string, std::int64_t> kind_census(const Score& score);

// Subdocument holding only `selection`, with the header and any mid-piece
// scoreDef/staffDef changes carried over. Control events outside measures are
// kept iff their @startid points into a kept measure.
// Throws SelectionError for numbers absent from the score.
Score extract_sample_document(const Score& score, std::span<const MeasureNumber> selection);

struct AlignmentReport {
  std::vector<MeasureNumber> shared;
  std::vector<MeasureNumber> only_left;
  std::vector<MeasureNumber> only_right;

  bool comparable() const { return only_left.empty() && only_right.empty(); }
};

AlignmentReport validate_alignment(const Score& left, const Score& right);

}  // namespace barsample

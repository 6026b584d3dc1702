#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "barsample/score.hpp"

namespace barsample {

enum class EditKind { Insert, Delete, Modify };

std::string_view to_string(EditKind k);

struct EditOperation {
  EditKind kind = EditKind::Modify;
  MeasureNumber measure = 0;
  int staff = 0;
  // Native diffs: element ordinal within the staff (left side for Delete and
  // Modify, right side for Insert). Log ingestion: the beat field verbatim.
  std::string position;
  std::string detail;
};

// Which attributes take part in token comparison. A kind listed in
// `per_kind` compares only the named attributes; other kinds compare every
// attribute not in `ignored`.
struct CompareOptions {
  std::map<std::string, std::set<std::string>> per_kind;
  std::set<std::string> ignored{"xml:id", "facs"};

  static CompareOptions from_json(const nlohmann::json& j);
};

// An element reduced to what comparison sees.
struct Token {
  std::string kind;
  std::vector<std::pair<std::string, std::string>> attributes;  // sorted by key

  friend bool operator==(const Token&, const Token&) = default;
};

Token tokenize(const NotationElement& e, const CompareOptions& options);

enum class StepKind { Match, Modify, Delete, Insert };

struct AlignmentStep {
  StepKind kind;
  std::size_t left;   // index into left, meaningless for Insert
  std::size_t right;  // index into right, meaningless for Delete
};

// Minimum unit-cost alignment: equal tokens match for 0, same kind with
// different attributes modify for 1, insert and delete cost 1; tokens of
// different kinds are never substituted. Among optimal alignments the one with
// the most Modify steps is returned, remaining ties resolved leftmost.
std::vector<AlignmentStep> align(std::span<const Token> left, std::span<const Token> right);

// Cost of align(); cheaper when only the count is needed.
std::int64_t edit_distance(std::span<const Token> left, std::span<const Token> right);

// Staff-by-staff edit script. Staves present on one side only are reported as
// all-Insert or all-Delete. The measure number is taken from `left`.
std::vector<EditOperation> diff_measures(const Measure& left, const Measure& right,
                                         const CompareOptions& options = {});

struct DiffReport {
  std::string left_id;
  std::string right_id;
  std::vector<EditOperation> operations;
  std::int64_t delta = 0;
  std::map<MeasureNumber, std::int64_t> per_measure;

  nlohmann::json to_json() const;
  // Rows "left_id,right_id,measure,count" with a header line.
  std::string to_csv() const;
};

// With a selection, every selected measure must exist on both sides
// (ComparabilityError otherwise). Without one, all shared measures are
// compared; use validate_alignment() to decide whether that is meaningful.
DiffReport diff_scores(const Score& left, const Score& right,
                       const std::optional<std::set<MeasureNumber>>& selection = std::nullopt,
                       const CompareOptions& options = {});

// Counts lines containing "@@ measure <int>, staff <int>, beat <number>@@".
DiffReport parse_musicdiff_log(std::string_view text);

}  // namespace barsample

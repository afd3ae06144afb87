//
// Copyright 2026 The toddag Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "toddag/corpus.hpp"

namespace toddag {

// Exact signed fixed-point number with 8 fractional digits. Used where
// printed two-decimal figures are compared, since binary doubles cannot
// represent them exactly.
class Decimal {
 public:
  static constexpr std::int64_t kScale = 100'000'000;

  constexpr Decimal() = default;
  static constexpr Decimal from_units(std::int64_t units) {
    Decimal d;
    d.units_ = units;
    return d;
  }
  // "95.40", "-3", "102.485". Throws Error on malformed input or more than
  // eight fractional digits.
  static Decimal parse(std::string_view text);

  constexpr std::int64_t units() const { return units_; }
  double to_double() const { return static_cast<double>(units_) / kScale; }
  // Rounded half away from zero to `digits` fractional digits.
  std::string to_string(int digits = 2) const;

  friend constexpr Decimal operator+(Decimal a, Decimal b) { return from_units(a.units_ + b.units_); }
  friend constexpr Decimal operator-(Decimal a, Decimal b) { return from_units(a.units_ - b.units_); }
  constexpr auto operator<=>(const Decimal&) const = default;

  Decimal abs() const { return from_units(units_ < 0 ? -units_ : units_); }
  // Exact halving; throws if the last unit is odd.
  Decimal half() const;

 private:
  std::int64_t units_ = 0;
};

// (inform + success) / 2 + bleu. For KVRET pass match and success-F1.
double combined_score(double inform, double success, double bleu);
Decimal combined_score(Decimal inform, Decimal success, Decimal bleu);

// Corpus BLEU-4 on 0..100 with uniform weights and the corpus brevity
// penalty. Unigram precision is unsmoothed; for n = 2..4 the precision is
// (matches + 1) / (candidates + 1). Zero when there is no unigram match or
// the hypotheses are empty. Throws Error when the sizes differ or the
// corpus is empty.
double bleu(std::span<const std::string> hypotheses, std::span<const std::string> references);

struct DialogPrediction {
  std::vector<std::string> responses;  // delexicalized, one per turn
  std::map<std::string, SlotValues> offered;
};

using Predictions = std::map<std::string, DialogPrediction>;

// {"<dialog_id>": {"responses": [...], "offered": {domain: {slot: value}}}}
Predictions parse_predictions(std::string_view json_text);
Predictions load_predictions(const std::filesystem::path& path);
std::string predictions_to_json(const Predictions& predictions);

// The offered entity of every domain with informable constraints matches
// all of them (case-insensitive; "dontcare" matches anything).
bool dialog_inform(const DialogPrediction& prediction, const GoalSpec& goal);
// Inform, and every requestable slot's placeholder occurs in some response.
bool dialog_success(const DialogPrediction& prediction, const GoalSpec& goal);
// F1 between requested slots and the requestable slots whose placeholders
// the responses provide. `requestable` is the corpus-wide requestable slot
// vocabulary. 0 when either set is empty. Range 0..1.
double dialog_success_f1(const DialogPrediction& prediction, const GoalSpec& goal,
                         const std::set<std::string>& requestable);

enum class Dataset { kMultiwoz, kKvret };
Dataset parse_dataset(std::string_view name);

struct DialogOutcome {
  std::string dialog_id;
  bool inform = false;
  bool success = false;
  double success_f1 = 0.0;
};

struct MetricsReport {
  Dataset dataset = Dataset::kMultiwoz;
  std::size_t dialogs = 0;
  double inform = 0.0;   // percent
  double success = 0.0;  // percent
  std::optional<double> success_f1;  // percent, KVRET only
  std::optional<double> match;       // percent, KVRET only
  double bleu = 0.0;
  double score = 0.0;
  std::vector<DialogOutcome> outcomes;
};

// Scores the test split (every dialog if the corpus has no test split).
// Throws Error when a dialog lacks a goal or a prediction, or when the
// response count differs from the turn count.
MetricsReport evaluate(const Corpus& reference, const Predictions& predictions,
                       Dataset dataset);

std::string report_to_json(const MetricsReport& report);

// "tx", "at", "re", "ho", "tr"; any other domain keeps its name.
std::string domain_abbreviation(std::string_view domain);
std::string category_key(const Dialog& dialog);

// category -> share of unsuccessful dialogs. Throws Error when a dialog has
// no success flag.
std::map<std::string, double> error_by_category(std::span<const Dialog> dialogs,
                                                const std::map<std::string, bool>& success);

}  // namespace toddag

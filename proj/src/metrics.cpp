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

#include "toddag/metrics.hpp"

#include <cmath>
#include <cstdlib>

#include "json.hpp"
#include "toddag/text.hpp"

namespace toddag {

using nlohmann::json;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Decimal

Decimal Decimal::parse(std::string_view text) {
  const std::string original(text);
  auto fail = [&] { return Error("malformed decimal '" + original + "'"); };
  bool negative = false;
  if (!text.empty() && (text[0] == '-' || text[0] == '+')) {
    negative = text[0] == '-';
    text.remove_prefix(1);
  }
  const auto dot = text.find('.');
  const auto whole = text.substr(0, dot);
  const auto frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if ((whole.empty() && frac.empty()) || whole.size() > 10 || frac.size() > 8) throw fail();
  std::int64_t units = 0;
  for (char c : whole) {
    if (c < '0' || c > '9') throw fail();
    units = units * 10 + (c - '0');
  }
  std::int64_t fraction = 0;
  for (std::size_t i = 0; i < 8; ++i) {
    int digit = 0;
    if (i < frac.size()) {
      if (frac[i] < '0' || frac[i] > '9') throw fail();
      digit = frac[i] - '0';
    }
    fraction = fraction * 10 + digit;
  }
  units = units * kScale + fraction;
  return from_units(negative ? -units : units);
}

std::string Decimal::to_string(int digits) const {
  if (digits < 0 || digits > 8) throw Error("Decimal::to_string: digits must be in 0..8");
  std::int64_t factor = 1;
  for (int i = digits; i < 8; ++i) factor *= 10;
  const std::int64_t magnitude = units_ < 0 ? -units_ : units_;
  const std::int64_t rounded = (magnitude + factor / 2) / factor;
  std::int64_t pow10 = 1;
  for (int i = 0; i < digits; ++i) pow10 *= 10;
  std::string out = (units_ < 0 && rounded != 0) ? "-" : "";
  out += std::to_string(rounded / pow10);
  if (digits > 0) {
    std::string frac = std::to_string(rounded % pow10);
    out += "." + std::string(static_cast<std::size_t>(digits) - frac.size(), '0') + frac;
  }
  return out;
}

Decimal Decimal::half() const {
  if (units_ % 2 != 0) throw Error("Decimal::half: value not exactly divisible");
  return from_units(units_ / 2);
}

double combined_score(double inform, double success, double bleu) {
  return (inform + success) / 2.0 + bleu;
}

Decimal combined_score(Decimal inform, Decimal success, Decimal bleu) {
  return (inform + success).half() + bleu;
}

// ---------------------------------------------------------------------------
// BLEU

namespace {

using Ngram = std::vector<std::string>;

std::map<Ngram, std::size_t> count_ngrams(const std::vector<std::string>& tokens, std::size_t n) {
  std::map<Ngram, std::size_t> counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[Ngram(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                   tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

}  // namespace

double bleu(std::span<const std::string> hypotheses, std::span<const std::string> references) {
  if (hypotheses.size() != references.size()) {
    throw Error("bleu: " + std::to_string(hypotheses.size()) + " hypotheses vs " +
                std::to_string(references.size()) + " references");
  }
  if (hypotheses.empty()) throw Error("bleu: empty corpus");
  constexpr std::size_t kMaxOrder = 4;
  std::size_t matches[kMaxOrder] = {};
  std::size_t candidates[kMaxOrder] = {};
  std::size_t hyp_length = 0, ref_length = 0;
  for (std::size_t s = 0; s < hypotheses.size(); ++s) {
    const auto hyp = tokenize(hypotheses[s]);
    const auto ref = tokenize(references[s]);
    hyp_length += hyp.size();
    ref_length += ref.size();
    for (std::size_t n = 1; n <= kMaxOrder; ++n) {
      const auto h = count_ngrams(hyp, n);
      const auto r = count_ngrams(ref, n);
      for (const auto& [gram, count] : h) {
        candidates[n - 1] += count;
        if (auto it = r.find(gram); it != r.end()) matches[n - 1] += std::min(count, it->second);
      }
    }
  }
  if (hyp_length == 0 || matches[0] == 0) return 0.0;
  double log_sum = std::log(static_cast<double>(matches[0]) / static_cast<double>(candidates[0]));
  for (std::size_t n = 1; n < kMaxOrder; ++n) {
    log_sum += std::log(static_cast<double>(matches[n] + 1) /
                        static_cast<double>(candidates[n] + 1));
  }
  const double bp = hyp_length > ref_length
                        ? 1.0
                        : std::exp(1.0 - static_cast<double>(ref_length) /
                                             static_cast<double>(hyp_length));
  return bp * std::exp(log_sum / static_cast<double>(kMaxOrder)) * 100.0;
}

// ---------------------------------------------------------------------------
// Prediction files

Predictions parse_predictions(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("prediction file: ") + e.what());
  }
  if (!root.is_object()) throw Error("prediction file: top level must be an object");
  Predictions out;
  for (const auto& [id, entry] : root.items()) {
    const std::string where = "prediction file: " + id;
    if (!entry.is_object() || !entry.contains("responses") || !entry["responses"].is_array()) {
      throw Error(where + ": needs a 'responses' array");
    }
    DialogPrediction p;
    for (const auto& r : entry["responses"]) {
      if (!r.is_string()) throw Error(where + ": responses must be strings");
      p.responses.push_back(r.get<std::string>());
    }
    if (entry.contains("offered")) {
      if (!entry["offered"].is_object()) throw Error(where + ": 'offered' must be an object");
      for (const auto& [domain, slots] : entry["offered"].items()) {
        if (!slots.is_object()) throw Error(where + ": offered." + domain + " must be an object");
        for (const auto& [slot, value] : slots.items()) {
          if (!value.is_string()) throw Error(where + ": offered values must be strings");
          p.offered[domain][slot] = value.get<std::string>();
        }
      }
    }
    out.emplace(id, std::move(p));
  }
  return out;
}

Predictions load_predictions(const std::filesystem::path& path) {
  return parse_predictions(read_file(path));
}

std::string predictions_to_json(const Predictions& predictions) {
  ordered_json root = ordered_json::object();
  for (const auto& [id, p] : predictions) {
    ordered_json offered = ordered_json::object();
    for (const auto& [domain, slots] : p.offered) {
      for (const auto& [slot, value] : slots) offered[domain][slot] = value;
    }
    root[id] = {{"responses", p.responses}, {"offered", offered}};
  }
  return root.dump(1) + "\n";
}

// ---------------------------------------------------------------------------
// Dialog-level metrics

bool dialog_inform(const DialogPrediction& prediction, const GoalSpec& goal) {
  for (const auto& [domain, g] : goal.domains) {
    if (g.informable.empty()) continue;
    auto offered = prediction.offered.find(domain);
    if (offered == prediction.offered.end()) return false;
    for (const auto& [slot, value] : g.informable) {
      if (to_lower(value) == "dontcare") continue;
      auto it = offered->second.find(slot);
      if (it == offered->second.end() || to_lower(it->second) != to_lower(value)) return false;
    }
  }
  return true;
}

namespace {

std::set<std::string> placeholders_of(const DialogPrediction& prediction) {
  std::set<std::string> out;
  for (const auto& r : prediction.responses) {
    for (auto& p : placeholders_in(r)) out.insert(std::move(p));
  }
  return out;
}

std::set<std::string> requested_slots(const GoalSpec& goal) {
  std::set<std::string> out;
  for (const auto& [domain, g] : goal.domains) out.insert(g.requestable.begin(), g.requestable.end());
  return out;
}

}  // namespace

bool dialog_success(const DialogPrediction& prediction, const GoalSpec& goal) {
  if (!dialog_inform(prediction, goal)) return false;
  const auto mentioned = placeholders_of(prediction);
  for (const auto& slot : requested_slots(goal)) {
    if (!mentioned.contains(placeholder_for(slot))) return false;
  }
  return true;
}

double dialog_success_f1(const DialogPrediction& prediction, const GoalSpec& goal,
                         const std::set<std::string>& requestable) {
  const auto requested = requested_slots(goal);
  const auto mentioned = placeholders_of(prediction);
  std::set<std::string> provided;
  for (const auto& slot : requestable) {
    if (mentioned.contains(placeholder_for(slot))) provided.insert(slot);
  }
  if (provided.empty() || requested.empty()) return 0.0;
  std::size_t hit = 0;
  for (const auto& slot : provided) hit += requested.contains(slot) ? 1 : 0;
  if (hit == 0) return 0.0;
  const double precision = static_cast<double>(hit) / static_cast<double>(provided.size());
  const double recall = static_cast<double>(hit) / static_cast<double>(requested.size());
  return 2.0 * precision * recall / (precision + recall);
}

Dataset parse_dataset(std::string_view name) {
  if (name == "multiwoz") return Dataset::kMultiwoz;
  if (name == "kvret") return Dataset::kKvret;
  throw Error("unknown dataset '" + std::string(name) + "' (expected multiwoz or kvret)");
}

MetricsReport evaluate(const Corpus& reference, const Predictions& predictions,
                       Dataset dataset) {
  const bool has_test = reference.count(Split::kTest) > 0;
  std::set<std::string> requestable;
  for (const auto& [id, goal] : reference.goals) {
    const auto r = requested_slots(goal);
    requestable.insert(r.begin(), r.end());
  }

  MetricsReport report;
  report.dataset = dataset;
  std::vector<std::string> hypotheses, references;
  std::size_t informed = 0, succeeded = 0;
  double f1_sum = 0.0;
  for (const Dialog& d : reference.dialogs) {
    if (has_test && d.split != Split::kTest) continue;
    const GoalSpec* goal = reference.goal(d.id);
    if (goal == nullptr) throw Error("evaluate: dialog '" + d.id + "' has no goal");
    auto p = predictions.find(d.id);
    if (p == predictions.end()) throw Error("evaluate: no prediction for dialog '" + d.id + "'");
    if (p->second.responses.size() != d.turns.size()) {
      throw Error("evaluate: dialog '" + d.id + "' has " + std::to_string(d.turns.size()) +
                  " turns but " + std::to_string(p->second.responses.size()) + " responses");
    }
    DialogOutcome o{d.id, dialog_inform(p->second, *goal), dialog_success(p->second, *goal),
                    dialog_success_f1(p->second, *goal, requestable)};
    informed += o.inform ? 1 : 0;
    succeeded += o.success ? 1 : 0;
    f1_sum += o.success_f1;
    for (std::size_t t = 0; t < d.turns.size(); ++t) {
      hypotheses.push_back(p->second.responses[t]);
      references.push_back(d.turns[t].response_delex);
    }
    report.outcomes.push_back(std::move(o));
  }
  report.dialogs = report.outcomes.size();
  if (report.dialogs == 0) throw Error("evaluate: no dialogs to score");
  const double n = static_cast<double>(report.dialogs);
  report.inform = 100.0 * static_cast<double>(informed) / n;
  report.success = 100.0 * static_cast<double>(succeeded) / n;
  report.bleu = hypotheses.empty() ? 0.0 : bleu(hypotheses, references);
  if (dataset == Dataset::kKvret) {
    report.match = report.inform;
    report.success_f1 = 100.0 * f1_sum / n;
    report.score = combined_score(*report.match, *report.success_f1, report.bleu);
  } else {
    report.score = combined_score(report.inform, report.success, report.bleu);
  }
  return report;
}

std::string report_to_json(const MetricsReport& report) {
  ordered_json out;
  out["dataset"] = report.dataset == Dataset::kKvret ? "kvret" : "multiwoz";
  out["dialogs"] = report.dialogs;
  out["inform"] = report.inform;
  out["success"] = report.success;
  if (report.match) out["match"] = *report.match;
  if (report.success_f1) out["success_f1"] = *report.success_f1;
  out["bleu"] = report.bleu;
  out["score"] = report.score;
  return out.dump(1) + "\n";
}

// ---------------------------------------------------------------------------
// Error rate per domain category

std::string domain_abbreviation(std::string_view domain) {
  static const std::map<std::string, std::string, std::less<>> kShort = {
      {"taxi", "tx"}, {"attraction", "at"}, {"restaurant", "re"}, {"hotel", "ho"}, {"train", "tr"}};
  auto it = kShort.find(domain);
  return it == kShort.end() ? std::string(domain) : it->second;
}

std::string category_key(const Dialog& dialog) {
  std::string key;
  for (const auto& d : dialog.domains) {
    if (!key.empty()) key += ", ";
    key += domain_abbreviation(d);
  }
  return key;
}

std::map<std::string, double> error_by_category(std::span<const Dialog> dialogs,
                                                const std::map<std::string, bool>& success) {
  std::map<std::string, std::pair<std::size_t, std::size_t>> tally;  // failed, total
  for (const Dialog& d : dialogs) {
    auto it = success.find(d.id);
    if (it == success.end()) throw Error("error_by_category: no success flag for '" + d.id + "'");
    auto& [failed, total] = tally[category_key(d)];
    failed += it->second ? 0 : 1;
    ++total;
  }
  std::map<std::string, double> out;
  for (const auto& [key, counts] : tally) {
    out[key] = static_cast<double>(counts.first) / static_cast<double>(counts.second);
  }
  return out;
}

}  // namespace toddag

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
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "toddag/aug_sentence.hpp"
#include "toddag/backend.hpp"
#include "toddag/conllu.hpp"
#include "toddag/corpus.hpp"
#include "toddag/embedding.hpp"
#include "toddag/filter.hpp"
#include "toddag/metrics.hpp"

namespace toddag {

enum class Method { kW2v, kMlm, kBackTranslate, kParaphrase, kRotate, kLlm, kDialogTree, kActResp };

std::string_view method_name(Method method);
Method parse_method(std::string_view name);
const std::vector<Method>& all_methods();

// x2, x3, x5: the augmented set is 2, 3 or 5 times the original.
enum class Expansion { kX2 = 2, kX3 = 3, kX5 = 5 };

std::string_view expansion_name(Expansion expansion);
Expansion parse_expansion(std::string_view name);
inline std::size_t synthetic_per_original(Expansion e) { return static_cast<std::size_t>(e) - 1; }

// Everything a method may need at run time. Unused members may stay empty.
struct AugmentResources {
  const EmbeddingTable* embeddings = nullptr;
  const StopwordList* stopwords = nullptr;  // built-in English list when null
  std::shared_ptr<BackendClient> backend;
  std::shared_ptr<Predictor> predictor;
  const ParseStore* parses = nullptr;
};

struct AugmentConfig {
  Method method = Method::kW2v;
  Expansion expansion = Expansion::kX2;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  // Word substitution.
  std::size_t k = 10;
  double max_positions_fraction = 1.0;
  bool substitute_responses = false;
  ContextForm context_form = ContextForm::kLexical;
  // Dialog tree.
  std::size_t sample_size = 50;
  // Back-translation.
  std::string pivot = "fr";
  // Fragment rotation.
  RotationConfig rotation;
};

struct ExpandStats {
  std::size_t originals = 0;
  std::size_t synthetic = 0;
  std::size_t turns_attempted = 0;  // turn-level methods only
  std::size_t turns_accepted = 0;
};

// Every original dialog, verbatim and in order, followed by
// synthetic_per_original(expansion) synthetic dialogs per training dialog,
// ordered by (original, copy). Synthetic ids are "<orig_id>#aug<copy>",
// copy counting from 1, and each copy draws from its own seed
// derive_seed(config.seed, orig_id, copy). A rejected turn keeps the
// original turn, so counts are exact. The result is validated.
Corpus expand(const Corpus& corpus, const AugmentConfig& config,
              const AugmentResources& resources, ExpandStats* stats = nullptr);

// round(fraction * |train|) training dialogs (or exactly `count` when set)
// drawn without replacement; other splits untouched, corpus order kept.
Corpus sample_subset(const Corpus& corpus, double fraction, std::uint64_t seed,
                     std::optional<std::size_t> count = std::nullopt);

struct FewShotResult {
  Corpus corpus;
  std::vector<std::string> warnings;
};

// Keeps `keep` random training dialogs containing target_domain and drops
// the other ones; validation and test keep only dialogs containing it.
FewShotResult few_shot_split(const Corpus& corpus, std::string_view target_domain,
                             std::size_t keep, std::uint64_t seed);

// Renders a fraction the same way everywhere: shortest round-trip form.
std::string format_fraction(double fraction);

struct MatrixConfig {
  std::vector<double> fractions;
  std::vector<Expansion> expansions;
  std::vector<Method> methods;
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  AugmentConfig base;  // method/expansion/seed are set per cell
  std::filesystem::path out_dir;
  std::size_t workers = 1;
  // Shell command run per cell; "{corpus}" and "{pred}" are replaced by
  // the cell's corpus path and the prediction file it must write.
  std::optional<std::string> hook;
  Dataset dataset = Dataset::kMultiwoz;
};

struct CellMetrics {
  double inform = 0.0, success = 0.0, bleu = 0.0, score = 0.0;
};

struct CellResult {
  Method method = Method::kW2v;
  double fraction = 1.0;
  Expansion expansion = Expansion::kX2;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  std::string artifact;  // corpus path relative to out_dir
  std::size_t dialogs = 0;
  std::optional<CellMetrics> metrics;
};

struct MatrixReport {
  std::vector<CellResult> cells;  // method, fraction, expansion, seed order
  std::size_t failures() const;
};

// Cell name without the seed, e.g. "w2v_f0.1_x2".
std::string cell_key(Method method, double fraction, Expansion expansion);

// Runs every (method, fraction, expansion, seed) cell, up to `workers` at a
// time. Randomness comes only from (cell key, seed), so the output does not
// depend on the worker count. Writes out_dir/cells/<key>_s<seed>/corpus.json
// and out_dir/results.csv. A failing cell is recorded and the rest go on.
MatrixReport run_matrix(const Corpus& corpus, const MatrixConfig& config,
                        const AugmentResources& resources);

// Per-seed rows, then "# means" over seeds, then "# best_expansion" per
// (method, fraction). Numbers are rounded to two decimals only here.
std::string matrix_csv(const MatrixReport& report);
MatrixReport parse_matrix_csv(std::string_view csv);

// Human-readable table of the means with the best expansion per
// (method, fraction) in brackets.
std::string render_report(const MatrixReport& report);

}  // namespace toddag

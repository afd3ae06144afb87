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

#include "toddag/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "toddag/aug_dialog.hpp"
#include "toddag/aug_word.hpp"
#include "toddag/parallel.hpp"
#include "toddag/random.hpp"

namespace toddag {

namespace {

struct MethodName {
  Method method;
  std::string_view name;
};

constexpr MethodName kMethods[] = {
    {Method::kW2v, "w2v"},           {Method::kMlm, "mlm"},
    {Method::kBackTranslate, "backtranslate"}, {Method::kParaphrase, "paraphrase"},
    {Method::kRotate, "rotate"},     {Method::kLlm, "llm"},
    {Method::kDialogTree, "dialogtree"}, {Method::kActResp, "actresp"},
};

}  // namespace

std::string_view method_name(Method method) {
  for (const auto& m : kMethods) {
    if (m.method == method) return m.name;
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (const auto& m : kMethods) {
    if (m.name == name) return m.method;
  }
  throw Error("unknown method '" + std::string(name) +
              "' (expected w2v, mlm, backtranslate, paraphrase, rotate, llm, dialogtree or "
              "actresp)");
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods = [] {
    std::vector<Method> out;
    for (const auto& m : kMethods) out.push_back(m.method);
    return out;
  }();
  return methods;
}

std::string_view expansion_name(Expansion expansion) {
  switch (expansion) {
    case Expansion::kX2:
      return "x2";
    case Expansion::kX3:
      return "x3";
    case Expansion::kX5:
      return "x5";
  }
  return "?";
}

Expansion parse_expansion(std::string_view name) {
  if (name == "x2" || name == "2") return Expansion::kX2;
  if (name == "x3" || name == "3") return Expansion::kX3;
  if (name == "x5" || name == "5") return Expansion::kX5;
  throw Error("unknown expansion '" + std::string(name) + "' (expected x2, x3 or x5)");
}

// ---------------------------------------------------------------------------

namespace {

class Augmenter {
 public:
  Augmenter(const Corpus& corpus, const AugmentConfig& config, const AugmentResources& res)
      : config_(config), res_(res) {
    for (const Dialog& d : corpus.dialogs) {
      if (d.split == Split::kTrain) train_.push_back(d);
    }
    if (!res_.stopwords) {
      default_stopwords_ = std::make_unique<StopwordList>(StopwordList::english());
    }
    switch (config.method) {
      case Method::kW2v:
        if (!res_.embeddings) throw Error("method w2v needs an embedding table");
        require_predictor();
        break;
      case Method::kMlm:
        require_backend();
        require_predictor();
        break;
      case Method::kBackTranslate:
      case Method::kParaphrase:
      case Method::kLlm:
        require_backend();
        break;
      case Method::kRotate:
        if (!res_.parses) throw Error("method rotate needs dependency parses");
        break;
      case Method::kDialogTree:
        break;
      case Method::kActResp:
        index_ = StateIndex(train_);
        break;
    }
  }

  const std::vector<Dialog>& train() const { return train_; }

  // One synthetic dialog (without id) for `original`, copy `copy`.
  Dialog synthesize(const Dialog& original, std::size_t copy, ExpandStats& stats) const {
    const std::uint64_t seed = derive_seed(config_.seed, original.id, copy);
    Rng rng(seed);
    switch (config_.method) {
      case Method::kW2v:
      case Method::kMlm: {
        SubstitutionPolicy policy{config_.k, config_.max_positions_fraction, seed,
                                  config_.substitute_responses};
        ConsistencyFilter filter(res_.predictor, config_.context_form);
        if (config_.method == Method::kW2v) {
          return substitute_embedding(original, *res_.embeddings, stopwords(), policy, filter);
        }
        return substitute_masked_lm(original, *res_.backend, stopwords(), policy, filter);
      }
      case Method::kBackTranslate:
        return per_turn(original, stats, [&](const Turn& t) {
          return back_translate(t, *res_.backend, config_.pivot);
        });
      case Method::kParaphrase:
        return per_turn(original, stats,
                        [&](const Turn& t) { return paraphrase(t, *res_.backend, rng); });
      case Method::kLlm:
        return per_turn(original, stats,
                        [&](const Turn& t) { return llm_paraphrase(t, *res_.backend, rng); });
      case Method::kRotate:
        return per_turn(original, stats, [&](const Turn& t) {
          return fragment_rotate(t, res_.parses->find(original.id, t.index), config_.rotation,
                                 rng);
        });
      case Method::kDialogTree:
        return synthesize_dialog(train_, {config_.sample_size}, rng);
      case Method::kActResp:
        return act_response_substitute(original, index_, rng);
    }
    throw Error("unhandled method");
  }

 private:
  void require_backend() const {
    if (!res_.backend) throw Error("method " + std::string(method_name(config_.method)) +
                                   " needs a backend endpoint");
  }
  void require_predictor() const {
    if (!res_.predictor) throw Error("method " + std::string(method_name(config_.method)) +
                                     " needs a filter predictor");
  }
  const StopwordList& stopwords() const {
    return res_.stopwords ? *res_.stopwords : *default_stopwords_;
  }

  template <typename Op>
  Dialog per_turn(const Dialog& original, ExpandStats& stats, Op&& op) const {
    Dialog out = original;
    for (Turn& t : out.turns) {
      TurnResult r = op(t);
      ++stats.turns_attempted;
      if (r.accepted) {
        ++stats.turns_accepted;
        t = std::move(r.turn);
      }
    }
    return out;
  }

  const AugmentConfig& config_;
  const AugmentResources& res_;
  std::unique_ptr<StopwordList> default_stopwords_;
  std::vector<Dialog> train_;
  StateIndex index_;
};

}  // namespace

Corpus expand(const Corpus& corpus, const AugmentConfig& config,
              const AugmentResources& resources, ExpandStats* stats) {
  const Augmenter augmenter(corpus, config, resources);
  const auto& train = augmenter.train();
  const std::size_t copies = synthetic_per_original(config.expansion);
  if (config.method == Method::kDialogTree && train.empty() && !corpus.dialogs.empty()) {
    throw Error("method dialogtree needs training dialogs");
  }

  const std::size_t jobs = train.size() * copies;
  std::vector<Dialog> synthetic(jobs);
  std::vector<ExpandStats> job_stats(jobs);
  parallel_for(jobs, config.workers, [&](std::size_t j) {
    const Dialog& original = train[j / copies];
    const std::size_t copy = j % copies + 1;
    Dialog d = augmenter.synthesize(original, copy, job_stats[j]);
    d.id = original.id + "#aug" + std::to_string(copy);
    d.split = Split::kTrain;
    for (std::size_t i = 0; i < d.turns.size(); ++i) d.turns[i].index = i;
    d.domains = derive_domains(d, nullptr);
    synthetic[j] = std::move(d);
  });

  Corpus out = corpus;
  out.dialogs.reserve(corpus.dialogs.size() + jobs);
  for (auto& d : synthetic) out.dialogs.push_back(std::move(d));
  validate(out);

  if (stats) {
    *stats = {};
    stats->originals = corpus.dialogs.size();
    stats->synthetic = jobs;
    for (const auto& s : job_stats) {
      stats->turns_attempted += s.turns_attempted;
      stats->turns_accepted += s.turns_accepted;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

Corpus keep_dialogs(const Corpus& corpus, const std::vector<bool>& keep) {
  Corpus out;
  out.dataset_id = corpus.dataset_id;
  out.ontology = corpus.ontology;
  out.act_vocabulary = corpus.act_vocabulary;
  for (std::size_t i = 0; i < corpus.dialogs.size(); ++i) {
    if (!keep[i]) continue;
    const Dialog& d = corpus.dialogs[i];
    out.dialogs.push_back(d);
    if (const GoalSpec* g = corpus.goal(d.id)) out.goals.emplace(d.id, *g);
  }
  return out;
}

}  // namespace

Corpus sample_subset(const Corpus& corpus, double fraction, std::uint64_t seed,
                     std::optional<std::size_t> count) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw Error("subset fraction must be in (0, 1]");
  std::vector<std::size_t> train;
  for (std::size_t i = 0; i < corpus.dialogs.size(); ++i) {
    if (corpus.dialogs[i].split == Split::kTrain) train.push_back(i);
  }
  const std::size_t n =
      count ? *count
            : static_cast<std::size_t>(std::llround(fraction * static_cast<double>(train.size())));
  if (n > train.size()) {
    throw Error("subset of " + std::to_string(n) + " dialogs requested from " +
                std::to_string(train.size()) + " training dialogs");
  }
  Rng rng(derive_seed(seed, "subset", 0));
  rng.shuffle(train);
  std::vector<bool> keep(corpus.dialogs.size(), true);
  for (std::size_t i = n; i < train.size(); ++i) keep[train[i]] = false;
  return keep_dialogs(corpus, keep);
}

FewShotResult few_shot_split(const Corpus& corpus, std::string_view target_domain,
                             std::size_t keep, std::uint64_t seed) {
  const bool known = std::any_of(corpus.ontology.begin(), corpus.ontology.end(),
                                 [&](const auto& ds) { return ds.first == target_domain; });
  if (!known) throw Error("domain '" + std::string(target_domain) + "' is not in the ontology");

  auto has_target = [&](const Dialog& d) {
    return std::find(d.domains.begin(), d.domains.end(), target_domain) != d.domains.end();
  };
  std::vector<bool> kept(corpus.dialogs.size(), true);
  std::vector<std::size_t> target_train;
  for (std::size_t i = 0; i < corpus.dialogs.size(); ++i) {
    const Dialog& d = corpus.dialogs[i];
    if (d.split == Split::kTrain) {
      if (has_target(d)) target_train.push_back(i);
    } else {
      kept[i] = has_target(d);
    }
  }
  FewShotResult result;
  if (target_train.size() < keep) {
    result.warnings.push_back("only " + std::to_string(target_train.size()) + " training dialogs contain '" +
                              std::string(target_domain) + "'; keeping all of them instead of " +
                              std::to_string(keep));
  }
  Rng rng(derive_seed(seed, "few-shot:" + std::string(target_domain), 0));
  rng.shuffle(target_train);
  for (std::size_t i = keep; i < target_train.size(); ++i) kept[target_train[i]] = false;
  result.corpus = keep_dialogs(corpus, kept);
  return result;
}

std::string format_fraction(double fraction) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, fraction);
  if (ec != std::errc()) throw Error("cannot format fraction");
  return std::string(buffer, end);
}

}  // namespace toddag

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

#include <gtest/gtest.h>

#include <algorithm>

#include "oracles.hpp"
#include "toddag/experiment.hpp"

using namespace toddag;
namespace fs = std::filesystem;

namespace {

const Corpus& corpus50() {
  static const Corpus c = load_canonical(oracle::data_path("fixtures/corpus50.json"));
  return c;
}

bool has_domain(const Dialog& d, const std::string& domain) {
  return std::find(d.domains.begin(), d.domains.end(), domain) != d.domains.end();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("toddag-exp-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Names, RoundTrip) {
  for (Method m : all_methods()) EXPECT_EQ(parse_method(method_name(m)), m);
  EXPECT_EQ(all_methods().size(), 8u);
  for (Expansion e : {Expansion::kX2, Expansion::kX3, Expansion::kX5}) {
    EXPECT_EQ(parse_expansion(expansion_name(e)), e);
  }
  EXPECT_EQ(synthetic_per_original(Expansion::kX5), 4u);
  EXPECT_ANY_THROW(parse_method("synonyms"));
  EXPECT_ANY_THROW(parse_expansion("x4"));
  EXPECT_EQ(format_fraction(0.1), "0.1");
  EXPECT_EQ(format_fraction(0.02), "0.02");
}

TEST(Subset, SizesAndSplits) {
  const Corpus& c = corpus50();
  EXPECT_EQ(sample_subset(c, 1.0, 1).dialogs, c.dialogs);
  EXPECT_EQ(sample_subset(c, 0.1, 1).dialogs.size(), 5u);
  EXPECT_EQ(sample_subset(c, 0.25, 1).dialogs.size(), 13u);  // round(12.5) = 13
  EXPECT_EQ(sample_subset(c, 0.5, 1, 7).dialogs.size(), 7u);

  const Corpus f = load_canonical(oracle::data_path("fixtures/fewshot.json"));
  const Corpus s = sample_subset(f, 0.2, 3);
  EXPECT_EQ(s.count(Split::kTrain), 13u);
  EXPECT_EQ(s.count(Split::kValidation), f.count(Split::kValidation));
  EXPECT_EQ(s.count(Split::kTest), f.count(Split::kTest));
}

TEST(Subset, SeededAndOrderPreserving) {
  const Corpus& c = corpus50();
  const Corpus a = sample_subset(c, 0.2, 5);
  EXPECT_EQ(a.dialogs, sample_subset(c, 0.2, 5).dialogs);
  EXPECT_NE(a.dialogs, sample_subset(c, 0.2, 6).dialogs);
  std::vector<std::string> ids;
  for (const auto& d : a.dialogs) ids.push_back(d.id);
  EXPECT_TRUE(std::is_sorted(ids.begin(), ids.end()));
  std::set<std::string> unique(ids.begin(), ids.end());
  EXPECT_EQ(unique.size(), ids.size());
}

TEST(FewShot, KeepsExactlyKeepTargetDialogs) {
  const Corpus f = load_canonical(oracle::data_path("fixtures/fewshot.json"));
  for (std::size_t keep : {0u, 20u}) {
    const FewShotResult r = few_shot_split(f, "hotel", keep, 9);
    EXPECT_TRUE(r.warnings.empty());
    std::size_t target_train = 0, other_train = 0;
    for (const auto& d : r.corpus.dialogs) {
      if (d.split == Split::kTrain) {
        (has_domain(d, "hotel") ? target_train : other_train) += 1;
      } else {
        EXPECT_TRUE(has_domain(d, "hotel")) << d.id;
      }
    }
    EXPECT_EQ(target_train, keep);
    EXPECT_EQ(other_train, 25u);
    EXPECT_EQ(r.corpus.count(Split::kValidation), 8u);
    EXPECT_EQ(r.corpus.count(Split::kTest), 8u);
  }
}

TEST(FewShot, TooFewTargetDialogsWarns) {
  Corpus f = load_canonical(oracle::data_path("fixtures/fewshot.json"));
  std::size_t hotel = 0;
  std::erase_if(f.dialogs, [&](const Dialog& d) {
    return d.split == Split::kTrain && has_domain(d, "hotel") && ++hotel > 5;
  });
  const FewShotResult r = few_shot_split(f, "hotel", 20, 1);
  ASSERT_EQ(r.warnings.size(), 1u);
  std::size_t kept = 0;
  for (const auto& d : r.corpus.dialogs) kept += d.split == Split::kTrain && has_domain(d, "hotel");
  EXPECT_EQ(kept, 5u);
  EXPECT_ANY_THROW(few_shot_split(f, "spaceship", 1, 1));
}

TEST(Expand, CountsIdsAndVerbatimOriginals) {
  const Corpus& c = corpus50();
  AugmentResources res;
  res.predictor = std::make_shared<GoldPredictor>();
  const EmbeddingTable table = EmbeddingTable::load(oracle::data_path("fixtures/embeddings.txt"));
  res.embeddings = &table;
  for (Expansion e : {Expansion::kX2, Expansion::kX3, Expansion::kX5}) {
    AugmentConfig config;
    config.expansion = e;
    config.k = 5;
    config.seed = 2;
    ExpandStats stats;
    const Corpus out = expand(c, config, res, &stats);
    const std::size_t copies = synthetic_per_original(e);
    ASSERT_EQ(out.dialogs.size(), c.dialogs.size() * (copies + 1));
    EXPECT_EQ(stats.originals, c.dialogs.size());
    EXPECT_EQ(stats.synthetic, c.dialogs.size() * copies);
    for (std::size_t i = 0; i < c.dialogs.size(); ++i) EXPECT_EQ(out.dialogs[i], c.dialogs[i]);
    std::size_t at = c.dialogs.size();
    for (const auto& d : c.dialogs) {
      for (std::size_t copy = 1; copy <= copies; ++copy) {
        EXPECT_EQ(out.dialogs[at++].id, d.id + "#aug" + std::to_string(copy));
      }
    }
  }
}

TEST(Expand, AllRejectingFilterCopiesOriginals) {
  const Corpus& c = corpus50();
  const EmbeddingTable table = EmbeddingTable::load(oracle::data_path("fixtures/embeddings.txt"));
  AugmentResources res;
  res.embeddings = &table;
  res.predictor = std::make_shared<ContradictingPredictor>();
  AugmentConfig config;
  config.k = 5;
  const Corpus out = expand(c, config, res);
  ASSERT_EQ(out.dialogs.size(), 100u);
  for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ(out.dialogs[50 + i].turns, c.dialogs[i].turns);
}

TEST(Expand, WorkerCountDoesNotChangeOutput) {
  const Corpus& c = corpus50();
  AugmentResources res;
  AugmentConfig config;
  config.method = Method::kDialogTree;
  config.expansion = Expansion::kX3;
  config.sample_size = 10;
  config.seed = 4;
  const std::string one = to_canonical_json(expand(c, config, res));
  config.workers = 4;
  EXPECT_EQ(to_canonical_json(expand(c, config, res)), one);
}

TEST(Expand, MissingResourcesFailFast) {
  AugmentConfig config;
  config.method = Method::kW2v;
  EXPECT_ANY_THROW(expand(corpus50(), config, AugmentResources{}));
  config.method = Method::kBackTranslate;
  EXPECT_ANY_THROW(expand(corpus50(), config, AugmentResources{}));
}

TEST(Matrix, CsvRoundTripAndReport) {
  MatrixReport r;
  for (std::uint64_t seed : {1u, 2u}) {
    CellResult c;
    c.method = Method::kRotate;
    c.fraction = 0.1;
    c.expansion = Expansion::kX2;
    c.seed = seed;
    c.ok = true;
    c.artifact = "cells/a_s" + std::to_string(seed) + "/corpus.json";
    c.metrics = CellMetrics{80.0 + seed, 60.0, 15.0 + seed, 85.0 + 2 * seed};
    r.cells.push_back(c);
  }
  CellResult failed = r.cells[0];
  failed.expansion = Expansion::kX5;
  failed.ok = false;
  failed.metrics.reset();
  r.cells.push_back(failed);

  const std::string csv = matrix_csv(r);
  const MatrixReport back = parse_matrix_csv(csv);
  ASSERT_EQ(back.cells.size(), 3u);
  EXPECT_EQ(back.failures(), 1u);
  EXPECT_EQ(matrix_csv(back), csv);
  EXPECT_NE(csv.find("rotate,0.1,x2,2,81.50,60.00,16.50,88.00,0"), std::string::npos) << csv;
  EXPECT_NE(csv.find("# best_expansion\nmethod,fraction,expansion,score\nrotate,0.1,x2,88.00"),
            std::string::npos);
  const std::string table = render_report(back);
  EXPECT_NE(table.find("rotate 0.1: 88.00 (x2)"), std::string::npos) << table;
  EXPECT_NE(table.find("(no metrics)"), std::string::npos);
}

TEST(Matrix, HookProducesMetrics) {
  const fs::path dir = scratch("hook");
  // Predicts the gold responses and offers the goal's constraints.
  write_file(dir / "predict.py",
             "import json, sys\n"
             "c = json.load(open(sys.argv[1]))\n"
             "out = {}\n"
             "for d in c['dialogs']:\n"
             "    if '#aug' in d['id']:\n"
             "        continue\n"
             "    g = c['goals'].get(d['id'], {})\n"
             "    out[d['id']] = {'responses': [t['response_delex'] for t in d['turns']],\n"
             "                    'offered': {k: v['informable'] for k, v in g.items()}}\n"
             "json.dump(out, open(sys.argv[2], 'w'))\n");
  MatrixConfig config;
  config.fractions = {0.2};
  config.expansions = {Expansion::kX2};
  config.methods = {Method::kActResp};
  config.seeds = {1, 2};
  config.out_dir = dir / "out";
  config.hook = "python3 " + (dir / "predict.py").string() + " {corpus} {pred}";
  const MatrixReport r = run_matrix(corpus50(), config, {});
  ASSERT_EQ(r.cells.size(), 2u);
  for (const auto& c : r.cells) {
    ASSERT_TRUE(c.ok) << c.error;
    ASSERT_TRUE(c.metrics);
    EXPECT_DOUBLE_EQ(c.metrics->inform, 100.0);
    EXPECT_DOUBLE_EQ(c.metrics->bleu, 100.0);
    EXPECT_EQ(c.dialogs, 20u);
    EXPECT_TRUE(fs::exists(config.out_dir / c.artifact));
  }
  EXPECT_TRUE(fs::exists(config.out_dir / "results.csv"));
  EXPECT_FALSE(fs::exists(config.out_dir / "failures.txt"));
}

TEST(Matrix, FailingCellsAreRecorded) {
  const fs::path dir = scratch("fail");
  MatrixConfig config;
  config.fractions = {0.2};
  config.expansions = {Expansion::kX2};
  config.methods = {Method::kW2v, Method::kActResp};  // w2v has no embeddings
  config.seeds = {1};
  config.out_dir = dir;
  const MatrixReport r = run_matrix(corpus50(), config, {});
  EXPECT_EQ(r.failures(), 1u);
  EXPECT_FALSE(r.cells[0].ok);
  EXPECT_TRUE(r.cells[1].ok);
  EXPECT_NE(read_file(dir / "failures.txt").find("w2v"), std::string::npos);
}

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

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria. Tolerances and time limits are fixed below.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <unistd.h>

#include "oracles.hpp"
#include "toddag/aug_dialog.hpp"
#include "toddag/aug_word.hpp"
#include "toddag/delex.hpp"
#include "toddag/experiment.hpp"
#include "toddag/mock_backend.hpp"
#include "toddag/text.hpp"

namespace {

using namespace toddag;
namespace fs = std::filesystem;

constexpr std::int64_t kScoreToleranceUnits = 5'000'000;  // 0.05 in Decimal units
constexpr double kScoreSeconds = 1.0;
constexpr double kExpansionSeconds = 30.0;
constexpr double kDelexSeconds = 10.0;
constexpr double kTreeSeconds = 30.0;
constexpr double kMadaSeconds = 10.0;
constexpr std::size_t kDelexCases = 10'000;
constexpr std::size_t kWalks = 1'000;
constexpr std::size_t kMadaDraws = 10'000;
constexpr std::size_t kRotationParses = 10'000;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

Corpus fixture(const std::string& name) { return load_canonical(oracle::data_path("fixtures/" + name)); }

// --- score -----------------------------------------------------------------

Outcome score_formula() {
  Outcome o;
  std::ifstream in(oracle::data_path("data/score_rows.csv"));
  std::string line;
  std::getline(in, line);
  std::size_t rows = 0;
  Decimal worst;
  while (std::getline(in, line)) {
    std::stringstream fields(line);
    std::string f[4];
    for (auto& x : f) std::getline(fields, x, ',');
    const Decimal computed =
        combined_score(Decimal::parse(f[0]), Decimal::parse(f[1]), Decimal::parse(f[2]));
    const Decimal diff = (computed - Decimal::parse(f[3])).abs();
    worst = std::max(worst, diff);
    o.require(diff.units() <= kScoreToleranceUnits,
              "row " + line + " computes " + computed.to_string(3));
    ++rows;
  }
  o.require(rows >= 90, "only " + std::to_string(rows) + " rows read");
  const Decimal a = combined_score(Decimal::parse("95.40"), Decimal::parse("80.70"),
                                   Decimal::parse("17.00"));
  o.require(a.to_string(2) == "105.05", "(95.40, 80.70, 17.00) gave " + a.to_string(2));
  const Decimal b = combined_score(Decimal::parse("76.37"), Decimal::parse("53.73"),
                                   Decimal::parse("10.83"));
  o.require(b == Decimal::parse("75.88"), "(76.37, 53.73, 10.83) gave " + b.to_string(3));
  if (o.pass) o.detail = std::to_string(rows) + " rows, max |diff| " + worst.to_string(3);
  return o;
}

// --- shared mocks ------------------------------------------------------------

struct Mocks {
  std::shared_ptr<MockBackend> transport = std::make_shared<MockBackend>();
  std::shared_ptr<BackendClient> client;
  EmbeddingTable embeddings = EmbeddingTable::load(oracle::data_path("fixtures/embeddings.txt"));
  ParseStore parses{oracle::data_path("fixtures/parses")};
  AugmentResources resources;

  Mocks() {
    // Fill-mask: nearest embedding words, scores halving from 0.8.
    transport->set_handler("/v1/fill_mask", [this](const nlohmann::json& body) {
      const auto tokens = tokenize(body.at("text").get<std::string>());
      nlohmann::json out = nlohmann::json::array();
      for (const auto& t : tokens) {
        if (t == "<mask>" || !embeddings.contains(t)) continue;
        double score = 0.8;
        const auto neighbors = embeddings.top_k_neighbors(t, body.at("top_k").get<std::size_t>());
        for (const auto& n : *neighbors) {
          out.push_back({{"token", n.word}, {"score", score}});
          score /= 2;
        }
        break;
      }
      return nlohmann::json{{"candidates", out}};
    });
    // Translate: reverses word order, so markers move but survive.
    transport->set_handler("/v1/translate", [](const nlohmann::json& body) {
      auto tokens = tokenize(body.at("text").get<std::string>());
      std::reverse(tokens.begin(), tokens.end());
      return nlohmann::json{{"text", join_tokens(tokens)}};
    });
    BackendEndpoint e;
    e.base_url = "mock://";
    e.backoff_ms = 0;
    client = std::make_shared<BackendClient>(e, transport);
    resources.embeddings = &embeddings;
    resources.parses = &parses;
    resources.backend = client;
    resources.predictor =
        std::make_shared<RuleTablePredictor>(RuleTablePredictor::load(oracle::data_path("fixtures/rules.json")));
  }
};

// --- expansion ---------------------------------------------------------------

Outcome expansion_accounting() {
  Outcome o;
  const Corpus corpus = fixture("corpus50.json");
  o.require(corpus.dialogs.size() == 50, "fixture does not hold 50 dialogs");
  Mocks mocks;
  std::size_t runs = 0;
  for (Method m : all_methods()) {
    for (Expansion e : {Expansion::kX2, Expansion::kX3, Expansion::kX5}) {
      AugmentConfig config;
      config.method = m;
      config.expansion = e;
      config.seed = 11;
      const Corpus out = expand(corpus, config, mocks.resources);
      const std::size_t want = 50 * static_cast<std::size_t>(e);
      const std::string cell = std::string(method_name(m)) + " " + std::string(expansion_name(e));
      o.require(out.dialogs.size() == want,
                cell + ": " + std::to_string(out.dialogs.size()) + " dialogs");
      Corpus head = out;
      head.dialogs.resize(std::min<std::size_t>(50, head.dialogs.size()));
      o.require(to_canonical_json(head) == to_canonical_json(corpus),
                cell + ": originals are not byte-identical");
      ++runs;
    }
  }
  if (o.pass) o.detail = std::to_string(runs) + " method/expansion runs exact";
  return o;
}

// --- delexicalizer -------------------------------------------------------------

std::vector<std::string> words_of(const std::string& text) { return oracle::words(text); }

std::vector<std::string> sorted_placeholders(const std::string& text) {
  auto out = placeholders_in(text);
  std::sort(out.begin(), out.end());
  return out;
}

Outcome delex_round_trips(std::uint64_t seed) {
  Outcome o;
  Rng rng(seed);
  const std::vector<std::string> words = {"i", "want", "a", "hotel", "in", "the", "please",
                                          "book", "for", "people", "at", "?", ".", ","};
  const std::vector<std::string> slots = {"area", "name", "pricerange", "food", "time"};
  const std::vector<std::string> values = {"north", "the acorn guest house", "cheap", "Golden Wok",
                                           "12:30", "a", "north east", "x"};
  std::size_t dropped_rejected = 0, duplicated_rejected = 0;
  for (std::size_t c = 0; c < kDelexCases && o.pass; ++c) {
    // Random layout of words and values.
    std::string lexical, delex;
    DelexMap map;
    const std::size_t n = 1 + rng.uniform(12);
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) {
        lexical += ' ';
        delex += ' ';
      }
      if (rng.uniform(3) == 0) {
        const std::string placeholder = placeholder_for(slots[rng.uniform(slots.size())]);
        const std::string& value = values[rng.uniform(values.size())];
        map.push_back({placeholder, value, lexical.size(), lexical.size() + value.size()});
        lexical += value;
        delex += placeholder;
      } else {
        const std::string& w = words[rng.uniform(words.size())];
        lexical += w;
        delex += w;
      }
    }
    const std::string tag = "case " + std::to_string(c) + " '" + lexical + "'";
    o.require(delexicalize(lexical, map) == delex, tag + ": delexicalize");
    o.require(relexicalize(delex, map) == lexical, tag + ": relexicalize");
    const Realized r = relexicalize_with_spans(delex, map);
    o.require(r.text == lexical && r.map == map, tag + ": relexicalize_with_spans");

    const ProtectedText p = protect(delex);
    const auto restored = restore(p);
    o.require(restored && *restored == delex, tag + ": protect/restore");

    // A translator that shuffles words but keeps every marker once.
    auto tokens = words_of(p.text);
    rng.shuffle(tokens);
    const auto shuffled = restore(join_tokens(tokens), p.markers);
    o.require(shuffled.has_value(), tag + ": restore after shuffle");
    if (shuffled) {
      o.require(sorted_placeholders(*shuffled) == sorted_placeholders(delex),
                tag + ": placeholders after shuffle");
    }
    if (p.markers.empty()) continue;
    const std::string marker = marker_token(p.markers.begin()->first);
    auto drop = words_of(p.text);
    drop.erase(std::find(drop.begin(), drop.end(), marker));
    const bool dropped = !restore(join_tokens(drop), p.markers).has_value();
    o.require(dropped, tag + ": dropped marker accepted");
    dropped_rejected += dropped;
    auto dup = words_of(p.text);
    dup.push_back(marker);
    const bool duplicated = !restore(join_tokens(dup), p.markers).has_value();
    o.require(duplicated, tag + ": duplicated marker accepted");
    duplicated_rejected += duplicated;
  }
  if (o.pass) {
    o.detail = std::to_string(kDelexCases) + " round trips, " + std::to_string(dropped_rejected) +
               " drops and " + std::to_string(duplicated_rejected) + " duplicates rejected";
  }
  return o;
}

// --- dialog tree -----------------------------------------------------------------

Outcome dialog_tree_oracle() {
  Outcome o;
  std::size_t corpora = 0, paths = 0, walks = 0;
  for (const char* name : {"toy_tree_a.json", "toy_tree_b.json", "toy_tree_c.json",
                           "toy_tree_d.json", "toy_tree_e.json"}) {
    const Corpus toy = fixture(name);
    std::size_t longest = 0;
    for (const auto& d : toy.dialogs) longest = std::max(longest, d.turns.size());
    o.require(toy.dialogs.size() <= 5 && longest <= 4, std::string(name) + " exceeds toy size");
    const auto expected = oracle::enumerate_dialogs(toy.dialogs, longest);

    const TemplateTree tree(extract_templates(toy.dialogs));
    std::set<oracle::DialogSignature> enumerated;
    for (const auto& path : tree.enumerate_paths(longest)) {
      oracle::DialogSignature sig;
      for (std::size_t node : path) sig.push_back(oracle::signature(tree.templates()[node].turn));
      enumerated.insert(sig);
    }
    o.require(enumerated == expected, std::string(name) + ": enumerated " +
                                          std::to_string(enumerated.size()) + " dialogs, oracle " +
                                          std::to_string(expected.size()));
    Rng rng(derive_seed(5, name, 0));
    std::set<oracle::DialogSignature> seen;
    for (std::size_t w = 0; w < kWalks; ++w) {
      const Dialog d = synthesize_dialog(toy.dialogs, {}, rng);
      const auto sig = oracle::signature(d);
      o.require(expected.contains(sig), std::string(name) + ": walk outside the enumerated set");
      seen.insert(sig);
      ++walks;
    }
    o.require(seen == expected, std::string(name) + ": walks reached " +
                                    std::to_string(seen.size()) + " of " +
                                    std::to_string(expected.size()) + " dialogs");
    ++corpora;
    paths += expected.size();
  }
  if (o.pass) {
    o.detail = std::to_string(corpora) + " toy corpora, " + std::to_string(paths) +
               " dialogs match the oracle, " + std::to_string(walks) + " walks inside";
  }
  return o;
}

// --- MADA --------------------------------------------------------------------

Outcome mada_state_safety() {
  Outcome o;
  const Corpus corpus = fixture("fewshot.json");
  const StateIndex index(corpus.dialogs);
  // Every (state, acts, response) triple of the corpus, built without the index.
  std::set<std::tuple<DialogState, std::vector<SystemAct>, std::string, std::string>> allowed;
  for (const auto& d : corpus.dialogs) {
    for (const auto& t : d.turns) {
      allowed.insert({oracle::placeholder_state(t.state), t.acts, t.response_delex, t.response});
    }
  }
  Rng rng(99);
  std::size_t draws = 0, changed = 0;
  while (draws < kMadaDraws && o.pass) {
    const Dialog& d = corpus.dialogs[rng.uniform(corpus.dialogs.size())];
    const Dialog out = act_response_substitute(d, index, rng);
    for (std::size_t i = 0; i < d.turns.size(); ++i) {
      const Turn& t = out.turns[i];
      o.require(t.state == d.turns[i].state && t.user == d.turns[i].user,
                d.id + ": user side changed");
      o.require(allowed.contains({oracle::placeholder_state(d.turns[i].state), t.acts,
                                  t.response_delex, t.response}),
                d.id + " turn " + std::to_string(i) + ": pair from a different state");
      o.require(relexicalize(t.response_delex, t.delex_map.response) == t.response,
                d.id + ": response map broken");
      changed += t.response != d.turns[i].response;
      ++draws;
    }
  }
  if (o.pass) {
    o.detail = std::to_string(draws) + " draws, " + std::to_string(changed) +
               " replaced a response, none across states";
  }
  return o;
}

// --- filter ----------------------------------------------------------------------

Outcome filter_semantics() {
  Outcome o;
  const Corpus corpus = fixture("corpus50.json");
  const ConsistencyFilter gold(std::make_shared<GoldPredictor>());
  const ConsistencyFilter empty(std::make_shared<EmptyPredictor>());
  std::size_t gold_checked = 0, gold_accepted = 0, empty_checked = 0, empty_accepted = 0;
  Rng rng(3);
  for (const auto& d : corpus.dialogs) {
    for (std::size_t i = 0; i < d.turns.size(); ++i) {
      auto tokens = tokenize(d.turns[i].user_delex);
      rng.shuffle(tokens);
      for (const std::string& candidate : {d.turns[i].user_delex, join_tokens(tokens)}) {
        ++gold_checked;
        gold_accepted += gold.check(d, i, candidate).accepted;
        if (!d.turns[i].state.empty()) {
          ++empty_checked;
          empty_accepted += empty.check(d, i, candidate).accepted;
        }
      }
    }
  }
  o.require(gold_accepted == gold_checked, "gold predictor rejected a candidate");
  o.require(empty_checked > 0 && empty_accepted == 0, "empty predictor accepted a candidate");

  // Rule-table predictor: every accepted substitution re-verifies.
  auto rules = std::make_shared<RuleTablePredictor>(
      RuleTablePredictor::load(oracle::data_path("fixtures/rules.json")));
  const ConsistencyFilter filter(rules);
  const EmbeddingTable table = EmbeddingTable::load(oracle::data_path("fixtures/embeddings.txt"));
  const StopwordList stopwords = StopwordList::english();
  std::size_t substitutions = 0, rechecked = 0;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    for (const auto& d : corpus.dialogs) {
      SubstitutionPolicy policy;
      policy.rng_seed = derive_seed(seed, d.id, 0);
      policy.substitute_responses = seed % 2 == 0;
      EmbeddingCandidates source(table);
      const auto result = substitute_words(d, source, stopwords, policy, filter);
      substitutions += result.substitutions.size();
      std::set<std::size_t> touched;
      for (const auto& s : result.substitutions) touched.insert(s.response ? s.turn + 1 : s.turn);
      for (std::size_t i : touched) {
        ++rechecked;
        o.require(filter.check(result.dialog, i, result.dialog.turns[i].user_delex).accepted,
                  d.id + " turn " + std::to_string(i) + ": accepted substitution fails post hoc");
      }
    }
  }
  o.require(substitutions > 0, "no substitution was accepted");
  if (o.pass) {
    o.detail = "gold " + std::to_string(gold_accepted) + "/" + std::to_string(gold_checked) +
               ", empty " + std::to_string(empty_accepted) + "/" + std::to_string(empty_checked) +
               ", rules: " + std::to_string(substitutions) + " substitutions, " +
               std::to_string(rechecked) + " turns re-verified";
  }
  return o;
}

// --- rotation --------------------------------------------------------------------

// Random tree over n tokens: every non-root token hangs off an earlier-drawn
// token, so the result is acyclic with a single root.
DependencyParse random_parse(Rng& rng, std::size_t n, const std::vector<std::string>& forms) {
  static const std::vector<std::string> rels = {"nsubj", "obj", "obl", "advmod", "iobj", "csubj",
                                                "det",   "amod", "case", "punct", "obl:tmod"};
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);
  DependencyParse p;
  p.tokens.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    DepToken& t = p.tokens[order[k]];
    t.form = forms[rng.uniform(forms.size())];
    if (k == 0) {
      t.head = 0;
      t.deprel = "root";
    } else {
      t.head = order[rng.uniform(k)] + 1;
      t.deprel = rels[rng.uniform(rels.size())];
    }
  }
  return p;
}

Turn turn_for(const std::vector<std::string>& tokens) {
  Turn t;
  t.user_delex = join_tokens(tokens);
  DelexMap entries;
  for (const auto& p : placeholders_in(t.user_delex)) {
    entries.push_back({p, "v" + std::to_string(entries.size()), 0, 0});
  }
  Realized r = relexicalize_ordered(t.user_delex, entries);
  t.user = r.text;
  t.delex_map.user = r.map;
  return t;
}

Outcome fragment_rotation() {
  Outcome o;
  const RotationConfig config;
  Rng rng(17);
  const std::vector<std::string> forms = {"i", "want", "a", "hotel", "[value_area]",
                                          "[value_name]", "book", "it", "now", "."};
  std::size_t rotated = 0, rejected = 0;
  for (std::size_t c = 0; c < kRotationParses && o.pass; ++c) {
    const std::vector<DependencyParse> parse = {random_parse(rng, 1 + rng.uniform(9), forms)};
    const Turn t = turn_for(parse[0].forms());
    const TurnResult r = fragment_rotate(t, &parse, config, rng);
    auto before = tokenize(t.user_delex);
    auto after = tokenize(r.turn.user_delex);
    std::sort(before.begin(), before.end());
    std::sort(after.begin(), after.end());
    o.require(before == after, "token multiset changed for '" + t.user_delex + "'");
    o.require(relexicalize(r.turn.user_delex, r.turn.delex_map.user) == r.turn.user,
              "delex map broken for '" + r.turn.user_delex + "'");
    const std::size_t fragments = rotatable_fragments(parse[0], config).size();
    if (fragments < 2) {
      o.require(!r.accepted, "accepted with " + std::to_string(fragments) + " fragment(s): '" +
                                 t.user_delex + "'");
    }
    rotated += r.accepted;
    rejected += !r.accepted;
  }

  // Three-fragment fixture: [yesterday] [i] booked [a X] .
  const auto parses = parse_conllu(read_file(oracle::data_path("fixtures/rotation3.conllu")),
                                   "rotation3.conllu");
  const auto& sentence = parses.at({0, "user"});
  const std::set<std::string> expected = {
      "yesterday a [value_type] booked i .", "i yesterday booked a [value_type] .",
      "i a [value_type] booked yesterday .", "a [value_type] yesterday booked i .",
      "a [value_type] i booked yesterday ."};
  const Turn t3 = turn_for(sentence[0].forms());
  std::set<std::string> seen;
  for (int i = 0; i < 500; ++i) {
    const TurnResult r = fragment_rotate(t3, &sentence, config, rng);
    o.require(r.accepted, "three-fragment fixture rejected");
    seen.insert(r.turn.user_delex);
  }
  o.require(seen == expected, "three-fragment outputs differ from the hand-enumerated set");
  if (o.pass) {
    o.detail = std::to_string(kRotationParses) + " random parses (" + std::to_string(rotated) +
               " rotated, " + std::to_string(rejected) + " rejected), fixture hit all " +
               std::to_string(expected.size()) + " orderings";
  }
  return o;
}

// --- BLEU ------------------------------------------------------------------------

Outcome bleu_oracle() {
  Outcome o;
  const std::vector<std::pair<std::string, std::string>> pairs = {
      {"the the the", "the cat sat"},                       // unigram clipping
      {"the the the the the the the", "the cat is on the mat"},
      {"the cat sat on the mat", "the cat sat on the mat"},  // identity
      {"the cat", "the cat sat on the mat"},                // brevity penalty
      {"a", "a b c d e f g h"},                             // short hypothesis
      {"x y z", "a b c"},                                   // no overlap
      {"cat the", "the cat"},                               // unigrams only
      {"i want a cheap hotel .", "i want a cheap hotel in the north ."},
      {"book it for [value_people] people .", "please book it for [value_people] people ."},
      {"[value_name] is a nice hotel .", "[value_name] is a [value_pricerange] hotel ."},
      {"the address is [value_address] .", "the address is [value_address] ."},
      {"you are welcome . goodbye .", "goodbye ."},         // longer than reference
      {"a a a b b b", "a b a b"},                           // clipping on two types
      {"one two three four five", "five four three two one"},
      {"hello", "hello"},                                   // single token identity
      {"hello world", "world hello"},
      {"a b c d", "a b c d e"},                             // just under reference length
      {"a b c d e f", "a b c d e"},                         // just over reference length
      {"the hotel is in the north", "the hotel is in the south"},
      {"north north north north", "north"},
      {"is there a train to cambridge ?", "there is a train to cambridge ."},
      {"a b a b a b", "a b a b a b"},
      {"the reference number is [value_reference] .", "your reference number is [value_reference] ."},
      {"shall i book it ?", "would you like me to book it ?"},
      {"q", "r s t"},                                       // single token, no match
  };
  std::vector<std::string> hyps, refs;
  for (const auto& [h, r] : pairs) {
    const double got = bleu(std::vector<std::string>{h}, std::vector<std::string>{r});
    const double want = oracle::bleu({h}, {r});
    o.require(got == want, "'" + h + "' vs '" + r + "': " + std::to_string(got) + " vs oracle " +
                               std::to_string(want));
    o.require(bleu(std::vector<std::string>{r}, std::vector<std::string>{r}) == 100.0,
              "bleu(x, x) != 100 for '" + r + "'");
    hyps.push_back(h);
    refs.push_back(r);
  }
  o.require(bleu(hyps, refs) == oracle::bleu(hyps, refs), "corpus-level value differs");
  o.require(bleu(refs, refs) == 100.0, "corpus bleu(x, x) != 100");
  if (o.pass) {
    char buffer[128];
    std::snprintf(buffer, sizeof buffer, "%zu pairs bit-exact, corpus BLEU %.4f", pairs.size(),
                  bleu(hyps, refs));
    o.detail = buffer;
  }
  return o;
}

// --- determinism -------------------------------------------------------------------

std::map<std::string, std::string> archive(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) {
      files[fs::relative(entry.path(), dir).generic_string()] = read_file(entry.path());
    }
  }
  return files;
}

Outcome matrix_determinism() {
  Outcome o;
  const Corpus corpus = fixture("corpus50.json");
  const fs::path root = fs::temp_directory_path() / ("toddag-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(root);
  std::vector<std::map<std::string, std::string>> archives;
  std::size_t cells = 0;
  for (const auto& [run, workers] : std::vector<std::pair<std::string, std::size_t>>{
           {"run1-w1", 1}, {"run2-w1", 1}, {"run3-w8", 8}}) {
    Mocks mocks;
    MatrixConfig config;
    config.fractions = {0.2, 0.5};
    config.expansions = {Expansion::kX2, Expansion::kX5};
    config.methods = all_methods();
    config.seeds = {1, 2, 3};
    config.out_dir = root / run;
    config.workers = workers;
    const MatrixReport report = run_matrix(corpus, config, mocks.resources);
    o.require(report.failures() == 0, run + ": " + std::to_string(report.failures()) + " failed cells");
    cells = report.cells.size();
    archives.push_back(archive(config.out_dir));
  }
  o.require(archives[0] == archives[1], "two runs with one worker differ");
  o.require(archives[0] == archives[2], "one worker and eight workers differ");
  fs::remove_all(root);
  if (o.pass) {
    o.detail = std::to_string(cells) + " cells, " + std::to_string(archives[0].size()) +
               " files byte-identical across 2 runs and workers 1 vs 8";
  }
  return o;
}

// --- few-shot ----------------------------------------------------------------------

Outcome few_shot() {
  Outcome o;
  const Corpus corpus = fixture("fewshot.json");
  auto has_hotel = [](const Dialog& d) {
    return std::find(d.domains.begin(), d.domains.end(), "hotel") != d.domains.end();
  };
  std::size_t hotel_train = 0;
  for (const auto& d : corpus.dialogs) hotel_train += d.split == Split::kTrain && has_hotel(d);
  o.require(hotel_train == 40, "fixture has " + std::to_string(hotel_train) + " hotel dialogs");
  for (std::size_t keep : {std::size_t{20}, std::size_t{0}}) {
    const FewShotResult r = few_shot_split(corpus, "hotel", keep, 1);
    std::size_t kept = 0, eval = 0;
    for (const auto& d : r.corpus.dialogs) {
      if (d.split == Split::kTrain) {
        kept += has_hotel(d);
      } else {
        ++eval;
        o.require(has_hotel(d), "evaluation keeps non-hotel dialog " + d.id);
      }
    }
    o.require(kept == keep, "keep=" + std::to_string(keep) + " left " + std::to_string(kept));
    o.require(eval > 0, "evaluation split is empty");
    o.require(r.warnings.empty(), "unexpected warning");
  }
  if (o.pass) o.detail = "keep=20 -> 20, keep=0 -> 0, evaluation hotel-only";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double seconds;  // 0: no time limit
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"score-formula", kScoreSeconds, score_formula},
      {"expansion-accounting", kExpansionSeconds, expansion_accounting},
      {"delexicalizer-round-trip", kDelexSeconds, [] { return delex_round_trips(2024); }},
      {"dialog-tree-oracle", kTreeSeconds, dialog_tree_oracle},
      {"mada-state-safety", kMadaSeconds, mada_state_safety},
      {"consistency-filter", 0, filter_semantics},
      {"fragment-rotation", 0, fragment_rotation},
      {"bleu-oracle", 0, bleu_oracle},
      {"matrix-determinism", 0, matrix_determinism},
      {"few-shot-split", 0, few_shot},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.pass && c.seconds > 0 && seconds >= c.seconds) {
      o.pass = false;
      o.detail += " (over the " + std::to_string(c.seconds) + " s limit)";
    }
    std::printf("%s %-26s %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(),
                seconds);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed;
}

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

// Command-line front end: toddag <verb> [options]. See README.md.

#include <csignal>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "toddag/conformance.hpp"
#include "toddag/experiment.hpp"
#include "toddag/ingest.hpp"
#include "toddag/mock_backend.hpp"

namespace {

using nlohmann::json;
using namespace toddag;

// Reads the --config file: a JSON object whose nested objects name
// subcommands, e.g. {"augment": {"k": 10, "pivot": "fr"}}.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override {
    return "{}";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json root;
    try {
      input >> root;
    } catch (const json::exception& e) {
      throw CLI::ConversionError(std::string("config file: ") + e.what());
    }
    if (!root.is_object()) throw CLI::ConversionError("config file: top level must be an object");
    std::vector<CLI::ConfigItem> items;
    collect(root, {}, items);
    return items;
  }

 private:
  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void collect(const json& node, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : node.items()) {
      if (value.is_object()) {
        auto next = parents;
        next.push_back(key);
        collect(value, next, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Options shared by `augment` and `matrix`.
struct AugmentOptions {
  std::string method = "w2v";
  std::string expansion = "x2";
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::size_t k = 10;
  double max_positions_fraction = 1.0;
  bool substitute_responses = false;
  std::string context_form = "lexical";
  std::size_t sample_size = 50;
  std::string pivot = "fr";
  std::string rotatable;
  std::string embeddings, stopwords, parses;
  std::string backend, bearer_token;
  int timeout_ms = 30000, retries = 2, max_in_flight = 4, backoff_ms = 200;
  std::string predictor, rules, predictor_url;

  void add_resource_flags(CLI::App* app) {
    app->add_option("--k", k, "Candidate pool size for word substitution");
    app->add_option("--max-positions-fraction", max_positions_fraction,
                    "Share of eligible word positions attempted");
    app->add_flag("--substitute-responses", substitute_responses,
                  "Also substitute system responses (gated on the next turn)");
    app->add_option("--context-form", context_form, "Filter context: lexical or delex");
    app->add_option("--sample-size", sample_size, "Dialogs sampled per dialog-tree synthesis");
    app->add_option("--pivot", pivot, "Back-translation pivot language");
    app->add_option("--rotatable", rotatable, "Comma-separated rotatable relations");
    app->add_option("--embeddings", embeddings, "word2vec text embedding file");
    app->add_option("--stopwords", stopwords, "Stopword list (one per line)");
    app->add_option("--parses", parses, "Directory of <dialog_id>.conllu parses");
    app->add_option("--backend", backend, "Model backend base URL");
    app->add_option("--bearer-token", bearer_token, "Bearer token sent to the backend");
    app->add_option("--timeout-ms", timeout_ms, "Backend request timeout");
    app->add_option("--retries", retries, "Backend retry budget");
    app->add_option("--max-in-flight", max_in_flight, "Concurrent backend requests");
    app->add_option("--backoff-ms", backoff_ms, "Initial retry backoff");
    app->add_option("--predictor", predictor, "Filter predictor: rules, http, gold or empty");
    app->add_option("--rules", rules, "Rule-table predictor JSON");
    app->add_option("--predictor-url", predictor_url, "Predictor backend base URL");
    app->add_option("--workers", workers, "Worker threads");
  }

  struct Loaded {
    std::unique_ptr<EmbeddingTable> embeddings;
    std::unique_ptr<StopwordList> stopwords;
    std::unique_ptr<ParseStore> parses;
    AugmentResources resources;
  };

  BackendEndpoint endpoint(const std::string& url) const {
    BackendEndpoint e;
    e.base_url = url;
    e.timeout_ms = timeout_ms;
    e.retry_budget = retries;
    e.max_in_flight = max_in_flight;
    e.backoff_ms = backoff_ms;
    e.bearer_token = bearer_token;
    return e;
  }

  std::unique_ptr<Loaded> load() const {
    auto out = std::make_unique<Loaded>();
    if (!embeddings.empty()) {
      out->embeddings = std::make_unique<EmbeddingTable>(EmbeddingTable::load(embeddings));
      out->resources.embeddings = out->embeddings.get();
    }
    if (!stopwords.empty()) {
      out->stopwords = std::make_unique<StopwordList>(StopwordList::load(stopwords));
      out->resources.stopwords = out->stopwords.get();
    }
    if (!parses.empty()) {
      out->parses = std::make_unique<ParseStore>(parses);
      out->resources.parses = out->parses.get();
    }
    if (!backend.empty()) out->resources.backend = std::make_shared<BackendClient>(endpoint(backend));
    std::string kind = predictor;
    if (kind.empty()) kind = !rules.empty() ? "rules" : (!predictor_url.empty() ? "http" : "");
    if (kind == "rules") {
      if (rules.empty()) throw Error("--predictor rules needs --rules PATH");
      out->resources.predictor =
          std::make_shared<RuleTablePredictor>(RuleTablePredictor::load(rules));
    } else if (kind == "http") {
      const std::string url = predictor_url.empty() ? backend : predictor_url;
      if (url.empty()) throw Error("--predictor http needs --predictor-url or --backend");
      out->resources.predictor =
          std::make_shared<HttpPredictor>(std::make_shared<BackendClient>(endpoint(url)));
    } else if (kind == "gold") {
      out->resources.predictor = std::make_shared<GoldPredictor>();
    } else if (kind == "empty") {
      out->resources.predictor = std::make_shared<EmptyPredictor>();
    } else if (!kind.empty()) {
      throw Error("unknown predictor '" + kind + "'");
    }
    return out;
  }

  AugmentConfig config() const {
    AugmentConfig c;
    c.method = parse_method(method);
    c.expansion = parse_expansion(expansion);
    c.seed = seed;
    c.workers = workers;
    c.k = k;
    c.max_positions_fraction = max_positions_fraction;
    c.substitute_responses = substitute_responses;
    if (context_form == "lexical") {
      c.context_form = ContextForm::kLexical;
    } else if (context_form == "delex") {
      c.context_form = ContextForm::kDelexicalized;
    } else {
      throw Error("--context-form must be lexical or delex");
    }
    c.sample_size = sample_size;
    c.pivot = pivot;
    if (!rotatable.empty()) {
      const auto rels = split_list(rotatable);
      c.rotation.rotatable = {rels.begin(), rels.end()};
    }
    return c;
  }
};

int run(int argc, char** argv) {
  CLI::App app{"toddag: data augmentation for task-oriented dialog corpora"};
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON config file; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();

  // ingest
  std::string format, input, out;
  auto* ingest = app.add_subcommand("ingest", "Normalize a raw MultiWOZ or KVRET directory");
  ingest->add_option("--format", format, "multiwoz or kvret")->required();
  ingest->add_option("--input", input, "Raw dataset directory")->required();
  ingest->add_option("--out", out, "Canonical corpus output")->required();

  // subset
  std::string corpus_path;
  double fraction = 1.0;
  std::uint64_t seed = 1;
  std::optional<std::size_t> count;
  auto* subset = app.add_subcommand("subset", "Sample a training subset");
  subset->add_option("--corpus", corpus_path)->required();
  subset->add_option("--fraction", fraction, "Share of the training split")->required();
  subset->add_option("--count", count, "Exact number of dialogs (overrides rounding)");
  subset->add_option("--seed", seed);
  subset->add_option("--out", out)->required();

  // split-crossdomain
  std::string domain;
  std::size_t keep = 20;
  auto* few = app.add_subcommand("split-crossdomain", "Few-shot cross-domain split");
  few->add_option("--corpus", corpus_path)->required();
  few->add_option("--domain", domain, "Left-out target domain")->required();
  few->add_option("--keep", keep, "Target-domain training dialogs kept");
  few->add_option("--seed", seed);
  few->add_option("--out", out)->required();

  // augment
  AugmentOptions aug;
  auto* augment = app.add_subcommand("augment", "Expand a corpus with one method");
  augment->add_option("--corpus", corpus_path)->required();
  augment->add_option("--method", aug.method,
                      "w2v, mlm, backtranslate, paraphrase, rotate, llm, dialogtree, actresp");
  augment->add_option("--expansion", aug.expansion, "x2, x3 or x5");
  augment->add_option("--seed", aug.seed);
  augment->add_option("--out", out)->required();
  aug.add_resource_flags(augment);

  // evaluate
  std::string pred_path, ref_path, dataset = "multiwoz";
  bool categories = false;
  auto* eval = app.add_subcommand("evaluate", "Score a prediction file");
  eval->add_option("--pred", pred_path)->required();
  eval->add_option("--ref", ref_path)->required();
  eval->add_option("--dataset", dataset, "multiwoz or kvret");
  eval->add_flag("--categories", categories, "Also print error rates per domain category");

  // matrix
  AugmentOptions mat;
  std::string fractions = "0.02,0.1,0.25", expansions = "x2,x3,x5", methods = "w2v", seeds = "1,2,3";
  std::string out_dir, hook;
  auto* matrix = app.add_subcommand("matrix", "Run the fraction x expansion x method grid");
  matrix->add_option("--corpus", corpus_path)->required();
  matrix->add_option("--fractions", fractions);
  matrix->add_option("--expansions", expansions);
  matrix->add_option("--methods", methods);
  matrix->add_option("--seeds", seeds);
  matrix->add_option("--out-dir", out_dir)->required();
  matrix->add_option("--hook", hook, "Trainer command; {corpus} and {pred} are substituted");
  matrix->add_option("--dataset", dataset);
  mat.add_resource_flags(matrix);

  // report
  std::string results;
  auto* report = app.add_subcommand("report", "Summarize a results table");
  report->add_option("--results", results)->required();

  // conformance
  std::string backend_url, fixtures;
  bool mock = false;
  auto* conf = app.add_subcommand("conformance", "Run the wire-protocol conformance suite");
  conf->add_option("--backend", backend_url, "Backend base URL");
  conf->add_flag("--mock", mock, "Run against the in-process echo mock");
  conf->add_option("--fixtures", fixtures, "Conformance case file")->required();

  // serve-mock
  int port = 8080;
  std::string script;
  auto* serve = app.add_subcommand("serve-mock", "Serve the echo mock backend over HTTP");
  serve->add_option("--port", port);
  serve->add_option("--script", script, "JSON list of {path, request, response}");

  CLI11_PARSE(app, argc, argv);

  if (*ingest) {
    Corpus c;
    if (format == "multiwoz") {
      c = ingest_multiwoz(input);
    } else if (format == "kvret") {
      c = ingest_kvret(input);
    } else {
      throw Error("--format must be multiwoz or kvret");
    }
    save_canonical(c, out);
    std::cout << "ingested " << c.dialogs.size() << " dialogs (" << c.count(Split::kTrain)
              << " train, " << c.count(Split::kValidation) << " validation, "
              << c.count(Split::kTest) << " test)\n";
    return 0;
  }
  if (*subset) {
    const Corpus c = sample_subset(load_canonical(corpus_path), fraction, seed, count);
    save_canonical(c, out);
    std::cout << "kept " << c.count(Split::kTrain) << " training dialogs\n";
    return 0;
  }
  if (*few) {
    const auto r = few_shot_split(load_canonical(corpus_path), domain, keep, seed);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
    save_canonical(r.corpus, out);
    std::cout << "kept " << r.corpus.count(Split::kTrain) << " training dialogs, "
              << r.corpus.count(Split::kValidation) + r.corpus.count(Split::kTest)
              << " evaluation dialogs\n";
    return 0;
  }
  if (*augment) {
    const auto loaded = aug.load();
    ExpandStats stats;
    const Corpus c = expand(load_canonical(corpus_path), aug.config(), loaded->resources, &stats);
    save_canonical(c, out);
    std::cout << "wrote " << c.dialogs.size() << " dialogs (" << stats.synthetic
              << " synthetic)";
    if (stats.turns_attempted > 0) {
      std::cout << ", " << stats.turns_accepted << "/" << stats.turns_attempted
                << " turns augmented";
    }
    std::cout << "\n";
    return 0;
  }
  if (*eval) {
    const Corpus ref = load_canonical(ref_path);
    const MetricsReport r = evaluate(ref, load_predictions(pred_path), parse_dataset(dataset));
    std::cout << report_to_json(r);
    if (categories) {
      std::vector<Dialog> scored;
      std::map<std::string, bool> flags;
      for (const auto& o : r.outcomes) {
        scored.push_back(*ref.find(o.dialog_id));
        flags[o.dialog_id] = o.success;
      }
      for (const auto& [key, rate] : error_by_category(scored, flags)) {
        std::cout << key << "\t" << rate << "\n";
      }
    }
    return 0;
  }
  if (*matrix) {
    const auto loaded = mat.load();
    MatrixConfig mc;
    for (const auto& f : split_list(fractions)) mc.fractions.push_back(std::stod(f));
    for (const auto& e : split_list(expansions)) mc.expansions.push_back(parse_expansion(e));
    for (const auto& m : split_list(methods)) mc.methods.push_back(parse_method(m));
    mc.seeds.clear();
    for (const auto& s : split_list(seeds)) mc.seeds.push_back(std::stoull(s));
    mc.base = mat.config();
    mc.out_dir = out_dir;
    mc.workers = mat.workers;
    if (!hook.empty()) mc.hook = hook;
    mc.dataset = parse_dataset(dataset);
    const MatrixReport r = run_matrix(load_canonical(corpus_path), mc, loaded->resources);
    std::cout << render_report(r);
    for (const auto& c : r.cells) {
      if (!c.ok) std::cerr << "failed: " << c.artifact << ": " << c.error << "\n";
    }
    return r.failures() == 0 ? 0 : 1;
  }
  if (*report) {
    std::cout << render_report(parse_matrix_csv(read_file(results)));
    return 0;
  }
  if (*conf) {
    const auto cases = load_conformance_cases(fixtures);
    std::vector<ConformanceResult> outcome;
    if (mock) {
      MockBackend backend(conformance_script(cases));
      outcome = run_conformance(backend, cases, true);
    } else {
      if (backend_url.empty()) throw Error("conformance needs --backend URL or --mock");
      BackendEndpoint e;
      e.base_url = backend_url;
      HttpTransport transport(e);
      outcome = run_conformance(transport, cases, false);
    }
    int failed = 0;
    for (const auto& r : outcome) {
      std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
      failed += r.passed ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
  }
  if (*serve) {
    MockScript s;
    if (!script.empty()) {
      for (const auto& entry : json::parse(read_file(script))) {
        s.add(entry.at("path").get<std::string>(), entry.at("request"), entry.at("response"));
      }
    }
    auto backend = std::make_shared<MockBackend>(std::move(s));
    MockHttpServer server(backend, port);
    std::cout << "serving mock backend on " << server.base_url() << std::endl;
    server.wait();
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

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

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <iterator>
#include <map>
#include <sstream>

#include "toddag/experiment.hpp"
#include "toddag/parallel.hpp"
#include "toddag/random.hpp"

namespace toddag {

namespace fs = std::filesystem;

std::size_t MatrixReport::failures() const {
  std::size_t n = 0;
  for (const auto& c : cells) n += c.ok ? 0 : 1;
  return n;
}

std::string cell_key(Method method, double fraction, Expansion expansion) {
  return std::string(method_name(method)) + "_f" + format_fraction(fraction) + "_" +
         std::string(expansion_name(expansion));
}

namespace {

std::string replace_all(std::string text, std::string_view from, const std::string& to) {
  for (auto at = text.find(from); at != std::string::npos; at = text.find(from, at + to.size())) {
    text.replace(at, from.size(), to);
  }
  return text;
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

void run_cell(const Corpus& corpus, const MatrixConfig& config,
              const AugmentResources& resources, CellResult& cell) {
  const std::string key = cell_key(cell.method, cell.fraction, cell.expansion);
  const std::string dir_name = key + "_s" + std::to_string(cell.seed);
  const fs::path dir = config.out_dir / "cells" / dir_name;
  cell.artifact = "cells/" + dir_name + "/corpus.json";
  try {
    // The subset depends on (fraction, seed) only, so all methods of a
    // fraction see the same training dialogs.
    const Corpus subset = sample_subset(
        corpus, cell.fraction, derive_seed(cell.seed, "subset:" + format_fraction(cell.fraction), 0));
    AugmentConfig augment = config.base;
    augment.method = cell.method;
    augment.expansion = cell.expansion;
    augment.seed = derive_seed(cell.seed, key, 0);
    augment.workers = 1;
    const Corpus expanded = expand(subset, augment, resources);
    cell.dialogs = expanded.dialogs.size();
    save_canonical(expanded, dir / "corpus.json");

    if (config.hook) {
      const fs::path pred = dir / "predictions.json";
      std::string command = replace_all(*config.hook, "{corpus}",
                                        shell_quote(fs::absolute(dir / "corpus.json").string()));
      command = replace_all(command, "{pred}", shell_quote(fs::absolute(pred).string()));
      const int status = std::system(command.c_str());
      if (status != 0) throw Error("hook exited with status " + std::to_string(status));
      const MetricsReport report = evaluate(subset, load_predictions(pred), config.dataset);
      CellMetrics m;
      if (config.dataset == Dataset::kKvret) {
        m = {*report.match, *report.success_f1, report.bleu, report.score};
      } else {
        m = {report.inform, report.success, report.bleu, report.score};
      }
      cell.metrics = m;
    }
    cell.ok = true;
  } catch (const std::exception& e) {
    cell.ok = false;
    cell.error = e.what();
  }
}

}  // namespace

MatrixReport run_matrix(const Corpus& corpus, const MatrixConfig& config,
                        const AugmentResources& resources) {
  MatrixReport report;
  for (Method m : config.methods) {
    for (double f : config.fractions) {
      for (Expansion e : config.expansions) {
        for (std::uint64_t s : config.seeds) {
          CellResult cell;
          cell.method = m;
          cell.fraction = f;
          cell.expansion = e;
          cell.seed = s;
          report.cells.push_back(std::move(cell));
        }
      }
    }
  }
  parallel_for(report.cells.size(), config.workers,
               [&](std::size_t i) { run_cell(corpus, config, resources, report.cells[i]); });
  write_file(config.out_dir / "results.csv", matrix_csv(report));
  std::string failures;
  for (const auto& c : report.cells) {
    if (!c.ok) failures += c.artifact + ": " + c.error + "\n";
  }
  const fs::path failure_log = config.out_dir / "failures.txt";
  if (!failures.empty()) {
    write_file(failure_log, failures);
  } else {
    fs::remove(failure_log);
  }
  return report;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string fixed2(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.2f", v);
  return buffer;
}

struct GroupKey {
  Method method;
  double fraction;
  Expansion expansion;
  auto operator<=>(const GroupKey&) const = default;
};

struct Mean {
  std::size_t seeds = 0, failed = 0, measured = 0;
  CellMetrics sum;
  std::optional<CellMetrics> value() const {
    if (measured == 0) return std::nullopt;
    const double n = static_cast<double>(measured);
    return CellMetrics{sum.inform / n, sum.success / n, sum.bleu / n, sum.score / n};
  }
};

// Groups in first-appearance order.
std::vector<std::pair<GroupKey, Mean>> means(const MatrixReport& report) {
  std::vector<std::pair<GroupKey, Mean>> out;
  for (const auto& c : report.cells) {
    const GroupKey key{c.method, c.fraction, c.expansion};
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& g) { return g.first == key; });
    if (it == out.end()) {
      out.push_back({key, {}});
      it = std::prev(out.end());
    }
    Mean& m = it->second;
    ++m.seeds;
    if (!c.ok) ++m.failed;
    if (c.ok && c.metrics) {
      ++m.measured;
      m.sum.inform += c.metrics->inform;
      m.sum.success += c.metrics->success;
      m.sum.bleu += c.metrics->bleu;
      m.sum.score += c.metrics->score;
    }
  }
  return out;
}

std::string metric_cells(const std::optional<CellMetrics>& m) {
  if (!m) return ",,,";
  return fixed2(m->inform) + "," + fixed2(m->success) + "," + fixed2(m->bleu) + "," +
         fixed2(m->score);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string matrix_csv(const MatrixReport& report) {
  std::string out = "method,fraction,expansion,seed,inform,success,bleu,score,status,artifact\n";
  for (const auto& c : report.cells) {
    out += std::string(method_name(c.method)) + "," + format_fraction(c.fraction) + "," +
           std::string(expansion_name(c.expansion)) + "," + std::to_string(c.seed) + "," +
           metric_cells(c.metrics) + "," + (c.ok ? "ok" : "failed") + "," + c.artifact + "\n";
  }
  const auto groups = means(report);
  out += "\n# means\nmethod,fraction,expansion,seeds,inform,success,bleu,score,failed\n";
  for (const auto& [key, m] : groups) {
    out += std::string(method_name(key.method)) + "," + format_fraction(key.fraction) + "," +
           std::string(expansion_name(key.expansion)) + "," + std::to_string(m.seeds) + "," +
           metric_cells(m.value()) + "," + std::to_string(m.failed) + "\n";
  }
  out += "\n# best_expansion\nmethod,fraction,expansion,score\n";
  std::vector<std::pair<std::pair<Method, double>, std::pair<Expansion, double>>> best;
  for (const auto& [key, m] : groups) {
    const auto v = m.value();
    if (!v) continue;
    auto it = std::find_if(best.begin(), best.end(), [&](const auto& b) {
      return b.first == std::make_pair(key.method, key.fraction);
    });
    if (it == best.end()) {
      best.push_back({{key.method, key.fraction}, {key.expansion, v->score}});
    } else if (v->score > it->second.second) {
      it->second = {key.expansion, v->score};
    }
  }
  for (const auto& [mf, es] : best) {
    out += std::string(method_name(mf.first)) + "," + format_fraction(mf.second) + "," +
           std::string(expansion_name(es.first)) + "," + fixed2(es.second) + "\n";
  }
  return out;
}

MatrixReport parse_matrix_csv(std::string_view csv) {
  MatrixReport report;
  std::istringstream in{std::string(csv)};
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) break;  // per-seed section ends at the first blank line
    if (header) {
      header = false;
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != 10) throw Error("results table: expected 10 columns in '" + line + "'");
    CellResult c;
    c.method = parse_method(f[0]);
    c.fraction = std::stod(f[1]);
    c.expansion = parse_expansion(f[2]);
    c.seed = std::stoull(f[3]);
    if (!f[4].empty()) {
      c.metrics = CellMetrics{std::stod(f[4]), std::stod(f[5]), std::stod(f[6]), std::stod(f[7])};
    }
    c.ok = f[8] == "ok";
    c.artifact = f[9];
    report.cells.push_back(std::move(c));
  }
  return report;
}

std::string render_report(const MatrixReport& report) {
  const auto groups = means(report);
  std::ostringstream out;
  out << "method         fraction  expansion  seeds  inform  success  bleu    score\n";
  for (const auto& [key, m] : groups) {
    char line[256];
    const auto v = m.value();
    if (v) {
      std::snprintf(line, sizeof line, "%-14s %-9s %-10s %-6zu %-7.2f %-8.2f %-7.2f %.2f\n",
                    std::string(method_name(key.method)).c_str(),
                    format_fraction(key.fraction).c_str(),
                    std::string(expansion_name(key.expansion)).c_str(), m.seeds, v->inform,
                    v->success, v->bleu, v->score);
    } else {
      std::snprintf(line, sizeof line, "%-14s %-9s %-10s %-6zu (no metrics)\n",
                    std::string(method_name(key.method)).c_str(),
                    format_fraction(key.fraction).c_str(),
                    std::string(expansion_name(key.expansion)).c_str(), m.seeds);
    }
    out << line;
  }
  // Best expansion per (method, fraction), e.g. "w2v 0.1: 84.69 (x2)".
  std::map<std::pair<std::string, std::string>, std::pair<double, std::string>> best;
  std::vector<std::pair<std::string, std::string>> order;
  for (const auto& [key, m] : groups) {
    const auto v = m.value();
    if (!v) continue;
    const auto k = std::make_pair(std::string(method_name(key.method)), format_fraction(key.fraction));
    auto it = best.find(k);
    if (it == best.end()) {
      best[k] = {v->score, std::string(expansion_name(key.expansion))};
      order.push_back(k);
    } else if (v->score > it->second.first) {
      it->second = {v->score, std::string(expansion_name(key.expansion))};
    }
  }
  if (!order.empty()) out << "\nbest expansion per method and fraction:\n";
  for (const auto& k : order) {
    out << "  " << k.first << " " << k.second << ": " << fixed2(best[k].first) << " ("
        << best[k].second << ")\n";
  }
  return out.str();
}

}  // namespace toddag

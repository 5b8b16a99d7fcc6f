// Command-line driver: train, predict, evaluate, gensynth, import-rams.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "arglink/checkpoint.h"
#include "arglink/config.h"
#include "arglink/corpus.h"
#include "arglink/errors.h"
#include "arglink/evaluation.h"
#include "arglink/model.h"
#include "arglink/ontology.h"
#include "arglink/prediction.h"
#include "arglink/synthetic.h"
#include "arglink/training.h"
#include "json.hpp"

#ifndef ARGLINK_VERSION
#define ARGLINK_VERSION "unknown"
#endif

namespace {

using namespace arglink;
using Clock = std::chrono::steady_clock;
using nlohmann::ordered_json;

constexpr int kRuntimeFailure = 1;
constexpr int kUsageFailure = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fnv1a(const std::string& path) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : read_file(path)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

// One manifest per run, written next to the primary output.
class RunManifest {
 public:
  explicit RunManifest(std::string command) {
    json_["command"] = std::move(command);
    json_["version"] = ARGLINK_VERSION;
    json_["started"] = utc_now();
    json_["inputs"] = ordered_json::object();
  }
  void input(const std::string& role, const std::string& path) {
    if (path.empty()) return;
    json_["inputs"][role] = {{"path", path}, {"fnv1a64", fnv1a(path)}};
  }
  ordered_json& operator[](const char* key) { return json_[key]; }
  void timing(const char* phase, Clock::time_point since) {
    json_["timings"][phase] = std::chrono::duration<double>(Clock::now() - since).count();
  }
  void write(const std::string& output) {
    json_["finished"] = utc_now();
    std::ofstream out(output + ".manifest.json", std::ios::binary);
    out << json_.dump(2) << '\n';
  }

 private:
  ordered_json json_;
};

ordered_json config_json(const ModelConfig& c) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : c.entries()) j[k] = v;
  return j;
}

// flag > file > default.
ModelConfig resolve_config(const std::string& file, const std::vector<std::string>& overrides) {
  ModelConfig c = file.empty() ? ModelConfig{} : load_config(file);
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + o + "'");
    c.set(o.substr(0, eq), o.substr(eq + 1));
  }
  c.validate();
  return c;
}

struct TrainArgs {
  std::string data, dev, ontology, config, out, init;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
};

int run_train(const TrainArgs& a) {
  const auto start = Clock::now();
  RunManifest manifest("train");
  auto overrides = a.overrides;
  if (a.seed) overrides.push_back("seed=" + std::to_string(*a.seed));
  const ModelConfig config = resolve_config(a.config, overrides);
  const Ontology ontology = load_ontology(a.ontology);
  const auto train_docs = load_jsonl(a.data, &ontology);
  const auto dev_docs = load_jsonl(a.dev, &ontology);
  manifest.input("data", a.data);
  manifest.input("dev", a.dev);
  manifest.input("ontology", a.ontology);
  manifest.input("config", a.config);
  manifest.input("init_checkpoint", a.init);
  manifest["config"] = config_json(config);
  manifest["seed"] = config.seed;

  std::optional<Checkpoint> init;
  if (!a.init.empty()) init = load_checkpoint(a.init);
  TrainOptions options;
  options.initial = init ? &*init : nullptr;
  options.jobs = a.jobs;
  options.on_epoch = [](const EpochReport& r) {
    std::cerr << "epoch " << r.epoch << " loss " << r.mean_loss << " dev_f1 " << r.dev_f1
              << " lr " << r.learning_rate << (r.improved ? " *" : "") << '\n';
    if (r.skipped_gold > 0) {
      std::cerr << "  " << r.skipped_gold << " gold links had no reachable candidate\n";
    }
  };
  const TrainResult result = train(train_docs, dev_docs, ontology, config, options);
  save_checkpoint(a.out, result.best);

  ordered_json history = ordered_json::array();
  for (const auto& r : result.history) {
    history.push_back({{"epoch", r.epoch},
                       {"mean_loss", r.mean_loss},
                       {"dev_f1", r.dev_f1},
                       {"learning_rate", r.learning_rate},
                       {"steps", r.steps},
                       {"skipped_gold", r.skipped_gold}});
  }
  manifest["history"] = history;
  manifest["best_epoch"] = result.best.epoch;
  manifest["best_dev_f1"] = result.best.best_dev_f1;
  manifest.timing("total_seconds", start);
  manifest.write(a.out);
  std::cerr << "best dev F1 " << result.best.best_dev_f1 << " at epoch " << result.best.epoch
            << '\n';
  return 0;
}

struct PredictArgs {
  std::string model, data, ontology, decoding = "greedy", out;
  int jobs = 1;
};

int run_predict(const PredictArgs& a) {
  const auto start = Clock::now();
  RunManifest manifest("predict");
  const Decoding decoding = parse_decoding(a.decoding);
  const Ontology ontology = load_ontology(a.ontology);
  const Checkpoint checkpoint = load_checkpoint(a.model);
  const auto docs = load_jsonl(a.data, &ontology);
  if (decoding == Decoding::kTypeConstrained) {
    for (const auto& d : docs) {
      for (const auto& e : d.events) {
        if (!e.type) {
          throw ConfigError("tcd decoding needs gold event types; " + d.doc_id + "/" +
                            e.event_id + " has none");
        }
      }
    }
  }
  manifest.input("model", a.model);
  manifest.input("data", a.data);
  manifest.input("ontology", a.ontology);
  manifest["config"] = config_json(checkpoint.config);
  manifest["seed"] = checkpoint.config.seed;
  manifest["decoding"] = to_string(decoding);
  auto model = Model::from_checkpoint(checkpoint, ontology);
  const auto preds = model->predict(docs, decoding, a.jobs);
  write_predictions(a.out, preds);
  manifest["predictions"] = preds.size();
  manifest.timing("total_seconds", start);
  manifest.write(a.out);
  return 0;
}

struct EvaluateArgs {
  std::string pred, gold, breakdown, confusion, similarity, model, ontology, out;
};

int run_evaluate(const EvaluateArgs& a) {
  const auto start = Clock::now();
  RunManifest manifest("evaluate");
  const auto preds = load_predictions(a.pred);
  const auto docs = load_jsonl(a.gold);
  const auto gold = gold_triples(docs);
  manifest.input("pred", a.pred);
  manifest.input("gold", a.gold);

  std::vector<std::string> warnings;
  const Prf overall = score_triples(preds, gold, &warnings);
  std::optional<DistanceBreakdown> breakdown;
  if (a.breakdown == "distance") breakdown = distance_breakdown(preds, gold, docs);
  const std::string report = report_json(overall, breakdown ? &*breakdown : nullptr, warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';

  if (!a.confusion.empty()) {
    std::ofstream out(a.confusion, std::ios::binary);
    write_confusion_csv(out, confusion_matrix(preds, gold));
  }
  if (!a.similarity.empty()) {
    if (a.model.empty() || a.ontology.empty()) {
      throw ConfigError("--similarity needs --model and --ontology");
    }
    manifest.input("model", a.model);
    const Ontology ontology = load_ontology(a.ontology);
    auto model = Model::from_checkpoint(load_checkpoint(a.model), ontology);
    std::ofstream out(a.similarity, std::ios::binary);
    write_similarity_csv(out, role_similarity(model->linker().role_table().value,
                                              ontology.all_roles()));
  }
  if (a.out.empty()) {
    std::cout << report;
  } else {
    std::ofstream(a.out, std::ios::binary) << report;
  }
  manifest["f1"] = overall.f1;
  manifest.timing("total_seconds", start);
  manifest.write(a.out.empty() ? a.pred + ".eval" : a.out);
  return 0;
}

struct GensynthArgs {
  std::string config, out, dev_out, ontology_out;
  std::optional<std::uint64_t> seed;
  int dev_docs = 0;
};

int run_gensynth(const GensynthArgs& a) {
  const auto start = Clock::now();
  RunManifest manifest("gensynth");
  SynthConfig config = a.config.empty() ? SynthConfig{} : parse_synth_config(read_file(a.config));
  manifest.input("config", a.config);
  if (a.seed) config.seed = *a.seed;
  if (a.dev_docs < 0 || a.dev_docs > config.n_docs) {
    throw ConfigError("--dev-docs must lie in [0, n_docs]");
  }
  if (a.dev_docs > 0 && a.dev_out.empty()) throw ConfigError("--dev-docs needs --dev-out");
  const auto docs = generate_synthetic(config);
  const auto split = docs.end() - a.dev_docs;
  write_jsonl(a.out, std::vector<Document>(docs.begin(), split));
  if (!a.dev_out.empty()) write_jsonl(a.dev_out, std::vector<Document>(split, docs.end()));
  if (!a.ontology_out.empty()) {
    std::ofstream out(a.ontology_out, std::ios::binary);
    write_ontology(out, synthetic_ontology(config));
  }
  manifest["seed"] = config.seed;
  manifest["documents"] = docs.size();
  manifest["dev_documents"] = a.dev_docs;
  manifest.timing("total_seconds", start);
  manifest.write(a.out);
  return 0;
}

struct ImportArgs {
  std::string input, ontology, out;
};

int run_import(const ImportArgs& a) {
  const auto start = Clock::now();
  RunManifest manifest("import-rams");
  const Ontology ontology = load_ontology(a.ontology);
  const auto docs = import_rams(a.input, ontology);
  write_jsonl(a.out, docs);
  manifest.input("input", a.input);
  manifest.input("ontology", a.ontology);
  manifest["documents"] = docs.size();
  manifest.timing("total_seconds", start);
  manifest.write(a.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Document-level event argument linking"};
  app.set_version_flag("--version", ARGLINK_VERSION);
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train a model and write its checkpoint");
  train_cmd->add_option("--data", train_args.data, "Training JSONL")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--dev", train_args.dev, "Development JSONL")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--ontology", train_args.ontology, "Ontology TSV")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--config", train_args.config, "key = value config file")->check(CLI::ExistingFile);
  train_cmd->add_option("--out", train_args.out, "Checkpoint path")->required();
  train_cmd->add_option("--init-checkpoint", train_args.init, "Fine-tune from this checkpoint")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--seed", train_args.seed, "Overrides the config seed");
  train_cmd->add_option("--set", train_args.overrides, "Config override key=value (repeatable)");
  train_cmd->add_option("--jobs", train_args.jobs, "Threads for dev prediction")->check(CLI::PositiveNumber);

  PredictArgs predict_args;
  auto* predict_cmd = app.add_subcommand("predict", "Write predicted triples as JSONL");
  predict_cmd->add_option("--model", predict_args.model, "Checkpoint")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--data", predict_args.data, "Input JSONL")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--ontology", predict_args.ontology, "Ontology TSV")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--decoding", predict_args.decoding, "argmax, greedy or tcd")
      ->check(CLI::IsMember({"argmax", "greedy", "tcd"}));
  predict_cmd->add_option("--out", predict_args.out, "Predictions JSONL")->required();
  predict_cmd->add_option("--jobs", predict_args.jobs, "Worker threads")->check(CLI::PositiveNumber);

  EvaluateArgs eval_args;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score predictions against gold links");
  eval_cmd->add_option("--pred", eval_args.pred, "Predictions JSONL")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--gold", eval_args.gold, "Gold JSONL")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--breakdown", eval_args.breakdown, "Add a per-distance table")
      ->check(CLI::IsMember({"distance"}));
  eval_cmd->add_option("--confusion", eval_args.confusion, "Row-normalized confusion CSV");
  eval_cmd->add_option("--similarity", eval_args.similarity, "Role cosine-similarity CSV");
  eval_cmd->add_option("--model", eval_args.model, "Checkpoint for --similarity")->check(CLI::ExistingFile);
  eval_cmd->add_option("--ontology", eval_args.ontology, "Ontology for --similarity")->check(CLI::ExistingFile);
  eval_cmd->add_option("--out", eval_args.out, "Report path (default stdout)");
  int eval_jobs = 1;
  eval_cmd->add_option("--jobs", eval_jobs, "Accepted for symmetry; scoring is cheap")
      ->check(CLI::PositiveNumber);

  GensynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("gensynth", "Generate a synthetic corpus");
  synth_cmd->add_option("--config", synth_args.config, "key = value generator config")->check(CLI::ExistingFile);
  synth_cmd->add_option("--seed", synth_args.seed, "Overrides the config seed");
  synth_cmd->add_option("--out", synth_args.out, "Output JSONL")->required();
  synth_cmd->add_option("--dev-docs", synth_args.dev_docs, "Move the last N documents to --dev-out");
  synth_cmd->add_option("--dev-out", synth_args.dev_out, "Development JSONL");
  synth_cmd->add_option("--ontology-out", synth_args.ontology_out, "Write the matching ontology");

  ImportArgs import_args;
  auto* import_cmd = app.add_subcommand("import-rams", "Convert a RAMS split to JSONL");
  import_cmd->add_option("--input", import_args.input, "RAMS .jsonlines file")->required()->check(CLI::ExistingFile);
  import_cmd->add_option("--ontology", import_args.ontology, "Ontology TSV")->required()->check(CLI::ExistingFile);
  import_cmd->add_option("--out", import_args.out, "Output JSONL")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageFailure;
  }

  try {
    if (*train_cmd) return run_train(train_args);
    if (*predict_cmd) return run_predict(predict_args);
    if (*eval_cmd) return run_evaluate(eval_args);
    if (*synth_cmd) return run_gensynth(synth_args);
    if (*import_cmd) return run_import(import_args);
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageFailure;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageFailure;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageFailure;
  } catch (const LookupError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return kUsageFailure;
}

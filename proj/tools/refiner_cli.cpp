// Command-line front end: ingest, prove, batch, features, report.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "refiner/core/serialize.hpp"
#include "refiner/engine/dataset.hpp"
#include "refiner/engine/engine.hpp"
#include "refiner/llm/http.hpp"
#include "refiner/prover/mock.hpp"
#include "refiner/prover/subprocess.hpp"

namespace fs = std::filesystem;
using namespace refiner;

namespace {

enum Exit { kOk = 0, kDomain = 1, kConfig = 2 };

// Configuration or IO problem; maps to exit status 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Engine settings plus the backend choices, read from one flat JSON object.
struct RunConfig {
  EngineConfig engine;
  std::string llm = "stub";  // stub | http
  fs::path stub_scenario;
  HttpBackendOptions http;
  std::string prover = "mock";  // mock | coqtop
  fs::path mock_scenario;
  SubprocessOptions coqtop;
  fs::path classifier_dataset;
};

const std::set<std::string> kEngineKeys = {
    "iteration_limit", "top_k",          "decision_maker", "mode",
    "disable_lemma_discovery",           "disable_enrichment",
    "llm_temperature", "max_output_tokens", "rng_seed",     "max_new_lemmas", "budgets"};

RunConfig load_config(const std::optional<fs::path>& path) {
  RunConfig rc;
  if (!path) return rc;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(slurp(*path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed config " + path->string() + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  const fs::path base = path->parent_path();
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };

  nlohmann::json engine = nlohmann::json::object();
  try {
    for (const auto& [key, value] : j.items()) {
      if (kEngineKeys.count(key)) engine[key] = value;
      else if (key == "llm_backend") rc.llm = value.get<std::string>();
      else if (key == "stub_scenario") rc.stub_scenario = resolve(value.get<std::string>());
      else if (key == "http_url") rc.http.url = value.get<std::string>();
      else if (key == "model") rc.http.model = value.get<std::string>();
      else if (key == "api_key") rc.http.api_key = value.get<std::string>();
      else if (key == "max_retries") rc.http.max_retries = value.get<int>();
      else if (key == "max_in_flight") rc.http.max_in_flight = value.get<int>();
      else if (key == "request_timeout_s") rc.http.timeout = std::chrono::seconds(value.get<int>());
      else if (key == "prover_backend") rc.prover = value.get<std::string>();
      else if (key == "mock_scenario") rc.mock_scenario = resolve(value.get<std::string>());
      else if (key == "coqtop_path") rc.coqtop.executable = value.get<std::string>();
      else if (key == "coqtop_args") rc.coqtop.args = value.get<std::vector<std::string>>();
      else if (key == "script_timeout_s")
        rc.coqtop.script_timeout = std::chrono::milliseconds(static_cast<long>(value.get<double>() * 1000));
      else if (key == "sentence_timeout_s")
        rc.coqtop.sentence_timeout = std::chrono::milliseconds(static_cast<long>(value.get<double>() * 1000));
      else if (key == "classifier_dataset") rc.classifier_dataset = resolve(value.get<std::string>());
      else throw ConfigError("unknown config key: " + key);
    }
    rc.engine = engine.get<EngineConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return rc;
}

// Flags shared by prove and batch; they override the config file.
struct Overrides {
  std::optional<int> limit;
  std::optional<std::string> mode;
  std::optional<std::string> decision_maker;
  bool no_lemma_discovery = false;
  bool no_enrichment = false;
  std::optional<std::uint64_t> seed;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--limit", limit, "Refinement iteration limit");
    cmd->add_option("--mode", mode, "Adapt, SelfRefine or SelfRefineRag");
    cmd->add_option("--decision-maker", decision_maker, "Llm, Rule, Random or Classifier");
    cmd->add_flag("--disable-lemma-discovery", no_lemma_discovery);
    cmd->add_flag("--disable-enrichment", no_enrichment);
    cmd->add_option("--seed", seed, "Seed for the random decision-maker");
  }

  void apply(EngineConfig& c) const {
    try {
      if (limit) c.iteration_limit = *limit;
      if (mode) c.mode = engine_mode_from_string(*mode);
      if (decision_maker) c.decision_maker = decision_maker_from_string(*decision_maker);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    if (no_lemma_discovery) c.disable_lemma_discovery = true;
    if (no_enrichment) c.disable_enrichment = true;
    if (seed) c.rng_seed = *seed;
    try {
      validate(c);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
};

std::shared_ptr<Gateway> make_gateway(const RunConfig& rc) {
  std::shared_ptr<LlmBackend> backend;
  if (rc.llm == "stub") {
    if (rc.stub_scenario.empty()) throw ConfigError("stub_scenario is required for the stub backend");
    try {
      backend = std::make_shared<StubBackend>(
          std::make_shared<const StubScenario>(StubScenario::load(rc.stub_scenario)));
    } catch (const BackendError& e) {
      throw ConfigError(e.what());
    }
  } else if (rc.llm == "http") {
    HttpBackendOptions opts = rc.http;
    if (const char* key = std::getenv("REFINER_API_KEY")) opts.api_key = key;
    if (opts.url.empty()) throw ConfigError("http_url is required for the http backend");
    backend = std::make_shared<HttpBackend>(opts);
  } else {
    throw ConfigError("unknown llm_backend: " + rc.llm);
  }
  CompletionParams params{rc.engine.llm_temperature, rc.engine.max_output_tokens};
  return std::make_shared<Gateway>(backend, params, rc.engine.budgets);
}

std::unique_ptr<Prover> make_prover(const RunConfig& rc) {
  if (rc.prover == "mock") {
    if (rc.mock_scenario.empty()) throw ConfigError("mock_scenario is required for the mock prover");
    try {
      return std::make_unique<MockProver>(MockScenario::load(rc.mock_scenario));
    } catch (const BackendUnavailable& e) {
      throw ConfigError(e.what());
    }
  }
  if (rc.prover == "coqtop") return std::make_unique<SubprocessProver>(rc.coqtop);
  throw ConfigError("unknown prover_backend: " + rc.prover);
}

std::shared_ptr<const Classifier> make_classifier(const RunConfig& rc) {
  if (rc.classifier_dataset.empty()) return nullptr;
  std::ifstream in(rc.classifier_dataset);
  if (!in) throw ConfigError("cannot read " + rc.classifier_dataset.string());
  try {
    return std::make_shared<MajorityClassifier>(MajorityClassifier::train(read_dataset(in)));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

GlobalContext load_snapshot(const fs::path& p) {
  try {
    return GlobalContext::load(p);
  } catch (const std::exception& e) {
    throw ConfigError("cannot load snapshot " + p.string() + ": " + e.what());
  }
}

// Writes to the file, or stdout when the path is empty.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty()) return;
    file_.open(path);
    if (!file_) throw ConfigError("cannot write " + path);
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

int cmd_ingest(const std::vector<std::string>& paths, const std::string& out,
               const std::optional<std::string>& manifest) {
  std::vector<SourceFile> files;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      std::optional<fs::path> m;
      if (manifest) m = *manifest;
      std::vector<SourceFile> found;
      try {
        found = collect_sources(p, ".v", m);
      } catch (const std::exception& e) {
        throw ConfigError(e.what());
      }
      for (auto& f : found) files.push_back({(fs::path(p) / f.path).generic_string(), std::move(f.text)});
    } else {
      files.push_back({p, slurp(p)});
    }
  }
  GlobalContext g;
  try {
    g = GlobalContext::ingest(files);
  } catch (const DuplicateName& e) {
    throw ConfigError(e.what());
  }
  std::map<std::string, std::size_t> by_kind;
  for (const auto& item : g.ordered()) ++by_kind[to_string(item.kind)];
  std::cout << g.named_count() << " named items, " << g.notation_count() << " notations\n";
  for (const auto& [kind, n] : by_kind) std::cout << "  " << kind << ": " << n << "\n";
  if (!g.skipped().empty()) std::cout << "  skipped: " << g.skipped().size() << "\n";
  if (!out.empty()) {
    try {
      g.save(out);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }
  return kOk;
}

int cmd_prove(const std::string& snapshot, const std::string& theorem,
              const std::optional<fs::path>& config, const Overrides& ov, const std::string& out) {
  GlobalContext corpus = load_snapshot(snapshot);
  RunConfig rc = load_config(config);
  ov.apply(rc.engine);
  const ContextItem* item = corpus.find(theorem);
  if (item == nullptr || !is_provable(item->kind)) {
    std::cerr << "unknown theorem: " << theorem << "\n";
    return kDomain;
  }
  auto gateway = make_gateway(rc);
  auto prover = make_prover(rc);
  BatchOptions opts{1, make_classifier(rc)};
  auto traces = prove_batch(corpus, {theorem}, rc.engine, gateway, *prover, opts);
  Output o(out);
  o.stream() << trace_to_line(traces[0]) << "\n";
  if (traces[0].outcome == Outcome::Error) std::cerr << "error: " << traces[0].error << "\n";
  return traces[0].outcome == Outcome::Proved ? kOk : kDomain;
}

std::vector<std::string> read_names(const std::string& path) {
  std::vector<std::string> names;
  std::istringstream in(slurp(path));
  for (std::string line; std::getline(in, line);) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    for (std::string w; words >> w;) names.push_back(w);
  }
  return names;
}

int cmd_batch(const std::string& snapshot, const std::vector<std::string>& names,
              const std::optional<fs::path>& config, const Overrides& ov, const std::string& out,
              std::size_t jobs, const std::string& summary_path) {
  GlobalContext corpus = load_snapshot(snapshot);
  RunConfig rc = load_config(config);
  ov.apply(rc.engine);
  auto gateway = make_gateway(rc);
  auto prover = make_prover(rc);
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  if (rc.llm == "http") jobs = std::min<std::size_t>(jobs, static_cast<std::size_t>(rc.http.max_in_flight));
  BatchOptions opts{jobs, make_classifier(rc)};
  auto traces = prove_batch(corpus, names, rc.engine, gateway, *prover, opts);
  {
    Output o(out);
    for (const auto& t : traces) o.stream() << trace_to_line(t) << "\n";
  }
  std::string line = to_json(summarize(traces)).dump();
  std::cout << line << "\n";
  if (!summary_path.empty()) {
    Output s(summary_path);
    s.stream() << line << "\n";
  }
  return kOk;
}

int cmd_features(const std::string& snapshot, const std::string& proofs_dir,
                 const std::string& manifest, const std::optional<fs::path>& config,
                 const std::string& out) {
  GlobalContext corpus = load_snapshot(snapshot);
  RunConfig rc = load_config(config);
  auto prover = make_prover(rc);
  CommitManifest commits;
  if (!manifest.empty()) {
    try {
      commits = parse_commit_manifest(slurp(manifest));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("bad commit manifest: ") + e.what());
    }
  }
  std::vector<SourceFile> proofs;
  try {
    proofs = collect_sources(proofs_dir);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  auto rows = replay_dataset(corpus, proofs, commits, *prover, static_cast<std::size_t>(rc.engine.top_k));
  std::vector<LabeledExample> examples;
  for (const auto& r : rows) examples.push_back(r.example);
  Output o(out);
  write_dataset(o.stream(), examples);
  std::cerr << examples.size() << " rows\n";
  return kOk;
}

int cmd_report(const std::string& traces_path, const std::string& out, const std::string& plot_dir) {
  std::vector<RefinementTrace> traces;
  std::istringstream in(slurp(traces_path));
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      // Summary lines share the stream in some setups; skip them.
      if (!j.contains("outcome")) continue;
      traces.push_back(j.get<RefinementTrace>());
    } catch (const std::exception& e) {
      throw ConfigError(traces_path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  auto rows = aggregate(traces);
  nlohmann::json report = {{"summary", to_json(summarize(traces))}, {"iterations", to_json(rows)}};
  Output o(out);
  o.stream() << report.dump(2) << "\n";
  if (!plot_dir.empty()) {
    fs::create_directories(plot_dir);
    std::ofstream success(fs::path(plot_dir) / "cumulative_success.tsv");
    std::ofstream freq(fs::path(plot_dir) / "strategy_frequency.tsv");
    if (!success || !freq) throw ConfigError("cannot write plot data under " + plot_dir);
    success << "iteration\tcumulative_success\n";
    freq << "iteration\tLemmaDiscovery\tContextEnrichment\tRegeneration\tfallbacks\n";
    for (const auto& r : rows) {
      success << r.iteration << "\t" << r.cumulative_success << "\n";
      if (r.iteration == 0) continue;
      freq << r.iteration << "\t" << r.strategy_percent.at(Strategy::LemmaDiscovery) << "\t"
           << r.strategy_percent.at(Strategy::ContextEnrichment) << "\t"
           << r.strategy_percent.at(Strategy::Regeneration) << "\t" << r.fallbacks << "\n";
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive proof refinement driver"};
  app.require_subcommand(1);

  std::string snapshot, out, manifest, theorem, theorems_file, proofs_dir, commits, traces,
      plot_dir, summary;
  std::optional<fs::path> config;
  std::vector<std::string> paths, names;
  std::size_t jobs = 0;
  Overrides ov;

  auto* ingest = app.add_subcommand("ingest", "Build a corpus snapshot from proof files");
  ingest->add_option("paths", paths, "Files or directories of .v sources")->required();
  ingest->add_option("--out,--snapshot", out, "Snapshot file to write");
  ingest->add_option("--manifest", manifest, "File order for directories, one relative path per line");

  auto* prove_cmd = app.add_subcommand("prove", "Refine one theorem of the snapshot");
  prove_cmd->add_option("theorem", theorem, "Theorem name")->required();
  prove_cmd->add_option("--snapshot", snapshot)->required();
  prove_cmd->add_option("--config", config);
  prove_cmd->add_option("--out", out, "Trace file (default: stdout)");
  ov.add_to(prove_cmd);

  auto* batch = app.add_subcommand("batch", "Refine a list of theorems");
  batch->add_option("names", names, "Theorem names");
  batch->add_option("--theorems", theorems_file, "File with theorem names");
  batch->add_option("--snapshot", snapshot)->required();
  batch->add_option("--config", config);
  batch->add_option("--out", out, "Trace file (default: stdout)");
  batch->add_option("--jobs", jobs, "Parallel theorems (default: processor count)");
  batch->add_option("--summary", summary, "Also write the summary line here");
  ov.add_to(batch);

  auto* features = app.add_subcommand("features", "Export the decision dataset from human proofs");
  features->add_option("--snapshot", snapshot)->required();
  features->add_option("--proofs", proofs_dir, "Directory of proof files")->required();
  features->add_option("--commits", commits, "Commit manifest JSON");
  features->add_option("--config", config);
  features->add_option("--out", out, "CSV file (default: stdout)");

  auto* report = app.add_subcommand("report", "Aggregate traces");
  report->add_option("traces", traces, "Trace file")->required();
  report->add_option("--out", out, "Report file (default: stdout)");
  report->add_option("--plot-dir", plot_dir, "Directory for plot data");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*ingest) return cmd_ingest(paths, out, manifest.empty() ? std::nullopt : std::optional(manifest));
    if (*prove_cmd) return cmd_prove(snapshot, theorem, config, ov, out);
    if (*batch) {
      if (!theorems_file.empty())
        for (auto& n : read_names(theorems_file)) names.push_back(std::move(n));
      return cmd_batch(snapshot, names, config, ov, out, jobs, summary);
    }
    if (*features) return cmd_features(snapshot, proofs_dir, commits, config, out);
    if (*report) return cmd_report(traces, out, plot_dir);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  }
  return kConfig;
}

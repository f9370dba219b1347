#include <csignal>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "ironylab/annotation.hpp"
#include "ironylab/experiment.hpp"
#include "ironylab/server.hpp"
#include "ironylab/text.hpp"

namespace fs = std::filesystem;
using namespace ironylab;

namespace {

AnnotationServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

// "<dataset>__<strategy>.jsonl" -> dataset
std::string dataset_from_log(const fs::path& log) {
  const std::string stem = log.stem().string();
  const auto cut = stem.find("__");
  return cut == std::string::npos ? stem : stem.substr(0, cut);
}

void print_summary(const EvalReport& report) {
  for (const auto& d : report.datasets) {
    std::cout << d.dataset << " [" << d.strategy << "] evaluated=" << d.evaluated << " failed=" << d.failed;
    if (d.detection) {
      std::cout << " P=" << d.detection->macro_precision << " R=" << d.detection->macro_recall
                << " F1=" << d.detection->micro_f1;
    }
    if (d.reasoning.fre_mean) std::cout << " F=" << *d.reasoning.fre_mean;
    if (d.reasoning.fre_std) std::cout << " S=" << *d.reasoning.fre_std;
    if (d.reasoning.human_mean) std::cout << " H=" << *d.reasoning.human_mean << " B=" << *d.reasoning.b;
    else std::cout << " H=pending";
    std::cout << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("ironylab"));
  spdlog::set_pattern("%^%l%$: %v");

  CLI::App app{"Irony detection and explanation experiments with prompted language models"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  // run
  auto* run = app.add_subcommand("run", "Run an experiment from a TOML config");
  fs::path config_path;
  std::string dataset, strategy, provider, model;
  std::optional<std::size_t> limit, parallelism;
  std::optional<std::uint64_t> seed;
  std::optional<fs::path> out_dir, mock_script, cache_dir;
  bool do_resume = false;
  run->add_option("--config", config_path, "Experiment config")->required()->check(CLI::ExistingFile);
  run->add_option("--dataset", dataset, "Only this dataset from the config");
  run->add_option("--strategy", strategy, "idadp, zero-cot, auto-cot, ape, ps, ps-plus or plain");
  run->add_option("--provider", provider, "openai, gemini or mock");
  run->add_option("--model", model, "Model name");
  run->add_option("--limit", limit, "Sample this many statements per dataset");
  run->add_option("--seed", seed, "Sampling seed");
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--parallelism", parallelism, "Statements in flight");
  run->add_option("--mock-script", mock_script, "Scripted responses for the mock provider");
  run->add_option("--cache", cache_dir, "Response cache directory");
  run->add_flag("--resume", do_resume, "Skip statements already in the result logs");

  // report
  auto* report = app.add_subcommand("report", "Recompute metrics from a result log");
  fs::path report_log;
  std::optional<fs::path> report_annotations, report_out;
  std::string report_dataset;
  bool no_similarity = false;
  report->add_option("--log", report_log, "Result log (JSONL)")->required()->check(CLI::ExistingFile);
  report->add_option("--annotations", report_annotations, "Annotation store (JSONL)")->check(CLI::ExistingFile);
  report->add_option("--dataset", report_dataset, "Dataset name (default: from the log file name)");
  report->add_option("--out", report_out, "Write report.json and report.csv here instead of printing");
  report->add_flag("--no-similarity", no_similarity, "Skip the understanding scores");

  // serve
  auto* serve = app.add_subcommand("serve", "Serve the annotation API over a result log");
  ServeOptions serve_opts;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<fs::path> serve_annotations, serve_static;
  serve->add_option("--log", serve_opts.log, "Result log (JSONL)")->required()->check(CLI::ExistingFile);
  serve->add_option("--annotations", serve_annotations, "Annotation store (default: <log>.annotations.jsonl)");
  serve->add_option("--static", serve_static, "UI bundle directory served at /");
  serve->add_option("--annotators", serve_opts.annotators, "Annotator ids for round-robin assignment")->delimiter(',');
  serve->add_flag("--reveal-gold", serve_opts.reveal_gold, "Include gold labels in item views");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port (0 picks one)");

  // knowledge extract
  auto* knowledge = app.add_subcommand("knowledge", "Irony knowledge bundle");
  knowledge->require_subcommand(1);
  auto* extract = knowledge->add_subcommand("extract", "Ask a model for a fresh knowledge bundle");
  std::string k_provider = "openai", k_model = "gpt-3.5-turbo";
  std::optional<fs::path> k_mock, k_cache, k_out;
  extract->add_option("--provider", k_provider, "openai, gemini or mock");
  extract->add_option("--model", k_model, "Model name");
  extract->add_option("--mock-script", k_mock, "Scripted responses for the mock provider");
  extract->add_option("--cache", k_cache, "Response cache directory");
  extract->add_option("--out", k_out, "Write the bundle JSON here");
  auto* show = knowledge->add_subcommand("show", "Print the frozen bundle");

  // prompts export
  auto* prompts = app.add_subcommand("prompts", "Prompt catalog");
  prompts->require_subcommand(1);
  auto* export_cmd = prompts->add_subcommand("export", "Write every template and a manifest");
  fs::path export_dir;
  export_cmd->add_option("--out", export_dir, "Target directory")->required();

  // corpus stats
  auto* corpus = app.add_subcommand("corpus", "Corpus utilities");
  corpus->require_subcommand(1);
  auto* corpus_stats = corpus->add_subcommand("stats", "Size, ironic ratio and mean length per dataset");
  fs::path stats_config;
  std::string stats_dataset;
  corpus_stats->add_option("--config", stats_config, "Experiment config or datasets file")->required()->check(CLI::ExistingFile);
  corpus_stats->add_option("--dataset", stats_dataset, "Only this dataset");

  CLI11_PARSE(app, argc, argv);
  if (verbose) spdlog::set_level(spdlog::level::debug);

  try {
    if (*run) {
      ExperimentConfig cfg = load_config(config_path);
      if (!dataset.empty()) select_dataset(cfg, dataset);
      if (!strategy.empty()) {
        auto m = method_from_string(strategy);
        if (!m) throw Error(ErrorCode::InvalidConfig, "unknown strategy '" + strategy + "'");
        cfg.strategy = *m;
      }
      if (!provider.empty()) {
        auto p = provider_from_string(provider);
        if (!p) throw Error(ErrorCode::InvalidConfig, "unknown provider '" + provider + "'");
        cfg.model.provider = *p;
      }
      if (!model.empty()) cfg.model.model = model;
      if (limit) cfg.limit = *limit;
      if (seed) cfg.seed = *seed;
      if (out_dir) cfg.out_dir = *out_dir;
      if (parallelism) cfg.parallelism = *parallelism;
      if (mock_script) cfg.mock_script = *mock_script;
      if (cache_dir) cfg.cache_dir = *cache_dir;

      RunOptions opts;
      opts.progress = [](std::size_t n, std::size_t total, const StatementRecord&, const StatementOutcome&) {
        if (n == total || n % 50 == 0) spdlog::info("{}/{} statements", n, total);
      };
      const RunOutput result = do_resume ? resume(cfg, opts) : run_experiment(cfg, opts);
      print_summary(result.report);
      spdlog::info("live calls {}, cache hits {}, retries {}, resumed {}, failed {}", result.stats.live_calls,
                   result.stats.cache_hits, result.stats.retries, result.stats.resumed, result.stats.failed);
      spdlog::info("report written to {}", result.report_json.string());
      return 0;
    }

    if (*report) {
      const LogContents log = read_log(report_log);
      if (!log.quarantined.empty()) spdlog::warn("ignoring {} corrupt log line(s)", log.quarantined.size());
      std::vector<RubricAnnotation> ann;
      if (report_annotations) ann = load_rubric(*report_annotations);
      HashingEmbedder embedder;
      EvalReport r;
      r.strategy = log.records.empty() ? "" : log.records.front().strategy;
      r.provider = "";
      const std::string name = report_dataset.empty() ? dataset_from_log(report_log) : report_dataset;
      r.datasets.push_back(evaluate_records(name, log.records, ann, no_similarity ? nullptr : &embedder));
      if (report_out) {
        fs::create_directories(*report_out);
        text::write_file_atomic(*report_out / "report.json", report_json(r));
        text::write_file_atomic(*report_out / "report.csv", report_csv(r));
        print_summary(r);
      } else {
        std::cout << report_json(r);
      }
      return 0;
    }

    if (*serve) {
      serve_opts.annotations = serve_annotations;
      serve_opts.static_dir = serve_static;
      AnnotationServer server(serve_opts);
      const int bound = server.bind(host, port);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      spdlog::info("serving annotation API on http://{}:{}", host, bound);
      server.run();
      g_server = nullptr;
      return 0;
    }

    if (*extract) {
      ExperimentConfig cfg;
      auto p = provider_from_string(k_provider);
      if (!p) throw Error(ErrorCode::InvalidConfig, "unknown provider '" + k_provider + "'");
      cfg.model.provider = *p;
      cfg.model.model = k_model;
      cfg.mock_script = k_mock;
      cfg.cache_dir = k_cache;
      cfg.credentials.openai_key = process_env()("OPENAI_API_KEY").value_or("");
      cfg.credentials.gemini_key = process_env()("GEMINI_API_KEY").value_or("");
      if (auto base = process_env()("OPENAI_BASE_URL")) cfg.credentials.openai_base_url = *base;
      auto gateway = make_gateway(cfg);
      const KnowledgeBundle k = extract_knowledge(*gateway, cfg.model);
      nlohmann::json features = nlohmann::json::array();
      for (const auto& f : k.features) features.push_back({{"name", f.name}, {"description", f.description}});
      const nlohmann::json j = {{"definition", k.definition}, {"features", features}, {"procedure", k.procedure}};
      const std::string body = j.dump(2) + "\n";
      if (k_out) text::write_file_atomic(*k_out, body);
      else std::cout << body;
      return 0;
    }

    if (*show) {
      const KnowledgeBundle k = default_knowledge();
      std::cout << "Definition: " << k.definition << "\n";
      for (const auto& f : k.features) std::cout << "Feature: " << f.phrase() << "\n";
      for (std::size_t i = 0; i < k.procedure.size(); ++i) std::cout << i + 1 << ". " << k.procedure[i] << "\n";
      return 0;
    }

    if (*export_cmd) {
      export_catalog(export_dir);
      std::cout << "wrote " << catalog().size() << " templates to " << export_dir.string() << "\n";
      return 0;
    }

    if (*corpus_stats) {
      std::vector<DatasetSpec> specs;
      try {
        specs = load_config(stats_config).datasets;
      } catch (const Error&) {
        specs = load_dataset_specs(stats_config);
      }
      std::cout << "dataset,size,ironic_ratio,avg_token_length,skipped\n";
      for (const auto& spec : specs) {
        if (!stats_dataset.empty() && spec.name != stats_dataset) continue;
        const Corpus c = load_corpus(spec);
        const CorpusStats s = stats(c);
        std::cout << spec.name << "," << s.size << "," << s.ironic_ratio << "," << s.avg_token_length << ","
                  << c.skipped.size() << "\n";
      }
      return 0;
    }
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}

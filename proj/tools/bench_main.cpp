#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "gloran/bench.hpp"
#include "gloran/engine.hpp"

int main(int argc, char** argv) {
  CLI::App app{"range-delete strategy benchmark"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "emit a deterministic trace");
  std::string gen_spec, gen_out;
  gen->add_option("--spec", gen_spec, "workload spec file")->required();
  gen->add_option("--out", gen_out, "trace output path")->required();

  auto* run = app.add_subcommand("run", "replay a trace against one strategy");
  std::string run_trace_path, run_strategy, run_config, run_out, run_dir;
  bool run_no_oracle = false, run_gc = false;
  std::uint64_t run_recheck = 0;
  run->add_option("--trace", run_trace_path, "trace file")->required();
  run->add_option("--strategy", run_strategy,
                  "decomp|scan_delete|lookup_delete|lrr|gloran")
      ->required();
  run->add_option("--config", run_config, "store config file");
  run->add_option("--out", run_out, "machine-readable report path");
  run->add_option("--dir", run_dir, "store directory (default under data dir)");
  run->add_flag("--no-oracle", run_no_oracle, "skip shadow-oracle checking");
  run->add_flag("--gc", run_gc, "force bottommost compaction + GC at the end");
  run->add_option("--recheck", run_recheck,
                  "random gets verified against the oracle after the trace");

  auto* model = app.add_subcommand("model", "evaluate the analytic cost model");
  std::string model_params, model_out;
  model->add_option("--params", model_params, "cost parameter file");
  model->add_option("--out", model_out, "write the prediction to a file");

  auto* cmp = app.add_subcommand("compare", "tabulate saved reports");
  std::vector<std::string> cmp_reports;
  cmp->add_option("--reports", cmp_reports, "report files")
      ->required()
      ->expected(-1);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      gloran::WorkloadSpec spec = gloran::load_workload_file(gen_spec);
      gloran::write_trace_file(gen_out, gloran::generate_workload(spec));
      std::cout << "wrote " << spec.op_count << " ops to " << gen_out << "\n";
    } else if (run->parsed()) {
      std::vector<gloran::Operation> trace =
          gloran::load_trace_file(run_trace_path);
      gloran::StoreConfig cfg;
      if (!run_config.empty()) cfg = gloran::load_config_file(run_config);
      cfg.strategy = gloran::strategy_from_string(run_strategy);
      if (run_dir.empty()) {
        run_dir = gloran::default_data_dir() + "/" + run_strategy;
        std::filesystem::create_directories(gloran::default_data_dir());
      }
      gloran::RunOptions opts;
      opts.check_oracle = !run_no_oracle;
      opts.force_bottom_gc_at_end = run_gc;
      opts.recheck_gets = run_recheck;
      gloran::Metrics m = gloran::run_trace(trace, cfg, run_dir, opts);
      std::cout << gloran::metrics_report_text({m});
      if (!run_out.empty()) gloran::write_report_file(run_out, m);
      if (m.oracle_mismatches > 0) {
        std::cerr << "oracle mismatches: " << m.oracle_mismatches << "\n";
        return 1;
      }
    } else if (model->parsed()) {
      gloran::CostParams p;
      if (!model_params.empty()) p = gloran::load_cost_params_file(model_params);
      gloran::CostPrediction pred = gloran::cost_model(p);
      gloran::Metrics empty;
      std::string text = gloran::metrics_machine_text(empty, &pred);
      // only the model.* section is meaningful here
      std::istringstream in(text);
      std::string line;
      std::ostringstream out;
      while (std::getline(in, line))
        if (line.rfind("model.", 0) == 0) out << line << "\n";
      std::cout << out.str();
      if (!model_out.empty()) {
        std::ofstream f(model_out);
        f << out.str();
      }
    } else if (cmp->parsed()) {
      std::vector<gloran::Metrics> runs;
      for (const std::string& path : cmp_reports)
        runs.push_back(gloran::load_report_file(path));
      std::cout << gloran::metrics_report_text(runs);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

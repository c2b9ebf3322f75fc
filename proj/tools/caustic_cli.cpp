#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "caustic/caustic.hpp"

namespace {

std::vector<int> parse_thread_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      int t = std::stoi(tok);
      if (t < 1) throw std::invalid_argument("");
      out.push_back(t);
    } catch (const std::exception&) {
      throw caustic::error("bad thread count '" + tok + "'");
    }
  }
  if (out.empty()) throw caustic::error("empty thread list");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D laser propagation in underdense plasma"};
  app.require_subcommand(1);

  std::string cfg_path, outdir, resume, thread_list = "1,2,4,8";
  int threads = 0;

  CLI::App* cmd_run = app.add_subcommand("run", "advance the coupled field and fluid");
  cmd_run->add_option("config", cfg_path, "configuration file")->required();
  cmd_run->add_option("--output", outdir, "override output.dir");
  cmd_run->add_option("--resume", resume, "checkpoint file to resume from");
  cmd_run->add_option("--threads", threads, "override the thread count");

  CLI::App* cmd_bench = app.add_subcommand("bench", "thread-scaling sweep, writes bench.csv");
  cmd_bench->add_option("config", cfg_path, "configuration file")->required();
  cmd_bench->add_option("--threads", thread_list, "comma-separated thread counts");

  CLI::App* cmd_val = app.add_subcommand("validate", "parse and echo a configuration");
  cmd_val->add_option("config", cfg_path, "configuration file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    caustic::Config cfg = caustic::Config::parse_file(cfg_path);
    if (cmd_run->parsed()) {
      if (!outdir.empty()) cfg.set("output.dir", outdir);
      if (!resume.empty()) cfg.set("resume", resume);
      if (threads > 0) cfg.set("threads", std::to_string(threads));
      caustic::Setup s = caustic::parse_setup(cfg);
      caustic::RunResult r = caustic::run_simulation(s, std::cout);
      std::cout << "done: " << r.records.size() << " steps, outputs in " << s.outdir << "\n";
    } else if (cmd_bench->parsed()) {
      caustic::run_benchmark(cfg, parse_thread_list(thread_list), std::cout);
    } else {
      caustic::validate_config(cfg, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

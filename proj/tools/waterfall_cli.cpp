// Command-line front end: simulate, reproduce, ingest, bruteforce.

#include <exception>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "waterfall/errors.hpp"
#include "waterfall/experiment.hpp"
#include "waterfall/ingest.hpp"

namespace wf = waterfall;

namespace {

void emit(const std::vector<wf::MetricsRow>& rows, const std::string& out) {
  if (out.empty() || out == "-") {
    wf::write_csv(rows, std::cout);
  } else {
    wf::write_csv(rows, out);
    std::cerr << "wrote " << rows.size() << " rows to " << out << '\n';
  }
}

void print_action(const wf::Action& a, const wf::PriceGrid& grid) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::cout << (i ? " -> " : "") << "network " << a[i].network << " @ " << grid[a[i].price_idx];
  }
  std::cout << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Waterfall bandit simulator"};
  app.require_subcommand(1);
  bool serial = false;
  app.add_flag("--serial", serial, "Run replications on one thread (reference path)");

  auto* sim = app.add_subcommand("simulate", "Run an experiment described by a config file");
  std::string sim_config, sim_out;
  std::optional<std::uint64_t> sim_seed;
  sim->add_option("--config", sim_config, "Experiment config (JSON)")->required();
  sim->add_option("--out", sim_out, "CSV output path (default: config 'output', else stdout)");
  sim->add_option("--seed", sim_seed, "Override the base seed");

  auto* rep = app.add_subcommand("reproduce", "Run one of the built-in figure experiments");
  wf::FigureRequest req;
  std::string rep_out;
  rep->add_option("--figure", req.figure, "Figure id")->required()->check(CLI::IsMember(wf::figure_ids()));
  rep->add_option("--data", req.data, "Bid log (needed for fig2*-fig5*)");
  rep->add_option("--out", rep_out, "CSV output path (default: stdout)");
  rep->add_option("--horizon", req.horizon, "Override the number of steps");
  rep->add_option("--replications", req.replications, "Override the number of replications");
  rep->add_option("--seed", req.seed, "Base seed");

  auto* ing = app.add_subcommand("ingest", "Estimate per-slot acceptance tables from a bid log");
  std::string ing_input, ing_out;
  std::size_t ing_slots = 20;
  wf::SlotModelOptions ing_opts;
  bool lenient = false;
  ing->add_option("--input", ing_input, "Bid log")->required();
  ing->add_option("--slots", ing_slots, "Number of most active slots to keep")->required()->check(CLI::PositiveNumber);
  ing->add_option("--out", ing_out, "Model file (JSON)")->required();
  ing->add_option("--divisor", ing_opts.price_divisor, "Raw price divisor")->check(CLI::PositiveNumber);
  ing->add_flag("--lenient", lenient, "Use the modal price when an advertiser's winning price varies");

  auto* bf = app.add_subcommand("bruteforce", "Print the optimal action of a small instance");
  std::string bf_config;
  bf->add_option("--config", bf_config, "Experiment config (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and friends exit 0; bad arguments are configuration errors.
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  const wf::Execution exec = serial ? wf::Execution::Serial : wf::Execution::Parallel;

  try {
    if (*sim) {
      wf::ExperimentSpec spec = wf::load_experiment_config(sim_config);
      if (sim_seed) spec.seed = *sim_seed;
      emit(wf::run(spec, exec), sim_out.empty() ? spec.output : sim_out);
    } else if (*rep) {
      emit(wf::reproduce(req, exec), rep_out);
    } else if (*ing) {
      ing_opts.strict = !lenient;
      const auto records = wf::parse_log(ing_input);
      const auto model = wf::build_model_file(records, ing_slots, wf::PriceGrid::uniform(11), ing_opts);
      wf::write_model_file(model, ing_out);
      std::cerr << "wrote " << model.slots.size() << " slot models over " << model.networks.size()
                << " networks to " << ing_out << '\n';
    } else if (*bf) {
      const wf::ExperimentSpec spec = wf::load_experiment_config(bf_config);
      const wf::Environment env(spec.env, spec.grid, spec.seed);
      std::cout << std::setprecision(12);
      for (std::size_t s = 0; s < env.slots(); ++s) {
        const auto best = wf::brute_force_optimum(env.true_acceptance_table(s), spec.grid, spec.brute_force_cap);
        if (env.slots() > 1) std::cout << "slot " << s << ": ";
        print_action(best.action, spec.grid);
        std::cout << "expected revenue " << best.value << '\n';
      }
    }
  } catch (const wf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const wf::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const wf::ContractError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

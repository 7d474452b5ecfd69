#include "waterfall/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>

#include <omp.h>

#include "waterfall/errors.hpp"
#include "waterfall/ingest.hpp"

namespace waterfall {

namespace {

std::string default_label(const PolicySpec& p) {
  const std::string oracle(to_string(p.oracle));
  switch (p.kind) {
    case PolicyKind::Offline:
      return "Offline-" + oracle;
    case PolicyKind::ExploreExploit:
      return "Exp2-" + oracle;
    case PolicyKind::WaterfallUcb1:
      return (p.joint ? "Joint-UCB-" : "UCB-") + oracle;
  }
  return oracle;
}

double policy_gamma(const ExperimentSpec& spec, const PolicySpec& p) {
  return spec.gamma.value_or(Oracle(p.oracle).default_gamma());
}

}  // namespace

void validate(const ExperimentSpec& spec) {
  if (spec.policies.empty()) throw ConfigError("experiment needs at least one policy");
  if (spec.horizon < 1) throw ConfigError("horizon must be at least 1");
  if (spec.replications < 1) throw ConfigError("replications must be at least 1");
  if (spec.metrics_every < 1) throw ConfigError("metrics_every must be at least 1");
  if (spec.gamma && !(*spec.gamma > 0.0 && *spec.gamma <= 1.0)) throw ConfigError("gamma must lie in (0, 1]");
  std::vector<std::string> seen;
  for (const PolicySpec& p : spec.policies) {
    if (p.label.empty()) throw ConfigError("policy label must not be empty");
    if (p.label.find_first_of(",\"\n\r") != std::string::npos) {
      throw ConfigError("policy label '" + p.label + "' must not contain commas, quotes or newlines");
    }
    if (std::find(seen.begin(), seen.end(), p.label) != seen.end()) {
      throw ConfigError("duplicate policy label '" + p.label + "'");
    }
    seen.push_back(p.label);
  }
  try {
    Environment env(spec.env, spec.grid, spec.seed);
  } catch (const ContractError& e) {
    throw ConfigError(std::string("invalid environment: ") + e.what());
  }
}

// ---- config parsing ----

namespace {

WeightTable table_from_json(const nlohmann::json& rows, const PriceGrid& grid) {
  const auto r = rows.get<std::vector<std::vector<double>>>();
  if (r.empty()) throw ConfigError("weight table must have at least one row");
  std::vector<double> flat;
  for (const auto& row : r) {
    if (row.size() != grid.size()) throw ConfigError("weight table row length does not match the price grid");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  try {
    return WeightTable(r.size(), grid.size(), std::move(flat));
  } catch (const ContractError& e) {
    throw ConfigError(e.what());
  }
}

std::string resolve(const std::string& base_dir, const std::string& path) {
  const std::filesystem::path p(path);
  return p.is_absolute() ? path : (std::filesystem::path(base_dir) / p).string();
}

PolicyKind parse_policy_kind(const std::string& s) {
  if (s == "ucb" || s == "waterfall_ucb1") return PolicyKind::WaterfallUcb1;
  if (s == "exp2" || s == "explore_exploit") return PolicyKind::ExploreExploit;
  if (s == "offline") return PolicyKind::Offline;
  throw ConfigError("unknown policy kind '" + s + "' (expected ucb, exp2 or offline)");
}

}  // namespace

EnvSpec parse_env_spec(const nlohmann::json& j, const PriceGrid& grid, const std::string& base_dir) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "beta") {
    BetaSpec b{j.at("alpha").get<std::vector<double>>(), j.at("beta").get<std::vector<double>>()};
    return EnvSpec{b};
  }
  if (kind == "table") {
    if (j.contains("model")) {
      const ModelFile model = read_model_file(resolve(base_dir, j.at("model").get<std::string>()));
      if (!(model.grid == grid)) throw ConfigError("model file grid differs from the experiment grid");
      const SlotModel& s = j.contains("slot") ? model.slot(j.at("slot").get<std::string>()) : model.slots.at(0);
      return EnvSpec{TableSpec{s.table}};
    }
    return EnvSpec{TableSpec{table_from_json(j.at("weights"), grid)}};
  }
  if (kind == "aggregated") {
    const EnvSpec base = parse_env_spec(j.at("base"), grid, base_dir);
    const auto* t = std::get_if<TableSpec>(&base.kind);
    if (!t) throw ConfigError("aggregated environment needs a table base");
    return EnvSpec{AggregatedSpec{t->table, j.at("groups").get<std::vector<std::vector<std::size_t>>>()}};
  }
  if (kind == "multislot") {
    MultiSlotSpec ms;
    for (const auto& s : j.at("slots")) ms.slots.push_back(parse_env_spec(s, grid, base_dir));
    return EnvSpec{std::move(ms)};
  }
  throw ConfigError("unknown environment kind '" + kind + "'");
}

ExperimentSpec parse_experiment_config(const nlohmann::json& j, const std::string& base_dir) {
  try {
    ExperimentSpec spec;
    spec.name = j.value("name", std::string("experiment"));
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      spec.grid = g.is_object() ? PriceGrid::uniform(g.at("uniform").get<std::size_t>())
                                : PriceGrid(g.get<std::vector<double>>());
    }
    spec.env = parse_env_spec(j.at("env"), spec.grid, base_dir);
    for (const auto& jp : j.at("policies")) {
      PolicySpec p;
      p.kind = parse_policy_kind(jp.at("kind").get<std::string>());
      p.oracle = parse_oracle_kind(jp.value("oracle", std::string("greedy")));
      p.n0 = jp.value("n0", std::uint64_t{500});
      p.joint = jp.value("joint", false);
      p.label = jp.value("label", default_label(p));
      spec.policies.push_back(std::move(p));
    }
    spec.horizon = j.at("horizon").get<std::uint64_t>();
    spec.replications = j.value("replications", std::uint64_t{1});
    spec.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("gamma")) spec.gamma = j.at("gamma").get<double>();
    spec.metrics_every = j.value("metrics_every", std::uint64_t{100});
    spec.output = j.value("output", std::string());
    spec.brute_force_cap = j.value("brute_force_cap", kDefaultBruteForceCap);
    validate(spec);
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const ContractError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ExperimentSpec load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_experiment_config(j, std::filesystem::path(path).parent_path().string());
}

// ---- regret ----

RegretAccumulator::RegretAccumulator(std::vector<WeightTable> truth, PriceGrid grid, double gamma, std::uint64_t cap)
    : truth_(std::move(truth)), grid_(std::move(grid)), gamma_(gamma) {
  for (const WeightTable& w : truth_) optimum_.push_back(brute_force_optimum(w, grid_, cap).value);
}

void RegretAccumulator::add(const Action& action, std::size_t slot) {
  regret_ += gamma_ * optimum_[slot] - expected_revenue(action, truth_[slot], grid_);
}

std::vector<double> scaled_regret(const std::vector<Action>& actions, const WeightTable& truth, const PriceGrid& grid,
                                  double gamma, std::uint64_t cap) {
  RegretAccumulator acc({truth}, grid, gamma, cap);
  std::vector<double> out;
  out.reserve(actions.size());
  for (const Action& a : actions) {
    acc.add(a);
    out.push_back(acc.value());
  }
  return out;
}

bool regret_available(const Environment& env, std::uint64_t cap) {
  return brute_force_evaluations(env.networks(), env.grid().size()) <= cap;
}

std::vector<std::uint64_t> logged_steps(std::uint64_t horizon, std::uint64_t every) {
  std::vector<std::uint64_t> steps{1};
  for (std::uint64_t t = every; t <= horizon; t += every) {
    if (t > 1) steps.push_back(t);
  }
  if (steps.back() != horizon) steps.push_back(horizon);
  return steps;
}

// ---- runner ----

namespace {

struct Shared {
  std::vector<std::uint64_t> steps;
  std::size_t slots = 1;
  std::vector<std::vector<Action>> offline;            // [policy][slot]
  std::vector<std::optional<RegretAccumulator>> regret;  // [policy]
};

Trajectory run_one(const ExperimentSpec& spec, const Shared& shared, std::size_t j, std::uint64_t r) {
  const PolicySpec& ps = spec.policies[j];
  const std::uint64_t seed = spec.seed + r;
  Environment env(spec.env, spec.grid, seed);
  const std::size_t slots = env.slots();
  const Oracle oracle(ps.oracle);

  std::vector<Policy> learners;
  if (ps.kind == PolicyKind::Offline) {
    for (std::size_t s = 0; s < slots; ++s) learners.push_back(Policy::offline(shared.offline[j][s], spec.grid));
  } else {
    const std::size_t count = (slots > 1 && !ps.joint) ? slots : 1;
    for (std::size_t s = 0; s < count; ++s) {
      const std::uint64_t explore_seed = CounterRng::mix(CounterRng::mix(seed) ^ (j + 1)) ^ s;
      learners.push_back(ps.kind == PolicyKind::WaterfallUcb1
                             ? Policy::waterfall_ucb1(oracle, spec.grid, env.networks())
                             : Policy::explore_exploit(oracle, spec.grid, env.networks(), ps.n0, explore_seed));
      if (count > 1) {
        learners.back().initialize(env, s);
      } else {
        learners.back().initialize(env, slots > 1 ? std::nullopt : std::optional<std::size_t>(0));
      }
    }
  }

  std::optional<RegretAccumulator> regret = shared.regret[j];
  Trajectory tr;
  tr.cumulative.reserve(shared.steps.size());
  std::vector<double> slot_cum(slots, 0.0);
  double cum = 0.0;
  std::size_t next = 0;
  for (std::uint64_t t = 1; t <= spec.horizon; ++t) {
    const std::size_t s = env.next_slot();
    Policy& pol = learners.size() > 1 ? learners[s] : learners[0];
    const Action action = pol.select_action();
    const StepOutcome out = env.run_waterfall(action);
    pol.update(action, out.feedback);
    cum += out.revenue;
    slot_cum[s] += out.revenue;
    if (regret) regret->add(action, s);
    if (t == shared.steps[next]) {
      tr.cumulative.push_back(cum);
      if (regret) tr.regret.push_back(regret->value());
      tr.slot_cumulative.push_back(slot_cum);
      ++next;
    }
  }
  return tr;
}

}  // namespace

RunResult run_trajectories(const ExperimentSpec& spec, Execution exec) {
  validate(spec);
  const Environment probe_env(spec.env, spec.grid, spec.seed);
  Shared shared;
  shared.steps = logged_steps(spec.horizon, spec.metrics_every);
  shared.slots = probe_env.slots();
  std::vector<WeightTable> truth;
  for (std::size_t s = 0; s < shared.slots; ++s) truth.push_back(probe_env.true_acceptance_table(s));
  const bool with_regret = regret_available(probe_env, spec.brute_force_cap);

  for (const PolicySpec& ps : spec.policies) {
    std::vector<Action> offline;
    if (ps.kind == PolicyKind::Offline) {
      for (const WeightTable& w : truth) offline.push_back(Oracle(ps.oracle)(w, spec.grid));
    }
    shared.offline.push_back(std::move(offline));
    if (with_regret) {
      shared.regret.emplace_back(RegretAccumulator(truth, spec.grid, policy_gamma(spec, ps), spec.brute_force_cap));
    } else {
      shared.regret.emplace_back(std::nullopt);
    }
  }

  const std::size_t policies = spec.policies.size();
  const std::size_t tasks = policies * spec.replications;
  std::vector<Trajectory> results(tasks);
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(tasks); ++i) {
      const auto u = static_cast<std::size_t>(i);
      results[u] = run_one(spec, shared, u % policies, u / policies);
    }
  } else {
    for (std::size_t i = 0; i < tasks; ++i) results[i] = run_one(spec, shared, i % policies, i / policies);
  }

  RunResult out;
  out.steps = shared.steps;
  out.slots = shared.slots;
  out.runs.resize(policies);
  for (std::size_t j = 0; j < policies; ++j) {
    out.labels.push_back(spec.policies[j].label);
    for (std::uint64_t r = 0; r < spec.replications; ++r) out.runs[j].push_back(std::move(results[r * policies + j]));
  }
  return out;
}

std::vector<MetricsRow> summarize(const std::vector<RunResult>& parts) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const Trajectory*>> by_label;
  std::map<std::string, const RunResult*> owner;
  for (const RunResult& part : parts) {
    for (std::size_t j = 0; j < part.labels.size(); ++j) {
      const std::string& label = part.labels[j];
      if (!by_label.count(label)) {
        order.push_back(label);
        owner[label] = &part;
      } else if (owner[label]->steps != part.steps) {
        throw ConfigError("cannot pool '" + label + "': runs log different steps");
      }
      for (const Trajectory& t : part.runs[j]) by_label[label].push_back(&t);
    }
  }

  std::vector<MetricsRow> rows;
  for (const std::string& label : order) {
    const auto& trs = by_label[label];
    const auto& steps = owner[label]->steps;
    const double n = static_cast<double>(trs.size());
    const bool regret = std::all_of(trs.begin(), trs.end(), [](const Trajectory* t) { return !t->regret.empty(); });
    const std::size_t slots = trs.front()->slot_cumulative.empty() ? 0 : trs.front()->slot_cumulative[0].size();
    const bool same_slots = std::all_of(trs.begin(), trs.end(), [&](const Trajectory* t) {
      return !t->slot_cumulative.empty() && t->slot_cumulative[0].size() == slots;
    });
    for (std::size_t i = 0; i < steps.size(); ++i) {
      MetricsRow row;
      row.step = steps[i];
      row.label = label;
      double sum = 0.0;
      for (const Trajectory* t : trs) sum += t->cumulative[i];
      row.cumulative_reward = sum / n;
      if (trs.size() > 1) {
        double ss = 0.0;
        for (const Trajectory* t : trs) ss += (t->cumulative[i] - row.cumulative_reward) * (t->cumulative[i] - row.cumulative_reward);
        row.reward_std = std::sqrt(ss / (n - 1.0));
      }
      row.running_avg = row.cumulative_reward / static_cast<double>(row.step);
      if (regret) {
        double rs = 0.0;
        for (const Trajectory* t : trs) rs += t->regret[i];
        row.scaled_regret = rs / n;
      }
      if (same_slots && slots > 1) {
        row.slot_cumulative.assign(slots, 0.0);
        for (const Trajectory* t : trs)
          for (std::size_t s = 0; s < slots; ++s) row.slot_cumulative[s] += t->slot_cumulative[i][s] / n;
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<MetricsRow> run(const ExperimentSpec& spec, Execution exec) { return summarize({run_trajectories(spec, exec)}); }

void write_csv(const std::vector<MetricsRow>& rows, std::ostream& out) {
  out << "step,label,replication_mean_reward,replication_std,running_avg,scaled_regret\n";
  out << std::setprecision(12);
  for (const MetricsRow& r : rows) {
    out << r.step << ',' << r.label << ',' << r.cumulative_reward << ',' << r.reward_std << ',' << r.running_avg << ',';
    if (r.scaled_regret) out << *r.scaled_regret;
    out << '\n';
  }
}

void write_csv(const std::vector<MetricsRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write CSV '" + path + "'");
  write_csv(rows, out);
}

const MetricsRow& find_row(const std::vector<MetricsRow>& rows, const std::string& label, std::uint64_t step) {
  for (const MetricsRow& r : rows) {
    if (r.label == label && r.step == step) return r;
  }
  throw ContractError("no metrics row for '" + label + "' at step " + std::to_string(step));
}

}  // namespace waterfall

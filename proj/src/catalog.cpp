#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "waterfall/errors.hpp"
#include "waterfall/experiment.hpp"
#include "waterfall/ingest.hpp"

namespace waterfall {

namespace {

constexpr std::size_t kActiveSlots = 20;

PolicySpec policy(PolicyKind kind, OracleKind oracle, bool joint = false) {
  PolicySpec p;
  p.kind = kind;
  p.oracle = oracle;
  p.joint = joint;
  const std::string o(to_string(oracle));
  switch (kind) {
    case PolicyKind::Offline:
      p.label = "Offline-" + o;
      break;
    case PolicyKind::ExploreExploit:
      p.label = "Exp2-" + o;
      break;
    case PolicyKind::WaterfallUcb1:
      p.label = (joint ? "Joint-UCB-" : "UCB-") + o;
      break;
  }
  return p;
}

std::vector<OracleKind> both() { return {OracleKind::Greedy, OracleKind::Lp}; }

ExperimentSpec base_spec(const FigureRequest& req, std::string name, std::uint64_t horizon, std::uint64_t reps) {
  ExperimentSpec s;
  s.name = std::move(name);
  s.grid = PriceGrid::uniform(11);
  s.horizon = req.horizon.value_or(horizon);
  s.replications = req.replications.value_or(reps);
  s.seed = req.seed;
  s.metrics_every = 100;
  return s;
}

ModelFile load_active(const FigureRequest& req) {
  if (!req.data) {
    throw DataError("figure " + req.figure +
                    " needs a bid log (--data). Expected a text file with header "
                    "'slot_id,advertiser_id,winning_price' (optionally ',count'), one winning bid per row; "
                    "convert auction logs to this format first");
  }
  SlotModelOptions opts;
  opts.strict = false;
  return build_model_file(parse_log(*req.data), kActiveSlots, PriceGrid::uniform(11), opts);
}

// Group sizes for h groups of `k` networks, scaled from the 9-network
// configurations 6+3 and 4+4+1.
std::vector<std::size_t> group_sizes(std::size_t k, std::size_t h) {
  if (h >= k) return std::vector<std::size_t>(k, 1);
  if (k < 3) throw DataError("aggregation figures need at least three networks");
  std::vector<std::size_t> sizes;
  if (h == 2) {
    const auto first = std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(2.0 * k / 3.0)), 1, k - 1);
    sizes = {first, k - first};
  } else {
    const auto four = std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(4.0 * k / 9.0)), 1, (k - 1) / 2);
    sizes = {four, four, k - 2 * four};
  }
  return sizes;
}

std::vector<std::vector<std::size_t>> contiguous(const std::vector<std::size_t>& sizes) {
  std::vector<std::vector<std::size_t>> g;
  std::size_t next = 0;
  for (std::size_t s : sizes) {
    g.emplace_back(s);
    std::iota(g.back().begin(), g.back().end(), next);
    next += s;
  }
  return g;
}

}  // namespace

EnvSpec synthetic_beta_env() { return EnvSpec{BetaSpec{{5.0, 2.0, 2.0, 2.0}, {2.0, 5.0, 5.0, 5.0}}}; }

std::vector<std::vector<std::size_t>> random_partition(std::size_t networks, const std::vector<std::size_t>& sizes,
                                                       std::uint64_t seed) {
  require(std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}) == networks, "group sizes must sum to K");
  std::vector<std::size_t> order(networks);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::size_t>> groups;
  std::size_t next = 0;
  for (std::size_t s : sizes) {
    groups.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(next),
                        order.begin() + static_cast<std::ptrdiff_t>(next + s));
    std::sort(groups.back().begin(), groups.back().end());
    next += s;
  }
  return groups;
}

std::vector<std::string> figure_ids() {
  return {"fig1a", "fig1b", "fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b", "fig5a", "fig5b"};
}

std::vector<ExperimentSpec> figure_specs(const FigureRequest& req) {
  const std::string& f = req.figure;
  std::vector<ExperimentSpec> out;

  if (f == "fig1a" || f == "fig1b") {
    const OracleKind o = f == "fig1a" ? OracleKind::Greedy : OracleKind::Lp;
    ExperimentSpec s = base_spec(req, f, f == "fig1a" ? 100'000 : 300'000, 10);
    s.env = synthetic_beta_env();
    s.policies = {policy(PolicyKind::Offline, o), policy(PolicyKind::WaterfallUcb1, o),
                  policy(PolicyKind::ExploreExploit, o)};
    out.push_back(std::move(s));
    return out;
  }

  const auto known = figure_ids();
  if (std::find(known.begin(), known.end(), f) == known.end()) {
    throw ConfigError("unknown figure '" + f + "'");
  }
  const ModelFile model = load_active(req);
  const std::size_t k = model.networks.size();

  if (f == "fig2a" || f == "fig2b") {
    const std::size_t n_slots = f == "fig2a" ? 1 : std::min<std::size_t>(10, model.slots.size());
    for (std::size_t i = 0; i < n_slots; ++i) {
      ExperimentSpec s = base_spec(req, f + "/" + model.slots[i].slot_id, 100'000, 5);
      s.seed = req.seed + 7919 * i;
      s.env = EnvSpec{TableSpec{model.slots[i].table}};
      for (OracleKind o : both()) s.policies.push_back(policy(PolicyKind::Offline, o));
      for (OracleKind o : both()) s.policies.push_back(policy(PolicyKind::WaterfallUcb1, o));
      out.push_back(std::move(s));
    }
    return out;
  }

  if (f == "fig3a" || f == "fig3b") {
    const std::size_t m = std::min<std::size_t>(f == "fig3a" ? 5 : 20, model.slots.size());
    ExperimentSpec s = base_spec(req, f, 100'000, 5);
    MultiSlotSpec ms;
    for (std::size_t i = 0; i < m; ++i) ms.slots.push_back(EnvSpec{TableSpec{model.slots[i].table}});
    s.env = EnvSpec{std::move(ms)};
    for (OracleKind o : both()) {
      s.policies.push_back(policy(PolicyKind::Offline, o));
      s.policies.push_back(policy(PolicyKind::WaterfallUcb1, o));
      s.policies.push_back(policy(PolicyKind::WaterfallUcb1, o, true));
    }
    out.push_back(std::move(s));
    return out;
  }

  const WeightTable& top = model.slots.front().table;
  if (f == "fig4a" || f == "fig4b") {
    const auto sizes = group_sizes(k, 2);
    const std::size_t variants = f == "fig4a" ? 1 : 10;
    for (std::size_t v = 0; v < variants; ++v) {
      ExperimentSpec s = base_spec(req, f + "/" + std::to_string(v), 100'000, f == "fig4a" ? 5 : 1);
      s.seed = req.seed + 7919 * v;
      const auto groups = f == "fig4a" ? contiguous(sizes) : random_partition(k, sizes, req.seed * 1000 + v);
      s.env = EnvSpec{AggregatedSpec{top, groups}};
      for (OracleKind o : both()) {
        s.policies.push_back(policy(PolicyKind::Offline, o));
        s.policies.push_back(policy(PolicyKind::WaterfallUcb1, o));
      }
      out.push_back(std::move(s));
    }
    return out;
  }

  // fig5a / fig5b: aggregation configurations, 10 random partitions each.
  const OracleKind o = f == "fig5a" ? OracleKind::Greedy : OracleKind::Lp;
  for (std::size_t h : {std::size_t{2}, std::size_t{3}, k}) {
    const auto sizes = group_sizes(k, h);
    const std::string tag = " (h=" + std::to_string(sizes.size()) + ")";
    for (std::size_t v = 0; v < 10; ++v) {
      ExperimentSpec s = base_spec(req, f + "/h" + std::to_string(sizes.size()) + "/" + std::to_string(v),
                                   f == "fig5a" ? 100'000 : 500'000, 1);
      s.seed = req.seed + 7919 * v + 104729 * h;
      s.env = EnvSpec{AggregatedSpec{top, random_partition(k, sizes, req.seed * 1000 + 100 * h + v)}};
      PolicySpec off = policy(PolicyKind::Offline, o);
      PolicySpec ucb = policy(PolicyKind::WaterfallUcb1, o);
      off.label += tag;
      ucb.label += tag;
      s.policies = {off, ucb};
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::vector<MetricsRow> reproduce(const FigureRequest& request, Execution exec) {
  std::vector<RunResult> parts;
  for (const ExperimentSpec& s : figure_specs(request)) parts.push_back(run_trajectories(s, exec));
  return summarize(parts);
}

}  // namespace waterfall

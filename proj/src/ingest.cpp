#include "waterfall/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "waterfall/errors.hpp"

namespace waterfall {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(delim, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string where(std::string_view source, std::size_t line_no) {
  return std::string(source) + ":" + std::to_string(line_no);
}

}  // namespace

void warn_to_stderr(std::string_view msg) { std::cerr << "warning: " << msg << '\n'; }

std::vector<BidRecord> parse_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open bid log '" + path + "'");
  return parse_log(in, path);
}

std::vector<BidRecord> parse_log(std::istream& in, std::string_view source) {
  std::vector<BidRecord> records;
  std::string raw;
  std::size_t line_no = 0;
  bool have_header = false;
  bool with_count = false;
  char delim = ',';
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    if (line.empty() || line.front() == '#') continue;

    if (!have_header) {
      delim = line.find('\t') != std::string_view::npos ? '\t' : ',';
      const auto cols = split(line, delim);
      const bool base = cols.size() >= 3 && cols[0] == "slot_id" && cols[1] == "advertiser_id" &&
                        cols[2] == "winning_price";
      if (!base || cols.size() > 4 || (cols.size() == 4 && cols[3] != "count")) {
        throw DataError(where(source, line_no) +
                        ": expected header 'slot_id,advertiser_id,winning_price[,count]'");
      }
      with_count = cols.size() == 4;
      have_header = true;
      continue;
    }

    const auto cols = split(line, delim);
    const std::size_t expected = with_count ? 4 : 3;
    if (cols.size() != expected) {
      throw DataError(where(source, line_no) + ": expected " + std::to_string(expected) + " columns, found " +
                      std::to_string(cols.size()));
    }
    BidRecord r;
    r.slot_id = std::string(cols[0]);
    r.advertiser_id = std::string(cols[1]);
    if (r.slot_id.empty() || r.advertiser_id.empty()) {
      throw DataError(where(source, line_no) + ": empty slot or advertiser id");
    }
    const auto price = cols[2];
    auto [end, ec] = std::from_chars(price.data(), price.data() + price.size(), r.winning_price);
    if (ec != std::errc() || end != price.data() + price.size() || !std::isfinite(r.winning_price)) {
      throw DataError(where(source, line_no) + ": unparseable winning price '" + std::string(price) + "'");
    }
    if (r.winning_price < 0.0) {
      throw DataError(where(source, line_no) + ": negative winning price '" + std::string(price) + "'");
    }
    if (with_count) {
      const auto c = cols[3];
      auto [cend, cec] = std::from_chars(c.data(), c.data() + c.size(), r.count);
      if (cec != std::errc() || cend != c.data() + c.size() || r.count == 0) {
        throw DataError(where(source, line_no) + ": count must be a positive integer, got '" + std::string(c) + "'");
      }
    }
    records.push_back(std::move(r));
  }
  if (!have_header) throw DataError(std::string(source) + ": missing header row");
  return records;
}

SlotModel build_slot_model(const std::vector<BidRecord>& records, std::string_view slot_id, const PriceGrid& grid,
                           const SlotModelOptions& options, const WarningSink& warn) {
  require(options.price_divisor > 0.0, "price divisor must be positive");

  // advertiser -> (raw price -> wins)
  std::map<std::string, std::map<double, std::uint64_t>> wins;
  for (const BidRecord& r : records) {
    if (r.slot_id == slot_id) wins[r.advertiser_id][r.winning_price] += r.count;
  }
  if (wins.empty()) throw DataError("no records for slot '" + std::string(slot_id) + "'");

  SlotModel model;
  model.slot_id = std::string(slot_id);
  if (options.networks) {
    model.networks = *options.networks;
    for (const auto& [adv, _] : wins) {
      if (std::find(model.networks.begin(), model.networks.end(), adv) == model.networks.end()) {
        throw DataError("advertiser '" + adv + "' on slot '" + model.slot_id + "' is not in the network list");
      }
    }
  } else {
    for (const auto& [adv, _] : wins) model.networks.push_back(adv);
  }

  const std::size_t k = model.networks.size();
  model.win_counts.assign(k, 0);
  model.win_price.assign(k, 0.0);
  std::uint64_t total = 0;
  for (std::size_t a = 0; a < k; ++a) {
    auto it = wins.find(model.networks[a]);
    if (it == wins.end()) continue;
    const auto& prices = it->second;
    double raw = prices.begin()->first;
    std::uint64_t count = 0;
    std::uint64_t best = 0;
    for (const auto& [price, n] : prices) {
      count += n;
      if (n > best) {
        best = n;
        raw = price;
      }
    }
    if (prices.size() > 1) {
      const std::string msg = "advertiser '" + model.networks[a] + "' has " + std::to_string(prices.size()) +
                              " distinct winning prices on slot '" + model.slot_id + "'";
      if (options.strict) throw DataError(msg);
      std::ostringstream os;
      os << msg << "; using the modal price " << raw;
      warn(os.str());
    }
    double v = raw / options.price_divisor;
    if (v > 1.0) {
      std::ostringstream os;
      os << "winning price " << raw << " of advertiser '" << model.networks[a] << "' exceeds the divisor "
         << options.price_divisor << "; clamped to 1";
      warn(os.str());
      v = 1.0;
    }
    model.win_counts[a] = count;
    model.win_price[a] = v;
    total += count;
  }

  model.table = WeightTable(k, grid.size());
  for (std::size_t a = 0; a < k; ++a) {
    const double share = static_cast<double>(model.win_counts[a]) / static_cast<double>(total);
    for (std::size_t p = 0; p < grid.size(); ++p) {
      const double price = grid[p];
      model.table.set(a, p, price == 0.0 ? 1.0 : (price <= model.win_price[a] ? share : 0.0));
    }
  }
  return model;
}

std::vector<std::string> top_active_slots(const std::vector<BidRecord>& records, std::size_t n_slots,
                                          const WarningSink& warn) {
  require(n_slots >= 1, "must request at least one slot");
  std::map<std::string, std::uint64_t> counts;
  for (const BidRecord& r : records) counts[r.slot_id] += r.count;
  std::vector<std::pair<std::string, std::uint64_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() < n_slots) {
    warn("requested " + std::to_string(n_slots) + " slots but the log has only " + std::to_string(ranked.size()));
  }
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(n_slots, ranked.size()); ++i) out.push_back(ranked[i].first);
  return out;
}

std::vector<std::string> advertisers_of(const std::vector<BidRecord>& records, const std::vector<std::string>& slots) {
  const std::set<std::string> wanted(slots.begin(), slots.end());
  std::set<std::string> adv;
  for (const BidRecord& r : records) {
    if (wanted.count(r.slot_id)) adv.insert(r.advertiser_id);
  }
  return {adv.begin(), adv.end()};
}

const SlotModel& ModelFile::slot(std::string_view id) const {
  for (const SlotModel& s : slots) {
    if (s.slot_id == id) return s;
  }
  throw DataError("model file has no slot '" + std::string(id) + "'");
}

ModelFile build_model_file(const std::vector<BidRecord>& records, std::size_t n_slots, const PriceGrid& grid,
                           const SlotModelOptions& options, const WarningSink& warn) {
  ModelFile out;
  out.grid = grid;
  out.price_divisor = options.price_divisor;
  const auto slots = top_active_slots(records, n_slots, warn);
  if (slots.empty()) throw DataError("bid log contains no records");
  out.networks = advertisers_of(records, slots);
  SlotModelOptions opts = options;
  opts.networks = out.networks;
  for (const auto& id : slots) out.slots.push_back(build_slot_model(records, id, grid, opts, warn));
  return out;
}

void write_model_file(const ModelFile& model, const std::string& path) {
  nlohmann::json j;
  j["grid"] = std::vector<double>(model.grid.prices().begin(), model.grid.prices().end());
  j["price_divisor"] = model.price_divisor;
  j["networks"] = model.networks;
  j["slots"] = nlohmann::json::array();
  for (const SlotModel& s : model.slots) {
    nlohmann::json js;
    js["slot_id"] = s.slot_id;
    js["win_counts"] = s.win_counts;
    js["win_price"] = s.win_price;
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t a = 0; a < s.table.networks(); ++a) {
      rows.push_back(std::vector<double>(s.table.row(a).begin(), s.table.row(a).end()));
    }
    js["table"] = rows;
    j["slots"].push_back(js);
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model file '" + path + "'");
  out << j.dump(2) << '\n';
}

ModelFile read_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file '" + path + "'");
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    ModelFile m;
    m.grid = PriceGrid(j.at("grid").get<std::vector<double>>());
    m.price_divisor = j.at("price_divisor").get<double>();
    m.networks = j.at("networks").get<std::vector<std::string>>();
    for (const auto& js : j.at("slots")) {
      SlotModel s;
      s.slot_id = js.at("slot_id").get<std::string>();
      s.networks = m.networks;
      s.win_counts = js.at("win_counts").get<std::vector<std::uint64_t>>();
      s.win_price = js.at("win_price").get<std::vector<double>>();
      const auto rows = js.at("table").get<std::vector<std::vector<double>>>();
      std::vector<double> flat;
      for (const auto& r : rows) {
        if (r.size() != m.grid.size()) throw DataError("model table row does not match the grid");
        flat.insert(flat.end(), r.begin(), r.end());
      }
      if (rows.size() != m.networks.size()) throw DataError("model table does not match the network list");
      s.table = WeightTable(rows.size(), m.grid.size(), std::move(flat));
      m.slots.push_back(std::move(s));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed model file '" + path + "': " + e.what());
  } catch (const ContractError& e) {
    throw DataError("invalid model file '" + path + "': " + e.what());
  }
}

}  // namespace waterfall

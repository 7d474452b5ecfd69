#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "waterfall/model.hpp"

namespace waterfall {

// One row of a bid log. `count` is 1 unless the aggregated four-column
// variant of the format is used.
struct BidRecord {
  std::string slot_id;
  std::string advertiser_id;
  double winning_price = 0.0;
  std::uint64_t count = 1;

  bool operator==(const BidRecord&) const = default;
};

using WarningSink = std::function<void(std::string_view)>;

// Writes "warning: <msg>" to stderr.
void warn_to_stderr(std::string_view msg);

// Format: a header row `slot_id,advertiser_id,winning_price[,count]`
// followed by one record per line. Comma or tab delimited, LF or CRLF,
// blank lines and lines starting with '#' skipped. Throws DataError naming
// the offending line.
std::vector<BidRecord> parse_log(const std::string& path);
std::vector<BidRecord> parse_log(std::istream& in, std::string_view source = "<stream>");

// Acceptance model of one ad slot. Advertisers act as ad networks:
//   w(a, p) = 1{p <= v_a} * n_a / sum n     for p > 0
//   w(a, 0) = 1
// with n_a the advertiser's wins and v_a its normalized winning price.
struct SlotModel {
  std::string slot_id;
  std::vector<std::string> networks;
  std::vector<std::uint64_t> win_counts;
  std::vector<double> win_price;
  WeightTable table;

  bool operator==(const SlotModel&) const = default;
};

struct SlotModelOptions {
  double price_divisor = 330.0;
  // A varying winning price is an error when strict; otherwise the modal
  // price (lowest among equally frequent ones) is used with a warning.
  bool strict = true;
  // Fixes the network list (and its order). Defaults to the slot's own
  // advertisers sorted lexicographically.
  std::optional<std::vector<std::string>> networks;
};

SlotModel build_slot_model(const std::vector<BidRecord>& records, std::string_view slot_id, const PriceGrid& grid,
                           const SlotModelOptions& options = {}, const WarningSink& warn = warn_to_stderr);

// Slot ids by number of bids (descending), ties by slot id.
std::vector<std::string> top_active_slots(const std::vector<BidRecord>& records, std::size_t n_slots,
                                          const WarningSink& warn = warn_to_stderr);

// Sorted union of advertisers bidding on any of `slots`.
std::vector<std::string> advertisers_of(const std::vector<BidRecord>& records, const std::vector<std::string>& slots);

// Output of the `ingest` command: models of the most active slots over a
// shared network list.
struct ModelFile {
  PriceGrid grid = PriceGrid::uniform(11);
  double price_divisor = 330.0;
  std::vector<std::string> networks;
  std::vector<SlotModel> slots;

  const SlotModel& slot(std::string_view id) const;
};

ModelFile build_model_file(const std::vector<BidRecord>& records, std::size_t n_slots, const PriceGrid& grid,
                           const SlotModelOptions& options = {}, const WarningSink& warn = warn_to_stderr);
void write_model_file(const ModelFile& model, const std::string& path);
ModelFile read_model_file(const std::string& path);

}  // namespace waterfall

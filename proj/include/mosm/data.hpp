#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <utility>

#include <nlohmann/json.hpp>

#include "mosm/gp.hpp"

namespace mosm {

// CSV schema: header `x1,...,xn,channel,y`; channel ids are 1-based in files.
Dataset load_csv(const std::filesystem::path& path);
Dataset read_csv(std::istream& in, const std::string& source = "<stream>");
void save_csv(const std::filesystem::path& path, const Dataset& data);
void write_csv(std::ostream& out, const Dataset& data);

/// Query files share the data schema; the trailing `y` column is optional.
Dataset load_query_csv(const std::filesystem::path& path);

/// Per-channel standardization of observed values.
struct NormalizationState {
  Vector mean;
  Vector stddev;

  double apply(int channel, double y) const;
  double invert(int channel, double z) const;
  Dataset apply(const Dataset& data) const;
  Dataset invert(const Dataset& data) const;

  nlohmann::json to_json() const;
  static NormalizationState from_json(const nlohmann::json& doc);
};

/// Fits a fresh state on `data` (population statistics per channel) unless
/// one is supplied, in which case it is applied unchanged.
std::pair<Dataset, NormalizationState> normalize(const Dataset& data,
                                                 const std::optional<NormalizationState>& state = std::nullopt,
                                                 int channels = 0);

/// Sensor-failure split: the `fraction` of `channel`'s observations with the
/// largest first-coordinate location go to test; everything else is train.
std::pair<Dataset, Dataset> mask_failure(const Dataset& data, int channel, double fraction);

/// N rows drawn uniformly without replacement, in draw order.
Dataset uniform_subsample(const Dataset& data, int count, std::uint64_t seed);

}  // namespace mosm

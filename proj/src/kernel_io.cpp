#include "mosm/kernel_io.hpp"

#include "mosm/errors.hpp"

namespace mosm {

namespace {

nlohmann::json to_array(const Vector& v) {
  return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vector from_array(const nlohmann::json& a, int expected, const char* field) {
  if (!a.is_array() || static_cast<int>(a.size()) != expected) {
    throw ConfigError(std::string("kernel field '") + field + "' has the wrong length");
  }
  Vector v(expected);
  for (int d = 0; d < expected; ++d) v[d] = a[d].get<double>();
  return v;
}

}  // namespace

nlohmann::json kernel_to_json(const MosmKernel& k) {
  nlohmann::json doc;
  doc["channels"] = k.channels();
  doc["input_dim"] = k.input_dim();
  doc["mixture_size"] = k.mixture_size();
  doc["constraint_mode"] = to_string(k.mode());
  auto grid = nlohmann::json::array();
  for (int i = 0; i < k.channels(); ++i) {
    auto row = nlohmann::json::array();
    for (int q = 0; q < k.mixture_size(); ++q) {
      const SpectralComponent& c = k.component(i, q);
      row.push_back({{"weight", c.weight},
                     {"mean", to_array(c.mean)},
                     {"scales", to_array(c.scales)},
                     {"delay", to_array(c.delay)},
                     {"phase", c.phase}});
    }
    grid.push_back(std::move(row));
  }
  doc["components"] = std::move(grid);
  doc["noise_var"] = to_array(k.noise_vars());
  return doc;
}

MosmKernel kernel_from_json(const nlohmann::json& doc) {
  try {
    const int m = doc.at("channels").get<int>();
    const int n = doc.at("input_dim").get<int>();
    const int q_count = doc.at("mixture_size").get<int>();
    MosmKernel k(m, n, q_count, parse_constraint_mode(doc.at("constraint_mode").get<std::string>()));
    const auto& grid = doc.at("components");
    if (!grid.is_array() || static_cast<int>(grid.size()) != m) {
      throw ConfigError("kernel components grid does not match channel count");
    }
    for (int i = 0; i < m; ++i) {
      if (!grid[i].is_array() || static_cast<int>(grid[i].size()) != q_count) {
        throw ConfigError("kernel components grid does not match mixture size");
      }
      for (int q = 0; q < q_count; ++q) {
        const auto& node = grid[i][q];
        SpectralComponent& c = k.component(i, q);
        c.weight = node.at("weight").get<double>();
        c.mean = from_array(node.at("mean"), n, "mean");
        c.scales = from_array(node.at("scales"), n, "scales");
        c.delay = from_array(node.at("delay"), n, "delay");
        c.phase = node.at("phase").get<double>();
      }
    }
    const Vector noise = from_array(doc.at("noise_var"), m, "noise_var");
    for (int i = 0; i < m; ++i) k.set_noise_var(i, noise[i]);
    k.validate();
    return k;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed kernel document: ") + e.what());
  }
}

}  // namespace mosm

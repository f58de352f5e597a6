// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "nomacomp/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>

namespace nomacomp {

namespace {

using json = nlohmann::json;

struct Field {
  const char* name;
  std::function<bool(const json&, NetworkConfig&)> read;  // false on a type mismatch
  const char* type;
  std::function<void(nlohmann::ordered_json&, const NetworkConfig&)> write;
};

template <typename T>
Field int_field(const char* name, T NetworkConfig::*member) {
  return {name,
          [member](const json& v, NetworkConfig& c) {
            if (!v.is_number_integer()) return false;
            if constexpr (std::is_unsigned_v<T>) {
              if (!v.is_number_unsigned()) return false;
            }
            c.*member = v.get<T>();
            return true;
          },
          std::is_unsigned_v<T> ? "an unsigned integer" : "an integer",
          [name, member](nlohmann::ordered_json& j, const NetworkConfig& c) { j[name] = c.*member; }};
}

Field real_field(const char* name, double NetworkConfig::*member) {
  return {name,
          [member](const json& v, NetworkConfig& c) {
            if (!v.is_number()) return false;
            c.*member = v.get<double>();
            return true;
          },
          "a number", [name, member](nlohmann::ordered_json& j, const NetworkConfig& c) { j[name] = c.*member; }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> all = {
      int_field("num_cells", &NetworkConfig::num_cells),
      int_field("antennas_per_bs", &NetworkConfig::antennas_per_bs),
      int_field("clusters_per_cell", &NetworkConfig::clusters_per_cell),
      real_field("transmit_snr_db", &NetworkConfig::transmit_snr_db),
      real_field("noise_power", &NetworkConfig::noise_power),
      real_field("sinr_target", &NetworkConfig::sinr_target),
      real_field("path_loss_exponent", &NetworkConfig::path_loss_exponent),
      real_field("cell_radius", &NetworkConfig::cell_radius),
      real_field("inter_bs_distance", &NetworkConfig::inter_bs_distance),
      real_field("path_loss_reference_distance", &NetworkConfig::path_loss_reference_distance),
      int_field("max_iterations", &NetworkConfig::max_iterations),
      real_field("rel_tolerance", &NetworkConfig::rel_tolerance),
      int_field("master_seed", &NetworkConfig::master_seed),
      int_field("init_restarts", &NetworkConfig::init_restarts),
  };
  return all;
}

bool is_required(std::string_view key) {
  return std::find(std::begin(kRequiredKeys), std::end(kRequiredKeys), key) != std::end(kRequiredKeys);
}

}  // namespace

ConfigParse validate_config(std::string_view text) {
  ConfigParse out;
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    out.errors.push_back(std::string("malformed JSON: ") + e.what());
    return out;
  }
  if (!doc.is_object()) {
    out.errors.push_back("configuration must be a JSON object");
    return out;
  }
  for (const auto& [key, value] : doc.items()) {
    const bool known = std::any_of(fields().begin(), fields().end(), [&](const Field& f) { return key == f.name; });
    if (!known) out.errors.push_back("unknown key: " + key);
  }
  NetworkConfig config;
  for (const auto& f : fields()) {
    const auto it = doc.find(f.name);
    if (it == doc.end()) {
      if (is_required(f.name)) out.errors.push_back(std::string("missing required key: ") + f.name);
      continue;
    }
    if (!f.read(*it, config)) out.errors.push_back(std::string(f.name) + " must be " + f.type);
  }
  if (!out.errors.empty()) return out;
  out.errors = config.validation_errors();
  if (out.errors.empty()) out.config = config;
  return out;
}

NetworkConfig parse_config(std::string_view text) {
  ConfigParse p = validate_config(text);
  if (!p.config) throw ConfigError(std::move(p.errors));
  return *p.config;
}

NetworkConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot read configuration file: " + path.string()});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

nlohmann::ordered_json to_json(const NetworkConfig& config) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& f : fields()) f.write(j, config);
  return j;
}

}  // namespace nomacomp

// Copyright 2026 The APL Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef APL_CONFIG_HPP_
#define APL_CONFIG_HPP_

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "apl/env.hpp"
#include "apl/learner.hpp"
#include "apl/oracle.hpp"

namespace apl {

// A small TOML subset: [section] headers, key = value lines with numbers,
// booleans, quoted strings, or flat arrays, and # comments.
class ConfigTable {
 public:
  static ConfigTable parse(const std::string& text,
                           const std::string& origin = "<config>");
  static ConfigTable load(const std::string& path);

  // "section.key=value"; the value uses the same syntax as the file.
  void apply_override(const std::string& assignment);
  void set(const std::string& section, const std::string& key,
           const std::string& raw);

  bool has(const std::string& section, const std::string& key) const;
  double number(const std::string& section, const std::string& key,
                double fallback) const;
  long integer(const std::string& section, const std::string& key,
               long fallback) const;
  bool boolean(const std::string& section, const std::string& key,
               bool fallback) const;
  std::string string(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  std::vector<double> numbers(const std::string& section,
                              const std::string& key,
                              const std::vector<double>& fallback) const;

  // Keys present in the table that were never read.
  std::vector<std::string> unused() const;
  // Every key read so far with the value in effect, defaults included.
  ConfigTable resolved() const;
  std::string to_toml() const;
  const std::map<std::string, std::map<std::string, std::string>>& entries()
      const {
    return entries_;
  }

 private:
  const std::string* raw(const std::string& section,
                         const std::string& key) const;

  std::map<std::string, std::map<std::string, std::string>> entries_;
  mutable std::set<std::string> used_;
  mutable std::map<std::string, std::map<std::string, std::string>> effective_;
};

enum class RegretMode { kRealized, kRollout };

struct OracleConfig {
  GridConfig grid;
  RegretMode regret_mode = RegretMode::kRealized;
  int rollouts = 32;
  double window = 0.5;
  GbarConstants gbar;
  std::vector<double> packing_radii{0.8, 0.4, 0.2};
};

struct Experiment {
  std::string env_name;
  std::shared_ptr<const Environment> env;
  RunConfig run;
  OracleConfig oracle;
  // Canonical text of every resolved value.
  std::string resolved_toml;
};

// Builds an experiment, rejecting unknown keys. APL_SEED, when set,
// replaces learner.seed before validation.
Experiment make_experiment(ConfigTable table);
Experiment load_experiment(const std::string& path,
                           const std::vector<std::string>& overrides = {});

}  // namespace apl

#endif  // APL_CONFIG_HPP_

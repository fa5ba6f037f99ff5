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


#ifndef APL_IO_HPP_
#define APL_IO_HPP_

#include <json.hpp>
#include <string>
#include <vector>

#include "apl/learner.hpp"
#include "apl/oracle.hpp"

namespace apl {

// episode,h,block_id,state...,action...,reward,conf,diam,split
std::string trace_csv(const EpisodeTrace& trace);
// episode,return
std::string returns_csv(const EpisodeTrace& trace);

// The subset of a trace needed for regret: per-episode returns and initial
// states, read back from trace CSV.
struct TraceSummary {
  std::vector<Vec> initial_states;
  std::vector<double> returns;
};
TraceSummary read_trace_csv(const std::string& text);

nlohmann::json partition_json(const PartitionTree& tree, bool with_stats);
PartitionTree partition_from_json(const EnvSpec& spec, const nlohmann::json& j);

nlohmann::json dp_json(const DpSolution& dp, const std::string& key);
DpSolution dp_from_json(const nlohmann::json& j);

// episode,v_star,return,increment,cumulative
std::string regret_csv(const RegretReport& report);
nlohmann::json slope_json(const SlopeFit& fit);

// sha1("blob <size>\0" + content) in hex, as git hashes file contents.
std::string git_blob_hash(const std::string& content);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace apl

#endif  // APL_IO_HPP_

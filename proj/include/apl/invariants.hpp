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


#ifndef APL_INVARIANTS_HPP_
#define APL_INVARIANTS_HPP_

#include <memory>
#include <string>
#include <vector>

#include "apl/learner.hpp"

namespace apl {

struct InvariantCheck {
  std::string name;
  long checked = 0;
  long violations = 0;
  std::string detail;  // first violation, or a note when skipped

  bool skipped() const { return checked == 0; }
  bool passed() const { return violations == 0; }
};

// Per-episode structural checks, run as an EpisodeHook: leaf volume equals
// root volume, Ṽ never increases at a fixed state, and block counts grow by
// exactly one per timestamp.
class EpisodeMonitor {
 public:
  void operator()(long episode, const Learner& learner);
  std::vector<InvariantCheck> checks() const;

 private:
  struct Snapshot {
    std::vector<StateCell> cells;
    std::vector<long> counts;
    long outside = 0;
  };
  std::vector<Snapshot> prev_;
  InvariantCheck volume_{"leaf volume conservation", 0, 0, ""};
  InvariantCheck monotone_{"v_tilde monotone", 0, 0, ""};
  InvariantCheck counts_{"count conservation", 0, 0, ""};
};

// Checks over a finished run: splitting soundness, count bounds (theoretical
// bonus only), ancestor diameter averages, and replay of block statistics.
std::vector<InvariantCheck> trace_invariants(const TrainingResult& run,
                                             const Bonus& bonus);

// Trains twice with the same seed under an EpisodeMonitor and reports every
// check. Doubling is rejected since partitions are kept for the last round.
std::vector<InvariantCheck> verify_invariants(
    std::shared_ptr<const Environment> env, const RunConfig& cfg);

}  // namespace apl

#endif  // APL_INVARIANTS_HPP_

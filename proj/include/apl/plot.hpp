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


#ifndef APL_PLOT_HPP_
#define APL_PLOT_HPP_

#include <string>
#include <vector>

#include "apl/oracle.hpp"
#include "apl/partition.hpp"

namespace apl {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  int width = 720;
  int height = 440;
};

std::string line_chart_svg(const std::vector<Series>& series,
                           const ChartOptions& opt);

// log cumulative regret against log k with the fitted line over its window.
std::string loglog_svg(const std::vector<double>& cumulative,
                       const SlopeFit& fit, const std::string& title);

// Leaves of a d_s = d_a = 1 partition as rectangles shaded by depth.
std::string partition_svg(const PartitionTree& tree, const std::string& title);

}  // namespace apl

#endif  // APL_PLOT_HPP_

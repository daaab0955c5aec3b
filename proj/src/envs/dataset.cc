// Copyright 2026 The MOPP Authors
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

#include "mopp/envs/dataset.h"

#include <algorithm>
#include <cmath>

#include "mopp/errors.h"

namespace mopp {
namespace {

void MeanStd(const std::vector<float>& flat, int dim, int count,
             Eigen::VectorXd* mean, Eigen::VectorXd* std) {
  *mean = Eigen::VectorXd::Zero(dim);
  *std = Eigen::VectorXd::Zero(dim);
  if (count == 0) return;
  for (int i = 0; i < count; ++i) {
    for (int d = 0; d < dim; ++d) (*mean)[d] += flat[i * dim + d];
  }
  *mean /= count;
  for (int i = 0; i < count; ++i) {
    for (int d = 0; d < dim; ++d) {
      double e = flat[i * dim + d] - (*mean)[d];
      (*std)[d] += e * e;
    }
  }
  *std = (*std / count).cwiseSqrt();
}

}  // namespace

Dataset::Dataset(int state_dim, int action_dim)
    : state_dim_(state_dim), action_dim_(action_dim) {
  if (state_dim < 0 || action_dim < 0) {
    throw ShapeError("dataset dimensions must be non-negative");
  }
}

void Dataset::Append(std::span<const float> state,
                     std::span<const float> action, float reward,
                     std::span<const float> next_state, bool done,
                     std::uint32_t episode) {
  if (static_cast<int>(state.size()) != state_dim_ ||
      static_cast<int>(next_state.size()) != state_dim_ ||
      static_cast<int>(action.size()) != action_dim_) {
    throw ShapeError("transition dimensions do not match the dataset");
  }
  states_.insert(states_.end(), state.begin(), state.end());
  actions_.insert(actions_.end(), action.begin(), action.end());
  next_states_.insert(next_states_.end(), next_state.begin(), next_state.end());
  rewards_.push_back(reward);
  done_.push_back(done ? 1 : 0);
  episodes_.push_back(episode);
}

std::span<const float> Dataset::state(int i) const {
  return {states_.data() + static_cast<std::size_t>(i) * state_dim_,
          static_cast<std::size_t>(state_dim_)};
}

std::span<const float> Dataset::action(int i) const {
  return {actions_.data() + static_cast<std::size_t>(i) * action_dim_,
          static_cast<std::size_t>(action_dim_)};
}

std::span<const float> Dataset::next_state(int i) const {
  return {next_states_.data() + static_cast<std::size_t>(i) * state_dim_,
          static_cast<std::size_t>(state_dim_)};
}

Eigen::Map<const RowMatrixF> Dataset::states() const {
  return {states_.data(), size(), state_dim_};
}

Eigen::Map<const RowMatrixF> Dataset::actions() const {
  return {actions_.data(), size(), action_dim_};
}

Eigen::Map<const RowMatrixF> Dataset::next_states() const {
  return {next_states_.data(), size(), state_dim_};
}

std::vector<std::pair<int, int>> Dataset::EpisodeRanges() const {
  std::vector<std::pair<int, int>> ranges;
  int begin = 0;
  for (int i = 1; i <= size(); ++i) {
    if (i == size() || episodes_[i] != episodes_[i - 1]) {
      ranges.emplace_back(begin, i);
      begin = i;
    }
  }
  return ranges;
}

int Dataset::num_episodes() const {
  return static_cast<int>(EpisodeRanges().size());
}

std::vector<int> Dataset::NextIndices() const {
  std::vector<int> next(size(), kTruncated);
  for (int i = 0; i < size(); ++i) {
    if (done(i)) {
      next[i] = kTerminal;
    } else if (i + 1 < size() && episodes_[i + 1] == episodes_[i]) {
      next[i] = i + 1;
    }
  }
  return next;
}

bool Dataset::IsChained() const {
  std::vector<int> next = NextIndices();
  for (int i = 0; i < size(); ++i) {
    if (next[i] < 0) continue;
    std::span<const float> a = next_state(i);
    std::span<const float> b = state(next[i]);
    if (!std::equal(a.begin(), a.end(), b.begin())) return false;
  }
  return true;
}

DatasetStats Dataset::ComputeStats() const {
  DatasetStats stats;
  MeanStd(states_, state_dim_, size(), &stats.state_mean, &stats.state_std);
  MeanStd(actions_, action_dim_, size(), &stats.action_mean, &stats.action_std);
  MeanStd(next_states_, state_dim_, size(), &stats.next_state_mean,
          &stats.next_state_std);
  if (!empty()) {
    auto [lo, hi] = std::minmax_element(rewards_.begin(), rewards_.end());
    stats.reward_min = *lo;
    stats.reward_max = *hi;
    double sum = 0.0;
    for (float r : rewards_) sum += r;
    stats.reward_mean = sum / size();
  }
  for (auto [begin, end] : EpisodeRanges()) {
    double total = 0.0;
    for (int i = begin; i < end; ++i) total += rewards_[i];
    stats.episode_returns.push_back(total);
  }
  return stats;
}

Dataset Mix(std::span<const Dataset> datasets, std::span<const double> ratios) {
  if (datasets.empty()) throw DataError("mix: no datasets given");
  if (datasets.size() != ratios.size()) {
    throw ConfigError("mix: one ratio per dataset required");
  }
  double ratio_sum = 0.0;
  for (double r : ratios) {
    if (!(r >= 0.0)) throw ConfigError("mix: ratios must be non-negative");
    ratio_sum += r;
  }
  if (std::abs(ratio_sum - 1.0) > 1e-9) {
    throw ConfigError("mix: ratios must sum to 1");
  }
  const int state_dim = datasets[0].state_dim();
  const int action_dim = datasets[0].action_dim();
  std::vector<std::vector<std::pair<int, int>>> ranges;
  int total = -1;
  for (std::size_t k = 0; k < datasets.size(); ++k) {
    if (datasets[k].state_dim() != state_dim ||
        datasets[k].action_dim() != action_dim) {
      throw DataError("mix: dataset dimensions differ");
    }
    ranges.push_back(datasets[k].EpisodeRanges());
    if (ratios[k] > 0.0) {
      if (ranges.back().empty()) throw DataError("mix: empty dataset");
      int supported = static_cast<int>(
          std::floor(static_cast<double>(ranges.back().size()) / ratios[k] +
                     1e-9));
      total = total < 0 ? supported : std::min(total, supported);
    }
  }
  if (total <= 0) throw DataError("mix: nothing to mix");

  // Largest-remainder quotas, then interleave by smallest fill fraction.
  std::vector<int> quota(datasets.size());
  int assigned = 0;
  for (std::size_t k = 0; k < datasets.size(); ++k) {
    quota[k] = static_cast<int>(std::floor(ratios[k] * total + 1e-9));
    quota[k] = std::min<int>(quota[k], static_cast<int>(ranges[k].size()));
    assigned += quota[k];
  }
  for (std::size_t k = 0; assigned < total && k < datasets.size(); ++k) {
    if (ratios[k] > 0.0 && quota[k] < static_cast<int>(ranges[k].size())) {
      ++quota[k];
      ++assigned;
    }
  }

  Dataset mixed(state_dim, action_dim);
  std::vector<int> taken(datasets.size(), 0);
  for (std::uint32_t episode = 0; episode < static_cast<std::uint32_t>(assigned);
       ++episode) {
    std::size_t pick = 0;
    double best = 2.0;
    for (std::size_t k = 0; k < datasets.size(); ++k) {
      if (taken[k] >= quota[k]) continue;
      double fill = static_cast<double>(taken[k]) / quota[k];
      if (fill < best) {
        best = fill;
        pick = k;
      }
    }
    auto [begin, end] = ranges[pick][taken[pick]++];
    const Dataset& source = datasets[pick];
    for (int i = begin; i < end; ++i) {
      mixed.Append(source.state(i), source.action(i), source.reward(i),
                   source.next_state(i), source.done(i), episode);
    }
  }
  return mixed;
}

}  // namespace mopp

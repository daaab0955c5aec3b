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

#ifndef MOPP_ENVS_DATASET_H_
#define MOPP_ENVS_DATASET_H_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace mopp {

using RowMatrixF =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct DatasetStats {
  Eigen::VectorXd state_mean, state_std;
  Eigen::VectorXd action_mean, action_std;
  Eigen::VectorXd next_state_mean, next_state_std;
  double reward_min = 0.0;
  double reward_max = 0.0;
  double reward_mean = 0.0;
  std::vector<double> episode_returns;
};

// Offline dataset of (s, a, r, s', done, episode) records stored column-wise.
// Transitions of one episode are contiguous and in time order.
class Dataset {
 public:
  // NextIndices() markers
  static constexpr int kTerminal = -1;
  static constexpr int kTruncated = -2;

  Dataset() = default;
  Dataset(int state_dim, int action_dim);

  // Throws ShapeError on dimension mismatch.
  void Append(std::span<const float> state, std::span<const float> action,
              float reward, std::span<const float> next_state, bool done,
              std::uint32_t episode);

  int state_dim() const { return state_dim_; }
  int action_dim() const { return action_dim_; }
  int size() const { return static_cast<int>(rewards_.size()); }
  bool empty() const { return rewards_.empty(); }

  std::span<const float> state(int i) const;
  std::span<const float> action(int i) const;
  std::span<const float> next_state(int i) const;
  float reward(int i) const { return rewards_[i]; }
  bool done(int i) const { return done_[i] != 0; }
  std::uint32_t episode(int i) const { return episodes_[i]; }

  Eigen::Map<const RowMatrixF> states() const;
  Eigen::Map<const RowMatrixF> actions() const;
  Eigen::Map<const RowMatrixF> next_states() const;
  std::span<const float> rewards() const { return rewards_; }

  // [begin, end) transition ranges of consecutive equal episode ids.
  std::vector<std::pair<int, int>> EpisodeRanges() const;
  int num_episodes() const;

  // For each transition: index of its successor within the same episode,
  // kTerminal when done, kTruncated when the episode stops without done.
  std::vector<int> NextIndices() const;

  // True when every non-terminal transition's next state equals the state of
  // the following transition of the same episode.
  bool IsChained() const;

  // Accumulated in double precision.
  DatasetStats ComputeStats() const;

 private:
  int state_dim_ = 0;
  int action_dim_ = 0;
  std::vector<float> states_;
  std::vector<float> actions_;
  std::vector<float> rewards_;
  std::vector<float> next_states_;
  std::vector<std::uint8_t> done_;
  std::vector<std::uint32_t> episodes_;
};

// Interleaves whole episodes of `datasets` in proportion to `ratios` and
// renumbers episode ids from zero. The total episode count is the largest
// total the scarcest dataset supports. Throws DataError on empty inputs or
// dimension mismatch, ConfigError when ratios are negative or do not sum to 1.
Dataset Mix(std::span<const Dataset> datasets, std::span<const double> ratios);

}  // namespace mopp

#endif  // MOPP_ENVS_DATASET_H_

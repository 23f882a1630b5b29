#pragma once

#include <vector>

#include "rpcf/spectral.hpp"

namespace rpcf {

struct TrainingSample {
  MultiSpectrum x_hat;  // D spectra of a windowed feature stack
  double weight = 0.0;
  int frame_index = 0;
};

struct MemoryConfig {
  int capacity = 50;       // T
  double omega = 0.02;     // learning rate of the newest sample
  int update_interval = 6; // N_t
};

/// Bounded weighted sample set. Weights always sum to one.
class SampleMemory {
 public:
  explicit SampleMemory(MemoryConfig config = {});

  /// Memory holding `samples` as given (a snapshot). Throws unless the
  /// weights are nonnegative, sum to one and fit the capacity.
  static SampleMemory from_samples(MemoryConfig config, std::vector<TrainingSample> samples);

  /// Decays existing weights by (1 - omega) and appends the sample with
  /// weight omega (weight 1 into an empty memory). Over capacity, the
  /// lowest-weight sample other than the new one is dropped and the rest
  /// renormalized.
  void insert(TrainingSample sample);

  /// True on the first frame and every update_interval frames after.
  bool should_update(int frame_index) const;

  const std::vector<TrainingSample>& samples() const { return samples_; }
  const MemoryConfig& config() const { return config_; }
  bool empty() const { return samples_.empty(); }
  size_t size() const { return samples_.size(); }
  int depth() const;
  Eigen::Index rows() const;
  Eigen::Index cols() const;
  double weight_sum() const;

 private:
  MemoryConfig config_;
  std::vector<TrainingSample> samples_;
};

}  // namespace rpcf

#include "rpcf/memory.hpp"

#include <cmath>
#include <stdexcept>

namespace rpcf {

SampleMemory::SampleMemory(MemoryConfig config) : config_(config) {
  if (config_.capacity < 1) throw std::invalid_argument("memory capacity must be >= 1");
  if (!(config_.omega > 0.0 && config_.omega <= 1.0))
    throw std::invalid_argument("learning rate must lie in (0, 1]");
  if (config_.update_interval < 1) throw std::invalid_argument("update interval must be >= 1");
}

SampleMemory SampleMemory::from_samples(MemoryConfig config, std::vector<TrainingSample> samples) {
  SampleMemory m(config);
  if (static_cast<int>(samples.size()) > config.capacity)
    throw std::invalid_argument("from_samples: more samples than capacity");
  double total = 0.0;
  for (const auto& t : samples) {
    if (!(t.weight >= 0.0)) throw std::invalid_argument("from_samples: negative weight");
    total += t.weight;
  }
  if (!samples.empty() && std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("from_samples: weights must sum to one");
  // insert() checks the dimensions; the weights are restored afterwards.
  std::vector<double> weights;
  for (auto& t : samples) {
    weights.push_back(t.weight);
    m.insert(std::move(t));
  }
  for (size_t i = 0; i < weights.size(); ++i) m.samples_[i].weight = weights[i];
  return m;
}

int SampleMemory::depth() const {
  return samples_.empty() ? 0 : static_cast<int>(samples_.front().x_hat.size());
}

Eigen::Index SampleMemory::rows() const {
  return samples_.empty() ? 0 : samples_.front().x_hat.front().rows();
}

Eigen::Index SampleMemory::cols() const {
  return samples_.empty() ? 0 : samples_.front().x_hat.front().cols();
}

double SampleMemory::weight_sum() const {
  double s = 0.0;
  for (const auto& t : samples_) s += t.weight;
  return s;
}

void SampleMemory::insert(TrainingSample sample) {
  if (sample.x_hat.empty()) throw std::invalid_argument("insert: sample has no channels");
  if (!samples_.empty()) {
    if (static_cast<int>(sample.x_hat.size()) != depth() ||
        sample.x_hat.front().rows() != rows() || sample.x_hat.front().cols() != cols())
      throw std::invalid_argument("insert: sample dimensions differ from memory");
  }
  for (const auto& ch : sample.x_hat)
    if (ch.rows() != sample.x_hat.front().rows() || ch.cols() != sample.x_hat.front().cols())
      throw std::invalid_argument("insert: sample channels differ in size");

  if (samples_.empty()) {
    sample.weight = 1.0;
    samples_.push_back(std::move(sample));
    return;
  }
  for (auto& t : samples_) t.weight *= 1.0 - config_.omega;
  sample.weight = config_.omega;
  samples_.push_back(std::move(sample));

  if (static_cast<int>(samples_.size()) > config_.capacity) {
    // The newest entry is last and never evicted.
    size_t victim = 0;
    for (size_t i = 1; i + 1 < samples_.size(); ++i)
      if (samples_[i].weight < samples_[victim].weight) victim = i;
    samples_.erase(samples_.begin() + static_cast<std::ptrdiff_t>(victim));
  }
  const double total = weight_sum();
  for (auto& t : samples_) t.weight /= total;
}

bool SampleMemory::should_update(int frame_index) const {
  return frame_index == 1 || frame_index % config_.update_interval == 0;
}

}  // namespace rpcf

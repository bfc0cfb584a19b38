#include "edgereplay/harness/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "edgereplay/common/error.hpp"

namespace edgereplay::harness {

void ClassifierState::add_classes(std::span<const int> class_ids) {
  for (int id : class_ids) {
    if (row_of(id) >= 0) throw ValidationError("class " + std::to_string(id) + " already has a classifier row");
    class_ids_.push_back(id);
    weights_.resize(weights_.size() + static_cast<std::size_t>(dim_), 0.0);
    bias_.push_back(0.0);
  }
}

int ClassifierState::row_of(int class_id) const {
  auto it = std::find(class_ids_.begin(), class_ids_.end(), class_id);
  return it == class_ids_.end() ? -1 : static_cast<int>(it - class_ids_.begin());
}

std::vector<double> ClassifierState::logits(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) throw ValidationError("feature dimension mismatch");
  std::vector<double> z(bias_);
  for (int r = 0; r < rows(); ++r) {
    const double* w = weights_.data() + static_cast<std::size_t>(r) * dim_;
    double s = 0.0;
    for (int d = 0; d < dim_; ++d) s += w[d] * x[static_cast<std::size_t>(d)];
    z[static_cast<std::size_t>(r)] += s;
  }
  return z;
}

int ClassifierState::predict(std::span<const double> x) const {
  const auto z = logits(x);
  const auto best = std::max_element(z.begin(), z.end());  // first maximum
  return class_ids_[static_cast<std::size_t>(best - z.begin())];
}

double loss_and_gradient(const ClassifierState& state, std::span<const Example> batch, Gradient& grad) {
  const int rows = state.rows();
  const int dim = state.dim();
  grad.weights.assign(static_cast<std::size_t>(rows) * dim, 0.0);
  grad.bias.assign(static_cast<std::size_t>(rows), 0.0);
  if (batch.empty()) return 0.0;

  double loss = 0.0;
  const double inv = 1.0 / static_cast<double>(batch.size());
  std::vector<double> prob(static_cast<std::size_t>(rows));
  for (const auto& ex : batch) {
    const int target = state.row_of(ex.class_id);
    if (target < 0) throw ValidationError("class " + std::to_string(ex.class_id) + " has no classifier row");
    const auto z = state.logits(ex.x);
    const double zmax = *std::max_element(z.begin(), z.end());
    double denom = 0.0;
    for (int r = 0; r < rows; ++r) denom += std::exp(z[static_cast<std::size_t>(r)] - zmax);
    const double log_denom = std::log(denom);
    loss += -(z[static_cast<std::size_t>(target)] - zmax - log_denom) * inv;
    for (int r = 0; r < rows; ++r) {
      const auto ri = static_cast<std::size_t>(r);
      prob[ri] = std::exp(z[ri] - zmax - log_denom);
      const double delta = (prob[ri] - (r == target ? 1.0 : 0.0)) * inv;
      grad.bias[ri] += delta;
      double* gw = grad.weights.data() + ri * static_cast<std::size_t>(dim);
      for (int d = 0; d < dim; ++d) gw[d] += delta * ex.x[static_cast<std::size_t>(d)];
    }
  }
  return loss;
}

double scheduled_rate(const TrainSchedule& schedule, int epoch) {
  const int first = static_cast<int>(std::ceil(0.60 * schedule.epochs));
  const int second = static_cast<int>(std::ceil(0.85 * schedule.epochs));
  double lr = schedule.learning_rate;
  if (epoch >= first) lr *= 0.1;
  if (epoch >= second) lr *= 0.1;
  return lr;
}

void train_phase(ClassifierState& state, const EpochSource& epochs, const TrainSchedule& schedule) {
  if (schedule.batch_size < 1) throw ValidationError("batch size must be >= 1");
  if (schedule.epochs < 0) throw ValidationError("epoch count must be >= 0");
  Gradient grad;
  for (int e = 0; e < schedule.epochs; ++e) {
    const double lr = scheduled_rate(schedule, e);
    const auto stream = epochs(e);
    for (std::size_t at = 0; at < stream.size(); at += static_cast<std::size_t>(schedule.batch_size)) {
      const auto n = std::min(stream.size() - at, static_cast<std::size_t>(schedule.batch_size));
      const double loss = loss_and_gradient(state, std::span(stream).subspan(at, n), grad);
      if (!std::isfinite(loss))
        throw NumericError("non-finite loss at epoch " + std::to_string(e) + ", batch " +
                           std::to_string(at / static_cast<std::size_t>(schedule.batch_size)) + " (lr " +
                           std::to_string(lr) + ")");
      if (lr == 0.0) continue;
      auto& w = state.weights();
      auto& b = state.bias();
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * grad.weights[i];
      for (std::size_t i = 0; i < b.size(); ++i) b[i] -= lr * grad.bias[i];
    }
  }
  for (double v : state.weights())
    if (!std::isfinite(v)) throw NumericError("classifier weights diverged");
}

double evaluate(const ClassifierState& state, std::span<const Example> test) {
  if (test.empty()) throw ValidationError("evaluation needs a non-empty test set");
  std::size_t correct = 0;
  for (const auto& ex : test) {
    if (state.row_of(ex.class_id) < 0)
      throw ValidationError("test label " + std::to_string(ex.class_id) + " belongs to an unobserved class");
    if (state.predict(ex.x) == ex.class_id) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

}  // namespace edgereplay::harness

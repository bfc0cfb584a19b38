#pragma once

#include <functional>
#include <span>
#include <vector>

namespace edgereplay::harness {

// Multinomial logistic regression over fixed features. Rows are appended as
// classes arrive; row r scores class_ids()[r].
class ClassifierState {
 public:
  ClassifierState() = default;
  explicit ClassifierState(int dim) : dim_(dim) {}

  int dim() const noexcept { return dim_; }
  int rows() const noexcept { return static_cast<int>(class_ids_.size()); }
  const std::vector<int>& class_ids() const noexcept { return class_ids_; }

  // New rows start at zero. Throws ValidationError on a duplicate class.
  void add_classes(std::span<const int> class_ids);
  // -1 for a class that has no row.
  int row_of(int class_id) const;

  std::vector<double>& weights() noexcept { return weights_; }  // rows x dim, row-major
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::vector<double>& bias() noexcept { return bias_; }
  const std::vector<double>& bias() const noexcept { return bias_; }

  std::vector<double> logits(std::span<const double> x) const;
  int predict(std::span<const double> x) const;  // class id, ties to the lowest row

  friend bool operator==(const ClassifierState&, const ClassifierState&) = default;

 private:
  int dim_ = 0;
  std::vector<int> class_ids_;
  std::vector<double> weights_;
  std::vector<double> bias_;
};

struct Example {
  std::span<const double> x;
  int class_id = 0;
};

struct Gradient {
  std::vector<double> weights;
  std::vector<double> bias;
};

// Mean cross-entropy over the batch and its gradient. Throws ValidationError
// for a class with no row or a dimension mismatch.
double loss_and_gradient(const ClassifierState& state, std::span<const Example> batch, Gradient& grad);

struct TrainSchedule {
  double learning_rate = 0.1;
  int epochs = 1;
  int batch_size = 32;
};

// Learning rate in a given epoch: decays x0.1 at 60% and again at 85% of the run.
double scheduled_rate(const TrainSchedule& schedule, int epoch);

using EpochSource = std::function<std::vector<Example>(int epoch)>;

// Plain mini-batch SGD over the examples each epoch supplies, in order.
// Throws NumericError when the loss or parameters stop being finite.
void train_phase(ClassifierState& state, const EpochSource& epochs, const TrainSchedule& schedule);

// Top-1 accuracy. Throws ValidationError on an empty set or an unobserved class.
double evaluate(const ClassifierState& state, std::span<const Example> test);

}  // namespace edgereplay::harness

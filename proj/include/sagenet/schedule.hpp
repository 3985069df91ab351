#pragma once

#include <cstddef>
#include <limits>
#include <span>

namespace sagenet {

// An epoch "improves" when its validation loss is strictly below the best
// seen so far.

/// Divides the learning rate by `factor` once validation loss has failed to
/// improve for `patience` consecutive epochs; the counter restarts after an
/// improvement or a reduction.
class PlateauScheduler {
 public:
  PlateauScheduler(double initial_lr, double factor = 10.0, std::size_t patience = 5);

  /// Records one epoch and returns the learning rate for the next one.
  double observe(double val_loss);
  double lr() const { return lr_; }
  std::size_t reductions() const { return reductions_; }

 private:
  double lr_;
  double factor_;
  std::size_t patience_;
  double best_ = std::numeric_limits<double>::infinity();
  std::size_t bad_epochs_ = 0;
  std::size_t reductions_ = 0;
};

/// Signals a stop once the best validation loss is `patience` epochs old.
class EarlyStopper {
 public:
  explicit EarlyStopper(std::size_t patience = 10);

  /// Records one epoch; returns true when training should stop.
  bool observe(double val_loss);
  /// 1-based epoch of the best loss so far (0 before any epoch).
  std::size_t best_epoch() const { return best_epoch_; }
  double best() const { return best_; }
  bool improved_last() const { return improved_last_; }

 private:
  std::size_t patience_;
  double best_ = std::numeric_limits<double>::infinity();
  std::size_t best_epoch_ = 0;
  std::size_t epoch_ = 0;
  bool improved_last_ = false;
};

/// Learning rate after replaying `val_losses` through a PlateauScheduler.
double reduce_on_plateau(std::span<const double> val_losses, double initial_lr, double factor = 10.0,
                         std::size_t patience = 5);
/// Whether an EarlyStopper fed `val_losses` has signalled a stop by the end.
bool early_stop(std::span<const double> val_losses, std::size_t patience = 10);

}  // namespace sagenet

#include "sagenet/schedule.hpp"

#include "sagenet/common.hpp"

namespace sagenet {

PlateauScheduler::PlateauScheduler(double initial_lr, double factor, std::size_t patience)
    : lr_(initial_lr), factor_(factor), patience_(patience) {
  if (!(initial_lr > 0.0)) throw Error("initial learning rate must be positive");
  if (!(factor > 1.0)) throw Error("plateau factor must exceed 1");
  if (patience < 1) throw Error("plateau patience must be at least 1");
}

double PlateauScheduler::observe(double val_loss) {
  if (val_loss < best_) {
    best_ = val_loss;
    bad_epochs_ = 0;
    return lr_;
  }
  if (++bad_epochs_ >= patience_) {
    lr_ /= factor_;
    bad_epochs_ = 0;
    ++reductions_;
  }
  return lr_;
}

EarlyStopper::EarlyStopper(std::size_t patience) : patience_(patience) {
  if (patience < 1) throw Error("early-stop patience must be at least 1");
}

bool EarlyStopper::observe(double val_loss) {
  ++epoch_;
  improved_last_ = val_loss < best_;
  if (improved_last_) {
    best_ = val_loss;
    best_epoch_ = epoch_;
  }
  return epoch_ - best_epoch_ >= patience_;
}

double reduce_on_plateau(std::span<const double> val_losses, double initial_lr, double factor,
                         std::size_t patience) {
  PlateauScheduler s(initial_lr, factor, patience);
  for (double v : val_losses) s.observe(v);
  return s.lr();
}

bool early_stop(std::span<const double> val_losses, std::size_t patience) {
  EarlyStopper s(patience);
  bool stop = false;
  for (double v : val_losses) stop = s.observe(v) || stop;
  return stop;
}

}  // namespace sagenet

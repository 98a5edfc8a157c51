#pragma once

#include <string>
#include <vector>

#include "tumseg/augment.hpp"
#include "tumseg/optim.hpp"
#include "tumseg/planes.hpp"
#include "tumseg/unet.hpp"
#include "tumseg/volume.hpp"

namespace tumseg {

struct TrainConfig {
  int batch_size = 8;
  double lr_initial = 1e-3;
  double lr_factor = 0.1;
  int lr_step_epochs = 2;
  double lr_floor = 1e-5;
  int epochs = 50;
  double adam_epsilon = 1e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double val_fraction = 0.10;
  std::uint64_t seed = 0;

  void validate() const {
    if (batch_size < 1 || epochs < 1 || lr_step_epochs < 1)
      throw ConfigError("train: batch_size/epochs/lr_step_epochs must be "
                        ">= 1");
    if (!(lr_floor > 0) || lr_floor > lr_initial)
      throw ConfigError("train: need 0 < lr_floor <= lr_initial");
    if (!(val_fraction > 0) || !(val_fraction < 1))
      throw ConfigError("train: val_fraction must be in (0,1)");
  }

  double lr_at(int epoch) const {
    return lr_at_epoch(epoch, lr_initial, lr_factor, lr_step_epochs,
                       lr_floor);
  }
};

/// A preprocessed subject ready for slicing: cropped, normalised, labels in
/// the internal encoding.
struct TrainSubject {
  std::string id;
  MultiModalVolume vol;
  GridU8 labels;
};

struct EpochLoss {
  int epoch = 0;
  double lr = 0;
  LossBreakdown train;
  bool has_val = false;
  LossBreakdown val;
};

struct TrainResult {
  UNetParams<float> params;
  std::vector<EpochLoss> history;
};

/// Trains one network on 2D slices of the given plane. In tumour-core mode
/// (num_classes must be 2) the targets collapse to TC-vs-background and the
/// plane must be axial. Each epoch streams every original slice plus
/// (factor-1) freshly augmented copies in shuffled order; sample-level RNG
/// streams are derived from (seed, epoch, stream position) so results do not
/// depend on execution interleaving. Minimises the soft combined loss with
/// Adam under the stepped learning-rate schedule.
TrainResult train_model(const std::vector<TrainSubject> &train_subjects,
                        const std::vector<TrainSubject> &val_subjects,
                        UNetConfig net_cfg, const TrainConfig &tcfg,
                        const AugmentConfig &acfg, Plane plane, bool tc_mode);

/// Network defaults per role: axial/TC nets open with a 3x3 kernel,
/// sagittal/coronal with 5x5; TC nets are binary.
UNetConfig default_net_config(Plane plane, bool tc_mode, int base_width,
                              std::uint64_t seed);

/// `epoch,split,lr,ce,dice_term,total` rows, one per epoch per split.
void write_loss_history(const std::string &path,
                        const std::vector<EpochLoss> &history);

} // namespace tumseg

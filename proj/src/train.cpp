#include "tumseg/train.hpp"

#include <fstream>
#include <utility>

namespace tumseg {
namespace {

struct SliceSample {
  Slice2D image;
  Slice2D labels; // one channel of class ids
};

/// Flattens subjects into per-slice samples along the requested plane.
std::vector<SliceSample> build_samples(const std::vector<TrainSubject> &subs,
                                       Plane plane, bool tc_mode) {
  std::vector<SliceSample> out;
  for (const TrainSubject &s : subs) {
    GridU8 targets = s.labels;
    if (tc_mode) {
      LabelVolume lv;
      lv.labels = s.labels;
      targets = derive_tc(lv).mask;
    }
    SliceStack imgs = extract_slices(s.vol, plane);
    SliceStack labs = extract_label_slices(targets, plane);
    for (std::size_t i = 0; i < imgs.slices.size(); ++i)
      out.push_back({std::move(imgs.slices[i]), std::move(labs.slices[i])});
  }
  return out;
}

Batch2D<float> assemble_batch(const std::vector<SliceSample *> &samples,
                              int num_classes) {
  const int rows = samples.front()->image.rows;
  const int cols = samples.front()->image.cols;
  const int channels = int(samples.front()->image.channels.size());
  Batch2D<float> batch;
  batch.inputs = Tensor4<float>(int(samples.size()), channels, rows, cols);
  batch.targets = TargetArr(int(samples.size()), num_classes, rows, cols);
  for (int n = 0; n < int(samples.size()); ++n) {
    for (int ch = 0; ch < channels; ++ch)
      batch.inputs.plane(n, ch) = samples[n]->image.channels[ch];
    const auto &lab = samples[n]->labels.channels[0];
    for (std::int64_t p = 0; p < lab.size(); ++p)
      batch.targets.labels[std::int64_t(n) * lab.size() + p] =
          std::uint8_t(lab[p]);
  }
  return batch;
}

/// Weighted running mean of loss breakdowns (weights = sample counts).
struct LossAccum {
  double ce = 0, dice = 0, weight = 0;
  std::vector<double> per_class;

  void add(const LossBreakdown &b, double w) {
    ce += b.ce * w;
    dice += b.dice_term * w;
    if (per_class.empty())
      per_class.assign(b.per_class_dice.size(), 0.0);
    for (std::size_t c = 0; c < b.per_class_dice.size(); ++c)
      per_class[c] += b.per_class_dice[c] * w;
    weight += w;
  }

  LossBreakdown mean() const {
    LossBreakdown b;
    if (weight <= 0)
      return b;
    b.ce = ce / weight;
    b.dice_term = dice / weight;
    b.total = b.ce + b.dice_term;
    for (double v : per_class)
      b.per_class_dice.push_back(v / weight);
    return b;
  }
};

LossBreakdown eval_loss(const UNetParams<float> &params,
                        std::vector<SliceSample> &samples, int num_classes,
                        int batch_size) {
  LossAccum acc;
  for (std::size_t lo = 0; lo < samples.size();
       lo += std::size_t(batch_size)) {
    std::vector<SliceSample *> chunk;
    for (std::size_t i = lo;
         i < std::min(samples.size(), lo + std::size_t(batch_size)); ++i)
      chunk.push_back(&samples[i]);
    Batch2D<float> batch = assemble_batch(chunk, num_classes);
    Tensor4<float> probs = forward(params, batch.inputs);
    acc.add(combined_loss(probs, batch.targets, DiceMode::Soft),
            double(chunk.size()));
  }
  return acc.mean();
}

} // namespace

UNetConfig default_net_config(Plane plane, bool tc_mode, int base_width,
                              std::uint64_t seed) {
  UNetConfig cfg;
  cfg.in_channels = kModalities;
  cfg.num_classes = tc_mode ? 2 : kNumClasses;
  cfg.initial_kernel = (tc_mode || plane == Plane::Axial) ? 3 : 5;
  cfg.base_width = base_width;
  cfg.seed = seed;
  return cfg;
}

TrainResult train_model(const std::vector<TrainSubject> &train_subjects,
                        const std::vector<TrainSubject> &val_subjects,
                        UNetConfig net_cfg, const TrainConfig &tcfg,
                        const AugmentConfig &acfg, Plane plane,
                        bool tc_mode) {
  tcfg.validate();
  acfg.validate();
  net_cfg.validate();
  if (tc_mode && net_cfg.num_classes != 2)
    throw ConfigError("train: tumour-core mode needs num_classes = 2");
  if (tc_mode && plane != Plane::Axial)
    throw ConfigError("train: tumour-core mode runs on axial slices");
  if (train_subjects.empty())
    throw EmptyDataset("train: no training subjects");

  std::vector<SliceSample> train_samples =
      build_samples(train_subjects, plane, tc_mode);
  std::vector<SliceSample> val_samples =
      build_samples(val_subjects, plane, tc_mode);
  if (train_samples.empty())
    throw EmptyDataset("train: no training slices");

  TrainResult result;
  result.params = init_params<float>(net_cfg);
  AdamState<float> state = make_adam_state(result.params);
  AdamHyper hyper{tcfg.adam_beta1, tcfg.adam_beta2, tcfg.adam_epsilon};

  const std::int64_t n_orig = std::int64_t(train_samples.size());
  const int factor = acfg.factor;

  for (int epoch = 1; epoch <= tcfg.epochs; ++epoch) {
    const double lr = tcfg.lr_at(epoch);

    // Stream entry t: original index t/factor, copy t%factor (copy 0 is the
    // untouched slice). Augmentation draws come from a stream keyed by
    // (seed, epoch, t) so the shuffle cannot change sample contents.
    std::vector<std::int64_t> order(n_orig * factor);
    for (std::int64_t t = 0; t < std::int64_t(order.size()); ++t)
      order[t] = t;
    Rng shuffle_rng(substream_seed(tcfg.seed, std::uint64_t(epoch),
                                   std::uint64_t(1) << 40));
    shuffle_rng.shuffle(order);

    LossAccum train_acc;
    std::vector<SliceSample> scratch; // keeps augmented copies alive
    for (std::size_t lo = 0; lo < order.size();
         lo += std::size_t(tcfg.batch_size)) {
      const std::size_t hi =
          std::min(order.size(), lo + std::size_t(tcfg.batch_size));
      scratch.clear();
      scratch.reserve(hi - lo);
      for (std::size_t i = lo; i < hi; ++i) {
        const std::int64_t t = order[i];
        const std::int64_t orig = t / factor;
        if (t % factor == 0) {
          scratch.push_back(train_samples[orig]);
        } else {
          Rng sample_rng(substream_seed(tcfg.seed, std::uint64_t(epoch),
                                        std::uint64_t(t)));
          auto aug = augment_sample(train_samples[orig].image,
                                    train_samples[orig].labels, acfg,
                                    sample_rng);
          scratch.push_back({std::move(aug.first), std::move(aug.second)});
        }
      }
      std::vector<SliceSample *> chunk;
      for (auto &s : scratch)
        chunk.push_back(&s);

      Batch2D<float> batch = assemble_batch(chunk, net_cfg.num_classes);
      UNetCache<float> cache;
      Tensor4<float> probs = forward(result.params, batch.inputs, &cache);
      Tensor4<float> dlogits;
      LossBreakdown lb =
          combined_loss(probs, batch.targets, DiceMode::Soft, &dlogits);
      UNetParams<float> grads = backward(result.params, cache, dlogits);
      adam_step(result.params, grads, state, lr, hyper);
      train_acc.add(lb, double(chunk.size()));
    }

    EpochLoss row;
    row.epoch = epoch;
    row.lr = lr;
    row.train = train_acc.mean();
    if (!val_samples.empty()) {
      row.has_val = true;
      row.val = eval_loss(result.params, val_samples, net_cfg.num_classes,
                          tcfg.batch_size);
    }
    result.history.push_back(std::move(row));
  }
  return result;
}

void write_loss_history(const std::string &path,
                        const std::vector<EpochLoss> &history) {
  std::ofstream os(path);
  if (!os)
    throw IoFailure("cannot open " + path + " for writing");
  os << "epoch,split,lr,ce,dice_term,total\n";
  auto row = [&os](int epoch, const char *split, double lr,
                   const LossBreakdown &b) {
    os << epoch << ',' << split << ',' << lr << ',' << b.ce << ','
       << b.dice_term << ',' << b.total << '\n';
  };
  for (const EpochLoss &e : history) {
    row(e.epoch, "train", e.lr, e.train);
    if (e.has_val)
      row(e.epoch, "val", e.lr, e.val);
  }
  if (!os)
    throw IoFailure("write failed: " + path);
}

} // namespace tumseg

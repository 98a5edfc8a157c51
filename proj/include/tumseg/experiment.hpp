#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tumseg/config.hpp"
#include "tumseg/ensemble.hpp"
#include "tumseg/folds.hpp"
#include "tumseg/metrics.hpp"
#include "tumseg/train.hpp"
#include "tumseg/volume.hpp"

namespace tumseg {

// Dataset layout: <root>/<id>/<id><suffix> with one NIfTI per modality plus
// an optional label volume (external codes). Preprocessed trees add a crop
// sidecar per subject.
inline constexpr const char *kModalitySuffix[kModalities] = {
    "_flair.nii", "_t1.nii", "_t1ce.nii", "_t2.nii"};
inline constexpr const char *kLabelSuffix = "_seg.nii";
inline constexpr const char *kCropSuffix = "_crop.txt";

struct SubjectRecord {
  std::string id;
  std::array<std::string, kModalities> modality_path;
  std::string label_path; // empty when unlabelled

  bool has_labels() const { return !label_path.empty(); }
};

/// Subject directories under root, sorted by id. Throws EmptyDataset when
/// none are found and IncompleteStack when a subject is missing a modality.
std::vector<SubjectRecord> scan_dataset(const std::string &root);

/// Loads the four modalities and checks they share dims and voxel size.
MultiModalVolume load_modalities(const SubjectRecord &rec);

/// Loads a label NIfTI and remaps external codes to the internal encoding.
LabelVolume load_label_file(const std::string &path);

/// Writes a subject directory: float32 modalities plus, when given, labels
/// re-encoded externally.
void save_subject(const std::string &root, const std::string &id,
                  const MultiModalVolume &vol,
                  const LabelVolume *labels = nullptr);

/// Crop placement as `key = value` text, so a preprocessed tree carries how
/// to restore original geometry.
void write_crop_sidecar(const std::string &path, const CropSpec &spec);
CropSpec read_crop_sidecar(const std::string &path);

/// Working-grid choice: the clinical 240x240x155 grid maps to 192x192x160;
/// any grid whose dims are multiples of four (the two pooling stages) is
/// used as-is. Throws NonStandardGrid otherwise.
TargetGrid target_for(const Dims3 &dims);

struct PreparedSubject {
  TrainSubject data; // cropped + normalised; labels internal, empty grid if none
  bool has_labels = false;
  CropSpec crop;
};

/// Full preprocessing of one raw subject: crop to the working grid and
/// Gaussian-normalise each modality.
PreparedSubject prepare_subject(const SubjectRecord &rec);

/// Splits ids into (train, val) with round(val_fraction * n) validation
/// subjects after a seeded shuffle. Throws TooFewSubjects when no training
/// subject would remain.
std::pair<std::vector<std::string>, std::vector<std::string>>
split_train_val(std::vector<std::string> ids, double val_fraction,
                std::uint64_t seed);

/// Checkpoint file names inside a model directory, per role.
std::string model_filename(Plane plane, bool tc_mode);

/// Loads the checkpoints a subset needs from a directory of
/// axial/sagittal/coronal/tc checkpoints. Throws EmptyModelSet when a
/// required file is missing.
ModelSet load_model_set(const std::string &dir, Subset subset);

struct CrossvalConfig {
  int folds = 5;
  Subset subset = Subset::TPTC;
  bool ablate = false; // evaluate all four subsets from the same fold models
  RunConfig run;
};

struct SubsetResult {
  Subset subset;
  std::vector<MetricsReport> reports; // one per subject, in id order
  AggregateStats agg;
};

struct CrossvalResult {
  std::vector<FoldSplit> folds;
  std::vector<SubsetResult> subsets;
};

/// K-fold cross-validation over a labelled dataset: per fold, trains the
/// networks the configuration needs, predicts and post-processes the fold's
/// test subjects, and evaluates them in original geometry. Writes
/// checkpoints, loss histories, fold assignments, per-subset metrics and
/// aggregates (and the ablation report when enabled) under out_dir.
/// Progress lines go to `log` when given.
CrossvalResult run_crossval(const std::vector<SubjectRecord> &records,
                            const CrossvalConfig &cfg,
                            const std::string &out_dir,
                            std::ostream *log = nullptr);

/// Table-shaped ablation summary: one mean and one std row per
/// configuration over metric x region columns, then one row per
/// configuration pair with paired two-tailed t-test p-values.
void write_ablation_report(const std::string &path,
                           const std::vector<SubsetResult> &subsets);

} // namespace tumseg

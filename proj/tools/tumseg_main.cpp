// Command-line front end: phantom generation, preprocessing, training,
// inference, evaluation, cross-validation and overlay figures.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "tumseg/config.hpp"
#include "tumseg/experiment.hpp"
#include "tumseg/nifti.hpp"
#include "tumseg/phantom.hpp"
#include "tumseg/png.hpp"
#include "tumseg/postproc.hpp"

namespace fs = std::filesystem;
using namespace tumseg;

namespace {

void ensure_parent_dir(const std::string &path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty())
    fs::create_directories(parent);
}

void cmd_phantom(int count, int dims, std::uint64_t seed,
                 const std::string &out) {
  for (int i = 0; i < count; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "phantom_%03d", i);
    const PhantomSpec spec = randomized_phantom_spec(
        Dims3{dims, dims, dims}, seed, std::uint64_t(i));
    auto [vol, labels] = generate_phantom(spec);
    save_subject(out, id, vol, &labels);
    std::cout << "wrote " << out << "/" << id << std::endl;
  }
}

void cmd_preprocess(const std::string &in, const std::string &out) {
  for (const SubjectRecord &rec : scan_dataset(in)) {
    PreparedSubject prep = prepare_subject(rec);
    LabelVolume labels;
    if (prep.has_labels) {
      labels.labels = prep.data.labels;
      labels.voxel_size_mm = prep.data.vol.voxel_size_mm;
    }
    save_subject(out, rec.id, prep.data.vol,
                 prep.has_labels ? &labels : nullptr);
    write_crop_sidecar(
        (fs::path(out) / rec.id / (rec.id + kCropSuffix)).string(), prep.crop);
    std::cout << "preprocessed " << rec.id << std::endl;
  }
}

/// Loads an already-preprocessed subject: volumes as stored, labels internal,
/// crop from the sidecar (identity when absent).
struct LoadedSubject {
  TrainSubject data;
  bool has_labels = false;
  CropSpec crop;
};

LoadedSubject load_preprocessed(const SubjectRecord &rec) {
  LoadedSubject sub;
  sub.data.id = rec.id;
  sub.data.vol = load_modalities(rec);
  if (rec.has_labels()) {
    sub.data.labels = load_label_file(rec.label_path).labels;
    sub.has_labels = true;
  }
  const fs::path sidecar =
      fs::path(rec.modality_path[0]).parent_path() / (rec.id + kCropSuffix);
  if (fs::is_regular_file(sidecar)) {
    sub.crop = read_crop_sidecar(sidecar.string());
  } else {
    sub.crop.original_dims = sub.data.vol.dims();
  }
  return sub;
}

void cmd_train(const std::string &data, const std::string &plane_arg,
               const std::string &config_path, const std::string &out) {
  const bool tc_mode = plane_arg == "tc";
  const Plane plane = tc_mode ? Plane::Axial : parse_plane(plane_arg);

  RunConfig defaults;
  defaults.net = default_net_config(plane, tc_mode, defaults.net.base_width,
                                    defaults.net.seed);
  const RunConfig cfg = config_path.empty()
                            ? (defaults.validate(), defaults)
                            : load_config(config_path, defaults);

  std::vector<TrainSubject> all;
  for (const SubjectRecord &rec : scan_dataset(data)) {
    LoadedSubject sub = load_preprocessed(rec);
    if (!sub.has_labels)
      throw EmptyDataset("training subject " + rec.id + " has no labels");
    all.push_back(std::move(sub.data));
  }
  std::vector<std::string> ids;
  for (const auto &s : all)
    ids.push_back(s.id);
  const auto [train_ids, val_ids] =
      split_train_val(ids, cfg.train.val_fraction, cfg.train.seed);

  std::vector<TrainSubject> train_set, val_set;
  for (auto &s : all) {
    const bool is_val =
        std::find(val_ids.begin(), val_ids.end(), s.id) != val_ids.end();
    (is_val ? val_set : train_set).push_back(std::move(s));
  }
  std::cout << "training " << (tc_mode ? "tc" : plane_name(plane)) << " on "
            << train_set.size() << " subjects (" << val_set.size() << " val)"
            << std::endl;
  TrainResult result =
      train_model(train_set, val_set, cfg.net, cfg.train, cfg.augment, plane,
                  tc_mode);
  ensure_parent_dir(out);
  save_checkpoint(out, result.params);
  write_loss_history(out + ".loss.csv", result.history);
  std::cout << "wrote " << out << std::endl;
}

void cmd_predict(const std::string &data, const std::string &models_dir,
                 const std::string &subset_arg, const std::string &out,
                 bool write_probs) {
  const Subset subset = parse_subset(subset_arg);
  const ModelSet models = load_model_set(models_dir, subset);
  fs::create_directories(out);
  for (const SubjectRecord &rec : scan_dataset(data)) {
    const LoadedSubject sub = load_preprocessed(rec);
    SubjectPrediction pred =
        predict_subject(models, sub.data.vol, subset, sub.crop);
    const LabelVolume post =
        pred.p_tc ? postprocess(pred.labels, derive_tc_mask(*pred.p_tc))
                  : postprocess(pred.labels);
    LabelVolume restored = uncrop(post, sub.crop);
    restored.voxel_size_mm = sub.data.vol.voxel_size_mm;
    const LabelVolume ext =
        remap_labels(restored, LabelDirection::InternalToExternal);
    const std::array<float, 3> vox = {float(ext.voxel_size_mm[0]),
                                      float(ext.voxel_size_mm[1]),
                                      float(ext.voxel_size_mm[2])};
    nifti_write((fs::path(out) / (rec.id + "_pred.nii")).string(), ext.labels,
                vox);
    if (write_probs)
      for (int c = 0; c < pred.p_avg.num_classes(); ++c)
        nifti_write((fs::path(out) /
                     (rec.id + "_prob" + std::to_string(c) + ".nii"))
                        .string(),
                    pred.p_avg.prob[c], vox);
    std::cout << "predicted " << rec.id << std::endl;
  }
}

void cmd_evaluate(const std::string &pred_dir, const std::string &truth_dir,
                  const std::string &out) {
  std::vector<MetricsReport> reports;
  for (const SubjectRecord &rec : scan_dataset(truth_dir)) {
    if (!rec.has_labels())
      throw EmptyDataset("truth subject " + rec.id + " has no labels");
    const fs::path pred_path = fs::path(pred_dir) / (rec.id + "_pred.nii");
    if (!fs::is_regular_file(pred_path))
      throw IncompleteStack("no prediction for " + rec.id + " under " +
                            pred_dir);
    const LabelVolume pred = load_label_file(pred_path.string());
    const LabelVolume truth = load_label_file(rec.label_path);
    MetricsReport rep = evaluate_subject(pred, truth);
    rep.subject = rec.id;
    reports.push_back(std::move(rep));
    std::cout << "evaluated " << rec.id << std::endl;
  }
  ensure_parent_dir(out);
  write_metrics_csv(out, reports);
  const fs::path agg_path =
      fs::path(out).parent_path() / "aggregate.csv";
  write_aggregate_csv(agg_path.string(), aggregate(reports));
  std::cout << "wrote " << out << " and " << agg_path.string() << std::endl;
}

void cmd_crossval(const std::string &data, int folds, bool ablate,
                  const std::string &subset_arg,
                  const std::string &config_path, const std::string &out) {
  CrossvalConfig cfg;
  cfg.folds = folds;
  cfg.ablate = ablate;
  cfg.subset = parse_subset(subset_arg);
  if (!config_path.empty())
    cfg.run = load_config(config_path, cfg.run);
  run_crossval(scan_dataset(data), cfg, out, &std::cout);
  std::cout << "cross-validation complete; reports under " << out << std::endl;
}

void cmd_overlay(const std::string &image_path, const std::string &labels_path,
                 int slice, const std::string &out) {
  const NiftiVolume image = nifti_read(image_path);
  const LabelVolume labels = load_label_file(labels_path);
  require_same_dims(image.data.dims(), labels.dims(), "overlay inputs");
  write_overlay_png(out, image.data, labels.labels, slice);
  std::cout << "wrote " << out << std::endl;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Triplanar U-Net ensemble for brain tumour segmentation"};
  app.require_subcommand(1);

  int count = 1, dims = 64, folds = 5, slice = 0;
  std::uint64_t seed = 0;
  bool ablate = false, write_probs = false;
  std::string in, out, data, plane, config_path, models_dir, subset = "TPTC";
  std::string pred_dir, truth_dir, image_path, labels_path;

  auto *phantom = app.add_subcommand("phantom", "Generate synthetic subjects");
  phantom->add_option("--count", count, "Number of subjects")->required();
  phantom->add_option("--dims", dims, "Cubic volume edge (multiple of 4)")
      ->required();
  phantom->add_option("--seed", seed, "Base seed")->required();
  phantom->add_option("--out", out, "Output dataset directory")->required();

  auto *preprocess =
      app.add_subcommand("preprocess", "Crop and normalise a dataset");
  preprocess->add_option("--in", in, "Raw dataset directory")->required();
  preprocess->add_option("--out", out, "Preprocessed output directory")
      ->required();

  auto *train = app.add_subcommand("train", "Train one network");
  train->add_option("--data", data, "Preprocessed labelled dataset")
      ->required();
  train
      ->add_option("--plane", plane,
                   "axial | sagittal | coronal | tc (axial tumour-core net)")
      ->required();
  train->add_option("--config", config_path, "key = value config file");
  train->add_option("--out", out, "Checkpoint path")->required();

  auto *predict = app.add_subcommand("predict", "Segment a dataset");
  predict->add_option("--data", data, "Preprocessed dataset")->required();
  predict->add_option("--models", models_dir, "Directory of checkpoints")
      ->required();
  predict->add_option("--subset", subset, "A | AS | TP | TPTC");
  predict->add_option("--out", out, "Prediction output directory")->required();
  predict->add_flag("--probs", write_probs, "Also write probability volumes");

  auto *evaluate = app.add_subcommand("evaluate", "Score predictions");
  evaluate->add_option("--pred", pred_dir, "Directory of *_pred.nii files")
      ->required();
  evaluate->add_option("--truth", truth_dir, "Labelled dataset directory")
      ->required();
  evaluate->add_option("--out", out, "metrics.csv path")->required();

  auto *crossval =
      app.add_subcommand("crossval", "K-fold cross-validation study");
  crossval->add_option("--data", data, "Raw labelled dataset")->required();
  crossval->add_option("--folds", folds, "Number of folds");
  crossval->add_flag("--ablate", ablate,
                     "Evaluate all four model subsets and their pairwise "
                     "t-tests");
  crossval->add_option("--subset", subset, "Subset when not ablating");
  crossval->add_option("--config", config_path, "key = value config file");
  crossval->add_option("--out", out, "Report output directory")->required();

  auto *overlay = app.add_subcommand("overlay", "Label overlay figure");
  overlay->add_option("--image", image_path, "Intensity NIfTI volume")
      ->required();
  overlay->add_option("--labels", labels_path, "Label NIfTI volume")
      ->required();
  overlay->add_option("--slice", slice, "Axial slice index")->required();
  overlay->add_option("--out", out, "PNG path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*phantom)
      cmd_phantom(count, dims, seed, out);
    else if (*preprocess)
      cmd_preprocess(in, out);
    else if (*train)
      cmd_train(data, plane, config_path, out);
    else if (*predict)
      cmd_predict(data, models_dir, subset, out, write_probs);
    else if (*evaluate)
      cmd_evaluate(pred_dir, truth_dir, out);
    else if (*crossval)
      cmd_crossval(data, folds, ablate, subset, config_path, out);
    else if (*overlay)
      cmd_overlay(image_path, labels_path, slice, out);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}

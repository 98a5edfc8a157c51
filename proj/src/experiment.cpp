#include "tumseg/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "tumseg/nifti.hpp"
#include "tumseg/postproc.hpp"
#include "tumseg/rng.hpp"

namespace fs = std::filesystem;

namespace tumseg {
namespace {

std::array<float, 3> voxel_f(const std::array<double, 3> &v) {
  return {float(v[0]), float(v[1]), float(v[2])};
}

std::ofstream open_out(const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoFailure("cannot open for write: " + path);
  return out;
}

} // namespace

std::vector<SubjectRecord> scan_dataset(const std::string &root) {
  if (!fs::is_directory(root))
    throw EmptyDataset("not a directory: " + root);
  std::vector<SubjectRecord> records;
  for (const auto &entry : fs::directory_iterator(root)) {
    if (!entry.is_directory())
      continue;
    SubjectRecord rec;
    rec.id = entry.path().filename().string();
    for (int m = 0; m < kModalities; ++m) {
      const fs::path p = entry.path() / (rec.id + kModalitySuffix[m]);
      if (!fs::is_regular_file(p))
        throw IncompleteStack("subject " + rec.id + " is missing " +
                              p.filename().string());
      rec.modality_path[m] = p.string();
    }
    const fs::path lab = entry.path() / (rec.id + kLabelSuffix);
    if (fs::is_regular_file(lab))
      rec.label_path = lab.string();
    records.push_back(std::move(rec));
  }
  if (records.empty())
    throw EmptyDataset("no subject directories under " + root);
  std::sort(records.begin(), records.end(),
            [](const auto &a, const auto &b) { return a.id < b.id; });
  return records;
}

MultiModalVolume load_modalities(const SubjectRecord &rec) {
  MultiModalVolume vol;
  for (int m = 0; m < kModalities; ++m) {
    NiftiVolume nv = nifti_read(rec.modality_path[m]);
    if (m == 0) {
      for (int d = 0; d < 3; ++d)
        vol.voxel_size_mm[d] = nv.voxel_mm[d];
    } else {
      require_same_dims(vol.mod[0].dims(), nv.data.dims(),
                        ("modalities of " + rec.id).c_str());
    }
    vol.mod[m] = std::move(nv.data);
  }
  return vol;
}

LabelVolume load_label_file(const std::string &path) {
  NiftiVolume nv = nifti_read(path);
  LabelVolume external;
  external.labels = to_label_grid(nv.data);
  for (int d = 0; d < 3; ++d)
    external.voxel_size_mm[d] = nv.voxel_mm[d];
  return remap_labels(external, LabelDirection::ExternalToInternal);
}

void save_subject(const std::string &root, const std::string &id,
                  const MultiModalVolume &vol, const LabelVolume *labels) {
  const fs::path dir = fs::path(root) / id;
  fs::create_directories(dir);
  for (int m = 0; m < kModalities; ++m)
    nifti_write((dir / (id + kModalitySuffix[m])).string(), vol.mod[m],
                voxel_f(vol.voxel_size_mm));
  if (labels != nullptr) {
    const LabelVolume ext =
        remap_labels(*labels, LabelDirection::InternalToExternal);
    nifti_write((dir / (id + kLabelSuffix)).string(), ext.labels,
                voxel_f(ext.voxel_size_mm));
  }
}

void write_crop_sidecar(const std::string &path, const CropSpec &spec) {
  auto out = open_out(path);
  out << "x0 = " << spec.x0 << "\n"
      << "y0 = " << spec.y0 << "\n"
      << "pad_z_lo = " << spec.pad_z_lo << "\n"
      << "pad_z_hi = " << spec.pad_z_hi << "\n"
      << "original_x = " << spec.original_dims.x << "\n"
      << "original_y = " << spec.original_dims.y << "\n"
      << "original_z = " << spec.original_dims.z << "\n";
}

CropSpec read_crop_sidecar(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw IoFailure("cannot open crop sidecar: " + path);
  CropSpec spec;
  std::map<std::string, int *> fields = {
      {"x0", &spec.x0},
      {"y0", &spec.y0},
      {"pad_z_lo", &spec.pad_z_lo},
      {"pad_z_hi", &spec.pad_z_hi},
      {"original_x", &spec.original_dims.x},
      {"original_y", &spec.original_dims.y},
      {"original_z", &spec.original_dims.z},
  };
  std::string line;
  std::size_t found = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key, eq;
    int value = 0;
    if (!(ls >> key >> eq >> value) || eq != "=")
      throw SpecInvalid("crop sidecar: bad line '" + line + "' in " + path);
    const auto it = fields.find(key);
    if (it == fields.end())
      throw SpecInvalid("crop sidecar: unknown key '" + key + "' in " + path);
    *it->second = value;
    ++found;
  }
  if (found != fields.size())
    throw SpecInvalid("crop sidecar: missing fields in " + path);
  return spec;
}

TargetGrid target_for(const Dims3 &dims) {
  if (dims == Dims3{240, 240, 155})
    return {};
  if (dims.x >= 8 && dims.y >= 8 && dims.z >= 8 && dims.x % 4 == 0 &&
      dims.y % 4 == 0 && dims.z % 4 == 0)
    return TargetGrid{dims};
  throw NonStandardGrid("no working grid for input dims " + dims.str());
}

PreparedSubject prepare_subject(const SubjectRecord &rec) {
  PreparedSubject prep;
  MultiModalVolume raw = load_modalities(rec);
  std::optional<LabelVolume> labels;
  if (rec.has_labels()) {
    labels = load_label_file(rec.label_path);
    require_same_dims(raw.dims(), labels->dims(),
                      ("labels of " + rec.id).c_str());
  }
  CropResult crop = crop_to_standard(raw, labels ? &*labels : nullptr,
                                     target_for(raw.dims()));
  prep.data.id = rec.id;
  prep.data.vol = gaussian_normalize(crop.volume);
  if (crop.labels) {
    prep.data.labels = std::move(crop.labels->labels);
    prep.has_labels = true;
  }
  prep.crop = crop.spec;
  return prep;
}

std::pair<std::vector<std::string>, std::vector<std::string>>
split_train_val(std::vector<std::string> ids, double val_fraction,
                std::uint64_t seed) {
  if (!(val_fraction >= 0) || !(val_fraction < 1))
    throw ConfigError("val_fraction must be in [0,1)");
  Rng rng(substream_seed(seed, 0, std::uint64_t(1) << 40));
  rng.shuffle(ids);
  const auto n_val =
      std::size_t(std::lround(val_fraction * double(ids.size())));
  if (n_val >= ids.size())
    throw TooFewSubjects("validation split leaves no training subjects");
  std::vector<std::string> val(ids.begin(), ids.begin() + long(n_val));
  std::vector<std::string> train(ids.begin() + long(n_val), ids.end());
  return {std::move(train), std::move(val)};
}

std::string model_filename(Plane plane, bool tc_mode) {
  return tc_mode ? "tc.ckpt" : std::string(plane_name(plane)) + ".ckpt";
}

ModelSet load_model_set(const std::string &dir, Subset subset) {
  const auto load = [&dir](Plane plane, bool tc_mode) {
    const fs::path p = fs::path(dir) / model_filename(plane, tc_mode);
    if (!fs::is_regular_file(p))
      throw EmptyModelSet("missing checkpoint: " + p.string());
    return load_checkpoint(p.string());
  };
  ModelSet models;
  models.axial = load(Plane::Axial, false);
  if (subset != Subset::A)
    models.sagittal = load(Plane::Sagittal, false);
  if (subset == Subset::TP || subset == Subset::TPTC)
    models.coronal = load(Plane::Coronal, false);
  if (subset == Subset::TPTC)
    models.tc = load(Plane::Axial, true);
  return models;
}

namespace {

struct Role {
  Plane plane;
  bool tc_mode;
};

std::vector<Role> roles_for(Subset subset, bool ablate) {
  if (ablate || subset == Subset::TPTC)
    return {{Plane::Axial, false},
            {Plane::Sagittal, false},
            {Plane::Coronal, false},
            {Plane::Axial, true}};
  std::vector<Role> roles = {{Plane::Axial, false}};
  if (subset != Subset::A)
    roles.push_back({Plane::Sagittal, false});
  if (subset == Subset::TP)
    roles.push_back({Plane::Coronal, false});
  return roles;
}

std::optional<UNetParams<float>> &slot(ModelSet &models, const Role &role) {
  if (role.tc_mode)
    return models.tc;
  switch (role.plane) {
  case Plane::Axial:
    return models.axial;
  case Plane::Sagittal:
    return models.sagittal;
  default:
    return models.coronal;
  }
}

double metric_value(const RegionMetrics &m, int metric) {
  switch (metric) {
  case 0:
    return m.dice;
  case 1:
    return m.sensitivity;
  case 2:
    return m.specificity;
  default:
    return m.h95_mm;
  }
}

// Table column order: regions cycle ET, WT, TC within each metric.
constexpr SubRegion kRegionOrder[kNumRegions] = {SubRegion::ET, SubRegion::WT,
                                                 SubRegion::TC};

} // namespace

CrossvalResult run_crossval(const std::vector<SubjectRecord> &records,
                            const CrossvalConfig &cfg,
                            const std::string &out_dir, std::ostream *log) {
  cfg.run.validate();
  if (records.empty())
    throw EmptyDataset("cross-validation needs a labelled dataset");
  for (const auto &rec : records)
    if (!rec.has_labels())
      throw EmptyDataset("subject " + rec.id + " has no labels");

  fs::create_directories(out_dir);
  open_out((fs::path(out_dir) / "config.txt").string()) << config_text(cfg.run);

  std::vector<std::string> ids;
  std::map<std::string, const SubjectRecord *> by_id;
  for (const auto &rec : records) {
    ids.push_back(rec.id);
    by_id[rec.id] = &rec;
  }

  CrossvalResult result;
  result.folds = make_folds(ids, cfg.folds, cfg.run.train.val_fraction,
                            cfg.run.train.seed);
  {
    auto out = open_out((fs::path(out_dir) / "folds.csv").string());
    out << "subject,fold,role\n";
    for (std::size_t f = 0; f < result.folds.size(); ++f) {
      for (const auto &id : result.folds[f].train)
        out << id << ',' << f << ",train\n";
      for (const auto &id : result.folds[f].val)
        out << id << ',' << f << ",val\n";
      for (const auto &id : result.folds[f].test)
        out << id << ',' << f << ",test\n";
    }
  }

  if (log)
    *log << "preparing " << records.size() << " subjects" << std::endl;
  std::map<std::string, PreparedSubject> prepared;
  for (const auto &rec : records)
    prepared.emplace(rec.id, prepare_subject(rec));

  const std::vector<Subset> subsets =
      cfg.ablate ? std::vector<Subset>{Subset::A, Subset::AS, Subset::TP,
                                       Subset::TPTC}
                 : std::vector<Subset>{cfg.subset};
  const std::vector<Role> roles = roles_for(cfg.subset, cfg.ablate);
  std::map<Subset, std::vector<MetricsReport>> collected;

  for (std::size_t f = 0; f < result.folds.size(); ++f) {
    const FoldSplit &fold = result.folds[f];
    const fs::path fold_dir = fs::path(out_dir) / ("fold" + std::to_string(f));
    fs::create_directories(fold_dir);

    std::vector<TrainSubject> train_set, val_set;
    for (const auto &id : fold.train)
      train_set.push_back(prepared.at(id).data);
    for (const auto &id : fold.val)
      val_set.push_back(prepared.at(id).data);

    ModelSet models;
    for (std::size_t r = 0; r < roles.size(); ++r) {
      const Role role = roles[r];
      const std::uint64_t derived =
          substream_seed(cfg.run.train.seed, f, r + 1);
      UNetConfig net = default_net_config(role.plane, role.tc_mode,
                                          cfg.run.net.base_width, derived);
      TrainConfig tcfg = cfg.run.train;
      tcfg.seed = substream_seed(derived, 17);
      const std::string name = model_filename(role.plane, role.tc_mode);
      if (log)
        *log << "fold " << f << ": training " << name.substr(0, name.find('.'))
             << " on " << train_set.size() << " subjects" << std::endl;
      TrainResult trained = train_model(train_set, val_set, net, tcfg,
                                        cfg.run.augment, role.plane,
                                        role.tc_mode);
      save_checkpoint((fold_dir / name).string(), trained.params);
      write_loss_history(
          (fold_dir / (name.substr(0, name.find('.')) + "_loss.csv")).string(),
          trained.history);
      slot(models, role) = std::move(trained.params);
    }

    const fs::path pred_dir = fold_dir / "pred";
    fs::create_directories(pred_dir);
    for (const auto &id : fold.test) {
      const PreparedSubject &prep = prepared.at(id);
      // Each trained plane runs once; subsets then reuse the cached
      // probability volumes (equivalent to predict_subject per subset).
      std::optional<ProbVolume> axial, sagittal, coronal, tc;
      if (models.axial)
        axial = predict_plane(*models.axial, prep.data.vol, Plane::Axial);
      if (models.sagittal)
        sagittal =
            predict_plane(*models.sagittal, prep.data.vol, Plane::Sagittal);
      if (models.coronal)
        coronal =
            predict_plane(*models.coronal, prep.data.vol, Plane::Coronal);
      if (models.tc)
        tc = predict_plane(*models.tc, prep.data.vol, Plane::Axial);

      const LabelVolume truth = load_label_file(by_id.at(id)->label_path);
      for (Subset s : subsets) {
        std::vector<ProbVolume> planes = {*axial};
        if (s != Subset::A)
          planes.push_back(*sagittal);
        if (s == Subset::TP || s == Subset::TPTC)
          planes.push_back(*coronal);
        LabelVolume labels = argmax_labels(average_probs(planes));
        labels.voxel_size_mm = prep.data.vol.voxel_size_mm;
        const LabelVolume post = s == Subset::TPTC
                                     ? postprocess(labels, derive_tc_mask(*tc))
                                     : postprocess(labels);
        LabelVolume restored = uncrop(post, prep.crop);
        restored.voxel_size_mm = truth.voxel_size_mm;
        if (s == cfg.subset) {
          const LabelVolume ext =
              remap_labels(restored, LabelDirection::InternalToExternal);
          nifti_write((pred_dir / (id + "_pred.nii")).string(), ext.labels,
                      voxel_f(ext.voxel_size_mm));
        }
        MetricsReport rep = evaluate_subject(restored, truth);
        rep.subject = id;
        collected[s].push_back(std::move(rep));
      }
      if (log)
        *log << "fold " << f << ": evaluated " << id << std::endl;
    }
  }

  for (Subset s : subsets) {
    SubsetResult sr;
    sr.subset = s;
    sr.reports = std::move(collected[s]);
    std::sort(sr.reports.begin(), sr.reports.end(),
              [](const auto &a, const auto &b) { return a.subject < b.subject; });
    sr.agg = aggregate(sr.reports);
    const fs::path dir = fs::path(out_dir) / subset_name(s);
    fs::create_directories(dir);
    write_metrics_csv((dir / "metrics.csv").string(), sr.reports);
    write_aggregate_csv((dir / "aggregate.csv").string(), sr.agg);
    result.subsets.push_back(std::move(sr));
  }
  if (cfg.ablate)
    write_ablation_report((fs::path(out_dir) / "ablation.csv").string(),
                          result.subsets);
  return result;
}

void write_ablation_report(const std::string &path,
                           const std::vector<SubsetResult> &subsets) {
  if (subsets.size() < 2)
    throw ConfigError("ablation report needs at least two configurations");
  for (const auto &sr : subsets) {
    if (sr.reports.size() != subsets.front().reports.size())
      throw LengthMismatch("ablation: configurations cover different subjects");
    for (std::size_t i = 0; i < sr.reports.size(); ++i)
      if (sr.reports[i].subject != subsets.front().reports[i].subject)
        throw LengthMismatch("ablation: subject order differs between "
                             "configurations");
  }

  auto out = open_out(path);
  out << "config,stat";
  for (int m = 0; m < kNumMetrics; ++m)
    for (SubRegion r : kRegionOrder)
      out << ',' << metric_name(m) << '_' << region_name(r);
  out << '\n';

  out.precision(6);
  for (const auto &sr : subsets) {
    out << subset_name(sr.subset) << ",mean";
    for (int m = 0; m < kNumMetrics; ++m)
      for (SubRegion r : kRegionOrder)
        out << ',' << sr.agg.at(r, m).mean;
    out << '\n' << subset_name(sr.subset) << ",std";
    for (int m = 0; m < kNumMetrics; ++m)
      for (SubRegion r : kRegionOrder)
        out << ',' << sr.agg.at(r, m).stddev;
    out << '\n';
  }

  const auto series = [](const SubsetResult &sr, int metric, SubRegion r) {
    std::vector<double> v;
    v.reserve(sr.reports.size());
    for (const auto &rep : sr.reports)
      v.push_back(metric_value(rep.regions[int(r)], metric));
    return v;
  };
  for (std::size_t i = 0; i < subsets.size(); ++i)
    for (std::size_t j = i + 1; j < subsets.size(); ++j) {
      out << subset_name(subsets[i].subset) << "_vs_"
          << subset_name(subsets[j].subset) << ",pvalue";
      for (int m = 0; m < kNumMetrics; ++m)
        for (SubRegion r : kRegionOrder) {
          const auto res = paired_t_test(series(subsets[i], m, r),
                                         series(subsets[j], m, r));
          out << ',' << res.p;
        }
      out << '\n';
    }
}

} // namespace tumseg

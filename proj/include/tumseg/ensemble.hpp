#pragma once

#include <optional>

#include "tumseg/planes.hpp"
#include "tumseg/unet.hpp"
#include "tumseg/volume.hpp"

namespace tumseg {

/// Model configurations for the ablation study: axial only, axial+sagittal,
/// full triplanar, and triplanar plus the tumour-core network.
enum class Subset { A, AS, TP, TPTC };

const char *subset_name(Subset s);
Subset parse_subset(const std::string &name);

/// The networks trained for one fold. Plane nets are 4-class; the TC net is
/// binary and runs on axial slices.
struct ModelSet {
  std::optional<UNetParams<float>> axial, sagittal, coronal, tc;
};

struct SubjectPrediction {
  ProbVolume p_avg;                // 4-class, averaged over included planes
  std::optional<ProbVolume> p_tc;  // binary, present for TPTC
  LabelVolume labels;              // argmax of p_avg (internal encoding)
  CropSpec crop;
};

/// Runs one network over every slice of a plane and reassembles the 3D
/// probability volume.
ProbVolume predict_plane(const UNetParams<float> &params,
                         const MultiModalVolume &vol, Plane plane,
                         int batch_size = 8);

/// Subject-level inference on a preprocessed volume: per-plane prediction,
/// probability averaging over the subset's planes, argmax labels, and the
/// TC probability volume when the subset includes it.
SubjectPrediction predict_subject(const ModelSet &models,
                                  const MultiModalVolume &vol, Subset subset,
                                  const CropSpec &crop = {});

/// Per-voxel argmax; ties resolve to the lowest class index.
LabelVolume argmax_labels(const ProbVolume &p);

/// Binary argmax of TC against background; the 0.5/0.5 tie goes to TC.
TCMask derive_tc_mask(const ProbVolume &p_tc);

/// Per-voxel modal label across fold models. Ties: highest summed
/// probability among the tied labels when probability volumes are given,
/// else fixed priority ET > NCR/NET > ED > background.
LabelVolume majority_vote(const std::vector<LabelVolume> &label_maps,
                          const std::vector<ProbVolume> *prob_maps = nullptr);

} // namespace tumseg

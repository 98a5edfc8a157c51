#include "tumseg/ensemble.hpp"

#include <algorithm>

namespace tumseg {
namespace {

void require_model(const std::optional<UNetParams<float>> &m,
                   const char *name) {
  if (!m)
    throw EmptyModelSet(std::string("missing ") + name + " model");
}

} // namespace

const char *subset_name(Subset s) {
  switch (s) {
  case Subset::A:
    return "A";
  case Subset::AS:
    return "AS";
  case Subset::TP:
    return "TP";
  default:
    return "TPTC";
  }
}

Subset parse_subset(const std::string &name) {
  if (name == "A")
    return Subset::A;
  if (name == "AS")
    return Subset::AS;
  if (name == "TP")
    return Subset::TP;
  if (name == "TPTC")
    return Subset::TPTC;
  throw ConfigError("unknown model subset '" + name +
                    "' (expected A, AS, TP or TPTC)");
}

ProbVolume predict_plane(const UNetParams<float> &params,
                         const MultiModalVolume &vol, Plane plane,
                         int batch_size) {
  const int C = params.config.num_classes;
  SliceStack stack = extract_slices(vol, plane);
  SliceStack probs_stack;
  probs_stack.plane = plane;
  probs_stack.grid_dims = stack.grid_dims;
  probs_stack.slices.resize(stack.slices.size());

  const int total = int(stack.slices.size());
  for (int lo = 0; lo < total; lo += batch_size) {
    const int hi = std::min(total, lo + batch_size);
    const Slice2D &first = stack.slices[lo];
    Tensor4<float> inputs(hi - lo, int(first.channels.size()), first.rows,
                          first.cols);
    for (int n = 0; n < hi - lo; ++n)
      for (std::size_t ch = 0; ch < first.channels.size(); ++ch)
        inputs.plane(n, int(ch)) = stack.slices[lo + n].channels[ch];

    Tensor4<float> probs = forward(params, inputs);
    for (int n = 0; n < hi - lo; ++n) {
      Slice2D &out = probs_stack.slices[lo + n];
      out.index = stack.slices[lo + n].index;
      out.rows = first.rows;
      out.cols = first.cols;
      out.channels.resize(C);
      for (int c = 0; c < C; ++c)
        out.channels[c] = probs.plane(n, c);
    }
  }
  return assemble_probs(probs_stack, plane);
}

SubjectPrediction predict_subject(const ModelSet &models,
                                  const MultiModalVolume &vol, Subset subset,
                                  const CropSpec &crop) {
  std::vector<std::pair<const std::optional<UNetParams<float>> *, Plane>>
      planes;
  planes.emplace_back(&models.axial, Plane::Axial);
  if (subset != Subset::A)
    planes.emplace_back(&models.sagittal, Plane::Sagittal);
  if (subset == Subset::TP || subset == Subset::TPTC)
    planes.emplace_back(&models.coronal, Plane::Coronal);

  std::vector<ProbVolume> vols;
  for (auto &[model, plane] : planes) {
    require_model(*model, plane_name(plane));
    vols.push_back(predict_plane(**model, vol, plane));
  }

  SubjectPrediction pred;
  pred.crop = crop;
  pred.p_avg = average_probs(vols);
  if (subset == Subset::TPTC) {
    require_model(models.tc, "tumour-core");
    pred.p_tc = predict_plane(*models.tc, vol, Plane::Axial);
  }
  pred.labels = argmax_labels(pred.p_avg);
  pred.labels.voxel_size_mm = {vol.voxel_size_mm[0], vol.voxel_size_mm[1],
                               vol.voxel_size_mm[2]};
  return pred;
}

LabelVolume argmax_labels(const ProbVolume &p) {
  LabelVolume out(p.dims());
  const int C = p.num_classes();
  for (std::int64_t i = 0; i < std::int64_t(out.labels.size()); ++i) {
    int best = 0;
    float bv = p.prob[0][i];
    for (int c = 1; c < C; ++c)
      if (p.prob[c][i] > bv) {
        bv = p.prob[c][i];
        best = c;
      }
    out.labels[i] = std::uint8_t(best);
  }
  return out;
}

TCMask derive_tc_mask(const ProbVolume &p_tc) {
  if (p_tc.num_classes() != 2)
    throw ShapeMismatch("tumour-core volume must have exactly 2 classes");
  TCMask out(p_tc.dims());
  for (std::int64_t i = 0; i < std::int64_t(out.mask.size()); ++i)
    out.mask[i] = p_tc.prob[1][i] >= p_tc.prob[0][i] ? 1 : 0;
  return out;
}

LabelVolume majority_vote(const std::vector<LabelVolume> &label_maps,
                          const std::vector<ProbVolume> *prob_maps) {
  if (label_maps.empty())
    throw EmptyList("majority_vote: no label maps");
  const Dims3 dims = label_maps[0].dims();
  for (const LabelVolume &m : label_maps)
    if (!(m.dims() == dims))
      throw ShapeMismatch("majority_vote: " + m.dims().str() + " vs " +
                          dims.str());
  if (prob_maps) {
    if (prob_maps->size() != label_maps.size())
      throw ShapeMismatch("majority_vote: map counts differ");
    for (const ProbVolume &p : *prob_maps)
      if (!(p.dims() == dims) || p.num_classes() != kNumClasses)
        throw ShapeMismatch("majority_vote: probability grids disagree");
  }

  // Tie priority without probabilities: ET > NCR/NET > ED > background.
  static constexpr int kPriority[kNumClasses] = {0, 2, 1, 3};

  LabelVolume out(dims);
  out.voxel_size_mm = label_maps[0].voxel_size_mm;
  for (std::int64_t i = 0; i < std::int64_t(out.labels.size()); ++i) {
    int votes[kNumClasses] = {0, 0, 0, 0};
    for (const LabelVolume &m : label_maps) {
      const std::uint8_t v = m.labels[i];
      if (v >= kNumClasses)
        throw UnknownLabel(v, std::size_t(i));
      ++votes[v];
    }
    int top = 0;
    for (int c = 1; c < kNumClasses; ++c)
      if (votes[c] > votes[top])
        top = c;

    int winner = top;
    if (prob_maps) {
      double best_sum = -1;
      for (int c = 0; c < kNumClasses; ++c) {
        if (votes[c] != votes[top])
          continue;
        double sum = 0;
        for (const ProbVolume &p : *prob_maps)
          sum += p.prob[c][i];
        if (sum > best_sum) {
          best_sum = sum;
          winner = c;
        }
      }
    } else {
      for (int c = 0; c < kNumClasses; ++c)
        if (votes[c] == votes[top] && kPriority[c] > kPriority[winner])
          winner = c;
    }
    out.labels[i] = std::uint8_t(winner);
  }
  return out;
}

} // namespace tumseg

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tumseg/stats.hpp"
#include "tumseg/volume.hpp"

namespace tumseg {

/// Evaluation sub-regions: ET alone, TC = ET + NCR/NET, WT = TC + ED.
enum class SubRegion { ET = 0, TC = 1, WT = 2 };
inline constexpr int kNumRegions = 3;
const char *region_name(SubRegion r);

struct RegionMasks {
  GridU8 et, tc, wt; // nested: et <= tc <= wt
};
RegionMasks compose_subregions(const LabelVolume &labels);

struct ConfusionCounts {
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

struct RegionMetrics {
  double dice = 0, sensitivity = 0, specificity = 0, h95_mm = 0;
  ConfusionCounts counts;
};

/// Voxel-count metrics with the empty-mask conventions: both masks empty ->
/// dice 1; empty truth -> sensitivity 1; empty non-truth grid -> specificity
/// 1. h95_mm is filled separately.
RegionMetrics confusion_metrics(const GridU8 &pred, const GridU8 &truth);

/// 95th-percentile symmetric boundary distance. Boundaries are mask voxels
/// with a 6-neighbour outside the mask or the grid; directed distances from
/// both boundaries are pooled and the 95th percentile taken by linear
/// interpolation. Both masks empty -> 0; exactly one empty -> the full-grid
/// diagonal in mm.
double hausdorff95(const GridU8 &pred, const GridU8 &truth,
                   const std::array<double, 3> &voxel_size_mm = {1, 1, 1});

struct MetricsReport {
  std::string subject;
  std::array<RegionMetrics, kNumRegions> regions; // indexed by SubRegion
};

/// All four metrics over the three sub-regions of a prediction/truth pair
/// (internal label encoding).
MetricsReport evaluate_subject(const LabelVolume &pred,
                               const LabelVolume &truth);

/// Distribution summary of one metric across subjects.
struct Stats {
  double mean = 0, stddev = 0, median = 0, q25 = 0, q75 = 0;
};

inline constexpr int kNumMetrics = 4; // dice, sensitivity, specificity, h95
const char *metric_name(int m);

struct AggregateStats {
  std::array<std::array<Stats, kNumMetrics>, kNumRegions> values;

  const Stats &at(SubRegion r, int metric) const {
    return values[int(r)][metric];
  }
};

AggregateStats aggregate(const std::vector<MetricsReport> &reports);

/// `subject,region,dice,sensitivity,specificity,h95` rows.
void write_metrics_csv(const std::string &path,
                       const std::vector<MetricsReport> &reports);

/// Aggregate rows: `region,metric,mean,std,median,q25,q75`.
void write_aggregate_csv(const std::string &path, const AggregateStats &agg);

} // namespace tumseg

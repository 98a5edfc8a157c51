#include "tumseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "tumseg/errors.hpp"

namespace tumseg {
namespace {

/// Sentinel for "no seed reachable yet": large but finite so the parabola
/// intersection arithmetic stays well-defined. True squared distances here
/// never exceed ~1.4e5 mm^2, so the sentinel can never win a minimisation.
constexpr double kFar = 1e18;

/// Mask voxels with at least one of their 6 face-neighbours outside the mask
/// (or outside the grid).
std::vector<std::int64_t> boundary_voxels(const GridU8 &mask) {
  const Dims3 d = mask.dims();
  std::vector<std::int64_t> out;
  for (std::int64_t i = 0; i < std::int64_t(mask.size()); ++i) {
    if (!mask[i])
      continue;
    const auto c = mask.coords(i);
    const int x = c[0], y = c[1], z = c[2];
    auto inside = [&](int xx, int yy, int zz) {
      if (xx < 0 || xx >= d.x || yy < 0 || yy >= d.y || zz < 0 || zz >= d.z)
        return false;
      return mask[xx + std::int64_t(d.x) * (yy + std::int64_t(d.y) * zz)] !=
             0;
    };
    if (!inside(x - 1, y, z) || !inside(x + 1, y, z) || !inside(x, y - 1, z) ||
        !inside(x, y + 1, z) || !inside(x, y, z - 1) || !inside(x, y, z + 1))
      out.push_back(i);
  }
  return out;
}

/// 1D squared-distance transform via the lower envelope of parabolas,
/// sample positions spaced `step` apart. f holds squared distances on entry
/// (kFar where no seed) and exact minima on exit.
void dt1d(std::vector<double> &f, double step, std::vector<double> &scratch,
          std::vector<int> &v, std::vector<double> &z) {
  const int n = int(f.size());
  v.assign(n, 0);
  z.assign(std::size_t(n) + 1, 0.0);
  auto pos = [step](int i) { return double(i) * step; };
  auto intersect = [&](int q, int p) {
    const double pq = pos(q), pp = pos(p);
    return ((f[q] + pq * pq) - (f[p] + pp * pp)) / (2 * pq - 2 * pp);
  };
  int k = 0;
  z[0] = -kFar;
  z[1] = kFar;
  for (int q = 1; q < n; ++q) {
    double s = intersect(q, v[k]);
    while (k > 0 && s <= z[k]) {
      --k;
      s = intersect(q, v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kFar;
  }
  scratch.resize(n);
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < pos(q))
      ++k;
    const double dx = pos(q) - pos(v[k]);
    scratch[q] = dx * dx + f[v[k]];
  }
  f = scratch;
}

/// Exact squared Euclidean distance (mm) from every grid voxel to the given
/// seed voxels, by separable lower-envelope passes along x, y, z.
std::vector<double> distance_transform(const Dims3 &d,
                                       const std::vector<std::int64_t> &seeds,
                                       const std::array<double, 3> &voxel) {
  std::vector<double> dist(std::size_t(d.count()), kFar);
  for (std::int64_t s : seeds)
    dist[std::size_t(s)] = 0;

  std::vector<double> line, scratch, z;
  std::vector<int> v;
  auto index = [&d](int x, int y, int zz) {
    return std::size_t(x) + std::size_t(d.x) * (std::size_t(y) +
                                                std::size_t(d.y) * zz);
  };

  // x pass
  line.resize(d.x);
  for (int zz = 0; zz < d.z; ++zz)
    for (int y = 0; y < d.y; ++y) {
      bool any = false;
      for (int x = 0; x < d.x; ++x) {
        line[x] = dist[index(x, y, zz)];
        any |= line[x] < kFar / 2;
      }
      if (!any)
        continue;
      dt1d(line, voxel[0], scratch, v, z);
      for (int x = 0; x < d.x; ++x)
        dist[index(x, y, zz)] = line[x];
    }
  // y pass
  line.resize(d.y);
  for (int zz = 0; zz < d.z; ++zz)
    for (int x = 0; x < d.x; ++x) {
      bool any = false;
      for (int y = 0; y < d.y; ++y) {
        line[y] = dist[index(x, y, zz)];
        any |= line[y] < kFar / 2;
      }
      if (!any)
        continue;
      dt1d(line, voxel[1], scratch, v, z);
      for (int y = 0; y < d.y; ++y)
        dist[index(x, y, zz)] = line[y];
    }
  // z pass
  line.resize(d.z);
  for (int y = 0; y < d.y; ++y)
    for (int x = 0; x < d.x; ++x) {
      bool any = false;
      for (int zz = 0; zz < d.z; ++zz) {
        line[zz] = dist[index(x, y, zz)];
        any |= line[zz] < kFar / 2;
      }
      if (!any)
        continue;
      dt1d(line, voxel[2], scratch, v, z);
      for (int zz = 0; zz < d.z; ++zz)
        dist[index(x, y, zz)] = line[zz];
    }
  return dist;
}

} // namespace

const char *region_name(SubRegion r) {
  switch (r) {
  case SubRegion::ET:
    return "ET";
  case SubRegion::TC:
    return "TC";
  default:
    return "WT";
  }
}

const char *metric_name(int m) {
  switch (m) {
  case 0:
    return "dice";
  case 1:
    return "sensitivity";
  case 2:
    return "specificity";
  default:
    return "h95";
  }
}

RegionMasks compose_subregions(const LabelVolume &labels) {
  RegionMasks m{GridU8(labels.dims()), GridU8(labels.dims()),
                GridU8(labels.dims())};
  for (std::size_t i = 0; i < labels.labels.size(); ++i) {
    const std::uint8_t v = labels.labels[i];
    if (v >= kNumClasses)
      throw UnknownLabel(v, i);
    m.et[i] = v == kEnhancing;
    m.tc[i] = v == kEnhancing || v == kNcrNet;
    m.wt[i] = v != kBackground;
  }
  return m;
}

RegionMetrics confusion_metrics(const GridU8 &pred, const GridU8 &truth) {
  require_same_dims(pred.dims(), truth.dims(), "confusion_metrics");
  RegionMetrics m;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred[i] != 0, t = truth[i] != 0;
    m.counts.tp += p && t;
    m.counts.fp += p && !t;
    m.counts.fn += !p && t;
    m.counts.tn += !p && !t;
  }
  const auto &c = m.counts;
  m.dice = (c.tp + c.fp + c.fn) == 0
               ? 1.0
               : 2.0 * c.tp / double(2 * c.tp + c.fp + c.fn);
  m.sensitivity = (c.tp + c.fn) == 0 ? 1.0 : c.tp / double(c.tp + c.fn);
  m.specificity = (c.tn + c.fp) == 0 ? 1.0 : c.tn / double(c.tn + c.fp);
  return m;
}

double hausdorff95(const GridU8 &pred, const GridU8 &truth,
                   const std::array<double, 3> &voxel_size_mm) {
  require_same_dims(pred.dims(), truth.dims(), "hausdorff95");
  const std::vector<std::int64_t> bp = boundary_voxels(pred);
  const std::vector<std::int64_t> bt = boundary_voxels(truth);
  if (bp.empty() && bt.empty())
    return 0.0;
  if (bp.empty() || bt.empty()) {
    const Dims3 d = pred.dims();
    const double dx = d.x * voxel_size_mm[0];
    const double dy = d.y * voxel_size_mm[1];
    const double dz = d.z * voxel_size_mm[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
  }

  const std::vector<double> to_truth =
      distance_transform(pred.dims(), bt, voxel_size_mm);
  const std::vector<double> to_pred =
      distance_transform(pred.dims(), bp, voxel_size_mm);

  std::vector<double> distances;
  distances.reserve(bp.size() + bt.size());
  for (std::int64_t i : bp)
    distances.push_back(std::sqrt(to_truth[std::size_t(i)]));
  for (std::int64_t i : bt)
    distances.push_back(std::sqrt(to_pred[std::size_t(i)]));
  return quantile(std::move(distances), 0.95);
}

MetricsReport evaluate_subject(const LabelVolume &pred,
                               const LabelVolume &truth) {
  require_same_dims(pred.dims(), truth.dims(), "evaluate_subject");
  const RegionMasks pm = compose_subregions(pred);
  const RegionMasks tm = compose_subregions(truth);
  const std::array<const GridU8 *, kNumRegions> pmask{&pm.et, &pm.tc, &pm.wt};
  const std::array<const GridU8 *, kNumRegions> tmask{&tm.et, &tm.tc, &tm.wt};

  MetricsReport rep;
  for (int r = 0; r < kNumRegions; ++r) {
    rep.regions[r] = confusion_metrics(*pmask[r], *tmask[r]);
    rep.regions[r].h95_mm =
        hausdorff95(*pmask[r], *tmask[r], truth.voxel_size_mm);
  }
  return rep;
}

AggregateStats aggregate(const std::vector<MetricsReport> &reports) {
  if (reports.empty())
    throw EmptyList("aggregate: no reports");
  AggregateStats agg;
  for (int r = 0; r < kNumRegions; ++r)
    for (int m = 0; m < kNumMetrics; ++m) {
      std::vector<double> vals;
      vals.reserve(reports.size());
      for (const MetricsReport &rep : reports) {
        const RegionMetrics &rm = rep.regions[r];
        vals.push_back(m == 0   ? rm.dice
                       : m == 1 ? rm.sensitivity
                       : m == 2 ? rm.specificity
                                : rm.h95_mm);
      }
      Stats &s = agg.values[r][m];
      s.mean = mean_of(vals);
      s.stddev = sample_std(vals);
      s.median = quantile(vals, 0.5);
      s.q25 = quantile(vals, 0.25);
      s.q75 = quantile(vals, 0.75);
    }
  return agg;
}

void write_metrics_csv(const std::string &path,
                       const std::vector<MetricsReport> &reports) {
  std::ofstream os(path);
  if (!os)
    throw IoFailure("cannot open " + path + " for writing");
  os << "subject,region,dice,sensitivity,specificity,h95\n";
  for (const MetricsReport &rep : reports)
    for (int r = 0; r < kNumRegions; ++r) {
      const RegionMetrics &m = rep.regions[r];
      os << rep.subject << ',' << region_name(SubRegion(r)) << ',' << m.dice
         << ',' << m.sensitivity << ',' << m.specificity << ',' << m.h95_mm
         << '\n';
    }
  if (!os)
    throw IoFailure("write failed: " + path);
}

void write_aggregate_csv(const std::string &path, const AggregateStats &agg) {
  std::ofstream os(path);
  if (!os)
    throw IoFailure("cannot open " + path + " for writing");
  os << "region,metric,mean,std,median,q25,q75\n";
  for (int r = 0; r < kNumRegions; ++r)
    for (int m = 0; m < kNumMetrics; ++m) {
      const Stats &s = agg.values[r][m];
      os << region_name(SubRegion(r)) << ',' << metric_name(m) << ','
         << s.mean << ',' << s.stddev << ',' << s.median << ',' << s.q25
         << ',' << s.q75 << '\n';
    }
  if (!os)
    throw IoFailure("write failed: " + path);
}

} // namespace tumseg

#include "tumseg/nifti.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

#include "tumseg/errors.hpp"

namespace tumseg {
namespace {

template <typename T> T bswap(T v) {
  auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
  std::reverse(bytes.begin(), bytes.end());
  return std::bit_cast<T>(bytes);
}

void swap_header(Nifti1Header &h) {
  h.sizeof_hdr = bswap(h.sizeof_hdr);
  h.extents = bswap(h.extents);
  h.session_error = bswap(h.session_error);
  for (auto &d : h.dim)
    d = bswap(d);
  h.intent_p1 = bswap(h.intent_p1);
  h.intent_p2 = bswap(h.intent_p2);
  h.intent_p3 = bswap(h.intent_p3);
  h.intent_code = bswap(h.intent_code);
  h.datatype = bswap(h.datatype);
  h.bitpix = bswap(h.bitpix);
  h.slice_start = bswap(h.slice_start);
  for (auto &p : h.pixdim)
    p = bswap(p);
  h.vox_offset = bswap(h.vox_offset);
  h.scl_slope = bswap(h.scl_slope);
  h.scl_inter = bswap(h.scl_inter);
  h.slice_end = bswap(h.slice_end);
  h.cal_max = bswap(h.cal_max);
  h.cal_min = bswap(h.cal_min);
  h.slice_duration = bswap(h.slice_duration);
  h.toffset = bswap(h.toffset);
  h.glmax = bswap(h.glmax);
  h.glmin = bswap(h.glmin);
  h.qform_code = bswap(h.qform_code);
  h.sform_code = bswap(h.sform_code);
  h.quatern_b = bswap(h.quatern_b);
  h.quatern_c = bswap(h.quatern_c);
  h.quatern_d = bswap(h.quatern_d);
  h.qoffset_x = bswap(h.qoffset_x);
  h.qoffset_y = bswap(h.qoffset_y);
  h.qoffset_z = bswap(h.qoffset_z);
  for (auto &v : h.srow_x)
    v = bswap(v);
  for (auto &v : h.srow_y)
    v = bswap(v);
  for (auto &v : h.srow_z)
    v = bswap(v);
}

template <typename T>
void decode_payload(const std::vector<char> &raw, bool swapped, GridF &out) {
  const T *src = reinterpret_cast<const T *>(raw.data());
  for (std::int64_t i = 0; i < out.array().size(); ++i) {
    T v;
    std::memcpy(&v, src + i, sizeof(T));
    if (swapped)
      v = bswap(v);
    out[i] = float(v);
  }
}

Nifti1Header make_header(const Dims3 &d, const std::array<float, 3> &voxel,
                         std::int16_t datatype, std::int16_t bitpix,
                         const Nifti1Header *orient) {
  Nifti1Header h{};
  h.sizeof_hdr = 348;
  h.regular = 'r';
  h.dim[0] = 3;
  h.dim[1] = std::int16_t(d.x);
  h.dim[2] = std::int16_t(d.y);
  h.dim[3] = std::int16_t(d.z);
  for (int i = 4; i < 8; ++i)
    h.dim[i] = 1;
  h.datatype = datatype;
  h.bitpix = bitpix;
  h.pixdim[0] = 1;
  h.pixdim[1] = voxel[0];
  h.pixdim[2] = voxel[1];
  h.pixdim[3] = voxel[2];
  h.vox_offset = 352;
  h.scl_slope = 1;
  h.scl_inter = 0;
  h.xyzt_units = 2; // millimetres
  std::strncpy(h.descrip, "tumseg", sizeof(h.descrip) - 1);
  if (orient) {
    h.qform_code = orient->qform_code;
    h.sform_code = orient->sform_code;
    h.quatern_b = orient->quatern_b;
    h.quatern_c = orient->quatern_c;
    h.quatern_d = orient->quatern_d;
    h.qoffset_x = orient->qoffset_x;
    h.qoffset_y = orient->qoffset_y;
    h.qoffset_z = orient->qoffset_z;
    std::memcpy(h.srow_x, orient->srow_x, sizeof(h.srow_x));
    std::memcpy(h.srow_y, orient->srow_y, sizeof(h.srow_y));
    std::memcpy(h.srow_z, orient->srow_z, sizeof(h.srow_z));
  }
  std::memcpy(h.magic, "n+1", 4);
  return h;
}

void write_volume(const std::string &path, const Nifti1Header &h,
                  const char *payload, std::size_t bytes) {
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw IoFailure("cannot open " + path + " for writing");
  os.write(reinterpret_cast<const char *>(&h), sizeof(h));
  const char pad[4] = {0, 0, 0, 0}; // empty extension block
  os.write(pad, sizeof(pad));
  os.write(payload, std::streamsize(bytes));
  if (!os)
    throw IoFailure("write failed: " + path);
}

} // namespace

NiftiVolume nifti_read(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw IoFailure("cannot open " + path);
  Nifti1Header h{};
  if (!is.read(reinterpret_cast<char *>(&h), sizeof(h)))
    throw TruncatedFile(path);

  bool swapped = false;
  if (h.dim[0] < 1 || h.dim[0] > 7) {
    swap_header(h);
    swapped = true;
    if (h.dim[0] < 1 || h.dim[0] > 7)
      throw BadMagic(path + ": dim[0] invalid in either byte order");
  }
  if (std::memcmp(h.magic, "n+1", 4) != 0)
    throw BadMagic(path);
  if (h.sizeof_hdr != 348)
    throw BadMagic(path + ": sizeof_hdr != 348");

  Dims3 dims{h.dim[0] >= 1 ? h.dim[1] : 1, h.dim[0] >= 2 ? h.dim[2] : 1,
             h.dim[0] >= 3 ? h.dim[3] : 1};
  std::int64_t trailing = 1;
  for (int i = 4; i <= h.dim[0]; ++i)
    trailing *= std::max<std::int16_t>(h.dim[i], 1);
  if (trailing != 1)
    throw UnsupportedDatatype(path + ": multi-volume files not supported");

  int elem = 0;
  switch (h.datatype) {
  case kNiftiUint8:
    elem = 1;
    break;
  case kNiftiInt16:
    elem = 2;
    break;
  case kNiftiFloat32:
    elem = 4;
    break;
  default:
    throw UnsupportedDatatype(path + ": datatype " +
                              std::to_string(h.datatype));
  }

  NiftiVolume vol;
  vol.header = h;
  vol.voxel_mm = {h.pixdim[1] > 0 ? h.pixdim[1] : 1.f,
                  h.pixdim[2] > 0 ? h.pixdim[2] : 1.f,
                  h.pixdim[3] > 0 ? h.pixdim[3] : 1.f};
  vol.data = GridF(dims);

  const std::int64_t offset =
      std::max<std::int64_t>(std::int64_t(h.vox_offset), 348);
  is.seekg(offset, std::ios::beg);
  std::vector<char> raw(std::size_t(dims.count()) * elem);
  if (!is.read(raw.data(), std::streamsize(raw.size())))
    throw TruncatedFile(path);

  switch (h.datatype) {
  case kNiftiUint8:
    decode_payload<std::uint8_t>(raw, false, vol.data);
    break;
  case kNiftiInt16:
    decode_payload<std::int16_t>(raw, swapped, vol.data);
    break;
  case kNiftiFloat32:
    decode_payload<float>(raw, swapped, vol.data);
    break;
  }
  if (h.scl_slope != 0 && !(h.scl_slope == 1 && h.scl_inter == 0))
    vol.data.array() = vol.data.array() * h.scl_slope + h.scl_inter;
  return vol;
}

void nifti_write(const std::string &path, const GridF &g,
                 const std::array<float, 3> &voxel_mm,
                 const Nifti1Header *orient) {
  Nifti1Header h = make_header(g.dims(), voxel_mm, kNiftiFloat32, 32, orient);
  write_volume(path, h, reinterpret_cast<const char *>(g.data()),
               std::size_t(g.dims().count()) * sizeof(float));
}

void nifti_write(const std::string &path, const GridU8 &g,
                 const std::array<float, 3> &voxel_mm,
                 const Nifti1Header *orient) {
  Nifti1Header h = make_header(g.dims(), voxel_mm, kNiftiUint8, 8, orient);
  write_volume(path, h, reinterpret_cast<const char *>(g.data()),
               std::size_t(g.dims().count()));
}

GridU8 to_label_grid(const GridF &g) {
  GridU8 out(g.dims());
  for (std::int64_t i = 0; i < g.array().size(); ++i) {
    const float v = g[i];
    const float r = std::round(v);
    if (r < 0 || r > 255 || std::abs(v - r) > 1e-3f)
      throw UnknownLabel(int(r), i);
    out[i] = std::uint8_t(r);
  }
  return out;
}

} // namespace tumseg

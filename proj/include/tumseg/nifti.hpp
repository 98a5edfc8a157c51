#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "tumseg/grid.hpp"

namespace tumseg {

/// NIfTI-1 header, 348 bytes, field layout per the published standard.
/// x86 natural alignment already matches the on-disk layout.
struct Nifti1Header {
  std::int32_t sizeof_hdr;
  char data_type[10];
  char db_name[18];
  std::int32_t extents;
  std::int16_t session_error;
  char regular;
  char dim_info;
  std::int16_t dim[8];
  float intent_p1, intent_p2, intent_p3;
  std::int16_t intent_code;
  std::int16_t datatype;
  std::int16_t bitpix;
  std::int16_t slice_start;
  float pixdim[8];
  float vox_offset;
  float scl_slope;
  float scl_inter;
  std::int16_t slice_end;
  char slice_code;
  char xyzt_units;
  float cal_max, cal_min;
  float slice_duration, toffset;
  std::int32_t glmax, glmin;
  char descrip[80];
  char aux_file[24];
  std::int16_t qform_code, sform_code;
  float quatern_b, quatern_c, quatern_d;
  float qoffset_x, qoffset_y, qoffset_z;
  float srow_x[4], srow_y[4], srow_z[4];
  char intent_name[16];
  char magic[4];
};
static_assert(sizeof(Nifti1Header) == 348, "header layout must be packed");

inline constexpr std::int16_t kNiftiUint8 = 2;
inline constexpr std::int16_t kNiftiInt16 = 4;
inline constexpr std::int16_t kNiftiFloat32 = 16;

struct NiftiVolume {
  GridF data; // scl_slope/scl_inter already applied
  std::array<float, 3> voxel_mm{1, 1, 1};
  Nifti1Header header{}; // native-endian copy; orientation kept, not used
};

/// Reads a single-file NIfTI-1 volume (magic "n+1"). Handles uint8, int16
/// and float32 payloads; byte order is detected via dim[0] in [1,7].
NiftiVolume nifti_read(const std::string &path);

/// Writes a float32 single-file NIfTI-1 volume. When orient is given its
/// qform/sform block is carried over verbatim.
void nifti_write(const std::string &path, const GridF &g,
                 const std::array<float, 3> &voxel_mm,
                 const Nifti1Header *orient = nullptr);

/// Same, uint8 payload (label maps, written in the external encoding).
void nifti_write(const std::string &path, const GridU8 &g,
                 const std::array<float, 3> &voxel_mm,
                 const Nifti1Header *orient = nullptr);

/// Rounds a float volume to uint8 labels, rejecting values outside [0,255]
/// or farther than 1e-3 from an integer.
GridU8 to_label_grid(const GridF &g);

} // namespace tumseg

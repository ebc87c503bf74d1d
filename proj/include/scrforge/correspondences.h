#pragma once

#include <vector>

#include "scrforge/geometry.h"
#include "scrforge/p3p.h"
#include "scrforge/scm_io.h"

namespace scrforge {

// Full-resolution map: one correspondence per valid grid cell (i, j), read
// from pixel (stride * i + stride / 2, stride * j + stride / 2). The pixel
// coordinate of the correspondence is that pixel's center, index + 0.5.
// Throws InvalidArgument for stride < 1.
std::vector<Correspondence> SampleCorrespondences(const SceneCoordMap& map,
                                                  int stride = 8);

// Map predicted on a coarse grid: cell (i, j) stands for image pixel
// (cell_stride * i + cell_stride / 2, ...) and is matched at that pixel's
// center, the same pixel a full-resolution map sampled with this stride uses.
std::vector<Correspondence> GridCorrespondences(const SceneCoordMap& grid,
                                                int cell_stride = 8);

// Chooses between the two readings for a map paired with `intr`: a map of the
// image size is sampled with `stride`; a smaller map is read as a grid whose
// cell size is intr.width / map.width. Throws InvalidArgument when the sizes
// do not fit either reading.
std::vector<Correspondence> CorrespondencesForImage(
    const SceneCoordMap& map, const CameraIntrinsics& intr, int stride = 8);

}  // namespace scrforge

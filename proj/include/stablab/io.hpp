#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "stablab/grid.hpp"
#include "stablab/sde_lab.hpp"
#include "stablab/zvonkin.hpp"

namespace stablab::io {

// Field dump: little-endian header (u32 dim, u64 points_per_axis, f64 box
// length, u32 components) followed by components * n^dim row-major float64
// values. Real part only; fields must be real to 1e-8.
void write_field(const std::string& path, const GridField& f);
GridField read_field(const std::string& path);

// CSV of a scalar field: 1-D rows "x,value"; 2-D rows "x,y,value"; 3-D dumps
// the z = 0 slice.
void write_field_csv(const std::string& path, const GridField& f);

// Trajectory dump: header (u32 dim, u64 rows) + rows of (t, X_1..X_dim).
void write_trajectory(const std::string& path, const PathRecord& rec, int dim);

// Generic CSV writer with fixed 17-digit formatting (byte-reproducible).
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

// Zvonkin transform: <prefix>.json metadata plus one field dump per frame.
void write_transform(const std::string& prefix, const ZvonkinTransform& tr);

} // namespace stablab::io

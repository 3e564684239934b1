#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "robsim/grid.hpp"

namespace robsim {

/// One ROBFIELD record: an ASCII header line
///   ROBFIELD v1 name=<tag> nx=<int> ny=<int> nz=<int> time=<float>\n
/// followed by nx*ny*nz raw little-endian 64-bit floats in index order
/// idx = (k*ny + j)*nx + i. 2-D fields use nz=1.
struct FieldRecord {
    std::string name;
    int nx = 0, ny = 0, nz = 1;
    double time = 0.0;
    std::vector<double> values;
};

void write_record(std::ostream& os, const FieldRecord& rec);
FieldRecord read_record(std::istream& is);
bool peek_record(std::istream& is); // true if another record header follows

/// Velocity snapshots store u1 and u2 as two consecutive records in one file.
void write_velocity_snapshot(const std::string& path, const VelocityField& v, double time);
std::pair<VelocityField, double> read_velocity_snapshot(const std::string& path,
                                                        const DomainSpec& dom);

void write_scalar_snapshot(const std::string& path, const ScalarField3D& f, double time);
std::pair<ScalarField3D, double> read_scalar_snapshot(const std::string& path,
                                                      const DomainSpec& dom);

/// Write `contents` to `path` atomically (temp file + rename).
void atomic_write_file(const std::string& path, const std::string& contents);

/// Format a double the way every robsim text format does (shortest
/// round-trippable decimal via %.17g).
std::string format_double(double v);

} // namespace robsim

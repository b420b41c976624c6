#pragma once

// Grid files: a short text header terminated by a line "end", followed by a
// row-major little-endian float64 payload (components interleaved per cell).
//
//   regladder-grid 1
//   dim 2
//   shape 64 64
//   box 0 1 0 1
//   components 1
//   dtype float64
//   end
//
// Atom files: CSV with a header row naming the columns x[,y[,z]],w[,wy,wz][,delta].

#include <filesystem>
#include <iosfwd>

#include "regladder/field.hpp"

namespace regladder::io {

void write_grid(std::ostream& out, const GridField& f);
void write_grid(const std::filesystem::path& path, const GridField& f);
GridField read_grid(std::istream& in);
GridField read_grid(const std::filesystem::path& path);

void write_atoms(std::ostream& out, const AtomicMeasure& mu);
void write_atoms(const std::filesystem::path& path, const AtomicMeasure& mu);
/// The domain is taken from `domain`; a `delta` column, when present, must be
/// constant and becomes the blob radius.
AtomicMeasure read_atoms(std::istream& in, const Domain& domain);
AtomicMeasure read_atoms(const std::filesystem::path& path, const Domain& domain);

}  // namespace regladder::io

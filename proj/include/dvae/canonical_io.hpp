#pragma once

#include <string>

#include "dvae/scenario.hpp"

namespace dvae {

// Canonical scenario file, text based and diffable:
//   DVAE-SCN v1 O=<O> P=<P> N=<N> dt=<dt>
//   #scenario <id> label=<LL|KL|LR|?>
//   <O lines of 2+4N comma-separated reals>   observation rows
//   <P lines of 2 comma-separated reals>      future rows
// Reals use the shortest round-trip representation, so write/load/write is
// byte-identical.

void write_canonical(const Dataset& ds, const std::string& path);

// Loads and validates against the supplied grid; dimension or value errors
// carry the offending line (and column where applicable).
Dataset load_canonical(const std::string& path, const TimeGrid& grid);

// Convenience loader that takes the grid from the file header.
Dataset load_canonical_any(const std::string& path);

}  // namespace dvae

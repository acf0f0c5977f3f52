#pragma once

#include "smallball/grid.hpp"
#include "smallball/report.hpp"

namespace smallball {

/// Spherically symmetric decreasing rearrangement of a grid density.
///
/// The output is a permutation of the input cell values: values sorted in
/// decreasing order (stable on ties) are dealt out to cells in order of
/// increasing cell-center distance from the origin (ties by row-major
/// index). Superlevel sets therefore keep their cell counts exactly, and every
/// superlevel set of the output is a union of the cells nearest the origin.
/// The grid must be origin-centered.
GridDensity symmetric_decreasing_rearrangement(const GridDensity& f);

/// Checks that g could be the rearrangement of f:
///   (a) within each equidistant shell g is non-increasing in row-major order,
///   (b) g is non-increasing from one shell to the next,
///   (c) f and g have identical superlevel cell counts at every threshold.
/// lhs counts violated properties, rhs = 0, zero budget.
VerificationReport verify_rearrangement_properties(const GridDensity& f, const GridDensity& g);

}  // namespace smallball

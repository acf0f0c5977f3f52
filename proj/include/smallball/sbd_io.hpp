#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "smallball/coefficients.hpp"
#include "smallball/grid.hpp"
#include "smallball/piecewise.hpp"

// Text formats.
//
// SBD v1 (densities and masks):
//   sbd 1 density|mask
//   <d>
//   <lo> <hi> <count>        (one line per axis)
//   <values...>              (row-major, last axis fastest; 0/1 for masks)
//
// Coefficient matrix:  "k n" then k rows of n reals.
// Piecewise polynomial: number of pieces, then "lo hi c0 c1 ... ck" per piece,
// coefficients in t = x - lo.
//
// Writers emit reals with 17 significant digits, so doubles round-trip exactly.

namespace smallball {

enum class SbdKind { density, mask };

SbdKind peek_sbd_kind(std::istream& in);
GridDensity read_density(std::istream& in);
RegionMask read_mask(std::istream& in);
void write_density(std::ostream& out, const GridDensity& f);
void write_mask(std::ostream& out, const RegionMask& s);

CoefficientMatrix read_coefficients(std::istream& in);
void write_coefficients(std::ostream& out, const CoefficientMatrix& a);

PiecewisePolynomial read_piecewise(std::istream& in);
void write_piecewise(std::ostream& out, const PiecewisePolynomial& p);

/// "%.17g" formatting.
std::string format_real(double x);

GridDensity load_density(const std::filesystem::path& path);
RegionMask load_mask(const std::filesystem::path& path);
CoefficientMatrix load_coefficients(const std::filesystem::path& path);

/// Write via a temporary sibling file and rename into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace smallball

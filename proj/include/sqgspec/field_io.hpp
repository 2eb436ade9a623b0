// SPDX-License-Identifier: Apache-2.0
#pragma once

// Field snapshot file: one line of JSON metadata terminated by '\n', followed
// by rows×cols little-endian IEEE-754 binary64 coefficients in row-major order.
//
//   {"format":"sqgspec-field","version":1,"L1":...,"L2":...,"M1":..,"M2":..,
//    "N1":..,"N2":..,"parity":"SS","shape":[r,c],"scalar":"f64","layout":"row-major"}

#include <filesystem>
#include <iosfwd>

#include "sqgspec/domain.hpp"

namespace sqgspec {

void write_field(std::ostream& os, const SpectralField& f);
SpectralField read_field(std::istream& is);

void save_field(const std::filesystem::path& path, const SpectralField& f);
/// Throws PathError if the file cannot be opened, FormatError on malformed contents.
SpectralField load_field(const std::filesystem::path& path);

}  // namespace sqgspec

// SPDX-License-Identifier: Apache-2.0
#include "sqgspec/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "sqgspec/error.hpp"

namespace sqgspec {

namespace {

constexpr const char* kFormat = "sqgspec-field";

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    v = ((v & 0x00000000000000FFull) << 56) | ((v & 0x000000000000FF00ull) << 40) |
        ((v & 0x0000000000FF0000ull) << 24) | ((v & 0x00000000FF000000ull) << 8) |
        ((v & 0x000000FF00000000ull) >> 8) | ((v & 0x0000FF0000000000ull) >> 24) |
        ((v & 0x00FF000000000000ull) >> 40) | ((v & 0xFF00000000000000ull) >> 56);
  }
  return v;
}

}  // namespace

void write_field(std::ostream& os, const SpectralField& f) {
  const DomainSpec& d = f.domain();
  nlohmann::ordered_json h;
  h["format"] = kFormat;
  h["version"] = 1;
  h["L1"] = d.L1;
  h["L2"] = d.L2;
  h["M1"] = d.M1;
  h["M2"] = d.M2;
  h["N1"] = d.N1;
  h["N2"] = d.N2;
  h["parity"] = std::string(to_string(f.parity()));
  h["shape"] = {f.rows(), f.cols()};
  h["scalar"] = "f64";
  h["layout"] = "row-major";
  os << h.dump() << '\n';
  for (double v : f.coefficients()) {
    const std::uint64_t bits = to_le(std::bit_cast<std::uint64_t>(v));
    char buf[8];
    std::memcpy(buf, &bits, 8);
    os.write(buf, 8);
  }
  if (!os) throw PathError("failed writing field snapshot");
}

SpectralField read_field(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError("field snapshot: missing header line");
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("field snapshot: header is not JSON: ") + e.what());
  }
  try {
    if (h.at("format").get<std::string>() != kFormat) throw FormatError("field snapshot: wrong format tag");
    if (h.at("scalar").get<std::string>() != "f64") throw FormatError("field snapshot: scalar type must be f64");
    if (h.at("layout").get<std::string>() != "row-major") throw FormatError("field snapshot: layout must be row-major");
    DomainSpec d;
    d.L1 = h.at("L1").get<double>();
    d.L2 = h.at("L2").get<double>();
    d.M1 = h.at("M1").get<int>();
    d.M2 = h.at("M2").get<int>();
    d.N1 = h.at("N1").get<int>();
    d.N2 = h.at("N2").get<int>();
    d.validate();
    const Parity p = parse_parity(h.at("parity").get<std::string>());
    SpectralField f(d, p);
    const auto shape = h.at("shape").get<std::vector<std::size_t>>();
    if (shape.size() != 2 || shape[0] != f.rows() || shape[1] != f.cols()) {
      throw FormatError("field snapshot: shape does not match modes and parity");
    }
    for (double& v : f.coefficients()) {
      char buf[8];
      if (!is.read(buf, 8)) throw FormatError("field snapshot: truncated payload");
      std::uint64_t bits;
      std::memcpy(&bits, buf, 8);
      v = std::bit_cast<double>(to_le(bits));
    }
    if (!f.all_finite()) throw FormatError("field snapshot: non-finite coefficient");
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("field snapshot: bad header field: ") + e.what());
  } catch (const ParameterError& e) {
    throw FormatError(std::string("field snapshot: ") + e.what());
  }
}

void save_field(const std::filesystem::path& path, const SpectralField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw PathError("cannot open '" + path.string() + "' for writing");
  write_field(os, f);
}

SpectralField load_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw PathError("cannot open field file '" + path.string() + "'");
  return read_field(is);
}

}  // namespace sqgspec

// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sqgspec/error.hpp"
#include "sqgspec/field_io.hpp"
#include "support.hpp"

using namespace sqgspec;
using testsupport::random_field;

TEST_CASE("field snapshot round trip is bit exact") {
  const DomainSpec d{2.0, 1.0, 7, 5, 15, 11};
  for (Parity p : {Parity::SS, Parity::CS, Parity::SC, Parity::CC}) {
    const SpectralField f = random_field(d, p, 21);
    std::stringstream ss;
    write_field(ss, f);
    const SpectralField g = read_field(ss);
    CHECK(g.domain() == d);
    CHECK(g.parity() == p);
    CHECK(std::equal(f.coefficients().begin(), f.coefficients().end(), g.coefficients().begin()));
  }
}

TEST_CASE("header is a single JSON line") {
  std::stringstream ss;
  write_field(ss, SpectralField::eigenfunction(DomainSpec{}, 1, 1));
  std::string header;
  std::getline(ss, header);
  CHECK(header.find("\"format\":\"sqgspec-field\"") != std::string::npos);
  CHECK(header.find("\"parity\":\"SS\"") != std::string::npos);
}

TEST_CASE("malformed snapshots raise FormatError") {
  const SpectralField f = random_field(DomainSpec{}, Parity::SS, 2);
  std::stringstream good;
  write_field(good, f);
  const std::string bytes = good.str();

  std::stringstream truncated(bytes.substr(0, bytes.size() - 5));
  CHECK_THROWS_AS(read_field(truncated), FormatError);

  std::stringstream empty;
  CHECK_THROWS_AS(read_field(empty), FormatError);

  std::stringstream not_json("hello\n");
  CHECK_THROWS_AS(read_field(not_json), FormatError);

  std::string wrong = bytes;
  wrong.replace(wrong.find("sqgspec-field"), 13, "other-field!!");
  std::stringstream wrong_tag(wrong);
  CHECK_THROWS_AS(read_field(wrong_tag), FormatError);

  std::string shape = bytes;
  shape.replace(shape.find("\"shape\":[16,16]"), 15, "\"shape\":[16,15]");
  std::stringstream bad_shape(shape);
  CHECK_THROWS_AS(read_field(bad_shape), FormatError);
}

TEST_CASE("file helpers report unreadable paths") {
  CHECK_THROWS_AS(load_field("/nonexistent/dir/x.field"), PathError);
  CHECK_THROWS_AS(save_field("/nonexistent/dir/x.field", SpectralField(DomainSpec{}, Parity::SS)), PathError);
  const auto path = std::filesystem::temp_directory_path() / "sqgspec_unit_roundtrip.field";
  const SpectralField f = random_field(DomainSpec{}, Parity::SS, 3);
  save_field(path, f);
  const SpectralField g = load_field(path);
  CHECK(testsupport::max_abs_diff(f, g) == 0.0);
  std::filesystem::remove(path);
}

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "colfield/detector.hpp"

namespace colfield {

// Binary 16-bit PGM: "P5", width, height, maxval 65535, big-endian samples.
// Row 0 is the top of the viewport. Covered texels quantize as
// round(d * 65535), uncovered ones take the field's clear value.
void write_height_field_pgm(const HeightField &field, std::ostream &out);
void dump_height_field(const HeightField &field, const std::string &path);

struct PgmImage {
    int width = 0;
    int height = 0;
    int maxval = 0;
    std::vector<std::uint16_t> samples;  // row-major, row 0 first
};

PgmImage read_pgm(std::istream &in);
PgmImage read_pgm_file(const std::string &path);

}  // namespace colfield

#include "colfield/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace colfield {

namespace {

std::uint16_t quantize(double d) {
    const long v = std::lround(d * 65535.0);  // half away from zero
    return static_cast<std::uint16_t>(std::clamp(v, 0l, 65535l));
}

// skips whitespace and '#' comment lines between header fields
int next_header_int(std::istream &in) {
    for (;;) {
        const int c = in.peek();
        if (c == '#') {
            std::string dummy;
            std::getline(in, dummy);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            break;
        }
    }
    int value = 0;
    if (!(in >> value)) throw std::runtime_error("pgm: malformed header");
    return value;
}

}  // namespace

void write_height_field_pgm(const HeightField &field, std::ostream &out) {
    const int w = field.targets.width, h = field.targets.height;
    out << "P5\n" << w << " " << h << "\n65535\n";
    const std::uint16_t clear = quantize(field.targets.clear_depth);
    std::vector<unsigned char> row(static_cast<std::size_t>(w) * 2);
    for (int j = 0; j < h; ++j) {
        for (int i = 0; i < w; ++i) {
            const std::size_t idx = field.targets.index(i, j);
            const std::uint16_t v =
                field.targets.coverage[idx] ? quantize(field.targets.depth[idx]) : clear;
            row[2 * i] = static_cast<unsigned char>(v >> 8);  // big-endian
            row[2 * i + 1] = static_cast<unsigned char>(v & 0xff);
        }
        out.write(reinterpret_cast<const char *>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!out) throw std::runtime_error("pgm: write failed");
}

void dump_height_field(const HeightField &field, const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("pgm: cannot open " + path);
    write_height_field_pgm(field, out);
}

PgmImage read_pgm(std::istream &in) {
    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (m0 != 'P' || m1 != '5') throw std::runtime_error("pgm: not a binary PGM");
    PgmImage img;
    img.width = next_header_int(in);
    img.height = next_header_int(in);
    img.maxval = next_header_int(in);
    if (img.width < 1 || img.height < 1 || img.maxval < 1 || img.maxval > 65535)
        throw std::runtime_error("pgm: bad dimensions or maxval");
    in.get();  // the single whitespace byte before the samples

    const std::size_t count = static_cast<std::size_t>(img.width) * img.height;
    img.samples.resize(count);
    if (img.maxval < 256) {
        std::vector<unsigned char> raw(count);
        in.read(reinterpret_cast<char *>(raw.data()), static_cast<std::streamsize>(count));
        if (!in) throw std::runtime_error("pgm: truncated samples");
        for (std::size_t i = 0; i < count; ++i) img.samples[i] = raw[i];
    } else {
        std::vector<unsigned char> raw(count * 2);
        in.read(reinterpret_cast<char *>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (!in) throw std::runtime_error("pgm: truncated samples");
        for (std::size_t i = 0; i < count; ++i)
            img.samples[i] = static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
    }
    return img;
}

PgmImage read_pgm_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("pgm: cannot open " + path);
    return read_pgm(in);
}

}  // namespace colfield

#ifndef FACEBENCH_FILTER_LUT_HPP
#define FACEBENCH_FILTER_LUT_HPP

#include <array>
#include <string>
#include <vector>

#include "facebench/imaging/image.hpp"

namespace facebench::filter {

// Dense 3D color lookup table: maps an RGB cube sampled at size^3 lattice
// points to output RGB. Entry layout: ((b*size + g)*size + r)*3 + channel,
// red index moving fastest.
struct Lut3d {
    int size = 0;
    std::vector<float> data;

    std::size_t entry(int r, int g, int b) const {
        return ((static_cast<std::size_t>(b) * size + g) * size + r) * 3;
    }

    // Lattice whose value equals its own coordinate; applying it reproduces
    // the input up to interpolation rounding.
    static Lut3d neutral(int size);
};

// Binary single-file format with a magic header; lattice stored as float32
// little-endian in entry order.
Lut3d load_lut(const std::string& path);
void save_lut(const Lut3d& lut, const std::string& path);

// Trilinear interpolation of the lattice at every pixel. Dimensions preserved;
// the mapping is the same for every pixel position.
Image apply_lut(const Image& img, const Lut3d& lut);

// Evaluate the lattice at one RGB point (the same arithmetic apply_lut uses).
std::array<float, 3> sample_lut(const Lut3d& lut, float r, float g, float b);

} // namespace facebench::filter

#endif

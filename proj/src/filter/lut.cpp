#include <algorithm>
#include <cstring>
#include <fstream>

#include "facebench/core/error.hpp"
#include "facebench/filter/lut.hpp"

namespace facebench::filter {

namespace {

constexpr char kMagic[8] = {'F', 'B', 'L', 'U', 'T', '3', 'D', '\n'};

} // namespace

Lut3d Lut3d::neutral(int size) {
    if (size < 2) throw ContractViolation("lut size must be >= 2");
    Lut3d lut;
    lut.size = size;
    lut.data.resize(static_cast<std::size_t>(size) * size * size * 3);
    const float step = 1.0f / static_cast<float>(size - 1);
    for (int b = 0; b < size; ++b) {
        for (int g = 0; g < size; ++g) {
            for (int r = 0; r < size; ++r) {
                const std::size_t at = lut.entry(r, g, b);
                lut.data[at + 0] = r * step;
                lut.data[at + 1] = g * step;
                lut.data[at + 2] = b * step;
            }
        }
    }
    return lut;
}

Lut3d load_lut(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open lut file: " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0) {
        throw IoError("lut file " + path + " has a bad magic header");
    }
    std::uint32_t size = 0;
    in.read(reinterpret_cast<char*>(&size), 4);
    if (!in || size < 2 || size > 256) {
        throw IoError("lut file " + path + " has an invalid lattice size");
    }
    Lut3d lut;
    lut.size = static_cast<int>(size);
    lut.data.resize(static_cast<std::size_t>(size) * size * size * 3);
    in.read(reinterpret_cast<char*>(lut.data.data()),
            static_cast<std::streamsize>(lut.data.size() * sizeof(float)));
    if (!in) throw IoError("lut file " + path + " is truncated");
    return lut;
}

void save_lut(const Lut3d& lut, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open lut file for writing: " + path);
    out.write(kMagic, 8);
    const std::uint32_t size = static_cast<std::uint32_t>(lut.size);
    out.write(reinterpret_cast<const char*>(&size), 4);
    out.write(reinterpret_cast<const char*>(lut.data.data()),
              static_cast<std::streamsize>(lut.data.size() * sizeof(float)));
    if (!out) throw IoError("failed writing lut file: " + path);
}

std::array<float, 3> sample_lut(const Lut3d& lut, float r, float g, float b) {
    const int n = lut.size;
    const float scale = static_cast<float>(n - 1);
    const float fr = std::min(1.0f, std::max(0.0f, r)) * scale;
    const float fg = std::min(1.0f, std::max(0.0f, g)) * scale;
    const float fb = std::min(1.0f, std::max(0.0f, b)) * scale;
    const int r0 = std::min(static_cast<int>(fr), n - 2);
    const int g0 = std::min(static_cast<int>(fg), n - 2);
    const int b0 = std::min(static_cast<int>(fb), n - 2);
    const float tr = fr - r0;
    const float tg = fg - g0;
    const float tb = fb - b0;

    std::array<float, 3> out{};
    for (int c = 0; c < 3; ++c) {
        float planes[2];
        for (int db = 0; db < 2; ++db) {
            const float c00 = lut.data[lut.entry(r0, g0, b0 + db) + c];
            const float c10 = lut.data[lut.entry(r0 + 1, g0, b0 + db) + c];
            const float c01 = lut.data[lut.entry(r0, g0 + 1, b0 + db) + c];
            const float c11 = lut.data[lut.entry(r0 + 1, g0 + 1, b0 + db) + c];
            const float e0 = c00 + tr * (c10 - c00);
            const float e1 = c01 + tr * (c11 - c01);
            planes[db] = e0 + tg * (e1 - e0);
        }
        out[c] = planes[0] + tb * (planes[1] - planes[0]);
    }
    return out;
}

Image apply_lut(const Image& img, const Lut3d& lut) {
    if (lut.size < 2) throw ContractViolation("apply_lut: lut is not initialized");
    Image out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const std::array<float, 3> v =
                sample_lut(lut, img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2));
            out.at(x, y, 0) = v[0];
            out.at(x, y, 1) = v[1];
            out.at(x, y, 2) = v[2];
        }
    }
    return out;
}

} // namespace facebench::filter

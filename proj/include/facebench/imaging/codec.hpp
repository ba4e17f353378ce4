#ifndef FACEBENCH_IMAGING_CODEC_HPP
#define FACEBENCH_IMAGING_CODEC_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "facebench/imaging/image.hpp"

namespace facebench {

// RGBA decode target for overlay assets; alpha is a separate plane.
struct RgbaImage {
    Image rgb;
    std::vector<float> alpha; // width*height, [0,1]
};

// Sniffs PNG vs JPEG from the stream signature; 8-bit values map to [0,1] by
// division by 255, grayscale replicates to 3 channels. Malformed streams throw
// DecodeError.
Image decode_image(const std::vector<std::uint8_t>& bytes);

// Like decode_image but preserves a PNG alpha channel (1.0 when absent).
RgbaImage decode_image_rgba(const std::vector<std::uint8_t>& bytes);

std::vector<std::uint8_t> encode_png(const Image& img);
std::vector<std::uint8_t> encode_png_rgba(const Image& img, const std::vector<float>& alpha);

// Quality fixed at 95, no chroma subsampling; emitted corpora stay within the
// documented round-trip error bound.
std::vector<std::uint8_t> encode_jpeg(const Image& img, int quality = 95);

Image load_image(const std::string& path);
RgbaImage load_image_rgba(const std::string& path);
void save_png(const Image& img, const std::string& path);
void save_jpeg(const Image& img, const std::string& path, int quality = 95);

std::vector<std::uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes);

} // namespace facebench

#endif

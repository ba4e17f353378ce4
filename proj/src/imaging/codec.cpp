#include "facebench/imaging/codec.hpp"

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <jpeglib.h>
#include <png.h>

#include "facebench/core/error.hpp"

namespace facebench {

namespace {

struct PngMemReader {
    const std::uint8_t* data;
    std::size_t size;
    std::size_t pos;
};

void png_mem_read(png_structp png, png_bytep out, png_size_t count) {
    auto* r = static_cast<PngMemReader*>(png_get_io_ptr(png));
    if (r->pos + count > r->size)
        png_error(png, "read past end of stream");
    std::memcpy(out, r->data + r->pos, count);
    r->pos += count;
}

void png_mem_write(png_structp png, png_bytep data, png_size_t count) {
    auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + count);
}

void png_mem_flush(png_structp) {}

// Decodes PNG into interleaved 8-bit RGBA rows.
void decode_png_rows(const std::vector<std::uint8_t>& bytes, int& w, int& h,
                     std::vector<std::uint8_t>& rgba) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw DecodeError("png: failed to allocate read struct");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw DecodeError("png: failed to allocate info struct");
    }
    PngMemReader reader{bytes.data(), bytes.size(), 0};
    if (setjmp(png_jmpbuf(png))) {
        const std::size_t at = reader.pos;
        png_destroy_read_struct(&png, &info, nullptr);
        throw DecodeError("png: corrupt stream near byte " + std::to_string(at));
    }
    png_set_read_fn(png, &reader, png_mem_read);
    png_read_info(png, info);

    png_set_expand(png);            // palette -> rgb, bit depths < 8 -> 8
    png_set_strip_16(png);          // 16-bit -> 8-bit
    png_set_gray_to_rgb(png);
    png_set_add_alpha(png, 0xFF, PNG_FILLER_AFTER);
    png_read_update_info(png, info);

    w = static_cast<int>(png_get_image_width(png, info));
    h = static_cast<int>(png_get_image_height(png, info));
    rgba.assign(static_cast<std::size_t>(w) * h * 4, 0);
    std::vector<png_bytep> rows(h);
    for (int y = 0; y < h; ++y)
        rows[y] = rgba.data() + static_cast<std::size_t>(y) * w * 4;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
}

struct JpegErrorMgr {
    jpeg_error_mgr pub;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

void decode_jpeg_rows(const std::vector<std::uint8_t>& bytes, int& w, int& h,
                      std::vector<std::uint8_t>& rgb) {
    jpeg_decompress_struct cinfo;
    JpegErrorMgr jerr;
    cinfo.err = jpeg_std_error(&jerr.pub);
    jerr.pub.error_exit = jpeg_error_exit;
    if (setjmp(jerr.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw DecodeError(std::string("jpeg: ") + jerr.message);
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);
    w = static_cast<int>(cinfo.output_width);
    h = static_cast<int>(cinfo.output_height);
    rgb.assign(static_cast<std::size_t>(w) * h * 3, 0);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = rgb.data() + static_cast<std::size_t>(cinfo.output_scanline) * w * 3;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
}

bool looks_like_png(const std::vector<std::uint8_t>& bytes) {
    static const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
    return bytes.size() >= 8 && std::memcmp(bytes.data(), sig, 8) == 0;
}

bool looks_like_jpeg(const std::vector<std::uint8_t>& bytes) {
    return bytes.size() >= 2 && bytes[0] == 0xFF && bytes[1] == 0xD8;
}

} // namespace

RgbaImage decode_image_rgba(const std::vector<std::uint8_t>& bytes) {
    if (bytes.empty()) throw DecodeError("empty stream");
    RgbaImage out;
    if (looks_like_png(bytes)) {
        int w = 0, h = 0;
        std::vector<std::uint8_t> rgba;
        decode_png_rows(bytes, w, h, rgba);
        out.rgb = Image(w, h);
        out.alpha.assign(static_cast<std::size_t>(w) * h, 1.0f);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const std::uint8_t* px = rgba.data() + (static_cast<std::size_t>(y) * w + x) * 4;
                out.rgb.at(x, y, 0) = Image::dequantize(px[0]);
                out.rgb.at(x, y, 1) = Image::dequantize(px[1]);
                out.rgb.at(x, y, 2) = Image::dequantize(px[2]);
                out.alpha[static_cast<std::size_t>(y) * w + x] = Image::dequantize(px[3]);
            }
        }
        return out;
    }
    if (looks_like_jpeg(bytes)) {
        int w = 0, h = 0;
        std::vector<std::uint8_t> rgb;
        decode_jpeg_rows(bytes, w, h, rgb);
        out.rgb = Image(w, h);
        out.alpha.assign(static_cast<std::size_t>(w) * h, 1.0f);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const std::uint8_t* px = rgb.data() + (static_cast<std::size_t>(y) * w + x) * 3;
                out.rgb.at(x, y, 0) = Image::dequantize(px[0]);
                out.rgb.at(x, y, 1) = Image::dequantize(px[1]);
                out.rgb.at(x, y, 2) = Image::dequantize(px[2]);
            }
        }
        return out;
    }
    throw DecodeError("stream is neither PNG nor JPEG (bad signature at byte 0)");
}

Image decode_image(const std::vector<std::uint8_t>& bytes) {
    return decode_image_rgba(bytes).rgb;
}

std::vector<std::uint8_t> encode_png_rgba(const Image& img, const std::vector<float>& alpha) {
    const bool with_alpha = !alpha.empty();
    if (with_alpha && alpha.size() != static_cast<std::size_t>(img.width()) * img.height())
        throw ContractViolation("encode_png_rgba: alpha plane size mismatch");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png: failed to allocate write struct");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("png: failed to allocate info struct");
    }
    std::vector<std::uint8_t> out;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("png: encode failed");
    }
    png_set_write_fn(png, &out, png_mem_write, png_mem_flush);
    const int color = with_alpha ? PNG_COLOR_TYPE_RGBA : PNG_COLOR_TYPE_RGB;
    png_set_IHDR(png, info, img.width(), img.height(), 8, color, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    const int stride = with_alpha ? 4 : 3;
    std::vector<std::uint8_t> rowbuf(static_cast<std::size_t>(img.width()) * stride);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            rowbuf[x * stride + 0] = Image::quantize(img.at(x, y, 0));
            rowbuf[x * stride + 1] = Image::quantize(img.at(x, y, 1));
            rowbuf[x * stride + 2] = Image::quantize(img.at(x, y, 2));
            if (with_alpha) {
                const float a = alpha[static_cast<std::size_t>(y) * img.width() + x];
                rowbuf[x * stride + 3] =
                    static_cast<std::uint8_t>(std::lround(std::min(1.0f, std::max(0.0f, a)) * 255.0f));
            }
        }
        png_write_row(png, rowbuf.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

std::vector<std::uint8_t> encode_png(const Image& img) {
    return encode_png_rgba(img, {});
}

std::vector<std::uint8_t> encode_jpeg(const Image& img, int quality) {
    jpeg_compress_struct cinfo;
    JpegErrorMgr jerr;
    cinfo.err = jpeg_std_error(&jerr.pub);
    jerr.pub.error_exit = jpeg_error_exit;

    unsigned char* buf = nullptr;
    unsigned long buf_size = 0;
    if (setjmp(jerr.jump)) {
        jpeg_destroy_compress(&cinfo);
        if (buf) free(buf);
        throw IoError(std::string("jpeg: ") + jerr.message);
    }
    jpeg_create_compress(&cinfo);
    jpeg_mem_dest(&cinfo, &buf, &buf_size);
    cinfo.image_width = img.width();
    cinfo.image_height = img.height();
    cinfo.input_components = 3;
    cinfo.in_color_space = JCS_RGB;
    jpeg_set_defaults(&cinfo);
    // Store RGB planes directly instead of converting to YCbCr: the color
    // transform plus chroma quantization costs several 8-bit steps per pixel
    // on small images, and emitted corpora are decoded by this codec anyway.
    jpeg_set_colorspace(&cinfo, JCS_RGB);
    jpeg_set_quality(&cinfo, quality, TRUE);
    for (int i = 0; i < cinfo.num_components; ++i) {
        cinfo.comp_info[i].h_samp_factor = 1;
        cinfo.comp_info[i].v_samp_factor = 1;
    }
    jpeg_start_compress(&cinfo, TRUE);
    std::vector<std::uint8_t> rowbuf(static_cast<std::size_t>(img.width()) * 3);
    while (cinfo.next_scanline < cinfo.image_height) {
        const int y = static_cast<int>(cinfo.next_scanline);
        for (int x = 0; x < img.width(); ++x) {
            rowbuf[x * 3 + 0] = Image::quantize(img.at(x, y, 0));
            rowbuf[x * 3 + 1] = Image::quantize(img.at(x, y, 1));
            rowbuf[x * 3 + 2] = Image::quantize(img.at(x, y, 2));
        }
        JSAMPROW row = rowbuf.data();
        jpeg_write_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_compress(&cinfo);
    std::vector<std::uint8_t> out(buf, buf + buf_size);
    jpeg_destroy_compress(&cinfo);
    free(buf);
    return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                     std::istreambuf_iterator<char>());
}

void write_file_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write file: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write: " + path);
}

Image load_image(const std::string& path) {
    return decode_image(read_file_bytes(path));
}

RgbaImage load_image_rgba(const std::string& path) {
    return decode_image_rgba(read_file_bytes(path));
}

void save_png(const Image& img, const std::string& path) {
    write_file_bytes(path, encode_png(img));
}

void save_jpeg(const Image& img, const std::string& path, int quality) {
    write_file_bytes(path, encode_jpeg(img, quality));
}

} // namespace facebench
